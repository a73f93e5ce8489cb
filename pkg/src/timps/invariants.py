"""Topological invariants of tensor families on discretized 2-cycles.

The connection is discretized on mesh edges: the link variable of a directed
edge u -> v is the unit-modulus phase of the leading eigenvalue of the mixed
core transfer map (core at u on the left).  Plaquette curvature is the
argument of the oriented product of link variables; because every geometric
edge of a closed mesh is shared by two plaquettes with opposite orientation,
the total curvature is an exact integer multiple of 2*pi up to roundoff.

Conventions: plaquettes are outward-oriented; vertex phase changes move
individual links but never a plaquette product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import NonIntegerTotalError, RankMismatchError, VanishingOverlapError
from .families import Mesh2, make_sphere_mesh, boundary_generator_family
from .tensors import MpsTensor, canonical_decompose, mixed_transfer_leading

__all__ = [
    "OVERLAP_FLOOR",
    "BRANCH_CUT_MARGIN",
    "LinkField",
    "CurvatureField",
    "link_variable",
    "link_field",
    "curvature_report",
    "chern_number",
    "pump_boundary_chern",
]

OVERLAP_FLOOR = 1e-8
BRANCH_CUT_MARGIN = 0.1


def _unit_phase(value: complex) -> complex:
    mod = abs(value)
    if mod < OVERLAP_FLOOR:
        raise VanishingOverlapError(
            f"leading overlap modulus {mod:.3e} below {OVERLAP_FLOOR:.1e}; "
            "states nearly orthogonal (mesh too coarse)"
        )
    return value / mod


def link_variable(
    A_u: MpsTensor,
    A_v: MpsTensor,
    eps_rank: float = DEFAULT_TOLS.eps_rank,
    tols: Tolerances = DEFAULT_TOLS,
) -> complex:
    """Unit-modulus link variable of the directed edge u -> v.

    Computed from the canonical cores of the two tensors; their essential
    ranks must agree.
    """
    dec_u = canonical_decompose(A_u, eps_rank, tols)
    dec_v = canonical_decompose(A_v, eps_rank, tols)
    if dec_u.chi != dec_v.chi:
        raise RankMismatchError(
            f"essential ranks differ along the edge: {dec_u.chi} vs {dec_v.chi}"
        )
    return _unit_phase(mixed_transfer_leading(dec_u.K, dec_v.K))


@dataclass(frozen=True, eq=False)
class LinkField:
    """Link variables on the undirected edges of a mesh; the reverse of a
    stored direction is the complex conjugate, exactly."""

    links: dict

    def link(self, u: int, v: int) -> complex:
        if u == v:
            return 1.0 + 0.0j
        if (u, v) in self.links:
            return self.links[(u, v)]
        return np.conj(self.links[(v, u)])


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """Per-plaquette curvature in (-pi, pi] plus the 2*pi-normalized total.

    ``flagged`` lists plaquettes whose curvature sits within the branch-cut
    margin of +-pi; an integer total is only trustworthy without flags.
    """

    plaquette_ids: np.ndarray
    theta_lo: np.ndarray
    phi_lo: np.ndarray
    curvature: np.ndarray
    total: float
    flagged: tuple

    @property
    def total_flux(self) -> float:
        return float(self.curvature.sum())


def _vertex_cores(family, mesh: Mesh2, eps_rank: float, tols: Tolerances):
    cores = []
    chi = None
    for vertex in mesh.vertices:
        dec = canonical_decompose(family.eval_vertex(vertex), eps_rank, tols)
        if chi is None:
            chi = dec.chi
        elif dec.chi != chi:
            raise RankMismatchError(
                f"family does not have constant essential rank on the mesh: "
                f"{chi} vs {dec.chi} at vertex {vertex.index}"
            )
        cores.append(dec.K)
    return cores


def link_field(
    family,
    mesh: Mesh2,
    eps_rank: float = DEFAULT_TOLS.eps_rank,
    tols: Tolerances = DEFAULT_TOLS,
) -> LinkField:
    """Evaluate the family once per vertex and the link variable once per
    undirected edge of the plaquette list."""
    cores = _vertex_cores(family, mesh, eps_rank, tols)
    links: dict = {}
    for plaquette in mesh.plaquettes:
        for a in range(4):
            u, v = int(plaquette[a]), int(plaquette[(a + 1) % 4])
            if u == v or (u, v) in links or (v, u) in links:
                continue
            links[(u, v)] = _unit_phase(mixed_transfer_leading(cores[u], cores[v]))
    return LinkField(links=links)


def curvature_report(
    family,
    mesh: Mesh2,
    eps_rank: float = DEFAULT_TOLS.eps_rank,
    tols: Tolerances = DEFAULT_TOLS,
) -> CurvatureField:
    """Plaquette-resolved curvature of the family's connection on the mesh."""
    field = link_field(family, mesh, eps_rank, tols)
    n = mesh.n_plaquettes
    curvature = np.zeros(n)
    flagged = []
    for p in range(n):
        quad = mesh.plaquettes[p]
        holonomy = 1.0 + 0.0j
        for a in range(4):
            holonomy *= field.link(int(quad[a]), int(quad[(a + 1) % 4]))
        curvature[p] = float(np.angle(holonomy))
        if abs(curvature[p]) > np.pi - BRANCH_CUT_MARGIN:
            flagged.append(p)
    total = float(curvature.sum() / (2.0 * np.pi))
    return CurvatureField(
        plaquette_ids=np.arange(n),
        theta_lo=mesh.cell_theta_lo,
        phi_lo=mesh.cell_phi_lo,
        curvature=curvature,
        total=total,
        flagged=tuple(flagged),
    )


def chern_number(
    family,
    mesh: Mesh2,
    eps_rank: float = DEFAULT_TOLS.eps_rank,
    tols: Tolerances = DEFAULT_TOLS,
    residual_cap: float = 1e-3,
) -> int:
    """Total plaquette curvature divided by 2*pi, rounded to the nearest
    integer; the rounding residual must stay below ``residual_cap``."""
    report = curvature_report(family, mesh, eps_rank, tols)
    nearest = round(report.total)
    residual = abs(report.total - nearest)
    if residual >= residual_cap:
        raise NonIntegerTotalError(
            f"total curvature {report.total!r} is {residual:.3e} from an "
            "integer (mesh too coarse or a rank jump crossed the cycle)"
        )
    return int(nearest)


def pump_boundary_chern(
    n_theta: int,
    n_phi: int,
    eps_rank: float = DEFAULT_TOLS.eps_rank,
    tols: Tolerances = DEFAULT_TOLS,
) -> int:
    """Chern number of the pump's boundary family on the 2-sphere.

    This is the connecting-map witness of the pump's 3-sphere invariant: the
    boundary of the ball lift is the product family of the projectivized
    first rotation column, and its plaquette total must be the generator
    value +1 with the outward orientation convention.
    """
    if n_theta < 8 or n_phi < 8:
        raise ValueError("boundary mesh must be at least 8 x 8")
    mesh = make_sphere_mesh(n_theta, n_phi)
    return chern_number(boundary_generator_family(), mesh, eps_rank, tols)
