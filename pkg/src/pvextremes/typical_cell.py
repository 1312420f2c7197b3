"""Construction of the Voronoi cell of the origin and its pointy vertices.

Certified stopping rule
-----------------------
Points are known exactly inside a sampled ball B_R. To certify that the cell
w.r.t. the *full* process equals the cell w.r.t. the known points, d+1 virtual
"fence" generators are appended at radius 2R in regular-simplex directions and
the fenced cell F is enumerated. F is always bounded and F is a subset of the
provisional cell C'. If every vertex of F has norm < R/2 then C' has no point
of norm > R/2 (any such point yields, by convexity, a point of F of norm
exactly R/2), hence C' lies in the closed ball of radius R/2; a generator
outside B_R has its bisector at distance > R/2 from the origin and cannot cut
C', so the true cell equals C' = F. A fence generator sits at distance 2R, so
it can neither block nor define any vertex of norm < R: a certified cell is
fence-free and exact.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .errors import DegenerateCell, NegativeThreshold, RadiusCapExceeded
from .sampling import (IntensityModel, fence_directions, initial_radius,
                       poisson_annulus)


@dataclass(frozen=True)
class Vertex:
    """A cell vertex: location, defining generator indices, norm, pointy flag."""

    location: np.ndarray
    nucleus_indices: tuple
    norm: float
    pointy: bool


@dataclass
class TypicalCell:
    generators: np.ndarray
    vertices: list
    max_vertex_distance: float
    sampled_radius: float
    model: IntensityModel
    seed_label: tuple = field(default=None)

    def pointy_norms(self):
        return np.array([v.norm for v in self.vertices if v.pointy])

    def to_json_dict(self):
        """Dump schema: generators, vertices (location/indices/pointy), D, radius, seed."""
        return {
            "generators": self.generators.tolist(),
            "vertices": [
                {
                    "location": v.location.tolist(),
                    "nucleus_indices": list(v.nucleus_indices),
                    "pointy": bool(v.pointy),
                }
                for v in self.vertices
            ],
            "D": self.max_vertex_distance,
            "sampled_radius": self.sampled_radius,
            "seed": list(self.seed_label) if self.seed_label is not None else None,
        }


def _vertex_list(verts, index, pointy):
    out = []
    for loc, idx, p in zip(verts, index, pointy):
        out.append(Vertex(location=loc.copy(), nucleus_indices=tuple(int(i) for i in idx),
                          norm=float(np.linalg.norm(loc)), pointy=bool(p)))
    return out


def enumerate_vertices(generators, norm_bound):
    """All cell vertices of the origin with norm <= norm_bound.

    Iterates over d-subsets of generators within 2*norm_bound (exact pruning),
    solves for the sphere center through the origin and keeps centers whose
    open ball contains no generator. Singular subsets are skipped, never fatal.
    """
    pts = np.asarray(generators, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError("generators must be an (n, d) array")
    norms = np.linalg.norm(pts, axis=1)
    if (norms == 0.0).any():
        raise ValueError("generators must not contain the origin")
    verts, index, pointy, _, _ = kernel.cell_vertices(pts, float(norm_bound))
    return _vertex_list(verts, index, pointy)


def build_typical_cell(d, model, rng, max_radius_factor=64.0):
    """Sample the typical cell of `model` from the stream `rng`, certified.

    Points are sampled in annuli of doubling radius starting from the radius
    whose ball holds 2^d expected points; the build stops once every vertex of
    the fenced cell lies within half the sampled radius (see module docstring).
    Earlier annuli are retained, so the final configuration is an exact
    Poisson sample of the final ball.

    Raises RadiusCapExceeded past max_radius_factor * R0 and DegenerateCell
    when the certified pass skipped a singular subset or hit a boundary hull
    classification.
    """
    model.validate(d)
    r0 = initial_radius(d, model)
    max_radius = max_radius_factor * r0
    fence = fence_directions(d)
    pts = poisson_annulus(d, model, 0.0, r0, rng)
    radius = r0
    while True:
        local = np.vstack([pts.reshape(-1, d), (2.0 * radius) * fence])
        verts, index, pointy, n_skip, n_bnd = kernel.cell_vertices(
            local, d * radius * (1.0 + 1e-9))
        if len(verts) >= d + 1:
            vmax = float(np.linalg.norm(verts, axis=1).max())
            if vmax < 0.5 * radius:
                if n_skip or n_bnd:
                    raise DegenerateCell(
                        f"certified pass had {n_skip} singular / {n_bnd} boundary events")
                # certified: no vertex can involve a fence generator
                assert index.size == 0 or index.max() < len(pts)
                seed_label = (rng.master_seed, rng.replicate_index) if hasattr(
                    rng, "master_seed") else None
                return TypicalCell(
                    generators=pts,
                    vertices=_vertex_list(verts, index, pointy),
                    max_vertex_distance=vmax,
                    sampled_radius=radius,
                    model=model,
                    seed_label=seed_label,
                )
        if 2.0 * radius > max_radius:
            raise RadiusCapExceeded(f"needed radius beyond {max_radius:.3g}")
        pts = np.vstack([pts, poisson_annulus(d, model, radius, 2.0 * radius, rng)])
        radius *= 2.0


def count_pointy_at_least(cell, t):
    """Number of pointy vertices at distance >= t from the nucleus."""
    if t < 0:
        raise NegativeThreshold(f"t must be >= 0, got {t}")
    return int(sum(1 for v in cell.vertices if v.pointy and v.norm >= t))


def count_pointy_pairs_at_least(cell, t):
    """Unordered distinct pairs of far pointy vertices: k(k-1)/2.

    Unordered convention; the ordered-pairs count would be twice this.
    """
    k = count_pointy_at_least(cell, t)
    return k * (k - 1) // 2


def certified_radius_invariant(cell):
    """The stopping-rule postcondition: 2 * D <= sampled radius."""
    return 2.0 * cell.max_vertex_distance <= cell.sampled_radius
