"""Deterministic geometric kernels.

Simplex volumes, sphere centers through the origin, orthogonal-complement
projections, origin-in-hull tests and the pointy-vertex predicate, plus the
two-ball union-volume lower bound and its Monte Carlo oracle.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._kernel_py import HULL_TOL, PIVOT_TOL, solve_batch
from .constants import unit_ball_volume, validate_dim
from .errors import (ConditionViolated, DimensionMismatch, NotUnit,
                     SingularConfiguration, ZeroVertex)
from .estimators import MCEstimate
from .sampling import rng_stream


def _solve(A, b):
    x, ok = solve_batch(A[None], b[None], PIVOT_TOL)
    if not ok[0]:
        raise SingularConfiguration("pivot ratio below threshold")
    return x[0]


def simplex_volume(points):
    """Volume of the simplex spanned by d+1 points of R^d: |det|/d!.

    Degenerate (affinely dependent) inputs return 0.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] != pts.shape[1] + 1:
        raise DimensionMismatch(f"need d+1 points of R^d, got shape {pts.shape}")
    d = pts.shape[1]
    return abs(float(np.linalg.det(pts[1:] - pts[0]))) / math.factorial(d)


def circumcenter_with_origin(nuclei):
    """Center of the sphere through the origin and the d given points.

    Solves <x_i, c> = |x_i|^2 / 2; raises SingularConfiguration when the
    relative pivot drops below 1e-10 (affinely degenerate configuration).
    """
    pts = np.asarray(nuclei, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] != pts.shape[1]:
        raise DimensionMismatch(f"need d points of R^d, got shape {pts.shape}")
    b = 0.5 * np.einsum("ij,ij->i", pts, pts)
    return _solve(pts, b)


def project_onto_complement(u0, v):
    """Orthogonal projection of v onto the hyperplane orthogonal to unit u0."""
    u0 = np.asarray(u0, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u0.shape != v.shape:
        raise DimensionMismatch("u0 and v must have the same dimension")
    if abs(np.linalg.norm(u0) - 1.0) > 1e-12:
        raise NotUnit("u0 must be a unit vector (1e-12)")
    return v - np.dot(v, u0) * u0


def origin_in_hull_detail(points, normal=None):
    """(inside, degenerate) for the origin vs the hull of d points in a hyperplane.

    The d points must lie in a common (d-1)-dimensional linear subspace with
    unit normal `normal` (computed from the points when omitted). Solves the
    square barycentric system (P + u 1^T) lam = u: the component along u pins
    sum(lam) = 1 and the complement pins sum(lam_i p_i) = 0. Inside means
    every lam_i > 1e-12; within-tolerance and singular cases report
    degenerate=True and inside=False.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] != pts.shape[1]:
        raise DimensionMismatch(f"need d points of R^d, got shape {pts.shape}")
    d = pts.shape[0]
    if normal is None:
        _, s, vt = np.linalg.svd(pts)
        if s[0] == 0.0 or (d > 2 and s[-2] < 1e-10 * s[0]):
            return False, True
        normal = vt[-1]
    u = np.asarray(normal, dtype=np.float64)
    M = pts.T + u[:, None]
    lam, ok = solve_batch(M[None], u[None], PIVOT_TOL)
    if not ok[0]:
        return False, True
    lam = lam[0]
    if (np.abs(lam) <= HULL_TOL).any():
        return False, True
    return bool((lam > HULL_TOL).all()), False


def origin_in_hull(points, normal=None):
    """True iff 0 lies strictly inside the relative interior of the hull."""
    inside, _ = origin_in_hull_detail(points, normal)
    return inside


def is_pointy_detail(c, nuclei):
    """(pointy, degenerate) classification of a vertex c with defining nuclei."""
    c = np.asarray(c, dtype=np.float64)
    pts = np.asarray(nuclei, dtype=np.float64)
    cn = np.linalg.norm(c)
    if cn < 1e-12:
        raise ZeroVertex("vertex is at the origin")
    if pts.ndim != 2 or pts.shape[0] != pts.shape[1] or pts.shape[1] != c.size:
        raise DimensionMismatch(f"need d nuclei of R^d matching c, got {pts.shape}")
    diff = pts - c
    norms = np.linalg.norm(diff, axis=1)
    if (norms < 1e-12).any():
        raise ZeroVertex("a nucleus coincides with the vertex")
    u0 = c / cn
    u = diff / norms[:, None]
    proj = u - (u @ u0)[:, None] * u0
    return origin_in_hull_detail(proj, normal=u0)


def is_pointy(c, nuclei):
    """True iff the vertex locally maximizes the distance to the nucleus.

    Projects the unit vectors from the vertex towards its defining nuclei onto
    the complement of the outward direction and tests origin containment.
    """
    pointy, _ = is_pointy_detail(c, nuclei)
    return pointy


@dataclass(frozen=True)
class BallPairConfig:
    """Two balls with both boundaries through a common point, r <= r_prime."""

    r: float
    r_prime: float
    delta: float

    def __post_init__(self):
        if not (self.r > 0):
            raise ValueError("r must be > 0")
        if self.r_prime < self.r:
            raise ValueError("need r <= r_prime")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.delta > self.r + self.r_prime:
            raise ValueError("delta > r + r_prime: boundaries cannot share a point")


def union_ball_volume_lower_bound(cfg, d):
    """Lower bound for the volume of the union of the two balls.

    kappa_d r^d / 2 + kappa_d r'^d / 2 + kappa_{d-1} r^{d-1} delta / (2d),
    valid when delta^2 >= r'^2 - r^2 (the small sphere exceeds the big ball
    by at least a hemisphere).
    """
    validate_dim(d)
    r, rp, delta = cfg.r, cfg.r_prime, cfg.delta
    if delta * delta < rp * rp - r * r:
        raise ConditionViolated("need delta^2 >= r_prime^2 - r^2")
    kd = unit_ball_volume(d)
    kdm1 = math.exp(0.5 * (d - 1) * math.log(math.pi) - math.lgamma(0.5 * (d - 1) + 1))
    return 0.5 * kd * r**d + 0.5 * kd * rp**d + kdm1 * r ** (d - 1) * delta / (2.0 * d)


def mc_union_ball_volume(center1, r, center2, r_prime, model, n, seed):
    """Monte Carlo measure of the union of two balls under `model`.

    Uniform rejection sampling in the tight axis-aligned bounding box with the
    radial-power weight; the Lebesgue volume is the alpha = 0 case.
    """
    c1 = np.asarray(center1, dtype=np.float64)
    c2 = np.asarray(center2, dtype=np.float64)
    if c1.shape != c2.shape or c1.ndim != 1:
        raise DimensionMismatch("centers must be 1-d arrays of equal length")
    d = c1.size
    model.validate(d)
    if r <= 0 or r_prime <= 0 or n < 1:
        raise ValueError("need r, r_prime > 0 and n >= 1")
    lo = np.minimum(c1 - r, c2 - r_prime)
    hi = np.maximum(c1 + r, c2 + r_prime)
    vol_box = float(np.prod(hi - lo))
    g = rng_stream(seed, 0).generator
    x = lo + g.random((int(n), d)) * (hi - lo)
    in_union = (((x - c1) ** 2).sum(axis=1) <= r * r) | (
        ((x - c2) ** 2).sum(axis=1) <= r_prime * r_prime)
    if model.alpha == 0.0:
        w = in_union.astype(np.float64) * vol_box
    else:
        nrm = np.linalg.norm(x, axis=1)
        w = np.where(in_union & (nrm > 0), nrm, 1.0) ** model.alpha
        w *= in_union * vol_box
    mean = float(w.mean())
    se = float(w.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return MCEstimate(mean=mean, std_error=se, reps=int(n),
                      master_seed=int(seed), degenerate_count=0)
