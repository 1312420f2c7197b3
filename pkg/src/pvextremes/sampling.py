"""Reproducible random sources.

Every stream is keyed by (master_seed, replicate_index) through a counter-based
Philox generator, so replicate results are a pure function of the pair and
independent of scheduling. No global RNG state exists anywhere in the package.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import unit_ball_volume, validate_alpha, validate_dim
from .errors import AlphaOutOfRange, BadBox, EmptyAnnulus

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class IntensityModel:
    """Homogeneous or radial-power intensity ||x||^alpha dx (alpha=0: Lebesgue)."""

    kind: str = "homogeneous"
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("homogeneous", "radial_power"):
            raise ValueError(f"unknown intensity kind {self.kind!r}")
        if self.kind == "homogeneous" and self.alpha != 0.0:
            raise ValueError("homogeneous intensity requires alpha = 0")

    @staticmethod
    def homogeneous():
        return IntensityModel("homogeneous", 0.0)

    @staticmethod
    def radial_power(alpha):
        a = float(alpha)
        return IntensityModel.homogeneous() if a == 0.0 else IntensityModel("radial_power", a)

    def validate(self, d):
        if self.alpha <= -d:
            raise AlphaOutOfRange(f"alpha={self.alpha} <= -d for d={d}")

    def ball_measure(self, d, radius):
        """Measure of the centered ball of the given radius: d k_d R^{d+a}/(d+a)."""
        a = validate_alpha(d, self.alpha)
        return d * unit_ball_volume(d) * radius ** (d + a) / (d + a)


@dataclass
class RngStream:
    """Counter-based stream keyed by (master_seed, replicate_index)."""

    master_seed: int
    replicate_index: int
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        key = [self.master_seed & _MASK64, self.replicate_index & _MASK64]
        self.generator = np.random.Generator(np.random.Philox(key=key))


def rng_stream(master_seed, replicate_index):
    return RngStream(int(master_seed), int(replicate_index))


def _gen(rng):
    return rng.generator if isinstance(rng, RngStream) else rng


def uniform_sphere(d, rng, size=None):
    """Uniform point(s) on the unit sphere of R^d (normalized Gaussians).

    Returns shape (d,) for size=None, else (size, d).
    """
    validate_dim(d)
    g = _gen(rng)
    n = 1 if size is None else int(size)
    x = g.standard_normal((n, d))
    nrm = np.linalg.norm(x, axis=1)
    bad = nrm == 0.0
    if bad.any():
        x[bad, 0] = 1.0
        nrm[bad] = 1.0
    x /= nrm[:, None]
    return x[0] if size is None else x


def poisson_annulus(d, model, r_in, r_out, rng):
    """Poisson sample of the annulus r_in <= ||x|| <= r_out under `model`.

    Count ~ Poisson of the annulus measure; radii by exact inverse CDF
    F(r) = (r^{d+a} - r_in^{d+a}) / (r_out^{d+a} - r_in^{d+a}).
    """
    model.validate(d)
    r_in = float(r_in)
    r_out = float(r_out)
    if r_in < 0 or r_out <= r_in:
        raise EmptyAnnulus(f"need 0 <= r_in < r_out, got [{r_in}, {r_out}]")
    g = _gen(rng)
    mean = model.ball_measure(d, r_out) - model.ball_measure(d, r_in)
    n = int(g.poisson(mean))
    if n == 0:
        return np.empty((0, d))
    p = d + model.alpha
    u = g.random(n)
    radii = (r_in**p + u * (r_out**p - r_in**p)) ** (1.0 / p)
    dirs = uniform_sphere(d, g, size=n)
    return radii[:, None] * dirs


def poisson_box(d, lo, hi, rng):
    """Homogeneous Poisson sample of the box [lo, hi] (componentwise)."""
    validate_dim(d)
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if lo.shape != (d,) or hi.shape != (d,):
        raise BadBox(f"lo/hi must have shape ({d},)")
    if not (lo < hi).all():
        raise BadBox("need lo < hi componentwise")
    g = _gen(rng)
    vol = float(np.prod(hi - lo))
    n = int(g.poisson(vol))
    return lo + g.random((n, d)) * (hi - lo)


def fence_directions(d):
    """Unit vectors to the vertices of a regular d-simplex centered at 0.

    d+1 directions with mutual inner product -1/d; used as virtual generators
    that bound a Voronoi cell in every direction.
    """
    validate_dim(d)
    e = np.eye(d + 1) - 1.0 / (d + 1)
    # orthonormal basis of the hyperplane orthogonal to (1,...,1)
    basis = np.linalg.svd(np.ones((1, d + 1)))[2][1:]
    dirs = e @ basis.T
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return dirs


def initial_radius(d, model):
    """Radius whose ball holds 2^d expected points: solves m(B_R) = 2^d."""
    model.validate(d)
    p = d + model.alpha
    return ((d + model.alpha) * 2.0**d / (d * unit_ball_volume(d))) ** (1.0 / p)
