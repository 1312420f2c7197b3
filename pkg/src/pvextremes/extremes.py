"""Box experiment: far-vertex distances of every cell in a large box.

Per replicate, a homogeneous Poisson sample fills [-buffer, n+buffer]^d and
the far-vertex distance D(x) is computed for every nucleus x in [0, n]^d by
translating x to the origin and running the certified cell kernel against
neighbors within a growing query radius. The replicate maxima feed the Gumbel
normalization and the block-maximum extremal-index estimator.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .constants import (expected_pointy_count, extremal_norm_constants,
                        unit_ball_volume, validate_dim)
from .errors import BadRho, BufferTooSmall, ThresholdOutOfRange
from .estimators import MCEstimate, _blocks, _run_blocks
from .sampling import IntensityModel, fence_directions, initial_radius, rng_stream

BOX_BLOCK = 4
GROWTH = 1.5
BUFFER_MISS_TARGET = 1e-3  # calibration: rho * E#V(buffer/2) at this level
_RETRY_STRIDE = 1 << 48    # stream index offset per resample attempt
_MAX_ATTEMPTS = 8


def default_buffer(d, n, target=BUFFER_MISS_TARGET):
    """Smallest buffer b with n^d * expected_pointy_count(d, 0, b/2) <= target."""
    validate_dim(d)
    rho = float(n) ** d
    lo, hi = 0.0, 2.0
    while rho * expected_pointy_count(d, 0.0, hi / 2.0) > target:
        hi *= 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if rho * expected_pointy_count(d, 0.0, mid / 2.0) > target:
            lo = mid
        else:
            hi = mid
    return hi


def default_threshold(d, rho, level=1.0):
    """Threshold u with rho * expected_pointy_count(d, 0, u) = level."""
    validate_dim(d)
    lo, hi = 0.0, 2.0
    while rho * expected_pointy_count(d, 0.0, hi) > level:
        hi *= 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if rho * expected_pointy_count(d, 0.0, mid) > level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ExtremeRunConfig:
    d: int
    n: float
    buffer: float
    reps: int
    seed: int = 0

    def __post_init__(self):
        validate_dim(self.d)
        if self.n <= 0 or self.reps < 1:
            raise ValueError("need n > 0 and reps >= 1")
        if self.buffer <= 0:
            raise ValueError("buffer must be > 0")
        rho = float(self.n) ** self.d
        miss = rho * expected_pointy_count(self.d, 0.0, self.buffer / 2.0)
        if miss > 10 * BUFFER_MISS_TARGET:
            raise ValueError(
                f"buffer too small: rho*E#V(buffer/2) = {miss:.2g} "
                f"(calibrate with default_buffer)")

    @property
    def rho(self):
        return float(self.n) ** self.d


@dataclass
class ExtremeReport:
    maxima: np.ndarray
    rho: float
    normalized: np.ndarray          # under the alpha1 constant
    theta_hat: MCEstimate
    ks_gumbel: float
    nucleus_counts: np.ndarray = field(default=None)
    flagged_replicates: int = 0
    threshold_u: float = float("nan")
    config: ExtremeRunConfig = field(default=None)


def _box_block(args):
    seed, start, stop, d, n_side, buffer = args
    fence = fence_directions(d)
    r0 = initial_radius(d, IntensityModel.homogeneous())
    lo = -buffer
    hi = n_side + buffer
    vol = (hi - lo) ** d
    maxima, counts = [], []
    flags = 0
    for r in range(start, stop):
        for attempt in range(_MAX_ATTEMPTS):
            g = rng_stream(seed, r + attempt * _RETRY_STRIDE).generator
            npts = int(g.poisson(vol))
            pts = lo + g.random((npts, d)) * (hi - lo)
            max_d, ncnt, ok, _ = kernel.box_replicate_maxima(
                pts, n_side, buffer, r0, GROWTH, fence)
            if ok:
                break
            flags += 1
        else:
            raise BufferTooSmall(
                f"replicate {r} failed certification {_MAX_ATTEMPTS} times")
        maxima.append(max_d)
        counts.append(ncnt)
    return maxima, counts, flags


def nucleus_distance(points, index, n_side, buffer):
    """Certified far-vertex distance of one nucleus of a box realization.

    Same growth rule as the replicate kernel, exposed for diagnostics and
    cross-checks against in-place cell constructions. Returns nan when the
    nucleus cannot be certified within its available radius.
    """
    pts = np.asarray(points, dtype=np.float64)
    d = pts.shape[1]
    x = pts[index]
    fence = fence_directions(d)
    r0 = initial_radius(d, IntensityModel.homogeneous())
    rel = pts - x
    dist2 = np.einsum("ij,ij->i", rel, rel)
    dist2[index] = np.inf
    avail = buffer + float(np.minimum(x, n_side - x).min())
    radius = min(r0, avail)
    while True:
        local = np.vstack([rel[dist2 <= radius * radius], (2.0 * radius) * fence])
        verts, _, _, nsk, _ = kernel.cell_vertices(local, d * radius * (1.0 + 1e-9))
        if nsk == 0 and len(verts) >= d + 1:
            vmax = float(np.linalg.norm(verts, axis=1).max())
            if vmax < 0.5 * radius:
                return vmax
        if radius >= avail:
            return math.nan
        radius = min(radius * GROWTH, avail)


def run_box_experiment(cfg, workers=1):
    """Per-replicate maxima of D(x) over nuclei in the box, with diagnostics.

    Replicates that fail edge certification are resampled from a fresh stream
    and flagged; more than 1% flagged raises BufferTooSmall. Results are
    bit-identical for any worker count.
    """
    tasks = [(cfg.seed, s0, s1, cfg.d, float(cfg.n), float(cfg.buffer))
             for _, s0, s1 in _blocks(cfg.reps, BOX_BLOCK)]
    maxima, counts = [], []
    flags = 0
    for mx, ct, fl in _run_blocks(_box_block, tasks, workers):
        maxima.extend(mx)
        counts.extend(ct)
        flags += fl
    if flags > 0.01 * cfg.reps:
        raise BufferTooSmall(f"{flags}/{cfg.reps} replicates failed certification")
    maxima = np.asarray(maxima)
    rho = cfg.rho
    normalized = gumbel_normalize(maxima, cfg.d, rho, "alpha1")
    ks = ks_distance(normalized, lambda t: np.exp(-np.exp(-t)))
    u = default_threshold(cfg.d, rho)
    try:
        theta = extremal_index_from_maxima(maxima, rho, u, cfg.d, cfg.seed)
    except ThresholdOutOfRange:
        theta = None
    return ExtremeReport(
        maxima=maxima, rho=rho, normalized=normalized, theta_hat=theta,
        ks_gumbel=ks, nucleus_counts=np.asarray(counts, dtype=np.int64),
        flagged_replicates=flags, threshold_u=u, config=cfg)


def gumbel_normalize(maxima, d, rho, which_const="alpha1"):
    """kappa_d M^d - log(c rho (log rho)^{d-1}) with c = alpha1 or alpha1'.

    Under alpha1 the limit law of the normalized maxima is exp(-exp(-t));
    under alpha1' it is exp(-theta exp(-t)).
    """
    validate_dim(d)
    rho = float(rho)
    if rho <= math.e:
        raise BadRho("need rho > e so that log(rho) > 1")
    a1, a1p, _ = extremal_norm_constants(d)
    c = {"alpha1": a1, "alpha1_prime": a1p}.get(which_const)
    if c is None:
        raise ValueError(f"which_const must be alpha1 or alpha1_prime, got {which_const!r}")
    m = np.asarray(maxima, dtype=np.float64)
    return unit_ball_volume(d) * m**d - math.log(c * rho * math.log(rho) ** (d - 1))


def extremal_index_from_maxima(maxima, rho, u, d, seed=0):
    """Block-maximum estimator: theta = -log P(M <= u) / (rho E#V(u)).

    Uses the exact expected-count formula as the marginal tail proxy; the
    standard error is propagated from the binomial error of P(M <= u).
    """
    m = np.asarray(maxima, dtype=np.float64)
    lam = float(rho) * expected_pointy_count(d, 0.0, u)
    if not 0.2 <= lam <= 5.0:
        raise ThresholdOutOfRange(
            f"rho*E#V(u) = {lam:.3g} outside [0.2, 5]; pick u near "
            f"default_threshold(d, rho)")
    p = float((m <= u).mean())
    if p <= 0.0 or p >= 1.0:
        raise ThresholdOutOfRange(f"empirical P(M <= u) = {p} is degenerate")
    theta = -math.log(p) / lam
    se = math.sqrt(p * (1.0 - p) / m.size) / (p * lam)
    return MCEstimate(mean=theta, std_error=se, reps=int(m.size),
                      master_seed=int(seed), degenerate_count=0)


def estimate_extremal_index(report, u, d):
    seed = report.config.seed if report.config is not None else 0
    return extremal_index_from_maxima(report.maxima, report.rho, u, d, seed)


def iid_control_maxima(d, rho, reps, seed=0):
    """Maxima of i.i.d. sequences with marginal tail equal to the exact E#V.

    The box maximum of an independent sequence with tail q has CDF
    exp(-rho q(t)); sampling M = q^{-1}(E/rho) with E ~ Exp(1) realizes it
    (E#V is strictly decreasing, inverted by bisection). The block-maximum
    estimator applied to these maxima targets theta = 1.
    """
    validate_dim(d)
    g = rng_stream(seed, 0).generator
    e = g.exponential(size=int(reps))
    q = e / float(rho)
    q0 = expected_pointy_count(d, 0.0, 0.0)
    out = np.zeros(int(reps))
    todo = q < q0
    if todo.any():
        hi = 2.0
        while expected_pointy_count(d, 0.0, hi) > q[todo].min():
            hi *= 2.0
        lo_v = np.zeros(int(todo.sum()))
        hi_v = np.full(int(todo.sum()), hi)
        target = q[todo]
        for _ in range(80):
            mid = 0.5 * (lo_v + hi_v)
            val = np.array([expected_pointy_count(d, 0.0, t) for t in mid])
            high = val > target
            lo_v = np.where(high, mid, lo_v)
            hi_v = np.where(high, hi_v, mid)
        out[todo] = 0.5 * (lo_v + hi_v)
    return out


def ks_distance(sample, cdf):
    """Sup distance between the empirical CDF of `sample` and `cdf`."""
    s = np.sort(np.asarray(sample, dtype=np.float64))
    n = s.size
    if n == 0:
        raise ValueError("sample must be nonempty")
    try:
        f = np.asarray(cdf(s), dtype=np.float64)
        if f.shape != s.shape:
            raise TypeError
    except TypeError:
        f = np.array([float(cdf(v)) for v in s])
    i = np.arange(1, n + 1)
    return float(max((i / n - f).max(), (f - (i - 1) / n).max()))
