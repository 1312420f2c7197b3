"""Monte Carlo drivers with standard errors.

Replicates are placed in fixed-size blocks whose boundaries depend only on the
replicate count, never on the worker count; per-block partial statistics are
merged in block order, so every estimate is bit-identical for any number of
workers. Cell-based estimators draw one stream per replicate; the cheap
sphere-simplex estimators draw one stream per block and vectorize inside it.
"""

import math
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernel_py import HULL_TOL, solve_batch
from .constants import (expected_pointy_count, tail_asymptotic, unit_ball_volume,
                        validate_alpha, validate_dim)
from .errors import DegenerateCell, RadiusCapExceeded
from .sampling import IntensityModel, rng_stream
from .typical_cell import build_typical_cell

SIMPLEX_BLOCK = 8192
CELL_BLOCK = 512
DEGENERACY_BUDGET = 1e-3  # run fails when degenerate replicates exceed this rate


@dataclass(frozen=True)
class MCEstimate:
    """Mean, standard error and bookkeeping of one Monte Carlo run."""

    mean: float
    std_error: float
    reps: int
    master_seed: int
    degenerate_count: int = 0

    def within(self, target, n_se=3.0):
        return abs(self.mean - target) <= n_se * self.std_error


@dataclass
class TailReport:
    """Tail-probability table over a threshold grid (shared cell ensemble)."""

    t_grid: list
    empirical_prob: list
    exact_expected_count: list
    pair_count: list
    asymptotic: list


# ---------------------------------------------------------------------------
# streaming accumulation: (n, mean, M2) triples, merged in block order


def welford_update(acc, x):
    n, mean, m2 = acc
    n += 1
    delta = x - mean
    mean += delta / n
    m2 += delta * (x - mean)
    return (n, mean, m2)


def merge_triples(a, b):
    n1, m1, s1 = a
    n2, m2, s2 = b
    if n2 == 0:
        return a
    if n1 == 0:
        return b
    n = n1 + n2
    delta = m2 - m1
    return (n, m1 + delta * n2 / n, s1 + s2 + delta * delta * n1 * n2 / n)


def triple_of(values):
    n = values.size
    if n == 0:
        return (0, 0.0, 0.0)
    mean = float(values.mean())
    return (n, mean, float(((values - mean) ** 2).sum()))


def _estimate(triple, reps, seed, ndeg):
    n, mean, m2 = triple
    if n > 1:
        se = math.sqrt(m2 / (n - 1) / n)
    else:
        se = math.inf
    if reps > 0 and ndeg / reps > DEGENERACY_BUDGET:
        raise DegenerateCell(f"{ndeg}/{reps} degenerate replicates exceeds budget")
    return MCEstimate(mean=mean, std_error=se, reps=reps, master_seed=seed,
                      degenerate_count=ndeg)


def _blocks(reps, block):
    return [(b, start, min(start + block, reps))
            for b, start in enumerate(range(0, reps, block))]


def _run_blocks(fn, tasks, workers):
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    ctx = multiprocessing.get_context("fork")
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as ex:
        return list(ex.map(fn, tasks, chunksize=chunk))


# ---------------------------------------------------------------------------
# sphere-simplex estimators (vectorized per block)


def _sphere_sample(g, n, d):
    x = g.standard_normal((n, d))
    nrm = np.linalg.norm(x, axis=1)
    bad = nrm == 0.0
    if bad.any():
        x[bad, 0] = 1.0
        nrm[bad] = 1.0
    return x / nrm[:, None]


def _simplex_block(args):
    kind, seed, b, start, stop, d, alpha = args
    g = rng_stream(seed, b).generator
    L = stop - start
    u = _sphere_sample(g, L * (d + 1), d).reshape(L, d + 1, d)
    diffs = u[:, 1:, :] - u[:, :1, :]
    vol = np.abs(np.linalg.det(diffs)) / math.factorial(d)
    if kind == "miles":
        return triple_of(vol) + (0,)
    u0 = u[:, 0, :]
    rest = u[:, 1:, :]
    q = rest - np.einsum("nid,nd->ni", rest, u0)[:, :, None] * u0[:, None, :]
    M = q.transpose(0, 2, 1) + u0[:, :, None]
    lam, ok = solve_batch(M, u0)
    pointy = ok & (lam > HULL_TOL).all(axis=1)
    degen = ~ok | (np.abs(lam) <= HULL_TOL).any(axis=1)
    if kind == "wendel":
        vals = pointy.astype(np.float64)
    elif kind == "cd":
        vals = vol * pointy
    elif kind == "cdalpha":
        w = np.prod(np.linalg.norm(diffs, axis=2) ** alpha, axis=1)
        vals = vol * pointy * w
    else:
        raise ValueError(kind)
    return triple_of(vals[~degen]) + (int(degen.sum()),)


def _simplex_estimate(kind, d, alpha, reps, seed, workers):
    validate_dim(d)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    tasks = [(kind, seed, b, s0, s1, d, alpha)
             for b, s0, s1 in _blocks(reps, SIMPLEX_BLOCK)]
    acc, ndeg = (0, 0.0, 0.0), 0
    for out in _run_blocks(_simplex_block, tasks, workers):
        acc = merge_triples(acc, out[:3])
        ndeg += out[3]
    return _estimate(acc, reps, seed, ndeg)


def estimate_c_d(d, reps, seed=0, workers=1):
    """MC mean of simplex volume x hull indicator for d+1 sphere points."""
    return _simplex_estimate("cd", d, 0.0, reps, seed, workers)


def estimate_c_d_alpha(d, alpha, reps, seed=0, workers=1):
    """MC mean of prod ||U_i - U_0||^alpha x simplex volume x hull indicator."""
    validate_alpha(d, alpha)
    return _simplex_estimate("cdalpha", d, float(alpha), reps, seed, workers)


def estimate_wendel(d, reps, seed=0, workers=1):
    """MC probability that the projected directions capture the origin."""
    return _simplex_estimate("wendel", d, 0.0, reps, seed, workers)


def estimate_miles(d, reps, seed=0, workers=1):
    """MC mean simplex volume for d+1 uniform sphere points (no condition)."""
    return _simplex_estimate("miles", d, 0.0, reps, seed, workers)


def _kalpha_block(args):
    seed, b, start, stop, d, alpha = args
    g = rng_stream(seed, b).generator
    L = stop - start
    dirs = _sphere_sample(g, L, d)
    radii = g.random(L) ** (1.0 / d)
    x = radii[:, None] * dirs
    x[:, 0] -= 1.0  # ball adjacent to the origin, centered at -e1
    nrm = np.linalg.norm(x, axis=1)
    if alpha == 0.0:
        w = np.full(L, unit_ball_volume(d))
    else:
        w = unit_ball_volume(d) * np.where(nrm > 0, nrm, 1.0) ** alpha
    return triple_of(w) + (0,)


def estimate_k_d_alpha_mc(d, alpha, reps, seed=0, workers=1):
    """MC radial-power measure of a unit ball adjacent to the origin.

    Uniform sampling in the ball times the ||x||^alpha weight.
    """
    a = validate_alpha(d, alpha)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    tasks = [(seed, b, s0, s1, d, a) for b, s0, s1 in _blocks(reps, SIMPLEX_BLOCK)]
    acc = (0, 0.0, 0.0)
    for out in _run_blocks(_kalpha_block, tasks, workers):
        acc = merge_triples(acc, out[:3])
    return _estimate(acc, reps, seed, 0)


# ---------------------------------------------------------------------------
# cell-based estimators (one stream per replicate, shared across a t grid)


def _cell_block(args):
    seed, start, stop, d, alpha, ts = args
    model = IntensityModel.radial_power(alpha)
    accs = {t: {"count": (0, 0.0, 0.0), "ind": (0, 0.0, 0.0), "pairs": (0, 0.0, 0.0)}
            for t in ts}
    ndeg = 0
    for i in range(start, stop):
        rng = rng_stream(seed, i)
        try:
            cell = build_typical_cell(d, model, rng)
        except (DegenerateCell, RadiusCapExceeded):
            ndeg += 1
            continue
        norms = cell.pointy_norms()
        for t in ts:
            k = int((norms >= t).sum())
            a = accs[t]
            a["count"] = welford_update(a["count"], float(k))
            a["ind"] = welford_update(a["ind"], 1.0 if k >= 1 else 0.0)
            a["pairs"] = welford_update(a["pairs"], 0.5 * k * (k - 1))
    return accs, ndeg


def _run_cells(d, alpha, ts, reps, seed, workers):
    validate_alpha(d, alpha)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    for t in ts:
        if t < 0:
            raise ValueError("thresholds must be >= 0")
    tasks = [(seed, s0, s1, d, float(alpha), tuple(ts))
             for _, s0, s1 in _blocks(reps, CELL_BLOCK)]
    merged = {t: {k: (0, 0.0, 0.0) for k in ("count", "ind", "pairs")} for t in ts}
    ndeg = 0
    for accs, nd in _run_blocks(_cell_block, tasks, workers):
        ndeg += nd
        for t in ts:
            for k in merged[t]:
                merged[t][k] = merge_triples(merged[t][k], accs[t][k])
    return merged, ndeg


def estimate_pointy_count(d, alpha, t, reps, seed=0, workers=1):
    """Empirical mean number of pointy vertices at distance >= t."""
    merged, ndeg = _run_cells(d, alpha, [t], reps, seed, workers)
    return _estimate(merged[t]["count"], reps, seed, ndeg)


def estimate_pointy_counts(d, alpha, t_grid, reps, seed=0, workers=1):
    """Pointy-count means for several thresholds from one shared cell ensemble."""
    ts = [float(t) for t in t_grid]
    merged, ndeg = _run_cells(d, alpha, ts, reps, seed, workers)
    return {t: _estimate(merged[t]["count"], reps, seed, ndeg) for t in ts}


def estimate_tail(d, alpha, t_grid, reps, seed=0, workers=1):
    """Tail probabilities and pair counts over t_grid from one cell ensemble.

    For each t: the empirical probability that some pointy vertex reaches t,
    the empirical mean number of unordered far pairs, the exact expected
    count, and the leading-order tail value.
    """
    ts = [float(t) for t in t_grid]
    if ts != sorted(ts):
        raise ValueError("t_grid must be ascending")
    merged, ndeg = _run_cells(d, alpha, ts, reps, seed, workers)
    return TailReport(
        t_grid=ts,
        empirical_prob=[_estimate(merged[t]["ind"], reps, seed, ndeg) for t in ts],
        exact_expected_count=[expected_pointy_count(d, alpha, t) for t in ts],
        pair_count=[_estimate(merged[t]["pairs"], reps, seed, ndeg) for t in ts],
        asymptotic=[tail_asymptotic(d, alpha, t) if t > 0 else 1.0 for t in ts],
    )
