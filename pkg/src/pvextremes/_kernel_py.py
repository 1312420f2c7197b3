"""Pure-numpy cell kernel: the fallback backend.

Semantics here are the reference; the Cython backend in ``_kernel_cy`` mirrors
them operation for operation (same pivoting rule, same tolerances), so both
backends return the same vertex sets.
"""

import itertools
import math

import numpy as np

PIVOT_TOL = 1e-10  # relative pivot threshold declaring a solve singular
BALL_TOL = 1e-9    # relative distance tolerance in the empty-ball test
HULL_TOL = 1e-12   # strictness threshold on barycentric coordinates

_COMBO_CHUNK = 16384


def solve_batch(A, b, pivot_tol=PIVOT_TOL):
    """Solve a batch of small dense systems by partial-pivot elimination.

    Parameters
    ----------
    A : (m, d, d) array, row-major systems (not modified)
    b : (m, d) array of right-hand sides
    pivot_tol : a system is flagged singular when |pivot| < pivot_tol * max|A_ij|

    Returns
    -------
    x : (m, d) solutions (garbage rows where ok is False)
    ok : (m,) bool
    """
    A = np.array(A, dtype=np.float64, copy=True)
    b = np.array(b, dtype=np.float64, copy=True)
    m, d = b.shape
    scale = np.abs(A).reshape(m, -1).max(axis=1)
    ok = scale > 0.0
    scale = np.where(ok, scale, 1.0)
    rows = np.arange(m)
    for k in range(d):
        piv = np.abs(A[:, k:, k]).argmax(axis=1) + k
        swap = piv != k
        if swap.any():
            r = rows[swap]
            p = piv[swap]
            tmp = A[r, k].copy()
            A[r, k] = A[r, p]
            A[r, p] = tmp
            tmpb = b[r, k].copy()
            b[r, k] = b[r, p]
            b[r, p] = tmpb
        pv = A[:, k, k]
        ok &= np.abs(pv) >= pivot_tol * scale
        safe = np.where(np.abs(pv) > 0, pv, 1.0)
        if k + 1 < d:
            f = A[:, k + 1 :, k] / safe[:, None]
            A[:, k + 1 :, k + 1 :] -= f[:, :, None] * A[:, None, k, k + 1 :]
            b[:, k + 1 :] -= f * b[:, k, None]
            A[:, k + 1 :, k] = 0.0
    x = np.zeros_like(b)
    for k in range(d - 1, -1, -1):
        s = b[:, k] - np.einsum("mj,mj->m", A[:, k, k + 1 :], x[:, k + 1 :])
        x[:, k] = s / np.where(ok, A[:, k, k], 1.0)
    return x, ok


def pointy_flags(subpts, centers, pivot_tol=PIVOT_TOL, hull_tol=HULL_TOL):
    """Classify vertices as pointy.

    For each vertex c with defining points x_1..x_d: form the unit vectors
    u0 = c/|c|, u_i = (x_i - c)/|x_i - c|, project u_i onto u0's orthogonal
    complement and test whether the origin lies strictly inside the hull of
    the projections, via the square system (Q + u0 1^T) lam = u0.

    Returns (pointy, boundary) bool arrays; boundary marks degenerate or
    within-tolerance cases (reported, never counted as pointy).
    """
    m, d, _ = subpts.shape
    cn = np.linalg.norm(centers, axis=1)
    u0 = centers / cn[:, None]
    diff = subpts - centers[:, None, :]
    u = diff / np.linalg.norm(diff, axis=2, keepdims=True)
    q = u - np.einsum("mid,md->mi", u, u0)[:, :, None] * u0[:, None, :]
    M = q.transpose(0, 2, 1) + u0[:, :, None]
    lam, ok = solve_batch(M, u0, pivot_tol)
    pointy = ok & (lam > hull_tol).all(axis=1)
    boundary = ~ok | (ok & (np.abs(lam) <= hull_tol).any(axis=1))
    return pointy, boundary


def _combo_chunks(n, d):
    it = itertools.combinations(range(n), d)
    while True:
        chunk = list(itertools.islice(it, _COMBO_CHUNK))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int64)


def cell_vertices(points, norm_bound, pivot_tol=PIVOT_TOL, ball_tol=BALL_TOL,
                  hull_tol=HULL_TOL):
    """Enumerate the Voronoi-cell vertices of the origin against `points`.

    Iterates over d-subsets of the generators within 2*norm_bound of the
    origin (exact pruning: a defining point of a vertex at distance rho lies
    within 2*rho), solves for the sphere center through the subset and the
    origin, keeps centers with norm <= norm_bound whose open ball contains no
    generator, and classifies each kept vertex as pointy.

    Returns
    -------
    verts : (m, d) vertex locations
    index : (m, d) int64 indices into `points` of the defining generators
    pointy : (m,) bool
    n_skipped : number of subsets dropped by the singular-pivot rule
    n_boundary : number of within-tolerance hull classifications
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n, d = pts.shape
    empty = (np.empty((0, d)), np.empty((0, d), dtype=np.int64),
             np.empty(0, dtype=bool), 0, 0)
    if n < d:
        return empty
    norms2 = np.einsum("ij,ij->i", pts, pts)
    cut = (2.0 * norm_bound) * (2.0 * norm_bound) * (1.0 + 1e-12)
    cand = np.flatnonzero(norms2 <= cut)
    if cand.size < d:
        return empty
    cpts = pts[cand]
    cn2 = norms2[cand]
    nb2 = norm_bound * norm_bound * (1.0 + 1e-12)

    out_v, out_i, out_p = [], [], []
    n_skipped = 0
    n_boundary = 0
    for idx in _combo_chunks(cand.size, d):
        A = cpts[idx]
        b = 0.5 * cn2[idx]
        centers, ok = solve_batch(A, b, pivot_tol)
        n_skipped += int((~ok).sum())
        c2 = np.einsum("ij,ij->i", centers, centers)
        keep = ok & (c2 <= nb2) & (c2 > 0.0)
        if not keep.any():
            continue
        centers = centers[keep]
        c2 = c2[keep]
        idx = idx[keep]
        # empty-ball test: no generator strictly inside (relative tolerance)
        d2 = c2[:, None] - 2.0 * centers @ cpts.T + cn2[None, :]
        inside = d2 < c2[:, None] * (1.0 - 2.0 * ball_tol)
        np.put_along_axis(inside, idx, False, axis=1)
        is_vertex = ~inside.any(axis=1)
        if not is_vertex.any():
            continue
        centers = centers[is_vertex]
        idx = idx[is_vertex]
        pointy, boundary = pointy_flags(cpts[idx], centers, pivot_tol, hull_tol)
        n_boundary += int(boundary.sum())
        out_v.append(centers)
        out_i.append(cand[idx])
        out_p.append(pointy)
    if not out_v:
        return empty[0], empty[1], empty[2], n_skipped, n_boundary
    return (np.concatenate(out_v), np.concatenate(out_i),
            np.concatenate(out_p), n_skipped, n_boundary)


def box_replicate_maxima(points, n_side, buffer, r0, growth, fence_dirs,
                         pivot_tol=PIVOT_TOL, ball_tol=BALL_TOL,
                         hull_tol=HULL_TOL):
    """Max far-vertex distance over all nuclei inside [0, n_side]^d.

    `points` is one realization on [-buffer, n_side+buffer]^d. Each nucleus is
    translated to the origin and its cell is enumerated against neighbors
    within a growing query radius, certified once every vertex of the fenced
    cell lies within half the radius. The radius is clipped at the nucleus'
    distance to the sampled boundary; a nucleus that cannot certify fails the
    whole replicate.

    Returns (max_distance, n_nuclei, ok, n_skipped).
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n, d = pts.shape
    in_box = np.flatnonzero((pts >= 0.0).all(axis=1) & (pts <= n_side).all(axis=1))
    max_d = 0.0
    n_skipped = 0
    for i in in_box:
        x = pts[i]
        rel = pts - x
        dist2 = np.einsum("ij,ij->i", rel, rel)
        dist2[i] = np.inf
        avail = buffer + float(np.minimum(x, n_side - x).min())
        R = min(r0, avail)
        certified = False
        while True:
            near = rel[dist2 <= R * R]
            local = np.vstack([near, (2.0 * R) * fence_dirs])
            verts, _, _, nsk, _ = cell_vertices(
                local, d * R * (1.0 + 1e-9), pivot_tol, ball_tol, hull_tol)
            n_skipped += nsk
            if nsk == 0 and len(verts) >= d + 1:
                vmax = float(np.linalg.norm(verts, axis=1).max())
                if vmax < 0.5 * R:
                    max_d = max(max_d, vmax)
                    certified = True
                    break
            if R >= avail:
                break
            R = min(R * growth, avail)
        if not certified:
            return math.nan, in_box.size, False, n_skipped
    return max_d, in_box.size, True, n_skipped
