# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cell kernel.

Same semantics as ``_kernel_py``: partial-pivot solves with a relative pivot
threshold, relative-tolerance empty-ball test, strict barycentric hull test.
The subset enumeration and the box-experiment nucleus loop are the two hot
paths and run without the GIL.
"""

import math

import numpy as np

from libc.math cimport fabs, floor, sqrt
from libc.stdlib cimport free, malloc

cdef enum:
    MAXD = 12
    MAXD2 = 144


cdef int _solve_pp(double* A, double* b, double* x, int d, double pivot_tol) noexcept nogil:
    """Partial-pivot elimination on a d x d row-major system; 1 if singular."""
    cdef int i, j, k, p
    cdef double scale = 0.0, pv, t, f
    for i in range(d * d):
        t = fabs(A[i])
        if t > scale:
            scale = t
    if scale == 0.0:
        return 1
    for k in range(d):
        p = k
        pv = fabs(A[k * d + k])
        for i in range(k + 1, d):
            t = fabs(A[i * d + k])
            if t > pv:
                pv = t
                p = i
        if pv < pivot_tol * scale:
            return 1
        if p != k:
            for j in range(k, d):
                t = A[k * d + j]
                A[k * d + j] = A[p * d + j]
                A[p * d + j] = t
            t = b[k]
            b[k] = b[p]
            b[p] = t
        for i in range(k + 1, d):
            f = A[i * d + k] / A[k * d + k]
            for j in range(k + 1, d):
                A[i * d + j] -= f * A[k * d + j]
            A[i * d + k] = 0.0
            b[i] -= f * b[k]
    for k in range(d - 1, -1, -1):
        t = b[k]
        for j in range(k + 1, d):
            t -= A[k * d + j] * x[j]
        x[k] = t / A[k * d + k]
    return 0


cdef int _pointy_flag(double* S, double* cen, int d, double pivot_tol,
                      double hull_tol, long* boundary) noexcept nogil:
    """1 if the vertex at `cen` (defined by rows of S) is pointy, else 0."""
    cdef double u0[MAXD]
    cdef double diff[MAXD]
    cdef double M[MAXD2]
    cdef double rhs[MAXD]
    cdef double lam[MAXD]
    cdef double cn = 0.0, nrm, dotp
    cdef int i, r
    for r in range(d):
        cn += cen[r] * cen[r]
    cn = sqrt(cn)
    for r in range(d):
        u0[r] = cen[r] / cn
    for i in range(d):
        nrm = 0.0
        for r in range(d):
            diff[r] = S[i * d + r] - cen[r]
            nrm += diff[r] * diff[r]
        nrm = sqrt(nrm)
        dotp = 0.0
        for r in range(d):
            diff[r] /= nrm
            dotp += diff[r] * u0[r]
        for r in range(d):
            M[r * d + i] = (diff[r] - dotp * u0[r]) + u0[r]
    for r in range(d):
        rhs[r] = u0[r]
    if _solve_pp(M, rhs, lam, d, pivot_tol):
        boundary[0] += 1
        return 0
    cdef int allpos = 1
    for i in range(d):
        if fabs(lam[i]) <= hull_tol:
            boundary[0] += 1
            return 0
        if lam[i] <= hull_tol:
            allpos = 0
    return allpos


cdef long _enumerate(const double* P, const double* Pn2, long nc, int d,
                     double nb2, double pivot_tol, double ball_tol,
                     double hull_tol, int want_flags,
                     double* out_v, long* out_i, unsigned char* out_p,
                     long cap, long* counters) noexcept nogil:
    """Enumerate cell vertices from d-subsets of the nc points in P.

    counters[0] += skipped singular subsets, counters[1] += boundary hull
    classifications. Returns the vertex count, or -1 if cap was exceeded.
    """
    cdef long comb[MAXD]
    cdef double A[MAXD2]
    cdef double S[MAXD2]
    cdef double bb[MAXD]
    cdef double cen[MAXD]
    cdef long nv = 0, j
    cdef int i, k, r, cpos, empty
    cdef double c2, thr, d2, t
    cdef double ball_fac = 1.0 - 2.0 * ball_tol
    if nc < d:
        return 0
    for i in range(d):
        comb[i] = i
    while True:
        for r in range(d):
            j = comb[r]
            for k in range(d):
                A[r * d + k] = P[j * d + k]
            bb[r] = 0.5 * Pn2[j]
        if _solve_pp(A, bb, cen, d, pivot_tol):
            counters[0] += 1
        else:
            c2 = 0.0
            for r in range(d):
                c2 += cen[r] * cen[r]
            if c2 <= nb2 and c2 > 0.0:
                thr = c2 * ball_fac
                empty = 1
                cpos = 0
                for j in range(nc):
                    if cpos < d and j == comb[cpos]:
                        cpos += 1
                        continue
                    d2 = 0.0
                    for k in range(d):
                        t = P[j * d + k] - cen[k]
                        d2 += t * t
                    if d2 < thr:
                        empty = 0
                        break
                if empty:
                    if nv >= cap:
                        return -1
                    for k in range(d):
                        out_v[nv * d + k] = cen[k]
                    if out_i != NULL:
                        for r in range(d):
                            out_i[nv * d + r] = comb[r]
                    if want_flags:
                        for r in range(d):
                            j = comb[r]
                            for k in range(d):
                                S[r * d + k] = P[j * d + k]
                        out_p[nv] = <unsigned char>_pointy_flag(
                            S, cen, d, pivot_tol, hull_tol, &counters[1])
                    elif out_p != NULL:
                        out_p[nv] = 0
                    nv += 1
        i = d - 1
        while i >= 0 and comb[i] == nc - d + i:
            i -= 1
        if i < 0:
            break
        comb[i] += 1
        for k in range(i + 1, d):
            comb[k] = comb[k - 1] + 1
    return nv


def cell_vertices(points, double norm_bound, double pivot_tol=1e-10,
                  double ball_tol=1e-9, double hull_tol=1e-12):
    """Compiled twin of ``_kernel_py.cell_vertices`` (same contract)."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-d array")
    cdef long n = pts.shape[0]
    cdef int d = <int>pts.shape[1]
    if d < 1 or d > MAXD:
        raise ValueError(f"dimension must be in [1, {MAXD}]")

    def _empty(long nsk, long nbd):
        return (np.empty((0, d)), np.empty((0, d), dtype=np.int64),
                np.empty(0, dtype=bool), int(nsk), int(nbd))

    if n < d:
        return _empty(0, 0)
    norms2 = np.einsum("ij,ij->i", pts, pts)
    cut = (2.0 * norm_bound) * (2.0 * norm_bound) * (1.0 + 1e-12)
    cand = np.flatnonzero(norms2 <= cut)
    if cand.size < d:
        return _empty(0, 0)
    cpts = np.ascontiguousarray(pts[cand])
    cn2 = np.ascontiguousarray(norms2[cand])

    cdef double[:, ::1] P = cpts
    cdef double[::1] N2 = cn2
    cdef long nc = cand.size
    cdef double nb2 = norm_bound * norm_bound * (1.0 + 1e-12)
    cdef long cap = 8 * nc + 64
    cdef long counters[2]
    cdef long nv
    cdef double[:, ::1] vv
    cdef long[:, ::1] ii
    cdef unsigned char[::1] pp
    while True:
        counters[0] = 0
        counters[1] = 0
        out_v = np.empty((cap, d))
        out_i = np.empty((cap, d), dtype=np.int64)
        out_p = np.empty(cap, dtype=np.uint8)
        vv = out_v
        ii = out_i
        pp = out_p
        with nogil:
            nv = _enumerate(&P[0, 0], &N2[0], nc, d, nb2, pivot_tol, ball_tol,
                            hull_tol, 1, &vv[0, 0], &ii[0, 0], &pp[0], cap,
                            counters)
        if nv >= 0:
            break
        cap *= 8
    verts = out_v[:nv].copy()
    index = cand[out_i[:nv]]
    pointy = out_p[:nv].astype(bool)
    return verts, index, pointy, int(counters[0]), int(counters[1])


cdef int _certify_nucleus(const double* P, const long* order,
                          const long* cell_start, long npts, int d,
                          long self_idx, const double* x, double avail,
                          double r0, double growth, const double* fence,
                          double lo, double h, long m,
                          double pivot_tol, double ball_tol, double hull_tol,
                          double* nb_buf, double* nb_n2,
                          double* out_v, long cap,
                          double* d_out, long* acc_skipped) noexcept nogil:
    """Certified far-vertex distance for one nucleus; 0 ok, 1 fail, -1 cap."""
    cdef double R = r0
    cdef long rlo[MAXD]
    cdef long rhi[MAXD]
    cdef long cur[MAXD]
    cdef long counters[2]
    cdef long flat, ptr, j, nloc, nv, q
    cdef int a, k
    cdef double d2, t, vmax, bound, nb2
    if R > avail:
        R = avail
    while True:
        # gather neighbors within R, translated so the nucleus is the origin
        nloc = 0
        for a in range(d):
            flat = <long>floor((x[a] - lo - R) / h)
            if flat < 0:
                flat = 0
            rlo[a] = flat
            flat = <long>floor((x[a] - lo + R) / h)
            if flat > m - 1:
                flat = m - 1
            rhi[a] = flat
            cur[a] = rlo[a]
        while True:
            flat = 0
            for a in range(d):
                flat = flat * m + cur[a]
            for ptr in range(cell_start[flat], cell_start[flat + 1]):
                j = order[ptr]
                if j == self_idx:
                    continue
                d2 = 0.0
                for k in range(d):
                    t = P[j * d + k] - x[k]
                    d2 += t * t
                if d2 <= R * R:
                    for k in range(d):
                        nb_buf[nloc * d + k] = P[j * d + k] - x[k]
                    nb_n2[nloc] = d2
                    nloc += 1
            a = d - 1
            while a >= 0:
                cur[a] += 1
                if cur[a] <= rhi[a]:
                    break
                cur[a] = rlo[a]
                a -= 1
            if a < 0:
                break
        # fence generators close the cell in every direction
        for a in range(d + 1):
            d2 = 0.0
            for k in range(d):
                t = 2.0 * R * fence[a * d + k]
                nb_buf[nloc * d + k] = t
                d2 += t * t
            nb_n2[nloc] = d2
            nloc += 1
        bound = d * R * (1.0 + 1e-9)
        nb2 = bound * bound * (1.0 + 1e-12)
        counters[0] = 0
        counters[1] = 0
        nv = _enumerate(nb_buf, nb_n2, nloc, d, nb2, pivot_tol, ball_tol,
                        hull_tol, 0, out_v, NULL, NULL, cap, counters)
        if nv < 0:
            return -1
        acc_skipped[0] += counters[0]
        if counters[0] == 0 and nv >= d + 1:
            vmax = 0.0
            for q in range(nv):
                d2 = 0.0
                for k in range(d):
                    d2 += out_v[q * d + k] * out_v[q * d + k]
                if d2 > vmax:
                    vmax = d2
            vmax = sqrt(vmax)
            if vmax < 0.5 * R:
                d_out[0] = vmax
                return 0
        if R >= avail:
            return 1
        R = R * growth
        if R > avail:
            R = avail


def box_replicate_maxima(points, double n_side, double buffer, double r0,
                         double growth, fence_dirs, double pivot_tol=1e-10,
                         double ball_tol=1e-9, double hull_tol=1e-12):
    """Compiled twin of ``_kernel_py.box_replicate_maxima`` (same contract)."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef long npts = pts.shape[0]
    cdef int d = <int>pts.shape[1]
    if d < 1 or d > MAXD:
        raise ValueError(f"dimension must be in [1, {MAXD}]")
    fence = np.ascontiguousarray(fence_dirs, dtype=np.float64)
    if fence.shape[0] != d + 1 or fence.shape[1] != d:
        raise ValueError("fence_dirs must have shape (d+1, d)")

    in_box = np.flatnonzero((pts >= 0.0).all(axis=1) & (pts <= n_side).all(axis=1))
    cdef long n_nuclei = in_box.size
    if npts == 0 or n_nuclei == 0:
        return 0.0, 0, True, 0

    # uniform grid over [-buffer, n_side+buffer]^d, coarsened if d is large
    cdef double lo = -buffer
    cdef double extent = n_side + 2.0 * buffer
    cdef double h = r0 if r0 > 0.5 else 0.5
    m_axis = max(1, int(math.ceil(extent / h)))
    while m_axis**d > 20_000_000:
        m_axis = max(1, m_axis // 2)
    h = extent / m_axis
    cdef long m = m_axis
    axes = np.clip(((pts - lo) / h).astype(np.int64), 0, m_axis - 1)
    flat = axes[:, 0].copy()
    for a in range(1, d):
        flat = flat * m_axis + axes[:, a]
    order_np = np.argsort(flat, kind="stable").astype(np.int64)
    cell_start_np = np.zeros(m_axis**d + 1, dtype=np.int64)
    np.add.at(cell_start_np, flat + 1, 1)
    np.cumsum(cell_start_np, out=cell_start_np)

    cdef double[:, ::1] P = pts
    cdef double[:, ::1] F = fence
    cdef long[::1] order = order_np
    cdef long[::1] cell_start = cell_start_np
    cdef long[::1] nuclei = np.ascontiguousarray(in_box, dtype=np.int64)

    cdef long cap = 8 * npts + 256
    cdef double* nb_buf = <double*>malloc((npts + MAXD + 2) * d * sizeof(double))
    cdef double* nb_n2 = <double*>malloc((npts + MAXD + 2) * sizeof(double))
    cdef double* out_v = <double*>malloc(cap * d * sizeof(double))
    if nb_buf == NULL or nb_n2 == NULL or out_v == NULL:
        free(nb_buf)
        free(nb_n2)
        free(out_v)
        raise MemoryError
    cdef double max_d = 0.0, avail, dmin, t, d_one
    cdef long i, idx, total_skipped = 0
    cdef int status, k, failed = 0
    try:
        with nogil:
            for i in range(n_nuclei):
                idx = nuclei[i]
                dmin = n_side
                for k in range(d):
                    t = P[idx, k]
                    if t < dmin:
                        dmin = t
                    if n_side - t < dmin:
                        dmin = n_side - t
                avail = buffer + dmin
                while True:
                    status = _certify_nucleus(
                        &P[0, 0], &order[0], &cell_start[0], npts, d, idx,
                        &P[idx, 0], avail, r0, growth, &F[0, 0], lo, h, m,
                        pivot_tol, ball_tol, hull_tol, nb_buf, nb_n2, out_v,
                        cap, &d_one, &total_skipped)
                    if status != -1:
                        break
                    with gil:
                        cap *= 8
                        free(out_v)
                        out_v = <double*>malloc(cap * d * sizeof(double))
                        if out_v == NULL:
                            raise MemoryError
                if status == 1:
                    failed = 1
                    break
                if d_one > max_d:
                    max_d = d_one
    finally:
        free(nb_buf)
        free(nb_n2)
        free(out_v)
    if failed:
        return math.nan, int(n_nuclei), False, int(total_skipped)
    return max_d, int(n_nuclei), True, int(total_skipped)
