# cython: language_level=3
"""Compiled hot kernels: per-point voxel binning over a uniform grid hash,
and per-point local-spectrum gamma scores with a self-contained cyclic
Jacobi eigensolver. Semantics match `_kernels_py` exactly; every point is
processed independently, so outputs are byte-identical for any thread
count.
"""

import numpy as np

from cython.parallel cimport prange
cimport openmp
from libc.math cimport fabs, floor, sqrt

cdef enum:
    MAXNX = 64

MAX_NX = MAXNX
backend_tag = "compiled"


cdef inline long long _find_code(const long long* codes, long long n,
                                 long long key) noexcept nogil:
    cdef long long lo = 0, hi = n - 1, mid
    while lo <= hi:
        mid = (lo + hi) >> 1
        if codes[mid] == key:
            return mid
        if codes[mid] < key:
            lo = mid + 1
        else:
            hi = mid - 1
    return -1


cdef void _bin_point(const double* pts, long long i,
                     const long long* order, const long long* ucodes,
                     long long nu, const long long* starts,
                     const long long* mins, const long long* dims,
                     double cell, double d, int k,
                     long long* out_row) noexcept nogil:
    cdef:
        double p[3]
        long long clo[3]
        long long chi[3]
        long long cx, cy, cz, code, u, t, j, ix, iy, iz
        double t0, t1, t2
        int ax
        int h = (k - 1) // 2
    p[0] = pts[3 * i]
    p[1] = pts[3 * i + 1]
    p[2] = pts[3 * i + 2]
    for ax in range(3):
        # one extra cell on each side absorbs fp rounding of the bounds
        clo[ax] = <long long>floor((p[ax] - cell) / cell) - 1 - mins[ax]
        chi[ax] = <long long>floor((p[ax] + cell) / cell) + 1 - mins[ax]
        if clo[ax] < 0:
            clo[ax] = 0
        if chi[ax] > dims[ax] - 1:
            chi[ax] = dims[ax] - 1
    for cx in range(clo[0], chi[0] + 1):
        for cy in range(clo[1], chi[1] + 1):
            for cz in range(clo[2], chi[2] + 1):
                code = (cx * dims[1] + cy) * dims[2] + cz
                u = _find_code(ucodes, nu, code)
                if u < 0:
                    continue
                for t in range(starts[u], starts[u + 1]):
                    j = order[t]
                    t0 = floor((pts[3 * j] - p[0]) / d + 0.5)
                    if t0 < -h or t0 > h:
                        continue
                    t1 = floor((pts[3 * j + 1] - p[1]) / d + 0.5)
                    if t1 < -h or t1 > h:
                        continue
                    t2 = floor((pts[3 * j + 2] - p[2]) / d + 0.5)
                    if t2 < -h or t2 > h:
                        continue
                    ix = <long long>t0 + h
                    iy = <long long>t1 + h
                    iz = <long long>t2 + h
                    out_row[(ix * k + iy) * k + iz] += 1


def count_signals_grid(double[:, ::1] pts, long long[::1] order,
                       long long[::1] ucodes, long long[::1] starts,
                       long long[::1] mins, long long[::1] dims,
                       double cell, double d, int k, int workers):
    """Bin every point's kernel neighborhood; grid layout prepared by the
    Python wrapper (points sorted by cell code, CSR-style starts)."""
    cdef long long n = pts.shape[0]
    cdef long long nk = <long long>k * k * k
    out = np.zeros((n, nk), dtype=np.int64)
    cdef long long[:, ::1] ov = out
    cdef long long nu = ucodes.shape[0]
    cdef long long i
    cdef int nt = workers if workers > 0 else openmp.omp_get_max_threads()
    for i in prange(n, nogil=True, num_threads=nt, schedule="static"):
        _bin_point(&pts[0, 0], i, &order[0], &ucodes[0], nu, &starts[0],
                   &mins[0], &dims[0], cell, d, k, &ov[i, 0])
    return out


cdef int _jacobi(double* G, double* V, double* w, int nx) noexcept nogil:
    """Cyclic Jacobi on symmetric G (row-major, destroyed); eigenvectors
    accumulate into column-major V; eigenvalues into w (unsorted)."""
    cdef:
        int p, q, r, sweep
        double fro2 = 0.0, off, apq, app, aqq, tau, t, c, s, arp, arq
    for p in range(nx):
        V[p * nx + p] = 1.0
        for q in range(nx):
            fro2 += G[p * nx + q] * G[p * nx + q]
            if q > p:
                V[p * nx + q] = 0.0
                V[q * nx + p] = 0.0
    cdef double limit = fro2 * 1e-28
    for sweep in range(60):
        off = 0.0
        for p in range(nx - 1):
            for q in range(p + 1, nx):
                off += G[p * nx + q] * G[p * nx + q]
        if off <= limit:
            break
        for p in range(nx - 1):
            for q in range(p + 1, nx):
                apq = G[p * nx + q]
                if apq == 0.0:
                    continue
                app = G[p * nx + p]
                aqq = G[q * nx + q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                G[p * nx + p] = app - t * apq
                G[q * nx + q] = aqq + t * apq
                G[p * nx + q] = 0.0
                G[q * nx + p] = 0.0
                for r in range(nx):
                    if r != p and r != q:
                        arp = G[r * nx + p]
                        arq = G[r * nx + q]
                        G[r * nx + p] = c * arp - s * arq
                        G[p * nx + r] = G[r * nx + p]
                        G[r * nx + q] = s * arp + c * arq
                        G[q * nx + r] = G[r * nx + q]
                for r in range(nx):
                    arp = V[p * nx + r]
                    arq = V[q * nx + r]
                    V[p * nx + r] = c * arp - s * arq
                    V[q * nx + r] = s * arp + c * arq
    for p in range(nx):
        w[p] = G[p * nx + p]
    return 0


cdef double _gamma_point(const double* pts, const long long* nbr,
                         long long i, int nx, int m) noexcept nogil:
    cdef:
        double S[MAXNX * 3]
        double G[MAXNX * MAXNX]
        double V[MAXNX * MAXNX]
        double B[MAXNX * MAXNX]
        double w[MAXNX]
        double ws[MAXNX]
        double v[MAXNX]
        long long perm[MAXNX]
        double mean[3]
        long long j
        int r, c, a, b, t, kc, cs, ce, csize, it, u, pass_i
        double acc, wmax, tol, key, norm, thresh, gmax, cut, num, total, val
        long long kperm
    # local signal: row 0 is the origin, rows 1..nx-1 are neighbor offsets
    for c in range(3):
        S[c] = 0.0
    for r in range(1, nx):
        j = nbr[i * m + (r - 1)]
        for c in range(3):
            S[3 * r + c] = pts[3 * j + c] - pts[3 * i + c]
    for c in range(3):
        acc = 0.0
        for r in range(nx):
            acc += S[3 * r + c]
        mean[c] = acc / nx
    # Gram of the centered signal
    for a in range(nx):
        for b in range(a, nx):
            acc = 0.0
            for c in range(3):
                acc += (S[3 * a + c] - mean[c]) * (S[3 * b + c] - mean[c])
            G[a * nx + b] = acc
            G[b * nx + a] = acc
    _jacobi(G, V, w, nx)
    # stable ascending sort of eigenpairs
    for a in range(nx):
        perm[a] = a
    for a in range(1, nx):
        key = w[a]
        kperm = perm[a]
        b = a - 1
        while b >= 0 and w[b] > key:
            w[b + 1] = w[b]
            perm[b + 1] = perm[b]
            b -= 1
        w[b + 1] = key
        perm[b + 1] = kperm
    for a in range(nx):
        for r in range(nx):
            B[a * nx + r] = V[perm[a] * nx + r]
    for a in range(nx * nx):
        V[a] = B[a]
    # canonicalize near-equal eigenvalue clusters (see spectrum.py)
    wmax = 0.0
    for a in range(nx):
        if fabs(w[a]) > wmax:
            wmax = fabs(w[a])
    tol = 1e-9 * wmax
    cs = 0
    for ce in range(1, nx + 1):
        if ce < nx and w[ce] - w[ce - 1] <= tol:
            continue
        csize = ce - cs
        if csize > 1:
            for t in range(csize):
                for r in range(nx):
                    B[t * nx + r] = V[(cs + t) * nx + r]
            kc = 0
            for pass_i in range(2):
                thresh = 0.1 if pass_i == 0 else 1e-6
                for a in range(nx):
                    if kc == csize:
                        break
                    for r in range(nx):
                        acc = 0.0
                        for t in range(csize):
                            acc += B[t * nx + r] * B[t * nx + a]
                        v[r] = acc
                    for it in range(2):
                        for u in range(kc):
                            acc = 0.0
                            for r in range(nx):
                                acc += V[(cs + u) * nx + r] * v[r]
                            for r in range(nx):
                                v[r] -= acc * V[(cs + u) * nx + r]
                    norm = 0.0
                    for r in range(nx):
                        norm += v[r] * v[r]
                    norm = sqrt(norm)
                    if norm > thresh:
                        for r in range(nx):
                            V[(cs + kc) * nx + r] = v[r] / norm
                        kc += 1
                if kc == csize:
                    break
            if kc < csize:
                return -1.0
        cs = ce
    # sign convention: first largest-magnitude entry positive
    for a in range(nx):
        norm = 0.0
        b = 0
        for r in range(nx):
            if fabs(V[a * nx + r]) > norm:
                norm = fabs(V[a * nx + r])
                b = r
        if V[a * nx + b] < 0.0:
            for r in range(nx):
                V[a * nx + r] = -V[a * nx + r]
    # gap threshold with relative tie tolerance
    gmax = w[1] - w[0]
    for a in range(2, nx):
        if w[a] - w[a - 1] > gmax:
            gmax = w[a] - w[a - 1]
    cut = gmax - 1e-9 * fabs(gmax)
    t = 1
    for a in range(1, nx):
        if w[a] - w[a - 1] >= cut:
            t = a
            break
    # coefficient mass below/over the cutoff
    num = 0.0
    total = 0.0
    for a in range(nx):
        for c in range(3):
            acc = 0.0
            for r in range(nx):
                acc += V[a * nx + r] * S[3 * r + c]
            val = fabs(acc)
            total += val
            if a < t:
                num += val
    if total > 0.0:
        return num / total
    return 0.0


def lhf_gamma(double[:, ::1] pts, long long[:, ::1] nbr, int workers):
    """Per-point gamma at one scale; nbr is (N, N_x - 1) neighbor indices."""
    cdef long long n = pts.shape[0]
    cdef int m = <int>nbr.shape[1]
    cdef int nx = m + 1
    if nx > MAXNX:
        raise ValueError(f"local signal size {nx} exceeds compiled limit {MAXNX}")
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef long long i
    cdef int nt = workers if workers > 0 else openmp.omp_get_max_threads()
    for i in prange(n, nogil=True, num_threads=nt, schedule="static"):
        ov[i] = _gamma_point(&pts[0, 0], &nbr[0, 0], i, nx, m)
    if bool(np.any(out < 0.0)):
        raise RuntimeError("degenerate eigenvector block could not be canonicalized")
    return out
