# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled batch kernels (hot path). Semantics documented in _kernels.py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt

cnp.import_array()

DEF MAXK = 16  # max vertices per tuple (d + 2 <= 16)

cdef int _MT_SQ = 0
cdef int _MT_X0_SQ = 1
cdef int _MIN_SQ = 2
cdef int _MAX_SQ = 3
cdef int _VOL_SQ = 4
cdef int _ALG_SQ = 5
cdef int _LEGER_POW = 6
cdef int _PSIN0_POW = 7


cdef double _det_ppiv(double* a, int m) noexcept nogil:
    """Determinant of an m x m matrix (row major) by partial-pivot elimination."""
    cdef int i, j, p, r
    cdef double piv, factor, tmp, det
    det = 1.0
    for j in range(m):
        p = j
        piv = fabs(a[j * m + j])
        for r in range(j + 1, m):
            if fabs(a[r * m + j]) > piv:
                piv = fabs(a[r * m + j])
                p = r
        if piv == 0.0:
            return 0.0
        if p != j:
            for i in range(m):
                tmp = a[j * m + i]
                a[j * m + i] = a[p * m + i]
                a[p * m + i] = tmp
            det = -det
        det *= a[j * m + j]
        for r in range(j + 1, m):
            factor = a[r * m + j] / a[j * m + j]
            for i in range(j, m):
                a[r * m + i] -= factor * a[j * m + i]
    return det


cdef double _content_from(const double* xt, int k, int n, int base,
                          double diam, double rel_tol,
                          double* scratch_v, double* scratch_g) noexcept nogil:
    """Content of the k vertices (coords in xt, row major k x n) from `base`."""
    cdef int m = k - 1
    cdef int i, j, c, r
    cdef double s, det, M
    if m == 0:
        return 1.0
    r = 0
    for i in range(k):
        if i == base:
            continue
        for c in range(n):
            scratch_v[r * n + c] = xt[i * n + c] - xt[base * n + c]
        r += 1
    for i in range(m):
        for j in range(i, m):
            s = 0.0
            for c in range(n):
                s += scratch_v[i * n + c] * scratch_v[j * n + c]
            scratch_g[i * m + j] = s
            scratch_g[j * m + i] = s
    det = _det_ppiv(scratch_g, m)
    if det < 0.0:
        det = 0.0
    M = sqrt(det)
    if M <= rel_tol * pow(diam, m):
        return 0.0
    return M


cdef int _eval_tuple(const double* xt, int k, int n, int kind, int d,
                     double power, double rel_tol,
                     double* sv, double* sg,
                     double* out_val, double* out_min, double* out_diam) noexcept nogil:
    """Evaluate one kernel kind on a single tuple; returns nonzero on bad kind."""
    cdef double D[MAXK][MAXK]
    cdef double psin[MAXK]
    cdef int i, j, c
    cdef double s, diam, min_edge, M, denom, acc, pr, base, height, prod0
    cdef bint zero_row

    diam = 0.0
    min_edge = -1.0
    for i in range(k):
        D[i][i] = 0.0
        for j in range(i + 1, k):
            s = 0.0
            for c in range(n):
                s += (xt[i * n + c] - xt[j * n + c]) ** 2
            s = sqrt(s)
            D[i][j] = s
            D[j][i] = s
            if s > diam:
                diam = s
            if min_edge < 0.0 or s < min_edge:
                min_edge = s
    out_min[0] = min_edge
    out_diam[0] = diam
    if diam <= 0.0:
        out_val[0] = 0.0
        return 0

    M = _content_from(xt, k, n, 0, diam, rel_tol, sv, sg)

    if kind == _VOL_SQ:
        denom = pow(diam, (d + 1) * (d + 2))
        out_val[0] = M * M / denom
        return 0

    if kind == _ALG_SQ:
        if min_edge <= 0.0 or M == 0.0:
            out_val[0] = 0.0
            return 0
        pr = 1.0
        for i in range(k):
            for j in range(i + 1, k):
                pr *= D[i][j]
        s = M / pr
        out_val[0] = s * s
        return 0

    if kind == _LEGER_POW:
        zero_row = False
        prod0 = 1.0
        for i in range(1, k):
            if D[0][i] <= 0.0:
                zero_row = True
                break
            prod0 *= D[0][i]
        if zero_row or M == 0.0:
            out_val[0] = 0.0
            return 0
        base = _content_from(xt + n, k - 1, n, 0, diam, rel_tol, sv, sg)
        if base == 0.0:
            out_val[0] = 0.0
            return 0
        height = M / base
        out_val[0] = pow(height / prod0, d + 1)
        return 0

    # polar-sine kinds
    for i in range(k):
        pr = 1.0
        zero_row = False
        for j in range(k):
            if j == i:
                continue
            if D[i][j] <= 0.0:
                zero_row = True
                break
            pr *= D[i][j]
        if zero_row or M == 0.0:
            psin[i] = 0.0
        else:
            s = M / pr
            if s > 1.0:
                s = 1.0
            psin[i] = s
    denom = pow(diam, d * (d + 1))
    if kind == _MT_SQ:
        acc = 0.0
        for i in range(k):
            acc += psin[i] * psin[i]
        out_val[0] = acc / (k * denom)
    elif kind == _MT_X0_SQ:
        out_val[0] = psin[0] * psin[0] / denom
    elif kind == _MIN_SQ:
        acc = psin[0] * psin[0]
        for i in range(1, k):
            if psin[i] * psin[i] < acc:
                acc = psin[i] * psin[i]
        out_val[0] = acc / denom
    elif kind == _MAX_SQ:
        acc = 0.0
        for i in range(k):
            if psin[i] * psin[i] > acc:
                acc = psin[i] * psin[i]
        out_val[0] = acc / denom
    elif kind == _PSIN0_POW:
        out_val[0] = pow(psin[0], power) / denom
    else:
        return 1
    return 0


cdef _alloc_scratch(int k, int n):
    vbuf = np.empty(max(k - 1, 1) * n, dtype=np.float64)
    gbuf = np.empty(max(k - 1, 1) * max(k - 1, 1), dtype=np.float64)
    return vbuf, gbuf


def batch_content(X, double rel_tol):
    cdef cnp.ndarray[cnp.float64_t, ndim=3] Xc = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n_tuples = Xc.shape[0]
    cdef int k = <int> Xc.shape[1]
    cdef int n = <int> Xc.shape[2]
    if k > MAXK:
        raise ValueError(f"tuple size {k} exceeds compiled limit {MAXK}")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n_tuples, dtype=np.float64)
    if k <= 1:
        out[:] = 1.0
        return out
    cdef double[:, :, ::1] Xv = Xc
    cdef double[::1] ov = out
    vbuf, gbuf = _alloc_scratch(k, n)
    cdef double* sv = <double*> cnp.PyArray_DATA(vbuf)
    cdef double* sg = <double*> cnp.PyArray_DATA(gbuf)
    cdef Py_ssize_t t
    cdef int i, j, c
    cdef double s, diam
    with nogil:
        for t in range(n_tuples):
            diam = 0.0
            for i in range(k):
                for j in range(i + 1, k):
                    s = 0.0
                    for c in range(n):
                        s += (Xv[t, i, c] - Xv[t, j, c]) ** 2
                    s = sqrt(s)
                    if s > diam:
                        diam = s
            ov[t] = _content_from(&Xv[t, 0, 0], k, n, 0, diam, rel_tol, sv, sg)
    return out


def batch_kernel(X, int kind, int d, double power, double rel_tol):
    cdef cnp.ndarray[cnp.float64_t, ndim=3] Xc = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n_tuples = Xc.shape[0]
    cdef int k = <int> Xc.shape[1]
    cdef int n = <int> Xc.shape[2]
    if k != d + 2:
        raise ValueError(f"expected {d + 2} vertices per tuple, got {k}")
    if k > MAXK:
        raise ValueError(f"tuple size {k} exceeds compiled limit {MAXK}")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vals = np.zeros(n_tuples, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] mins = np.empty(n_tuples, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] diams = np.empty(n_tuples, dtype=np.float64)
    cdef double[:, :, ::1] Xv = Xc
    cdef double[::1] valv = vals
    cdef double[::1] minv = mins
    cdef double[::1] diamv = diams
    vbuf, gbuf = _alloc_scratch(k, n)
    cdef double* sv = <double*> cnp.PyArray_DATA(vbuf)
    cdef double* sg = <double*> cnp.PyArray_DATA(gbuf)
    cdef Py_ssize_t t
    cdef int bad = 0
    with nogil:
        for t in range(n_tuples):
            bad |= _eval_tuple(
                &Xv[t, 0, 0], k, n, kind, d, power, rel_tol, sv, sg,
                &valv[t], &minv[t], &diamv[t],
            )
    if bad:
        raise ValueError(f"unknown kernel kind {kind}")
    return vals, mins, diams


DEF WTBL = 1024

def weighted_indices(cum, u):
    """Map uniforms in [0,1) to atom indices, equivalent to searchsorted
    side='right' on u * total clipped to the last index.

    Uses a bucket start table over the cumulative array, then a short
    forward scan; reads strided 2d input without copying."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] C = np.ascontiguousarray(cum, dtype=np.float64)
    U2 = np.asarray(u, dtype=np.float64)
    flat_shape = U2.shape
    if U2.ndim == 1:
        U2 = U2[:, None]
    if U2.ndim != 2:
        raise ValueError("u must be 1d or 2d")
    cdef double[:, :] Uv = U2
    cdef cnp.ndarray[cnp.intp_t, ndim=2] out = np.empty(
        (U2.shape[0], U2.shape[1]), dtype=np.intp
    )
    cdef double[::1] Cv = C
    cdef cnp.intp_t[:, ::1] Ov = out
    cdef Py_ssize_t m = C.shape[0]
    cdef Py_ssize_t rows = Uv.shape[0]
    cdef Py_ssize_t cols = Uv.shape[1]
    cdef double total = Cv[m - 1]
    cdef Py_ssize_t table[WTBL]
    cdef Py_ssize_t t, j, pos, b
    cdef double v, inv_total
    with nogil:
        # table[b] = first index whose cumulative value exceeds the bucket floor
        pos = 0
        for b in range(WTBL):
            v = (b / <double> WTBL) * total
            while pos < m and Cv[pos] <= v:
                pos += 1
            table[b] = pos if pos < m else m - 1
        inv_total = 1.0 / total if total > 0 else 0.0
        for t in range(rows):
            for j in range(cols):
                v = Uv[t, j] * total
                b = <Py_ssize_t> (v * inv_total * WTBL)
                if b >= WTBL:
                    b = WTBL - 1
                if b < 0:
                    b = 0
                pos = table[b]
                while pos < m - 1 and Cv[pos] <= v:
                    pos += 1
                Ov[t, j] = pos
    return out.reshape(flat_shape)


def batch_kernel_indexed(P, idx, int kind, int d, double power, double rel_tol):
    """As batch_kernel, but tuples are rows of P selected by the (N, k)
    index array; avoids materializing the gathered coordinate block."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Pc = np.ascontiguousarray(P, dtype=np.float64)
    cdef cnp.ndarray[cnp.intp_t, ndim=2] Ic = np.ascontiguousarray(idx, dtype=np.intp)
    cdef Py_ssize_t n_tuples = Ic.shape[0]
    cdef int k = <int> Ic.shape[1]
    cdef int n = <int> Pc.shape[1]
    cdef Py_ssize_t m = Pc.shape[0]
    if k != d + 2:
        raise ValueError(f"expected {d + 2} vertices per tuple, got {k}")
    if k > MAXK:
        raise ValueError(f"tuple size {k} exceeds compiled limit {MAXK}")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vals = np.zeros(n_tuples, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] mins = np.empty(n_tuples, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] diams = np.empty(n_tuples, dtype=np.float64)
    cdef double[:, ::1] Pv = Pc
    cdef cnp.intp_t[:, ::1] Iv = Ic
    cdef double[::1] valv = vals
    cdef double[::1] minv = mins
    cdef double[::1] diamv = diams
    vbuf, gbuf = _alloc_scratch(k, n)
    cdef double* sv = <double*> cnp.PyArray_DATA(vbuf)
    cdef double* sg = <double*> cnp.PyArray_DATA(gbuf)
    xbuf_arr = np.empty(k * n, dtype=np.float64)
    cdef double* xbuf = <double*> cnp.PyArray_DATA(xbuf_arr)
    cdef Py_ssize_t t, row
    cdef int i, c
    cdef int bad = 0
    with nogil:
        for t in range(n_tuples):
            for i in range(k):
                row = Iv[t, i]
                if row < 0 or row >= m:
                    bad |= 2
                    break
                for c in range(n):
                    xbuf[i * n + c] = Pv[row, c]
            bad |= _eval_tuple(
                xbuf, k, n, kind, d, power, rel_tol, sv, sg,
                &valv[t], &minv[t], &diamv[t],
            )
    if bad & 2:
        raise IndexError("tuple index out of range")
    if bad:
        raise ValueError(f"unknown kernel kind {kind}")
    return vals, mins, diams
