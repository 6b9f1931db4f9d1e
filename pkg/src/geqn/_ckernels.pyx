# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels (float64 only).

Same contract as :mod:`geqn._pykernels`; selected at import by
:mod:`geqn.kernels`.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

LCP_SOLVED = 0
LCP_RAY = 1
LCP_CYCLE = 2


def lu_factor(a, double tol):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] lu_arr = np.array(a, dtype=np.float64, copy=True)
    cdef double[:, ::1] lu = lu_arr
    cdef Py_ssize_t n = lu.shape[0]
    cdef cnp.ndarray[cnp.intp_t, ndim=1] piv_arr = np.arange(n, dtype=np.intp)
    cdef cnp.intp_t[::1] piv = piv_arr
    cdef Py_ssize_t i, j, k, p
    cdef double best, tmp, f
    cdef cnp.intp_t itmp
    for k in range(n):
        p = k
        best = fabs(lu[k, k])
        for i in range(k + 1, n):
            if fabs(lu[i, k]) > best:
                best = fabs(lu[i, k])
                p = i
        if not best > tol:
            return lu_arr, piv_arr, k
        if p != k:
            for j in range(n):
                tmp = lu[k, j]
                lu[k, j] = lu[p, j]
                lu[p, j] = tmp
            itmp = piv[k]
            piv[k] = piv[p]
            piv[p] = itmp
        for i in range(k + 1, n):
            f = lu[i, k] / lu[k, k]
            lu[i, k] = f
            if f != 0.0:
                for j in range(k + 1, n):
                    lu[i, j] -= f * lu[k, j]
    return lu_arr, piv_arr, -1


def lu_solve(lu_in, piv_in, b):
    cdef double[:, ::1] lu = np.ascontiguousarray(lu_in, dtype=np.float64)
    cdef cnp.intp_t[::1] piv = np.ascontiguousarray(piv_in, dtype=np.intp)
    cdef double[::1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = lu.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y_arr = np.empty(n)
    cdef double[::1] y = y_arr
    cdef Py_ssize_t i, j
    cdef double s
    for i in range(n):
        y[i] = bb[piv[i]]
    for i in range(n):
        s = y[i]
        for j in range(i):
            s -= lu[i, j] * y[j]
        y[i] = s
    for i in range(n - 1, -1, -1):
        s = y[i]
        for j in range(i + 1, n):
            s -= lu[i, j] * y[j]
        y[i] = s / lu[i, i]
    return y_arr


cdef inline bint _le(double a, double b, double eps):
    return a <= b + eps * (1.0 + fabs(b))


cdef Py_ssize_t _choose_row(double[:, ::1] tab, cnp.intp_t[::1] basis,
                            Py_ssize_t col, Py_ssize_t n, Py_ssize_t z0,
                            double eps, cnp.intp_t[::1] cand, cnp.intp_t[::1] keep):
    cdef Py_ssize_t i, j, c, m = 0, m2, rhs = 2 * n + 1
    cdef double best, key, d
    for i in range(n):
        if tab[i, col] > eps:
            cand[m] = i
            m += 1
    if m == 0:
        return -1
    # minimum ratio, then artificial-first, then lexicographic on Binv
    best = tab[cand[0], rhs] / tab[cand[0], col]
    for c in range(1, m):
        key = tab[cand[c], rhs] / tab[cand[c], col]
        if key < best:
            best = key
    m2 = 0
    for c in range(m):
        key = tab[cand[c], rhs] / tab[cand[c], col]
        if _le(key, best, eps):
            keep[m2] = cand[c]
            m2 += 1
    for c in range(m2):
        if basis[keep[c]] == z0:
            return keep[c]
    m = m2
    for c in range(m):
        cand[c] = keep[c]
    for j in range(n):
        if m == 1:
            break
        best = tab[cand[0], j] / tab[cand[0], col]
        for c in range(1, m):
            key = tab[cand[c], j] / tab[cand[c], col]
            if key < best:
                best = key
        m2 = 0
        for c in range(m):
            key = tab[cand[c], j] / tab[cand[c], col]
            if _le(key, best, eps):
                keep[m2] = cand[c]
                m2 += 1
        m = m2
        for c in range(m):
            cand[c] = keep[c]
    return cand[0]


def lemke(M_in, q_in, long max_pivots, double eps=1e-12):
    cdef double[:, ::1] M = np.ascontiguousarray(M_in, dtype=np.float64)
    cdef double[::1] q = np.ascontiguousarray(q_in, dtype=np.float64)
    cdef Py_ssize_t n = q.shape[0]
    cdef Py_ssize_t width = 2 * n + 2, z0 = 2 * n, rhs = 2 * n + 1
    cdef Py_ssize_t i, j, r, entering, leaving
    cdef long pivots = 0
    cdef double qmin, piv, f
    z_arr = np.zeros(n)
    cdef double[::1] z = z_arr

    qmin = 0.0
    r = -1
    for i in range(n):
        if q[i] <= qmin:
            if q[i] < 0.0 or r >= 0:
                qmin = q[i]
                r = i
    if r < 0 or qmin >= 0.0:
        return LCP_SOLVED, z_arr, 0

    tab_arr = np.zeros((n, width))
    cdef double[:, ::1] tab = tab_arr
    basis_arr = np.arange(n, dtype=np.intp)
    cdef cnp.intp_t[::1] basis = basis_arr
    cand_arr = np.empty(n, dtype=np.intp)
    keep_arr = np.empty(n, dtype=np.intp)
    cdef cnp.intp_t[::1] cand = cand_arr
    cdef cnp.intp_t[::1] keep = keep_arr
    for i in range(n):
        tab[i, i] = 1.0
        for j in range(n):
            tab[i, n + j] = -M[i, j]
        tab[i, z0] = -1.0
        tab[i, rhs] = q[i]

    entering = z0
    while True:
        piv = tab[r, entering]
        for j in range(width):
            tab[r, j] /= piv
        for i in range(n):
            if i != r:
                f = tab[i, entering]
                if f != 0.0:
                    for j in range(width):
                        tab[i, j] -= f * tab[r, j]
        leaving = basis[r]
        basis[r] = entering
        pivots += 1
        if leaving == z0:
            break
        if pivots >= max_pivots:
            return LCP_CYCLE, z_arr, pivots
        if leaving < n:
            entering = leaving + n
        else:
            entering = leaving - n
        r = _choose_row(tab, basis, entering, n, z0, eps, cand, keep)
        if r < 0:
            return LCP_RAY, z_arr, pivots

    for i in range(n):
        if basis[i] >= n and basis[i] < 2 * n:
            z[basis[i] - n] = tab[i, rhs]
    return LCP_SOLVED, z_arr, pivots
