"""Pure Python implementations of the numerical kernels.

These mirror ``geqn._ckernels`` exactly (same signatures, same pivoting
rules) and are used when the compiled extension is unavailable. The LU
routines also accept ``object`` arrays, which lets exact rational
arithmetic (``fractions.Fraction``) flow through a Newton step.
"""

import numpy as np

LCP_SOLVED = 0
LCP_RAY = 1
LCP_CYCLE = 2


def lu_factor(a, tol):
    """LU factorization with partial pivoting, in place on a copy.

    Returns ``(lu, piv, info)``; ``info`` is the column of the first pivot
    whose magnitude is ``<= tol`` or ``-1`` when the factorization succeeded.
    """
    lu = np.array(a, copy=True)
    n = lu.shape[0]
    piv = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax([abs(v) for v in lu[k:, k]]))
        if not abs(lu[p, k]) > tol:
            return lu, piv, k
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
        lu[k + 1:, k] = lu[k + 1:, k] / lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv, -1


def lu_solve(lu, piv, b):
    n = lu.shape[0]
    y = np.array(b, copy=True)[piv]
    for i in range(n):
        y[i] = y[i] - lu[i, :i].dot(y[:i])
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1:].dot(y[i + 1:])) / lu[i, i]
    return y


def _lexmin_row(tab, rows, col, n, eps):
    # Lexicographic minimum of (rhs_i, Binv_i) / d_i over the candidate rows.
    d = tab[rows, col]
    key = tab[rows, -1] / d
    for j in range(-1, n):
        best = key.min()
        keep = key <= best + eps * (1.0 + abs(best))
        rows, d = rows[keep], d[keep]
        if rows.size == 1 or j == n - 1:
            break
        key = tab[rows, j + 1] / d
    return int(rows[0])


def lemke(M, q, max_pivots, eps=1e-12):
    """Lemke's complementary pivoting with covering vector ``e``.

    Returns ``(status, z, pivots)`` with ``status`` one of
    ``LCP_SOLVED``, ``LCP_RAY``, ``LCP_CYCLE``.
    """
    M = np.asarray(M, dtype=float)
    q = np.asarray(q, dtype=float)
    n = q.shape[0]
    if np.all(q >= 0.0):
        return LCP_SOLVED, np.zeros(n), 0

    z0 = 2 * n
    # columns: w_0..w_{n-1}, z_0..z_{n-1}, artificial, rhs
    tab = np.zeros((n, 2 * n + 2))
    tab[:, :n] = np.eye(n)
    tab[:, n:2 * n] = -M
    tab[:, z0] = -1.0
    tab[:, -1] = q
    basis = np.arange(n)

    qmin = q.min()
    r = int(np.flatnonzero(q <= qmin)[-1])
    entering = z0
    pivots = 0
    while True:
        tab[r] /= tab[r, entering]
        for i in range(n):
            if i != r and tab[i, entering] != 0.0:
                tab[i] -= tab[i, entering] * tab[r]
        leaving = basis[r]
        basis[r] = entering
        pivots += 1
        if leaving == z0:
            break
        if pivots >= max_pivots:
            return LCP_CYCLE, np.zeros(n), pivots
        entering = leaving + n if leaving < n else leaving - n
        rows = np.flatnonzero(tab[:, entering] > eps)
        if rows.size == 0:
            return LCP_RAY, np.zeros(n), pivots
        ratios = tab[rows, -1] / tab[rows, entering]
        best = ratios.min()
        ties = rows[ratios <= best + eps * (1.0 + abs(best))]
        hit = np.flatnonzero(basis[ties] == z0)
        if hit.size:
            r = int(ties[hit[0]])
        else:
            r = _lexmin_row(tab, ties, entering, n, eps)

    z = np.zeros(n)
    for i in range(n):
        if n <= basis[i] < 2 * n:
            z[basis[i] - n] = tab[i, -1]
    return LCP_SOLVED, z, pivots
