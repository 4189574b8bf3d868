"""Compiled kernel for the exhaustive lattice search in ``optimizer``."""
import numpy as np
from numba import njit


@njit(cache=True)
def _ratio(theta, C, T, rows, cols, W, A, P, Q):
    n = C.shape[0]
    for k in range(theta.size):
        W[rows[k], cols[k]] = theta[k]
        W[cols[k], rows[k]] = theta[k]
    total = 0.0
    e1 = 0.0
    for i in range(n):
        r = 0.0
        for j in range(n):
            r += W[i, j]
            e1 += W[i, j] * C[i, j]
        for j in range(n):
            A[i, j] = W[i, j] / r
            P[i, j] = A[i, j]
        total += r
    e1 /= total
    if e1 <= 0.0:
        return -np.inf
    for _ in range(T - 1):
        for i in range(n):
            for j in range(n):
                s = 0.0
                for k in range(n):
                    s += P[i, k] * A[k, j]
                Q[i, j] = s
        for i in range(n):
            for j in range(n):
                P[i, j] = Q[i, j]
    eT = 0.0
    for i in range(n):
        r = 0.0
        s = 0.0
        for j in range(n):
            r += W[i, j]
            s += P[i, j] * C[i, j]
        eT += r * s
    return eT / (total * T * e1)


@njit(cache=True)
def grid_search(C, T, m, N, rho, rows, cols, diag, symmetric):
    """Best composition c of N into m parts for theta = rho**c; returns (c, count)."""
    n = C.shape[0]
    powers = np.empty(N + 1)
    for k in range(N + 1):
        powers[k] = rho ** (k - N)
    c = np.zeros(m, dtype=np.int64)
    c[0] = N
    best = -np.inf
    best_c = c.copy()
    theta = np.empty(m)
    W = np.zeros((n, n))
    A = np.empty((n, n))
    P = np.empty((n, n))
    Q = np.empty((n, n))
    count = 0
    t = N
    h = 0
    while True:
        ok = True
        if symmetric:
            for k in range(diag.size - 1):
                if c[diag[k]] < c[diag[k + 1]]:
                    ok = False
                    break
        if ok:
            for k in range(m):
                theta[k] = powers[c[k]]
            val = _ratio(theta, C, T, rows, cols, W, A, P, Q)
            count += 1
            if val > best:
                best = val
                best_c[:] = c
        if m == 1 or c[m - 1] == N:
            break
        # next composition (NEXCOM)
        if t > 1:
            h = 0
        h += 1
        t = c[h - 1]
        c[h - 1] = 0
        c[0] = t - 1
        c[h] += 1
    return best_c, count
