"""Independent reference computations used by the tests.

None of these share code paths with the package: energies by explicit path
enumeration, the Hamming cube through the Ehrenfest distance chain,
transport and feasibility by scipy's LP solver, bounds with mpmath.
"""
import itertools
from fractions import Fraction

import mpmath
import numpy as np
from scipy.optimize import linprog


def energy_by_paths(pi, a, dist, f, p, T):
    """sum over all state paths z_0..z_T of pi_{z0} prod a * d(f z0, f zT)^p (integer p)."""
    n = len(pi)
    total = Fraction(0)
    for path in itertools.product(range(n), repeat=T + 1):
        w = Fraction(pi[path[0]])
        for s, t in zip(path, path[1:]):
            w *= a[s][t]
            if w == 0:
                break
        if w:
            total += w * Fraction(dist[f[path[0]]][f[path[-1]]]) ** p
    return total


def cylinder_by_paths(pi, a, sets):
    n = len(pi)
    total = Fraction(0)
    for path in itertools.product(*[sorted(s) for s in sets]):
        w = Fraction(pi[path[0]])
        for s, t in zip(path, path[1:]):
            w *= a[s][t]
        total += w
    return total


def ehrenfest_second_moment(d, T):
    """E[H_T^2] for the simple walk on {0,1}^d started stationary, H the Hamming distance to the start.

    H_t is the birth-death chain on {0..d}: h -> h-1 w.p. h/d, h -> h+1 w.p. (d-h)/d.
    """
    law = [Fraction(0)] * (d + 1)
    law[0] = Fraction(1)
    for _ in range(T):
        nxt = [Fraction(0)] * (d + 1)
        for h, m in enumerate(law):
            if m:
                if h:
                    nxt[h - 1] += m * Fraction(h, d)
                if h < d:
                    nxt[h + 1] += m * Fraction(d - h, d)
        law = nxt
    return sum(m * h * h for h, m in enumerate(law))


def hamming_simple_ratio(d, T):
    return ehrenfest_second_moment(d, T) / T


def transport_lp(dist, mu, nu, p):
    """Min sum q_ij d_ij^p over couplings, by linear programming (float)."""
    xs, ws = zip(*mu.items())
    ys, vs = zip(*nu.items())
    m, n = len(xs), len(ys)
    cost = np.array([[float(dist[x][y]) ** p for y in ys] for x in xs]).ravel()
    A, b = [], []
    for i in range(m):
        row = np.zeros(m * n)
        row[i * n:(i + 1) * n] = 1
        A.append(row)
        b.append(float(ws[i]))
    for j in range(n):
        row = np.zeros(m * n)
        row[j::n] = 1
        A.append(row)
        b.append(float(vs[j]))
    res = linprog(cost, A_eq=np.array(A), b_eq=np.array(b), bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun ** (1 / p)


def lp_feasible(eqs, ineqs, n):
    """Float feasibility of {A x = b, G x >= h} via linprog."""
    A_eq = np.array([[float(c) for c in row] for row, _ in eqs]) if eqs else None
    b_eq = np.array([float(r) for _, r in eqs]) if eqs else None
    A_ub = np.array([[-float(c) for c in row] for row, _ in ineqs]) if ineqs else None
    b_ub = np.array([-float(r) for _, r in ineqs]) if ineqs else None
    res = linprog(np.zeros(n), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=(None, None), method="highs")
    return res.status == 0


def bound_wp_mp(p, d, T):
    with mpmath.workdps(50):
        p, d, T = mpmath.mpf(p), mpmath.mpf(d), mpmath.mpf(T)
        e = mpmath.mpf(1) / 2 - 1 / p
        return 16 * mpmath.power(d, e) * mpmath.sqrt(p) * mpmath.power(T, e)


def bound_w2_mp(p, d):
    with mpmath.workdps(50):
        p, d = mpmath.mpf(p), mpmath.mpf(d)
        return 4 * mpmath.power(d, mpmath.mpf(1) / 2 - 1 / p) * mpmath.sqrt(p - 1)


def bound_distortion_mp(n, alpha, p, d, C):
    with mpmath.workdps(50):
        n, alpha, p, d, C = map(mpmath.mpf, (n, alpha, p, d, C))
        return C * mpmath.power(d, -mpmath.mpf(1) / 2 + 1 / p) / mpmath.sqrt(p) \
            * mpmath.power(mpmath.log(n), alpha - mpmath.mpf(1) / 2)


def two_point_ratio_sweep(T, steps=2000):
    """Max over w = [[t,1],[1,t]] of the 2-point ratio: the lazy flip with stay probability s."""
    best = 0.0
    for k in range(steps + 1):
        t = 10 ** (6 * k / steps) - 1
        s = t / (t + 1)
        value = (1 - (2 * s - 1) ** T) / (2 * T * (1 - s))
        best = max(best, value)
    return best


