"""Exact rational linear feasibility with verifiable certificates.

A system is ``A_eq x = b_eq`` together with ``A_ge x >= b_ge``. Equalities are
reduced by Gauss-Jordan elimination, the inequalities are rewritten over the
free variables and Fourier-Motzkin elimination decides the rest. Every
derived row remembers how it was built from the original rows, so an
inconsistency comes with an explicit combination that can be re-checked.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import arith


@dataclass
class LinearSystem:
    n_vars: int
    eqs: list = field(default_factory=list)   # (coeffs, rhs):  coeffs . x == rhs
    ineqs: list = field(default_factory=list)  # (coeffs, rhs):  coeffs . x >= rhs
    names: Optional[list] = None

    def _row(self, coeffs) -> list:
        if isinstance(coeffs, dict):
            row = [Fraction(0)] * self.n_vars
            for k, v in coeffs.items():
                row[k] += arith.exact(v)
            return row
        if len(coeffs) != self.n_vars:
            raise ValueError(f"expected {self.n_vars} coefficients")
        return [arith.exact(v) for v in coeffs]

    def add_eq(self, coeffs, rhs) -> None:
        self.eqs.append((self._row(coeffs), arith.exact(rhs)))

    def add_ge(self, coeffs, rhs) -> None:
        self.ineqs.append((self._row(coeffs), arith.exact(rhs)))

    def add_nonnegativity(self) -> None:
        for k in range(self.n_vars):
            self.add_ge({k: 1}, 0)

    def satisfied_by(self, x: Sequence[Fraction]) -> bool:
        dot = lambda c: sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
        return (all(dot(c) == b for c, b in self.eqs)
                and all(dot(c) >= b for c, b in self.ineqs))

    def describe_row(self, coeffs, rhs, op) -> str:
        names = self.names or [f"x{k}" for k in range(self.n_vars)]
        terms = [f"{arith.fmt(c)}*{names[k]}" for k, c in enumerate(coeffs) if c]
        return f"{' + '.join(terms) or '0'} {op} {arith.fmt(rhs)}"


@dataclass
class InfeasibilityCertificate:
    """Multipliers proving that a system has no solution.

    Summing ``eq_multipliers[k]`` times equality k and ``ge_multipliers[k]``
    (all >= 0) times inequality k cancels every variable and leaves either
    ``0 = c`` with ``c != 0`` (no inequalities used) or ``0 >= c`` with
    ``c > 0``.
    """

    system: LinearSystem
    eq_multipliers: list
    ge_multipliers: list

    def combination(self):
        n = self.system.n_vars
        coeffs = [Fraction(0)] * n
        const = Fraction(0)
        for y, (c, b) in zip(self.eq_multipliers, self.system.eqs):
            if y:
                for k in range(n):
                    coeffs[k] += y * c[k]
                const += y * b
        for lam, (c, b) in zip(self.ge_multipliers, self.system.ineqs):
            if lam:
                for k in range(n):
                    coeffs[k] += lam * c[k]
                const += lam * b
        return coeffs, const

    @property
    def constant(self) -> Fraction:
        return self.combination()[1]

    def verify(self) -> bool:
        if any(lam < 0 for lam in self.ge_multipliers):
            return False
        coeffs, const = self.combination()
        if any(coeffs):
            return False
        if any(self.ge_multipliers):
            return const > 0
        return const != 0


@dataclass
class FeasibilityResult:
    status: str  # "FEASIBLE" or "INFEASIBLE"
    solution: Optional[list] = None
    certificate: Optional[InfeasibilityCertificate] = None

    @property
    def feasible(self) -> bool:
        return self.status == "FEASIBLE"


def _axpy(alpha, x, y):
    """y + alpha * x, elementwise."""
    return [yi + alpha * xi for xi, yi in zip(x, y)]


def solve(system: LinearSystem) -> FeasibilityResult:
    n = system.n_vars
    m_eq, m_ge = len(system.eqs), len(system.ineqs)
    zero_eq = [Fraction(0)] * m_eq
    zero_ge = [Fraction(0)] * m_ge

    # Gauss-Jordan on the equalities; each row carries its multipliers.
    rows = []
    for k, (c, b) in enumerate(system.eqs):
        mult = list(zero_eq)
        mult[k] = Fraction(1)
        rows.append([list(c), b, mult])
    pivots = []  # (column, row)
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][0][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        c, b, mult = rows[r]
        inv = 1 / c[col]
        rows[r] = [[v * inv for v in c], b * inv, [v * inv for v in mult]]
        for i in range(len(rows)):
            if i != r and rows[i][0][col] != 0:
                f = -rows[i][0][col]
                rows[i] = [_axpy(f, rows[r][0], rows[i][0]), rows[i][1] + f * rows[r][1],
                           _axpy(f, rows[r][2], rows[i][2])]
        pivots.append((col, r))
        r += 1
    for c, b, mult in rows[r:]:
        if b != 0:
            cert = InfeasibilityCertificate(system, mult, list(zero_ge))
            return FeasibilityResult("INFEASIBLE", certificate=cert)

    pivot_cols = {col: i for col, i in pivots}
    free = [col for col in range(n) if col not in pivot_cols]
    x0 = [Fraction(0)] * n
    for col, i in pivots:
        x0[col] = rows[i][1]

    # Rewrite each inequality over the free variables: g.x >= h becomes
    # (g - sum_pc g_pc R_pc).x >= h - sum_pc g_pc rhs_pc.
    fm_rows = []
    for k, (g, h) in enumerate(system.ineqs):
        coeffs, rhs = list(g), h
        eq_mult = list(zero_eq)
        ge_mult = list(zero_ge)
        ge_mult[k] = Fraction(1)
        for col, i in pivots:
            gc = g[col]
            if gc:
                coeffs = _axpy(-gc, rows[i][0], coeffs)
                rhs -= gc * rows[i][1]
                eq_mult = _axpy(-gc, rows[i][2], eq_mult)
        fm_rows.append(([coeffs[f] for f in free], rhs, eq_mult, ge_mult))

    # Fourier-Motzkin over the free variables, keeping each stage for back-substitution.
    stages = []
    current = _dedupe(fm_rows)
    for v in range(len(free)):
        stages.append(current)
        pos = [rw for rw in current if rw[0][v] > 0]
        neg = [rw for rw in current if rw[0][v] < 0]
        nxt = [rw for rw in current if rw[0][v] == 0]
        for cp, bp, ep, gp in pos:
            for cn, bn, en, gn in neg:
                a, b = -cn[v], cp[v]
                nxt.append(([a * x + b * y for x, y in zip(cp, cn)], a * bp + b * bn,
                            [a * x + b * y for x, y in zip(ep, en)],
                            [a * x + b * y for x, y in zip(gp, gn)]))
        current = _dedupe(nxt)
        bad = next((rw for rw in current if not any(rw[0]) and rw[1] > 0), None)
        if bad is not None:
            return FeasibilityResult("INFEASIBLE", certificate=InfeasibilityCertificate(system, bad[2], bad[3]))
    bad = next((rw for rw in current if not any(rw[0]) and rw[1] > 0), None)
    if bad is not None:
        return FeasibilityResult("INFEASIBLE", certificate=InfeasibilityCertificate(system, bad[2], bad[3]))

    z = [Fraction(0)] * len(free)
    for v in reversed(range(len(free))):
        lo, hi = None, None
        for c, b, _, _ in stages[v]:
            if c[v] == 0:
                continue
            rest = b - sum((c[u] * z[u] for u in range(v + 1, len(free))), Fraction(0))
            bound = rest / c[v]
            if c[v] > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None and lo > 0:
            z[v] = lo
        elif hi is not None and hi < 0:
            z[v] = hi
    x = list(x0)
    for fv, col in zip(z, free):
        x[col] += fv
        for pc, i in pivots:
            x[pc] -= rows[i][0][col] * fv
    assert system.satisfied_by(x), "back-substitution produced a non-solution"
    return FeasibilityResult("FEASIBLE", solution=x)


def _dedupe(rows: list) -> list:
    seen, out = set(), []
    for c, b, e, g in rows:
        if not any(c) and b <= 0:
            continue
        lead = next((abs(v) for v in c if v), None) or abs(b) or Fraction(1)
        key = (tuple(v / lead for v in c), b / lead)
        if key not in seen:
            seen.add(key)
            out.append((c, b, e, g))
    return out
