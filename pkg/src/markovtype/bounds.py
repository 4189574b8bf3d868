"""Closed-form upper bounds on Markov type of Wasserstein spaces and the
resulting distortion lower bound for snowflaked point sets."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OutOfRange


@dataclass(frozen=True)
class BoundQuery:
    p: float
    d: int = 1
    T: float = 1
    n: float = 2
    alpha: float = 1.0
    C: float = 1.0

    def zeta(self) -> float:
        """(p/2 - 1) / (p - 1)."""
        return (self.p / 2 - 1) / (self.p - 1)


def _check(p, d, T=1):
    if not p > 2:
        raise OutOfRange(f"p = {p} must exceed 2")
    if d < 1:
        raise OutOfRange(f"d = {d} must be >= 1")
    if T < 1:
        raise OutOfRange(f"T = {T} must be >= 1")


def bound_wp(p: float, d: int, T: float) -> float:
    """16 d^(1/2 - 1/p) p^(1/2) T^(1/2 - 1/p)."""
    _check(p, d, T)
    e = 0.5 - 1 / p
    return 16 * d ** e * math.sqrt(p) * T ** e


def bound_w2(p: float, d: int) -> float:
    """4 d^(1/2 - 1/p) sqrt(p - 1)."""
    _check(p, d)
    return 4 * d ** (0.5 - 1 / p) * math.sqrt(p - 1)


def bound_distortion(n: float, alpha: float, p: float, d: int, C: float = 1.0) -> float:
    """C d^(-1/2 + 1/p) p^(-1/2) (log n)^(alpha - 1/2).

    C is an absolute constant the theory leaves unspecified; it defaults to 1.
    """
    _check(p, d)
    if not 0.5 <= alpha <= 1:
        raise OutOfRange(f"alpha = {alpha} must lie in [1/2, 1]")
    if not n > 1:
        raise OutOfRange(f"n = {n} must exceed 1")
    if not C > 0:
        raise OutOfRange(f"C = {C} must be positive")
    return C * d ** (-0.5 + 1 / p) / math.sqrt(p) * math.log(n) ** (alpha - 0.5)
