"""Exact rationals with an explicit high-precision real fallback.

Distances and probabilities are ``Fraction`` whenever every operation that
produced them was rational. Irrational operations (p-th roots, snowflakes)
return ``mpmath`` reals carried at ``REAL.dps`` digits; anything compared in
that mode uses an absolute/relative tolerance, 1e-12 by default.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

import mpmath
from mpmath.ctx_mp_python import _mpf

REAL = mpmath.MPContext()
REAL.dps = 40

DEFAULT_TOL = 1e-12

Real = type(REAL.mpf(0))
Number = Union[int, Fraction, "mpmath.mpf"]


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def is_real(x) -> bool:
    return isinstance(x, _mpf)


def exact(x) -> Fraction:
    """Coerce ``x`` to a Fraction.

    Accepts ints, Fractions, strings such as ``"3/10"`` or ``"0.25"``, and
    floats (read through their shortest decimal repr, so 0.1 -> 1/10).
    """
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def number(x):
    """Coerce to Fraction where possible, keep mpmath reals as they are."""
    if is_real(x):
        return REAL.mpf(x)
    return exact(x)


def real(x):
    if is_real(x):
        return x
    if isinstance(x, Fraction):
        return REAL.mpf(x.numerator) / x.denominator
    return REAL.mpf(x)


def to_float(x) -> float:
    return float(x)


def _iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def exact_root(x: Fraction, k: int):
    """Exact k-th root of a nonnegative rational, or None if irrational."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("root of a negative number")
    num, den = x.numerator, x.denominator
    rn, rd = _iroot(num, k), _iroot(den, k)
    if rn ** k == num and rd ** k == den:
        return Fraction(rn, rd)
    return None


def as_exponent(p):
    """Read an exponent; rational exponents stay exact."""
    if is_real(p):
        return p
    return exact(p)


def power(x, p):
    """``x ** p`` for x >= 0, exact when both are rational and it is rational."""
    p = as_exponent(p)
    if x == 0:
        return Fraction(0) if p > 0 else Fraction(1)
    if is_exact(x) and is_exact(p):
        x = Fraction(x)
        if p.denominator == 1:
            return x ** int(p)
        r = exact_root(x ** p.numerator, p.denominator)
        if r is not None:
            return r
    return REAL.power(real(x), real(p))


def root(x, p):
    """``x ** (1/p)``."""
    p = as_exponent(p)
    if is_exact(p):
        return power(x, 1 / Fraction(p))
    return power(x, 1 / real(p))


def close(a, b, tol: float = DEFAULT_TOL) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    a, b = real(a), real(b)
    return abs(a - b) <= tol * max(1, abs(a), abs(b))


def leq(a, b, tol: float = DEFAULT_TOL) -> bool:
    if is_exact(a) and is_exact(b):
        return a <= b
    a, b = real(a), real(b)
    return a <= b + tol * max(1, abs(a), abs(b))


def common_denominator(values: Iterable[Fraction]) -> int:
    den = 1
    for v in values:
        d = Fraction(v).denominator
        den = den * d // math.gcd(den, d)
    return den


def fmt(x) -> str:
    """Render a number for JSON/CSV: ``"num/den"`` for rationals."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    if is_real(x):
        return mpmath.nstr(x, 20, strip_zeros=True)
    return repr(x)
