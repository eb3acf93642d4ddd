"""Exact rational arithmetic helpers.

Everything in the geometry pipeline works over arbitrary-precision
rationals (gmpy2.mpq); floating point is confined to the quantum
evaluation module.  This module centralizes the rational type plus the
small utilities used everywhere: primitive integer scaling, gcd/lcm
over vectors, and bit-exact (de)serialization as decimal strings.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from gmpy2 import mpq, mpz

QQ = mpq  # the rational constructor used across the package

ZERO = mpq(0)
ONE = mpq(1)


def rat(value, den=None) -> mpq:
    """Coerce ints, strings, Fractions or pairs to an exact rational."""
    if den is not None:
        return mpq(value, den)
    if isinstance(value, float):
        raise TypeError("refusing to coerce a float to an exact rational; "
                        "use rationalize() for explicit approximation")
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def rationalize(x: float, max_denominator: int = 10**12) -> mpq:
    """Continued-fraction rational approximation of a float (diagnostic use)."""
    f = Fraction(x).limit_denominator(max_denominator)
    return mpq(f.numerator, f.denominator)


def vec_gcd(ints: Iterable[int]) -> int:
    g = 0
    for v in ints:
        g = gcd(g, int(v))
        if g == 1:
            return 1
    return g


def vec_lcm_den(values: Sequence[mpq]) -> int:
    """lcm of the denominators of a rational vector."""
    l = 1
    for v in values:
        d = int(v.denominator)
        l = l // gcd(l, d) * d
    return l


def integerize(values: Sequence[mpq]) -> tuple[int, ...]:
    """Scale a rational vector by the positive rational that makes it a
    primitive integer vector (integral entries, gcd 1).  The zero vector
    maps to itself."""
    l = vec_lcm_den(values)
    ints = [int(v * l) for v in values]
    g = vec_gcd(ints)
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def rat_to_pair(v: mpq) -> list[str]:
    return [str(int(v.numerator)), str(int(v.denominator))]


def pair_to_rat(pair) -> mpq:
    return mpq(int(pair[0]), int(pair[1]))


def vector_to_json(values: Sequence[mpq]) -> list[list[str]]:
    return [rat_to_pair(mpq(v)) for v in values]


def vector_from_json(data) -> tuple[mpq, ...]:
    return tuple(pair_to_rat(p) for p in data)


def as_int(v: mpq) -> int:
    """Exact cast of an integral rational; raises if not an integer."""
    if v.denominator != 1:
        raise ValueError(f"{v} is not integral")
    return int(v.numerator)


__all__ = [
    "QQ", "ZERO", "ONE", "mpq", "mpz", "rat", "rationalize",
    "vec_gcd", "vec_lcm_den", "integerize",
    "rat_to_pair", "pair_to_rat", "vector_to_json", "vector_from_json",
    "as_int",
]
