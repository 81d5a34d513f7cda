"""Scalar backends.

Exact values are ``Fraction`` or ``Surd`` (a rational times the square root of a
squarefree integer). Float values are plain ``float``/``complex``. The helpers
below dispatch on the type of their arguments so that the same formulas run in
either backend.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Number

from sympy import factorint


class MixedRadicalError(ArithmeticError):
    """Raised when adding two surds with different radicands."""


@lru_cache(maxsize=None)
def _squarefree_split(n: int) -> tuple[int, int]:
    # n = k^2 * s with s squarefree; n > 0
    k, s = 1, 1
    for p, e in factorint(n).items():
        k *= p ** (e // 2)
        if e % 2:
            s *= p
    return k, s


class Surd:
    """c * sqrt(s) with c rational and s a squarefree integer (s may be -1 times one)."""

    __slots__ = ("c", "s")

    def __init__(self, c, s: int = 1):
        self.c = Fraction(c)
        self.s = int(s)

    def __repr__(self):
        return f"Surd({self.c}, {self.s})"

    def __str__(self):
        return format_exact(self)

    # construction -------------------------------------------------------
    @staticmethod
    def sqrt(r) -> "Surd | Fraction":
        """Exact square root of a rational; negative input yields an imaginary surd."""
        r = Fraction(r)
        if r == 0:
            return Fraction(0)
        sign = -1 if r < 0 else 1
        r = abs(r)
        num = r.numerator * r.denominator
        k, s = _squarefree_split(num)
        return make_surd(Fraction(k, r.denominator), sign * s)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Surd):
            return other
        if isinstance(other, (int, Fraction)):
            return Surd(other, 1)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) + other if self.s < 0 else float(self) + other
            return NotImplemented
        if o.c == 0:
            return make_surd(self.c, self.s)
        if self.c == 0:
            return make_surd(o.c, o.s)
        if o.s != self.s:
            raise MixedRadicalError(f"cannot add sqrt({self.s}) and sqrt({o.s}) terms exactly")
        return make_surd(self.c + o.c, self.s)

    __radd__ = __add__

    def __neg__(self):
        return make_surd(-self.c, self.s)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return to_float(self) * other
            return NotImplemented
        c = self.c * o.c
        if c == 0:
            return Fraction(0)
        if self.s == o.s:
            return c * self.s
        prod = self.s * o.s
        sign = -1 if prod < 0 else 1
        if self.s < 0 and o.s < 0:
            c = -c
        k, s = _squarefree_split(abs(prod))
        return make_surd(c * k, sign * s)

    __rmul__ = __mul__

    def inverse(self):
        if self.c == 0:
            raise ZeroDivisionError("surd division by zero")
        # 1/(c sqrt s) = sqrt(s) / (c s)
        return make_surd(1 / (self.c * self.s), self.s)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return to_float(self) / other
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / to_float(self)
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return to_float(self) ** n
        if n < 0:
            return self.inverse() ** (-n)
        out: Surd | Fraction = Fraction(1)
        for _ in range(n):
            out = out * self
        return out

    def square(self) -> Fraction:
        return self.c * self.c * self.s

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return to_float(self) == other
            return NotImplemented
        if self.c == 0 and o.c == 0:
            return True
        return self.c == o.c and self.s == o.s

    def __hash__(self):
        if self.s == 1:
            return hash(self.c)
        return hash((self.c, self.s))

    def __bool__(self):
        return self.c != 0

    def _real_sign(self):
        if self.s < 0:
            raise TypeError("imaginary surd has no order")
        return (self.c > 0) - (self.c < 0)

    def __lt__(self, other):
        return to_float(self - other) < 0 if not _exact_zero(self - other) else False

    def __gt__(self, other):
        return to_float(self - other) > 0 if not _exact_zero(self - other) else False

    def __le__(self, other):
        return not self > other

    def __ge__(self, other):
        return not self < other

    def __abs__(self):
        return make_surd(abs(self.c), abs(self.s))

    def __float__(self):
        if self.s < 0:
            raise TypeError("imaginary surd")
        return float(self.c) * math.sqrt(self.s)

    def __complex__(self):
        return complex(float(self.c) * cmath.sqrt(self.s))


def _exact_zero(x) -> bool:
    return x == 0


def make_surd(c, s: int):
    """Normalize: plain radicand 1 (or zero coefficient) collapses to a Fraction."""
    c = Fraction(c)
    if c == 0 or s == 1:
        return c
    return Surd(c, s)


# backend helpers -----------------------------------------------------------

def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, Surd))


def to_float(x):
    if isinstance(x, Surd):
        return complex(x) if x.s < 0 else float(x)
    if isinstance(x, (int, Fraction)):
        return float(x)
    return x


def sqrt(x):
    """Square root in the backend of x (exact surd for rationals)."""
    if isinstance(x, (int, Fraction)):
        return Surd.sqrt(x)
    if isinstance(x, Surd):
        raise TypeError("nested radical not supported exactly")
    if isinstance(x, complex) or x < 0:
        return cmath.sqrt(x)
    return math.sqrt(x)


def square(x):
    if isinstance(x, Surd):
        return x.square()
    return x * x


def to_fraction(x) -> Fraction:
    if isinstance(x, Surd):
        raise MixedRadicalError(f"{x} is irrational")
    return Fraction(x)


def is_zero(x, tol: float = 0.0) -> bool:
    if is_exact(x):
        return x == 0
    return abs(x) <= tol


def close(a, b, rel: float = 1e-10, abs_tol: float = 1e-12) -> bool:
    """Exact equality for exact inputs, relative tolerance otherwise."""
    if is_exact(a) and is_exact(b):
        return a == b
    a, b = to_float(a), to_float(b)
    return abs(a - b) <= max(abs_tol, rel * max(abs(a), abs(b)))


def pochhammer(a, k: int):
    out = Fraction(1) if is_exact(a) else 1.0
    for i in range(k):
        out = out * (a + i)
    return out


def falling(x, k: int):
    out = Fraction(1) if is_exact(x) else 1.0
    for i in range(k):
        out = out * (x - i)
    return out


def rational_power(base, exponent):
    """base**exponent, exact when exponent is an integer or half-integer and base rational."""
    if is_exact(base) and not isinstance(base, Surd) and is_exact(exponent):
        e = Fraction(exponent)
        if e.denominator == 1:
            return Fraction(base) ** e.numerator
        if e.denominator == 2:
            root = Surd.sqrt(base)
            return root ** e.numerator if e.numerator >= 0 else 1 / (root ** (-e.numerator))
    b, e = to_float(base), to_float(exponent)
    return b ** e


def parse_number(text: str):
    """'p/q' or integer -> Fraction; decimal -> float; anything with j -> complex."""
    s = str(text).strip()
    if "j" in s:
        return complex(s.replace(" ", ""))
    try:
        return Fraction(s) if ("." not in s and "e" not in s.lower()) else float(s)
    except ValueError:
        return float(s)


def format_exact(x) -> str:
    """'p/q' for rationals, 'p/q*sqrt(s)' for surds, repr for floats."""
    if isinstance(x, Surd):
        return f"{x.c}*sqrt({x.s})"
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if isinstance(x, complex):
        return repr(x.real) if x.imag == 0 else repr(x)
    if isinstance(x, Number):
        return repr(float(x))
    return str(x)
