"""Classical monic orthogonal polynomials of a discrete variable, from three-term recurrences.

Kept free of any graph code so it can serve as an independent oracle.
Monic recurrence: p_{n+1}(x) = (x - b_n) p_n(x) - c_n p_{n-1}(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class PolyError(ValueError):
    pass


def _ex(x):
    return Fraction(x) if isinstance(x, int) and not isinstance(x, bool) else x


@dataclass(frozen=True)
class PolySpec:
    kind: str
    params: tuple

    @staticmethod
    def meixner(t, xi):
        if not (float(t) > 0 and 0 < float(xi) < 1):
            raise PolyError("meixner needs t > 0 and 0 < xi < 1")
        return PolySpec("meixner", (_ex(t), _ex(xi)))

    @staticmethod
    def charlier(gamma):
        if not float(gamma) > 0:
            raise PolyError("charlier needs gamma > 0")
        return PolySpec("charlier", (_ex(gamma),))

    @staticmethod
    def krawtchouk(N, p):
        if not (int(N) == N and N >= 0 and 0 < float(p) < 1):
            raise PolyError("krawtchouk needs integer N >= 0 and 0 < p < 1")
        return PolySpec("krawtchouk", (int(N), _ex(p)))

    def coefficients(self, n: int):
        """(b_n, c_n) of the monic recurrence."""
        if self.kind == "meixner":
            t, xi = self.params
            return (n + (n + t) * xi) / (1 - xi), n * (n - 1 + t) * xi / (1 - xi) ** 2
        if self.kind == "charlier":
            (g,) = self.params
            return n + g, n * g
        if self.kind == "krawtchouk":
            N, p = self.params
            return p * (N - n) + n * (1 - p), n * p * (1 - p) * (N - n + 1)
        raise PolyError(f"unknown kind {self.kind!r}")

    def weight(self, x: int):
        """Normalized discrete weight at x."""
        if self.kind == "meixner":
            t, xi = self.params
            if isinstance(t, Fraction) and t.denominator == 1 and isinstance(xi, Fraction):
                poch = math.prod((t + i for i in range(x)), start=Fraction(1))
                return (1 - xi) ** int(t) * poch / math.factorial(x) * xi ** x
            t, xi = float(t), float(xi)
            return math.exp(t * math.log1p(-xi) + math.lgamma(t + x) - math.lgamma(t) - math.lgamma(x + 1)
                            + x * math.log(xi))
        if self.kind == "charlier":
            g = float(self.params[0])
            return math.exp(-g + x * math.log(g) - math.lgamma(x + 1))
        N, p = self.params
        return math.comb(N, x) * p ** x * (1 - p) ** (N - x) if 0 <= x <= N else 0


def eval_monic(spec: PolySpec, n: int, x):
    if n < 0:
        raise PolyError("degree must be >= 0")
    if spec.kind == "krawtchouk" and n > spec.params[0]:
        raise PolyError("krawtchouk degree exceeds N")
    x = _ex(x)
    prev, cur = 0, Fraction(1) if not isinstance(x, float) else 1.0
    for k in range(n):
        b, c = spec.coefficients(k)
        prev, cur = cur, (x - b) * cur - c * prev
    return cur


def norm_squared(spec: PolySpec, n: int):
    """Squared norm of the monic polynomial under the normalized weight: prod c_1..c_n."""
    out = Fraction(1)
    for k in range(1, n + 1):
        out = out * spec.coefficients(k)[1]
    return out
