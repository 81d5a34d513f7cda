"""Coherent measures built from Kerov data, transition kernels and level mixing."""

from __future__ import annotations

import math
from fractions import Fraction

from . import scalar as sc
from .graph import csv_text
from .kerov import DegenerateError, KerovData
from .multiplicity import commutator_diagonal


class MeasureError(ValueError):
    pass


class LevelMeasure:
    """Masses of the singletons of one level."""

    def __init__(self, graph, n: int, masses: dict, mode: str = "algebraic"):
        self.graph = graph
        self.n = n
        self.masses = masses
        self.mode = mode

    def __getitem__(self, v):
        return self.masses[v]

    def __iter__(self):
        return iter(self.masses)

    def __len__(self):
        return len(self.masses)

    def items(self):
        return self.masses.items()

    def total(self):
        return sum(self.masses.values(), Fraction(0))

    def to_csv(self) -> str:
        return csv_text(["vertex", "mass"], [(self.graph.code(v), sc.format_exact(m)) for v, m in self.masses.items()])

    def as_float(self) -> dict:
        return {v: sc.to_float(m) for v, m in self.masses.items()}


def _check_probability(lm: LevelMeasure):
    for v, m in lm.items():
        f = sc.to_float(m)
        if isinstance(f, complex):
            if abs(f.imag) > 1e-14:
                raise MeasureError(f"complex mass at {lm.graph.code(v)!r}: {f}")
            f = f.real
        if f < 0:
            raise MeasureError(f"negative mass at {lm.graph.code(v)!r}: {sc.format_exact(m)}")


def partition_function(k: KerovData, n: int):
    """Z_n = n! (t)_n."""
    return math.factorial(n) * sc.pochhammer(k.t, n)


def _weight(k: KerovData, lam):
    return k.graph.dimension_sq(lam) * k.q2_prod(lam)


def coherent_measure(k: KerovData, n: int, mode: str = "algebraic") -> LevelMeasure:
    g = k.graph
    if n > g.depth:
        raise MeasureError(f"level {n} beyond depth {g.depth}")
    z = partition_function(k, n)
    if sc.is_zero(z, 1e-300):
        raise MeasureError(f"Z_{n} = n!(t)_n vanishes (t = {sc.format_exact(k.t)})")
    lm = LevelMeasure(g, n, {lam: _weight(k, lam) / z for lam in g.vertices(n)}, mode)
    if mode == "probability":
        _check_probability(lm)
    return lm


def normalization_check(k: KerovData, n: int) -> dict:
    lhs = sum((_weight(k, lam) for lam in k.graph.vertices(n)), 0 * _one(k))
    rhs = partition_function(k, n)
    return {"ok": sc.close(lhs, rhs), "lhs": lhs, "rhs": rhs}


def _one(k):
    return Fraction(1) if sc.is_exact(k.t) else 1.0


# --- kernels ---------------------------------------------------------------------

def down_kernel(g, lam) -> dict:
    """p_down(lam, mu) = kappa(mu, lam) dim(mu) / dim(lam)."""
    d = g.dim_base(lam)
    return {mu: g.kappa_base(mu, lam) * g.dim_base(mu) / d for mu in g.cocovers(lam)}


def up_kernel(k: KerovData, lam) -> dict:
    """p_up(lam, nu) = M_{n+1}(nu) p_down(nu, lam) / M_n(lam), with the measure ratio cancelled.

    The cancelled form kappa'(lam, nu) q^2(nu/lam) dim(nu) / ((n+1)(n+t) dim(lam))
    stays defined at vertices where M_n vanishes.
    """
    g = k.graph
    n = g.level(lam)
    denom = (n + 1) * (n + k.t)
    if sc.is_zero(denom, 1e-300):
        raise DegenerateError(f"n + t vanishes at level {n}")
    d = g.dim_base(lam)
    return {nu: g.kappa_dual(lam, nu) * k.q2_edge(lam, nu) * g.dim_base(nu) / (denom * d) for nu in g.covers(lam)}


def check_coherency(k: KerovData, n: int) -> dict:
    """sum_nu M_{n+1}(nu) p_down(nu, lam) = M_n(lam) on level n."""
    g = k.graph
    upper = coherent_measure(k, n + 1)
    lower = coherent_measure(k, n)
    acc = {lam: 0 * _one(k) for lam in g.vertices(n)}
    for nu in g.vertices(n + 1):
        for mu, p in down_kernel(g, nu).items():
            acc[mu] = acc[mu] + upper[nu] * p
    for lam in g.vertices(n):
        if not sc.close(acc[lam], lower[lam]):
            return {"ok": False, "lambda": g.code(lam), "lhs": acc[lam], "rhs": lower[lam]}
    return {"ok": True}


def kernel_rows_ok(rows: dict) -> bool:
    return sc.close(sum(rows.values(), Fraction(0)), 1)


# --- mixing ---------------------------------------------------------------------

def negative_binomial(c, xi, n: int):
    """pi_{c,xi}(n) = (1 - xi)^c (c)_n / n! xi^n."""
    return sc.rational_power(1 - xi, c) * sc.pochhammer(c, n) / math.factorial(n) * sc.rational_power(xi, n)


def negative_binomial_tail(c, xi, n0: int) -> float:
    """Upper bound for sum_{n > n0} pi_{c,xi}(n) (ratio test, valid once the ratio is < 1)."""
    c, xi = float(sc.to_float(c)), float(sc.to_float(xi))
    n = n0 + 1
    rho = xi * (n + c) / (n + 1)
    while rho >= 1:
        n += 1
        rho = xi * (n + c) / (n + 1)
    head = sum(_nb_float(c, xi, m) for m in range(n0 + 1, n))
    return head + _nb_float(c, xi, n) / (1 - rho)


def _nb_float(c, xi, n):
    return math.exp(c * math.log1p(-xi) + math.lgamma(c + n) - math.lgamma(c) - math.lgamma(n + 1) + n * math.log(xi))


class MixedMeasure:
    """M_xi(lam) = pi_{t,xi}(|lam|) M_{|lam|}(lam), evaluated lazily and cached."""

    def __init__(self, k: KerovData, xi):
        t = sc.to_float(k.t)
        if isinstance(t, complex) or t <= 0:
            raise MeasureError("mixing needs t > 0")
        if not 0 < sc.to_float(xi) < 1:
            raise MeasureError("xi must lie in (0, 1)")
        self.k = k
        self.xi = xi
        self._levels: dict = {}

    def level(self, n: int) -> LevelMeasure:
        if n not in self._levels:
            self._levels[n] = coherent_measure(self.k, n)
        return self._levels[n]

    def marginal(self, n: int):
        return negative_binomial(self.k.t, self.xi, n)

    def __call__(self, lam):
        n = self.k.graph.level(lam)
        return self.marginal(n) * self.level(n)[lam]

    def table(self, N: int | None = None) -> dict:
        N = self.k.depth if N is None else N
        return {lam: self(lam) for n in range(N + 1) for lam in self.k.graph.vertices(n)}

    def tail(self, N: int) -> float:
        return negative_binomial_tail(self.k.t, self.xi, N)


def mixed_measure(k: KerovData, xi) -> MixedMeasure:
    return MixedMeasure(k, xi)


# --- Plancherel -------------------------------------------------------------------

def heisenberg_constant(g):
    cls = commutator_diagonal(g)["classification"]
    if cls["kind"] != "heisenberg":
        raise MeasureError(f"graph is not Heisenberg ({cls['kind']})")
    return cls["r"]


def plancherel(g, n: int, r=None) -> LevelMeasure:
    """Pl_n(lam) = dim(lam)^2 / (r^n n!)."""
    r = heisenberg_constant(g) if r is None else r
    z = r ** n * math.factorial(n)
    return LevelMeasure(g, n, {lam: g.dimension_sq(lam) / z for lam in g.vertices(n)})


class PoissonizedPlancherel:
    """Pl_gamma(lam) = exp(-gamma r) gamma^|lam| (dim lam / |lam|!)^2."""

    def __init__(self, g, gamma, r=None):
        self.g = g
        self.gamma = gamma
        self.r = heisenberg_constant(g) if r is None else r

    def __call__(self, lam):
        n = self.g.level(lam)
        w = sc.to_float(self.g.dimension_sq(lam)) / math.factorial(n) ** 2
        return math.exp(-float(self.gamma * self.r)) * float(self.gamma) ** n * w

    def marginal(self, n: int) -> float:
        lam = float(self.gamma * self.r)
        return math.exp(-lam + n * math.log(lam) - math.lgamma(n + 1)) if lam > 0 else float(n == 0)


def poissonized_plancherel(g, gamma, r=None) -> PoissonizedPlancherel:
    return PoissonizedPlancherel(g, gamma, r)


# --- positivity validators ----------------------------------------------------------

def kingman_positivity_case(alpha, tau):
    """Which of the three nonnegative Ewens-Pitman regimes (alpha, tau) falls into, or None.

    Returns ("generic",), ("rows", N) or ("one_column",).
    """
    a, t = sc.to_float(alpha), sc.to_float(tau)
    if 0 <= a < 1 and t > -a:
        return ("generic",)
    if a < 0:
        ratio = Fraction(tau) / Fraction(-alpha) if sc.is_exact(alpha) and sc.is_exact(tau) else t / -a
        if float(ratio) >= 1 and float(ratio) == int(float(ratio)):
            return ("rows", int(float(ratio)))
    if a == 1 and t > -1:
        return ("one_column",)
    return None


def check_probability(k: KerovData, n: int) -> dict:
    try:
        coherent_measure(k, n, mode="probability")
    except MeasureError as e:
        return {"ok": False, "reason": str(e)}
    return {"ok": True}


def measure_csv(lm: LevelMeasure) -> str:
    return lm.to_csv()
