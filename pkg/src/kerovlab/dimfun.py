"""Relative dimension functions P*_mu, the coefficient space A and the Kerov action on it.

An element of A is stored as an ``AVector``: a finitely supported map
mu -> coefficient over the basis {P*_mu}. Under a self-dualized multiplicity
the values P*_mu(lam) carry the radical sqrt(g(mu)); coefficients keep their
radicals explicitly, so identity checks stay exact as long as every sum runs
over terms with a common radicand.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import sympy

from . import scalar as sc
from .graph import TruncatedError, csv_text
from .kerov import KerovData
from .measures import MeasureError, MixedMeasure, down_kernel


class AVector(dict):
    """Coefficients over the basis {P*_mu}; ``degree`` is the largest |mu| in the support."""

    def __init__(self, graph, data=None):
        super().__init__(data or {})
        self.graph = graph

    @property
    def degree(self) -> int:
        nz = [self.graph.level(mu) for mu, c in self.items() if not sc.is_zero(c)]
        return max(nz) if nz else -1

    def copy(self):
        return AVector(self.graph, self)

    def add_to(self, mu, c):
        if mu in self:
            self[mu] = self[mu] + c
        else:
            self[mu] = c

    def __add__(self, other):
        out = self.copy()
        for mu, c in other.items():
            out.add_to(mu, c)
        return out

    def scaled(self, s):
        return AVector(self.graph, {mu: s * c for mu, c in self.items()})

    def __sub__(self, other):
        return self + other.scaled(-1)

    def pruned(self):
        return AVector(self.graph, {mu: c for mu, c in self.items() if not sc.is_zero(c)})

    def equals(self, other, rel: float = 1e-10) -> bool:
        keys = set(self) | set(other)
        return all(sc.close(self.get(mu, 0), other.get(mu, 0), rel) for mu in keys)

    def to_codes(self) -> dict:
        return {self.graph.code(mu): sc.format_exact(c) for mu, c in self.items()}


def basis(g, mu) -> AVector:
    return AVector(g, {mu: Fraction(1)})


# --- values ---------------------------------------------------------------------

def pstar_value(g, mu, lam):
    """P*_mu(lam) = |lam|^{down |mu|} dim(mu, lam) / dim(lam)."""
    d = g.rel_dim_base(mu, lam)
    if d == 0:
        return Fraction(0)
    val = sc.falling(g.level(lam), g.level(mu)) * d / g.dim_base(lam)
    if g.multiplicity.selfdual:
        val = val * sc.sqrt(g.gauge(mu))
    return val


def pstar_rational(g, mu, lam) -> Fraction:
    """P*_mu(lam) / sqrt(g(mu)); always rational for rational multiplicities."""
    d = g.rel_dim_base(mu, lam)
    if d == 0:
        return Fraction(0)
    return sc.falling(g.level(lam), g.level(mu)) * d / g.dim_base(lam)


def evaluate(f: AVector, lam):
    g = f.graph
    out = Fraction(0)
    for mu, c in f.items():
        if g.level(mu) <= g.level(lam) and not sc.is_zero(c):
            out = out + c * pstar_value(g, mu, lam)
    return out


def level_function(g) -> AVector:
    """The function p(lam) = |lam| expanded over level-one basis vectors."""
    root = g.family.root()
    return AVector(g, {k: g.kappa(root, k) for k in g.covers(root)})


def pieri_multiply_p(f: AVector) -> AVector:
    """p * P*_mu = |mu| P*_mu + sum over covers rho of mu of kappa(mu, rho) P*_rho."""
    g = f.graph
    out = AVector(g)
    for mu, c in f.items():
        if g.level(mu) >= g.depth:
            raise TruncatedError(f"degree {g.level(mu)} + 1 exceeds depth {g.depth}")
        out.add_to(mu, g.level(mu) * c)
        for rho in g.covers(mu):
            out.add_to(rho, g.kappa(mu, rho) * c)
    return out


def check_pieri(f: AVector) -> dict:
    g = f.graph
    prod = pieri_multiply_p(f)
    for n in range(g.depth + 1):
        for lam in g.vertices(n):
            lhs = n * evaluate(f, lam)
            rhs = evaluate(prod, lam)
            if not sc.close(lhs, rhs):
                return {"ok": False, "lambda": g.code(lam), "lhs": lhs, "rhs": rhs}
    return {"ok": True}


# --- Kerov action --------------------------------------------------------------

def q_root(k: KerovData, mu, lam):
    """q(lam/mu) with the principal branch per box."""
    return sc.sqrt(k.q2_edge(mu, lam))


def q_root_prod(k: KerovData, lam):
    """Product of the per-box roots q over lam (kept consistent with ``q_root``)."""
    g = k.graph
    if not g.family.ideal:
        return sc.sqrt(k.q2_box(None)) ** g.level(lam) if g.level(lam) else Fraction(1)
    out = Fraction(1)
    for b in sorted(g.boxes(lam), key=repr):
        out = out * sc.sqrt(k.q2_box(b))
    return out


def sqrt_mixed(k: KerovData, xi, lam):
    """M_xi(lam)^{1/2} without the global constant (1 - xi)^{t/2}.

    Equal to xi^{n/2} dim(lam) prod q / n!, using the same box roots as U and D.
    """
    g = k.graph
    n = g.level(lam)
    return sc.rational_power(xi, Fraction(n, 2)) * g.dimension(lam) * q_root_prod(k, lam) / math.factorial(n)


def ixi_pstar(k: KerovData, xi, mu, lam):
    return pstar_value(k.graph, mu, lam) * sqrt_mixed(k, xi, lam)


def raw_U(k: KerovData, values, lam):
    """(U f)(lam) = sum over cocovers kappa of lam of kappa(kappa, lam) q(lam/kappa) f(kappa)."""
    g = k.graph
    return sum((g.kappa(c, lam) * q_root(k, c, lam) * values(c) for c in g.cocovers(lam)), Fraction(0))


def raw_D(k: KerovData, values, lam):
    """(D f)(lam) = sum over covers nu of lam of kappa(lam, nu) q(nu/lam) f(nu)."""
    g = k.graph
    return sum((g.kappa(lam, nu) * q_root(k, lam, nu) * values(nu) for nu in g.covers(lam)), Fraction(0))


class LevelWeighted:
    """sum of coef * (a p + b) * (I_xi P*_mu) over stored terms (coef, a, b, mu)."""

    def __init__(self, k: KerovData, xi, terms):
        self.k = k
        self.xi = xi
        self.terms = list(terms)

    def evaluate(self, lam):
        n = self.k.graph.level(lam)
        out = Fraction(0)
        for coef, a, b, mu in self.terms:
            out = out + coef * (a * n + b) * ixi_pstar(self.k, self.xi, mu, lam)
        return out

    def lower(self) -> AVector:
        """Terms without a level multiplier, as an AVector (coefficients include the xi power)."""
        out = AVector(self.k.graph)
        for coef, a, b, mu in self.terms:
            if a == 0:
                out.add_to(mu, coef * b)
        return out


def _check_xi(xi):
    if not 0 < sc.to_float(xi) < 1:
        raise MeasureError("xi must lie in (0, 1)")


def apply_kerov_U(k: KerovData, xi, mu) -> LevelWeighted:
    """U(I_xi P*_mu) = xi^{-1/2} (p - |mu|) (I_xi P*_mu)."""
    _check_xi(xi)
    k.require_nondegenerate()
    m = k.graph.level(mu)
    return LevelWeighted(k, xi, [(sc.rational_power(xi, Fraction(-1, 2)), 1, -m, mu)])


def apply_kerov_D(k: KerovData, xi, mu) -> LevelWeighted:
    """D(I_xi P*_mu) = xi^{1/2} (p + |mu| + t)(I_xi P*_mu) + xi^{1/2} sum_rho kappa q^2 (I_xi P*_rho)."""
    _check_xi(xi)
    k.require_nondegenerate()
    g = k.graph
    m = g.level(mu)
    s = sc.rational_power(xi, Fraction(1, 2))
    terms = [(s, 1, m + k.t, mu)]
    for rho in g.cocovers(mu):
        terms.append((s, 0, g.kappa(rho, mu) * k.q2_edge(rho, mu), rho))
    return LevelWeighted(k, xi, terms)


def check_kerov_action(k: KerovData, xi, mu, which: str = "both") -> dict:
    """Compare the closed forms against the raw operators at every lam of level <= N - 1."""
    g = k.graph

    def values(v):
        return ixi_pstar(k, xi, mu, v)

    ops = []
    if which in ("U", "both"):
        ops.append(("U", apply_kerov_U(k, xi, mu), raw_U))
    if which in ("D", "both"):
        ops.append(("D", apply_kerov_D(k, xi, mu), raw_D))
    for name, closed, raw in ops:
        for n in range(g.depth):
            for lam in g.vertices(n):
                lhs = raw(k, values, lam)
                rhs = closed.evaluate(lam)
                if not sc.close(lhs, rhs):
                    return {"ok": False, "op": name, "lambda": g.code(lam), "lhs": lhs, "rhs": rhs}
    return {"ok": True}


# --- identities ---------------------------------------------------------------

def check_comb_identity(k: KerovData, mu, lam) -> dict:
    """sum_nu kappa q^2 dim(mu, nu) = sum_rho kappa q^2 dim(rho, lam) + (n+m+t)(n-m+1) dim(mu, lam)."""
    g = k.graph
    n, m = g.level(lam), g.level(mu)
    lhs = sum((g.kappa(lam, nu) * k.q2_edge(lam, nu) * g.relative_dimension(mu, nu) for nu in g.covers(lam)), Fraction(0))
    rhs = sum((g.kappa(rho, mu) * k.q2_edge(rho, mu) * g.relative_dimension(rho, lam) for rho in g.cocovers(mu)), Fraction(0))
    rhs = rhs + (n + m + k.t) * (n - m + 1) * g.relative_dimension(mu, lam)
    return {"ok": sc.close(lhs, rhs), "lhs": lhs, "rhs": rhs}


def check_recurrence(g, mu, lam) -> dict:
    """(|lam| - |mu|) P*_mu(lam) = |lam| sum over cocovers nu of p_down(lam, nu) P*_mu(nu)."""
    n = g.level(lam)
    lhs = (n - g.level(mu)) * pstar_value(g, mu, lam)
    rhs = n * sum((p * pstar_value(g, mu, nu) for nu, p in down_kernel(g, lam).items()), Fraction(0))
    return {"ok": sc.close(lhs, rhs), "lhs": lhs, "rhs": rhs}


def evaluation_matrix(g, n: int):
    """[P*_mu(lam) / sqrt(g(mu))] over vertices of level <= n, rows lam, columns mu."""
    verts = [v for m in range(n + 1) for v in g.vertices(m)]
    return verts, [[pstar_rational(g, mu, lam) for mu in verts] for lam in verts]


def evaluation_determinant(g, n: int) -> Fraction:
    """Exact determinant of the rationalized evaluation matrix (nonzero iff the P* are independent)."""
    _, rows = evaluation_matrix(g, n)
    mat = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    d = mat.det(method="bareiss")
    return Fraction(int(d.p), int(d.q))


def gram_matrix(k: KerovData, xi, mus, N: int | None = None):
    """Gram matrix of {P*_mu} under M_xi summed over levels <= N (float), with the tail bound."""
    g = k.graph
    N = g.depth if N is None else N
    mm = MixedMeasure(k, xi)
    G = np.zeros((len(mus), len(mus)))
    for n in range(N + 1):
        for lam in g.vertices(n):
            w = float(sc.to_float(mm(lam)))
            vals = [float(sc.to_float(pstar_value(g, mu, lam))) for mu in mus]
            G += w * np.outer(vals, vals)
    m = max(g.level(mu) for mu in mus)
    tail = _poly_tail(k.t, xi, N, 2 * m)
    return G, tail


def _poly_tail(t, xi, N: int, power: int) -> float:
    """sum_{n > N} n^power pi_{t,xi}(n), bounded by a geometric majorant of the ratio."""
    from .measures import _nb_float

    t, xi = float(sc.to_float(t)), float(sc.to_float(xi))
    n = N + 1
    while True:
        rho = xi * (n + t) / (n + 1) * ((n + 1) / n) ** power
        if rho < 1:
            break
        n += 1
    head = sum(m ** power * _nb_float(t, xi, m) for m in range(N + 1, n))
    return head + n ** power * _nb_float(t, xi, n) / (1 - rho)


def pstar_csv(g, n: int) -> str:
    rows = []
    for m in range(n + 1):
        for mu in g.vertices(m):
            for l in range(m, n + 1):
                for lam in g.vertices(l):
                    rows.append((g.code(mu), g.code(lam), sc.format_exact(pstar_value(g, mu, lam))))
    return csv_text(["mu", "lambda", "value"], rows)
