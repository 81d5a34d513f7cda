"""Up/down chains, the jump process and its eigenfunctions.

Conventions. Vectors over vertices are plain dicts. Inside a level, vertices
keep the graph's level order (family sort key), which fixes the row/column
order of every exported matrix.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from fractions import Fraction
from itertools import permutations

import numpy as np
import sympy

from . import scalar as sc
from .dimfun import AVector, evaluate, pstar_value, q_root, sqrt_mixed
from .graph import csv_text
from .families import from_r_quotient, r_quotient, rim_hook_up, skew_boxes
from .kerov import DegenerateError, KerovData, make_kerov
from .measures import (
    MeasureError,
    MixedMeasure,
    coherent_measure,
    down_kernel,
    heisenberg_constant,
    negative_binomial,
    up_kernel,
)
from .orthopoly import PolySpec, eval_monic


class ToleranceError(ValueError):
    """Requested accuracy cannot be certified within the allowed truncation."""


def _zero(x):
    return Fraction(0) if sc.is_exact(x) else 0.0


def _check_jump_params(k: KerovData, xi):
    t = sc.to_float(k.t)
    if isinstance(t, complex) or t <= 0:
        raise MeasureError("jump dynamics need t > 0")
    if not 0 < sc.to_float(xi) < 1:
        raise MeasureError("xi must lie in (0, 1)")


# --- up/down chain ------------------------------------------------------------

class ChainOperator:
    """T_n as a dense matrix over G_n (rows: from, columns: to)."""

    def __init__(self, graph, n: int, vertices: list, matrix: list):
        self.graph = graph
        self.n = n
        self.vertices = vertices
        self.matrix = matrix
        self.exact = all(sc.is_exact(x) for row in matrix for x in row)

    @property
    def backend(self) -> str:
        return "exact" if self.exact else "float"

    def __getitem__(self, ij):
        i, j = ij
        return self.matrix[self.graph.index(i)][self.graph.index(j)]

    def rows_ok(self) -> bool:
        return all(sc.close(sum(row, _zero(row[0])), 1) for row in self.matrix)

    def detailed_balance(self, masses: dict) -> dict:
        vs = self.vertices
        for a, lam in enumerate(vs):
            for b in range(a + 1, len(vs)):
                lhs = masses[lam] * self.matrix[a][b]
                rhs = masses[vs[b]] * self.matrix[b][a]
                if not sc.close(lhs, rhs):
                    return {"ok": False, "pair": (self.graph.code(lam), self.graph.code(vs[b])),
                            "lhs": lhs, "rhs": rhs}
        return {"ok": True}

    def as_float(self) -> np.ndarray:
        return np.array([[complex(sc.to_float(x)) for x in row] for row in self.matrix]).real

    def to_csv(self) -> str:
        rows = [(self.graph.code(lam), self.graph.code(mu), sc.format_exact(self.matrix[a][b]))
                for a, lam in enumerate(self.vertices) for b, mu in enumerate(self.vertices)
                if not sc.is_zero(self.matrix[a][b])]
        return csv_text(["row", "col", "value"], rows)

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "backend": self.backend,
            "vertices": [self.graph.code(v) for v in self.vertices],
            "matrix": [[sc.format_exact(x) for x in row] for row in self.matrix],
        }, indent=1)


def updown_matrix(k: KerovData, n: int) -> ChainOperator:
    """T_n(lam, lam~) = sum_nu p_up(lam, nu) p_down(nu, lam~).

    Uses the cancelled up-kernel, so vertices with M_n = 0 get well-defined rows.
    """
    g = k.graph
    if n > g.depth - 1:
        raise MeasureError(f"T_{n} needs level {n + 1}, beyond depth {g.depth}")
    verts = g.vertices(n)
    idx = {v: i for i, v in enumerate(verts)}
    zero = _zero(k.t)
    mat = [[zero] * len(verts) for _ in verts]
    downs: dict = {}
    for lam in verts:
        row = mat[idx[lam]]
        for nu, pu in up_kernel(k, lam).items():
            if nu not in downs:
                downs[nu] = down_kernel(g, nu)
            for mu, pd in downs[nu].items():
                row[idx[mu]] = row[idx[mu]] + pu * pd
    return ChainOperator(g, n, verts, mat)


def check_Tn_action(k: KerovData, n: int, mu) -> dict:
    """(T_n - 1) P*_mu against the closed form, exactly on G_n."""
    g = k.graph
    T = updown_matrix(k, n)
    m = g.level(mu)
    t = k.t
    denom = (n + 1) * (n + t)
    a = -m * (m - 1 + t) / denom
    b = (n + 1 - m) / denom
    lower = [(g.kappa(rho, mu) * k.q2_edge(rho, mu), rho) for rho in g.cocovers(mu)]
    vals = {lam: pstar_value(g, mu, lam) for lam in T.vertices}
    for i, lam in enumerate(T.vertices):
        lhs = sum((T.matrix[i][j] * vals[v] for j, v in enumerate(T.vertices)), _zero(t)) - vals[lam]
        rhs = a * vals[lam] + b * sum((c * pstar_value(g, rho, lam) for c, rho in lower), _zero(t))
        if not sc.close(lhs, rhs):
            return {"ok": False, "lambda": g.code(lam), "lhs": lhs, "rhs": rhs, "residual": lhs - rhs}
    return {"ok": True}


def predicted_spectrum(k: KerovData, n: int) -> list:
    """[(j, eigenvalue, multiplicity)] with eigenvalue -j(j-1+t)/((n+1)(n+t))."""
    sizes = k.graph.level_sizes()
    t = k.t
    out = []
    for j in range(n + 1):
        mult = sizes[j] - (sizes[j - 1] if j else 0)
        out.append((j, -j * (j - 1 + t) / ((n + 1) * (n + t)), mult))
    return out


EXACT_SPECTRUM_MAX = 40


def _exact_eigenvalues(T: ChainOperator):
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in T.matrix])
    lam = sympy.Symbol("x")
    roots = sympy.roots(M.charpoly(lam).as_expr(), lam)
    if sum(roots.values()) != M.shape[0]:
        return None
    out = []
    for r, m in roots.items():
        r = sympy.nsimplify(r)
        if not r.is_Rational:
            return None
        out += [Fraction(int(r.p), int(r.q))] * m
    return out


def _float_eigenvalues(k: KerovData, T: ChainOperator):
    """Symmetrize the block where M_n > 0; the rest (closed under T^T) goes to a general solver."""
    A = T.as_float()
    masses = coherent_measure(k, T.n).as_float()
    w = np.array([float(np.real(masses[v])) for v in T.vertices])
    pos = np.where(w > 1e-300)[0]
    rest = np.where(w <= 1e-300)[0]
    vals = []
    if len(pos):
        s = np.sqrt(w[pos])
        S = A[np.ix_(pos, pos)] * s[:, None] / s[None, :]
        vals += list(np.linalg.eigvalsh((S + S.T) / 2))
    if len(rest):
        vals += list(np.linalg.eigvals(A[np.ix_(rest, rest)]).real)
    return sorted(vals)


def updown_spectrum(k: KerovData, n: int, exact: bool | None = None, tol: float = 1e-9) -> dict:
    """Spectrum of T_n - 1 against the predicted eigenvalues and multiplicities.

    Exact mode factors the characteristic polynomial over Q (default when the
    matrix is rational and small); otherwise a float solver is used.
    """
    T = updown_matrix(k, n)
    if exact is None:
        exact = T.exact and len(T.vertices) <= EXACT_SPECTRUM_MAX
    computed = _exact_eigenvalues(T) if exact and T.exact else None
    method = "charpoly"
    if computed is None:
        computed = _float_eigenvalues(k, T)
        method = "symmetrized-float"
    computed = [c - 1 for c in computed]
    pred = predicted_spectrum(k, n)
    groups: dict = {j: [] for j, _, _ in pred}
    for c in computed:
        j = min(pred, key=lambda p: abs(sc.to_float(p[1]) - sc.to_float(c)))[0]
        groups[j].append(c)
    rows, dev, ok = [], 0.0, True
    for j, e, mult in pred:
        got = groups[j]
        d = max((abs(float(sc.to_float(c - e))) for c in got), default=0.0)
        dev = max(dev, d)
        ok = ok and len(got) == mult
        rows.append({"j": j, "eigenvalue": (sum(got, _zero(e)) / len(got)) if got else None,
                     "multiplicity": len(got), "predicted": e, "predicted_multiplicity": mult, "deviation": d})
    return {"n": n, "method": method, "rows": rows, "max_deviation": dev, "ok": ok and dev < tol}


def spectrum_csv(spec: dict) -> str:
    rows = []
    for r in spec["rows"]:
        if r["predicted_multiplicity"] == 0 and r["multiplicity"] == 0:
            continue
        ev = "" if r["eigenvalue"] is None else sc.format_exact(r["eigenvalue"])
        rows.append((ev, r["multiplicity"], sc.format_exact(r["predicted"]), repr(r["deviation"])))
    return csv_text(["eigenvalue", "multiplicity", "predicted", "deviation"], rows)


# --- jump process -------------------------------------------------------------

def jump_rates(k: KerovData, xi, lam) -> dict:
    """Row of the generator Q at lam, diagonal included."""
    _check_jump_params(k, xi)
    g = k.graph
    n = g.level(lam)
    row = {}
    for mu, p in down_kernel(g, lam).items():
        row[mu] = n / (1 - xi) * p
    for nu, p in up_kernel(k, lam).items():
        row[nu] = xi * (n + k.t) / (1 - xi) * p
    row[lam] = -(n + xi * (n + k.t)) / (1 - xi)
    return row


def check_jump_rates(k: KerovData, xi, N: int | None = None) -> dict:
    """Row sums, level-marginal rates and detailed balance for lam at levels <= N - 1."""
    g = k.graph
    N = g.depth if N is None else N
    mm = MixedMeasure(k, xi)
    for n in range(N):
        for lam in g.vertices(n):
            row = jump_rates(k, xi, lam)
            up = sum((row[nu] for nu in g.covers(lam)), _zero(k.t))
            down = sum((row[mu] for mu in g.cocovers(lam)), _zero(k.t))
            if not (sc.close(up, xi * (n + k.t) / (1 - xi)) and sc.close(down, Fraction(n) / (1 - xi))
                    and sc.close(up + down + row[lam], 0)):
                return {"ok": False, "lambda": g.code(lam), "up": up, "down": down, "diag": row[lam]}
            for nu in g.covers(lam):
                if g.level(nu) >= g.depth:
                    back = (n + 1) / (1 - xi) * down_kernel(g, nu)[lam]
                else:
                    back = jump_rates(k, xi, nu)[lam]
                lhs, rhs = mm(lam) * row[nu], mm(nu) * back
                if not sc.close(lhs, rhs):
                    return {"ok": False, "edge": (g.code(lam), g.code(nu)), "lhs": lhs, "rhs": rhs}
    return {"ok": True}


def check_conjugation(k: KerovData, xi, N: int | None = None) -> dict:
    """I_xi Q I_xi^{-1} against (sqrt xi/(1-xi))(U+D) - (1+xi)/(2(1-xi)) H + t/2, entrywise.

    The constant (1-xi)^{t/2} cancels in the conjugation, so ``sqrt_mixed`` is used.
    """
    k = k.require_nondegenerate()
    g = k.graph
    N = g.depth if N is None else N
    s = sc.rational_power(xi, Fraction(1, 2)) / (1 - xi)
    for n in range(N):
        for lam in g.vertices(n):
            row = jump_rates(k, xi, lam)
            root = sqrt_mixed(k, xi, lam)
            for rho, q in row.items():
                lhs = root * q / sqrt_mixed(k, xi, rho)
                if rho == lam:
                    rhs = -(1 + xi) / (2 * (1 - xi)) * (2 * n + k.t) + k.t / 2
                elif g.level(rho) > n:
                    rhs = s * g.kappa(lam, rho) * q_root(k, lam, rho)
                else:
                    rhs = s * g.kappa(rho, lam) * q_root(k, rho, lam)
                if not sc.close(lhs, rhs, 1e-12):
                    return {"ok": False, "entry": (g.code(lam), g.code(rho)), "lhs": lhs, "rhs": rhs}
    return {"ok": True}


def check_embedded_chain(k: KerovData, xi, n: int) -> dict:
    """T_n from the jump chain observed at its up-then-down moves between G_n and G_{n+1}."""
    g = k.graph
    T = updown_matrix(k, n)
    idx = {v: i for i, v in enumerate(T.vertices)}
    for i, lam in enumerate(T.vertices):
        row = jump_rates(k, xi, lam)
        ups = {nu: row[nu] for nu in g.covers(lam)}
        tot = sum(ups.values(), _zero(k.t))
        acc = [_zero(k.t)] * len(T.vertices)
        for nu, r in ups.items():
            downs = {mu: (n + 1) / (1 - xi) * p for mu, p in down_kernel(g, nu).items()}
            dtot = sum(downs.values(), _zero(k.t))
            for mu, rr in downs.items():
                acc[idx[mu]] = acc[idx[mu]] + r / tot * rr / dtot
        for j in range(len(acc)):
            if not sc.close(acc[j], T.matrix[i][j]):
                return {"ok": False, "entry": (g.code(lam), g.code(T.vertices[j])), "lhs": acc[j],
                        "rhs": T.matrix[i][j]}
    return {"ok": True}


# --- generator on A -----------------------------------------------------------

class GeneratorOnA:
    """The generator on the basis {P*_mu : |mu| <= N}; column mu is the image of P*_mu."""

    def __init__(self, k: KerovData, xi, N: int):
        _check_jump_params(k, xi)
        g = k.graph
        if N > g.depth:
            raise MeasureError(f"N = {N} beyond depth {g.depth}")
        self.k, self.xi, self.N, self.t = k, xi, N, k.t
        self.basis = [v for n in range(N + 1) for v in g.vertices(n)]
        c = xi / (1 - xi)
        self.columns = {}
        for mu in self.basis:
            col = AVector(g, {mu: Fraction(-g.level(mu))})
            for rho in g.cocovers(mu):
                col.add_to(rho, c * g.kappa(rho, mu) * k.q2_edge(rho, mu))
            self.columns[mu] = col

    def entry(self, rho, mu):
        return self.columns[mu].get(rho, Fraction(0))

    def apply(self, f: AVector) -> AVector:
        out = AVector(self.k.graph)
        for mu, c in f.items():
            if sc.is_zero(c):
                continue
            if mu not in self.columns:
                raise MeasureError(f"degree {self.k.graph.level(mu)} beyond truncation {self.N}")
            for rho, e in self.columns[mu].items():
                out.add_to(rho, e * c)
        return out

    def matrix(self) -> list:
        return [[self.entry(rho, mu) for mu in self.basis] for rho in self.basis]

    def respects_filtration(self) -> bool:
        g = self.k.graph
        return all(g.level(rho) <= g.level(mu) for mu, col in self.columns.items() for rho, e in col.items()
                   if not sc.is_zero(e))

    def spectrum(self) -> dict:
        """Diagonal of the (triangular) matrix: eigenvalue -> multiplicity."""
        return dict(sorted(Counter(self.columns[mu][mu] for mu in self.basis).items(), reverse=True))

    def to_csv(self) -> str:
        g = self.k.graph
        rows = [(g.code(rho), g.code(mu), sc.format_exact(e)) for mu in self.basis
                for rho, e in self.columns[mu].items() if not sc.is_zero(e)]
        return csv_text(["row", "col", "value"], rows)


def generator_on_A(k: KerovData, xi, N: int | None = None) -> GeneratorOnA:
    return GeneratorOnA(k, xi, k.graph.depth if N is None else N)


# --- Meixner-type eigenfunctions ------------------------------------------------

def _below(g, lam):
    n = g.level(lam)
    return [mu for m in range(n + 1) for mu in g.vertices(m) if g.rel_dim_base(mu, lam) != 0]


def meixner_fn(k: KerovData, xi, lam) -> AVector:
    """Coefficients of M_lam over {P*_mu : mu below lam}."""
    _check_jump_params(k, xi)
    g = k.graph
    n = g.level(lam)
    c = xi / (xi - 1)
    out = AVector(g)
    for mu in _below(g, lam):
        d = n - g.level(mu)
        out[mu] = c ** d * g.relative_dimension(mu, lam) / math.factorial(d) * k.q2_skew(mu, lam)
    return out


def check_meixner_eigen(k: KerovData, xi, lam, gen: GeneratorOnA | None = None) -> dict:
    gen = gen or generator_on_A(k, xi, k.graph.level(lam))
    f = meixner_fn(k, xi, lam)
    lhs = gen.apply(f)
    rhs = f.scaled(-k.graph.level(lam))
    ok = lhs.equals(rhs) and sc.close(f[lam], 1)
    return {"ok": ok} if ok else {"ok": False, "lhs": lhs.to_codes(), "rhs": rhs.to_codes()}


def meixner_norm(k: KerovData, xi, lam):
    """xi^n (1 - xi)^{-2n} prod q^2."""
    n = k.graph.level(lam)
    return xi ** n / (1 - xi) ** (2 * n) * k.q2_prod(lam)


def moment_functional(k: KerovData, xi, f: AVector):
    """phi(P*_mu) = (xi/(1-xi))^{|mu|} prod q^2 dim(mu) / |mu|!, extended linearly."""
    g = k.graph
    c = xi / (1 - xi)
    out = Fraction(0)
    for mu, a in f.items():
        m = g.level(mu)
        out = out + a * c ** m * k.q2_prod(mu) * g.dimension(mu) / math.factorial(m)
    return out


def meixner_prime(k: KerovData, xi, lam, rho):
    """M'_lam(rho): M_lam(rho) divided by (-1)^n (xi/(1-xi))^n dim(lam)/n! prod q^2."""
    g = k.graph
    n = g.level(lam)
    scale = (-xi / (1 - xi)) ** n * g.dimension(lam) / math.factorial(n) * k.q2_prod(lam)
    if sc.is_zero(scale):
        raise DegenerateError(f"prod q^2 vanishes at {g.code(lam)!r}")
    return evaluate(meixner_fn(k, xi, lam), rho) / scale


def check_autoduality(k: KerovData, xi, lam, rho) -> dict:
    lhs = meixner_prime(k, xi, lam, rho)
    rhs = meixner_prime(k, xi, rho, lam)
    return {"ok": sc.close(lhs, rhs), "lhs": lhs, "rhs": rhs}


# --- inner products through normal ordering ---------------------------------------

def _conj(x):
    if isinstance(x, sc.Surd) and x.s < 0:
        return -x
    if isinstance(x, complex):
        return x.conjugate()
    return x


def _apply_up(g, vec, weight):
    out: dict = {}
    for lam, c in vec.items():
        for nu in g.covers(lam):
            out[nu] = out.get(nu, 0) + c * weight(lam, nu)
    return out


def _apply_down(g, vec):
    out: dict = {}
    for lam, c in vec.items():
        for mu in g.cocovers(lam):
            out[mu] = out.get(mu, 0) + c * g.kappa(mu, lam)
    return out


class _LevelPairing:
    """S_n = sum over nu in G_n of dim(alpha, nu) dim(beta, nu) w(nu), for all n >= max(|alpha|, |beta|).

    Writes S_n as a matrix element of D^{n-b} U^{n-a} and moves every D to the
    right with [D, U^i] = i (h + i - 1) U^{i-1} (sl2, h = 2 level + t) or
    i r U^{i-1} (Heisenberg). Only vectors within levels <= max(a, b) are built.
    With ``k`` given, U carries q^2 on its edges and w = prod q^2; otherwise w = 1.
    """

    def __init__(self, g, alpha, beta, k: KerovData | None = None, r=None):
        self.g, self.alpha, self.beta, self.k, self.r = g, alpha, beta, k, r
        self.a, self.b = g.level(alpha), g.level(beta)
        if k is not None:
            def weight(lam, nu):
                return g.kappa(lam, nu) * k.q2_edge(lam, nu)
        else:
            def weight(lam, nu):
                return g.kappa(lam, nu)
        downs = [{alpha: Fraction(1)}]
        for _ in range(self.a):
            downs.append(_apply_down(g, downs[-1]))
        base = []
        for s in range(self.a + 1):
            i = self.b - self.a + s
            if i < 0:
                base.append(Fraction(0))
                continue
            v = downs[s]
            for _ in range(i):
                v = _apply_up(g, v, weight)
            base.append(v.get(beta, Fraction(0)))
        self.rows = [base]
        self.pref = k.q2_prod(alpha) if k is not None else Fraction(1)

    def _coef(self, i, s):
        if self.k is None:
            return i * self.r
        return i * (2 * (self.a - s) + self.k.t + i - 1)

    def __call__(self, n: int):
        j = n - self.b
        if j < 0 or n < self.a:
            return Fraction(0)
        while len(self.rows) <= j:
            jj = len(self.rows)
            prev = self.rows[-1]
            row = []
            for s in range(self.a + 1):
                i = self.b - self.a + s + jj
                val = prev[s + 1] if s + 1 <= self.a else Fraction(0)
                if i > 0:
                    val = val + self._coef(i, s) * prev[s]
                row.append(val)
            self.rows.append(row)
        return self.pref * self.rows[j][0]


def _pstar_bound(g, mu) -> float:
    """|P*_mu(lam)| <= |lam|^{|mu|} * this constant (positive multiplicities)."""
    return abs(sc.to_float(sc.sqrt(g.gauge(mu)) if g.multiplicity.selfdual else 1)) / float(g.dim_base(mu))


def _poly_bound(f: AVector) -> float:
    return sum(abs(sc.to_float(c)) * _pstar_bound(f.graph, mu) for mu, c in f.items())


def _nb_poly_tail(t, xi, N0: int, power: int) -> float:
    from .dimfun import _poly_tail

    return _poly_tail(t, xi, N0, power)


def _poisson_poly_tail(lam: float, N0: int, power: int) -> float:
    """sum_{n > N0} n^power Poisson(lam)(n), via a geometric majorant of the term ratio."""
    def term(n):
        return math.exp(power * math.log(n) - lam + n * math.log(lam) - math.lgamma(n + 1)) if n else 0.0

    n = N0 + 1
    while True:
        rho = lam / (n + 1) * ((n + 1) / n) ** power
        if rho < 1:
            break
        n += 1
    return sum(term(m) for m in range(N0 + 1, n)) + term(n) / (1 - rho)


class Pairing:
    """Value with a certified bound on the neglected tail."""

    def __init__(self, value, bound: float, N0: int):
        self.value, self.bound, self.N0 = value, bound, N0

    def __repr__(self):
        return f"Pairing({sc.format_exact(self.value)} +- {self.bound:.3g}, N0={self.N0})"

    def matches(self, target, eps: float) -> bool:
        return abs(sc.to_float(self.value) - sc.to_float(target)) <= eps


def _choose_N0(tail, start: int, eps: float, max_level: int) -> tuple[int, float]:
    N0 = max(start, 1)
    while True:
        b = tail(N0)
        if b <= eps:
            return N0, b
        if N0 >= max_level:
            raise ToleranceError(f"tail bound {b:.3g} > {eps} at level {N0}")
        N0 = min(max_level, N0 + max(4, N0 // 4))


def inner_product_Mxi(k: KerovData, xi, f: AVector, h: AVector, eps: float = 1e-6,
                      max_level: int = 2000) -> Pairing:
    """(f, h) under M_xi: exact per-level sums up to N0, plus a certified tail bound <= eps."""
    _check_jump_params(k, xi)
    g = k.graph
    f, h = f.pruned(), h.pruned()
    if not f or not h:
        return Pairing(Fraction(0), 0.0, 0)
    power = f.degree + h.degree
    C = _poly_bound(f) * _poly_bound(h)
    N0, bound = _choose_N0(lambda N: C * _nb_poly_tail(k.t, xi, N, power), power, eps, max_level)
    total = Fraction(0)
    for alpha, ca in f.items():
        for beta, cb in h.items():
            a, b = g.level(alpha), g.level(beta)
            S = _LevelPairing(g, alpha, beta, k)
            acc = Fraction(0)
            xin = xi ** max(a, b)
            for n in range(max(a, b), N0 + 1):
                acc = acc + xin * sc.falling(n, a) * sc.falling(n, b) * S(n) / math.factorial(n) ** 2
                xin = xin * xi
            total = total + ca * _conj(cb) * acc
    return Pairing(sc.rational_power(1 - xi, k.t) * total, bound, N0)


def check_orthogonality(k: KerovData, xi, lam, mu, eps: float = 1e-6) -> dict:
    f, h = meixner_fn(k, xi, lam), meixner_fn(k, xi, mu)
    p = inner_product_Mxi(k, xi, f, h, eps)
    target = meixner_norm(k, xi, lam) if lam == mu else Fraction(0)
    dev = abs(sc.to_float(p.value) - sc.to_float(target))
    return {"ok": dev <= eps, "value": p.value, "expected": target, "deviation": dev, "bound": p.bound,
            "N0": p.N0}


# --- F_lam (float) -------------------------------------------------------------

def _root_mixed_float(k, xi, lam):
    return complex(sc.to_float(sc.rational_power(1 - xi, Fraction(k.t) / 2 if sc.is_exact(k.t) else k.t / 2))) * \
        complex(sc.to_float(sqrt_mixed(k, xi, lam)))


def _real(z: complex):
    return z.real if abs(z.imag) <= 1e-12 * max(1.0, abs(z)) else z


def f_fn(k: KerovData, xi, lam, N: int | None = None) -> dict:
    """Values of F_lam on vertices of levels <= N."""
    _check_jump_params(k, xi)
    g = k.graph
    N = g.depth if N is None else N
    n = g.level(lam)
    x = float(sc.to_float(xi))
    inv_q = 1 / complex(sc.to_float(_q_root_prod_float(k, lam)))
    coefs = {}
    for mu in _below(g, lam):
        m = g.level(mu)
        c = (-1) ** (n - m) * x ** (n / 2 - m) * (1 - x) ** m / math.factorial(n - m)
        coefs[mu] = c * complex(sc.to_float(g.relative_dimension(mu, lam))) * \
            complex(sc.to_float(k.q2_skew(mu, lam))) * inv_q
    out = {}
    for l in range(N + 1):
        for v in g.vertices(l):
            root = _root_mixed_float(k, xi, v)
            s = sum(c * complex(sc.to_float(pstar_value(g, mu, v))) for mu, c in coefs.items()
                    if g.level(mu) <= l)
            out[v] = _real(s * root)
    return out


def _q_root_prod_float(k, lam):
    from .dimfun import q_root_prod

    return q_root_prod(k, lam)


def f_scalar(k: KerovData, xi, lam) -> complex:
    """c_lam with F_lam = c_lam I_xi(M_lam): (sqrt xi/(1-xi))^{-n} prod q^{-1}."""
    n = k.graph.level(lam)
    x = float(sc.to_float(xi))
    return (math.sqrt(x) / (1 - x)) ** (-n) / complex(sc.to_float(_q_root_prod_float(k, lam)))


def check_f_relation(k: KerovData, xi, lam, N: int | None = None, rel: float = 1e-10) -> dict:
    g = k.graph
    N = g.depth if N is None else N
    F = f_fn(k, xi, lam, N)
    M = meixner_fn(k, xi, lam)
    c = f_scalar(k, xi, lam)
    for v, val in F.items():
        rhs = c * complex(sc.to_float(evaluate(M, v))) * _root_mixed_float(k, xi, v)
        if abs(val - rhs) > rel * max(1.0, abs(rhs)):
            return {"ok": False, "vertex": g.code(v), "lhs": val, "rhs": rhs}
    return {"ok": True}


def f_pairing(k: KerovData, xi, lam, mu, N: int | None = None) -> dict:
    """Truncated l^2 pairing of F_lam and F_mu with a bound on the neglected levels.

    Orthonormality is an l^2 statement, so it needs positive data (M_xi >= 0).
    """
    g = k.graph
    N = g.depth if N is None else N
    Fl, Fm = f_fn(k, xi, lam, N), f_fn(k, xi, mu, N)
    val = sum(Fl[v] * np.conj(Fm[v]) for v in Fl)
    C = abs(f_scalar(k, xi, lam)) * abs(f_scalar(k, xi, mu)) * _poly_bound(meixner_fn(k, xi, lam)) * \
        _poly_bound(meixner_fn(k, xi, mu))
    bound = C * _nb_poly_tail(k.t, xi, N, g.level(lam) + g.level(mu))
    target = 1.0 if lam == mu else 0.0
    return {"ok": bool(abs(val - target) <= bound + 1e-12), "value": _real(complex(val)), "bound": bound}


# --- Heisenberg degeneration ------------------------------------------------------

def _heis_r(g, r):
    return heisenberg_constant(g) if r is None else r


def charlier_fn(g, gamma, lam, r=None) -> AVector:
    """c_lam = sum_mu (-gamma)^{n-m} dim(mu, lam)/(n-m)! P*_mu.

    The level process jumps up at rate gamma r, so the up part of the generator
    on P* carries gamma alone (see poisson_generator_apply). ``r`` is accepted
    for symmetry with the other Heisenberg helpers and validated only.
    """
    _heis_r(g, r)
    n = g.level(lam)
    out = AVector(g)
    for mu in _below(g, lam):
        d = n - g.level(mu)
        out[mu] = (-gamma) ** d * g.relative_dimension(mu, lam) / math.factorial(d)
    return out


def poisson_generator_apply(g, gamma, f: AVector, r=None) -> AVector:
    """A P*_mu = -|mu| P*_mu + gamma sum over cocovers kappa of kappa(kappa, mu) P*_kappa.

    Derived from the rates n -> n+1 at gamma r, n -> n-1 at n, and the
    Plancherel up/down kernels; the 1/r in p_up cancels the r in the rate.
    """
    _heis_r(g, r)
    out = AVector(g)
    for mu, c in f.items():
        out.add_to(mu, -g.level(mu) * c)
        for low in g.cocovers(mu):
            out.add_to(low, gamma * g.kappa(low, mu) * c)
    return out


def check_charlier_eigen(g, gamma, lam, r=None) -> dict:
    f = charlier_fn(g, gamma, lam, r)
    lhs = poisson_generator_apply(g, gamma, f, r)
    rhs = f.scaled(-g.level(lam))
    return {"ok": lhs.equals(rhs)}


def poisson_moment(g, gamma, f: AVector, r=None):
    """phi(P*_mu) = gamma^{|mu|} dim(mu) / |mu|!."""
    _heis_r(g, r)
    out = Fraction(0)
    for mu, c in f.items():
        m = g.level(mu)
        out = out + c * gamma ** m * g.dimension(mu) / math.factorial(m)
    return out


def inner_product_Pl(g, gamma, f: AVector, h: AVector, eps: float = 1e-9, r=None,
                     max_level: int = 2000) -> Pairing:
    """(f, h) under the poissonized Plancherel measure (float: involves exp(-gamma r))."""
    r = _heis_r(g, r)
    f, h = f.pruned(), h.pruned()
    power = f.degree + h.degree
    lam = float(sc.to_float(gamma * r))
    C = _poly_bound(f) * _poly_bound(h)
    N0, bound = _choose_N0(lambda N: C * _poisson_poly_tail(lam, N, power), power, eps, max_level)
    total = 0.0
    for alpha, ca in f.items():
        for beta, cb in h.items():
            a, b = g.level(alpha), g.level(beta)
            S = _LevelPairing(g, alpha, beta, None, r)
            acc = Fraction(0)
            gn = gamma ** max(a, b)
            for n in range(max(a, b), N0 + 1):
                acc = acc + gn * sc.falling(n, a) * sc.falling(n, b) * S(n) / math.factorial(n) ** 2
                gn = gn * gamma
            total += complex(sc.to_float(ca * _conj(cb) * acc))
    return Pairing(_real(math.exp(-lam) * total), bound, N0)


def check_charlier_norm(g, gamma, lam, mu, eps: float = 1e-9, r=None) -> dict:
    r = _heis_r(g, r)
    p = inner_product_Pl(g, gamma, charlier_fn(g, gamma, lam, r), charlier_fn(g, gamma, mu, r), eps, r)
    target = gamma ** g.level(lam) if lam == mu else 0
    dev = abs(p.value - float(sc.to_float(target)))
    return {"ok": dev <= eps * max(1.0, abs(float(sc.to_float(target)))), "value": p.value,
            "expected": target, "deviation": dev, "bound": p.bound}


# --- classical degenerations ------------------------------------------------------

def check_chain_meixner(t, xi, n: int) -> dict:
    """On the chain, M_n(x) equals the monic Meixner polynomial for x = 0..n + 3."""
    k = make_kerov("chain", n + 4, t=t)
    f = meixner_fn(k, xi, (n,))
    spec = PolySpec.meixner(t, xi)
    for x in range(n + 4):
        lhs, rhs = evaluate(f, (x,)), eval_monic(spec, n, x)
        if not sc.close(lhs, rhs):
            return {"ok": False, "x": x, "lhs": lhs, "rhs": rhs}
    return {"ok": True}


def check_chain_charlier(gamma, n: int) -> dict:
    """On the chain with kappa(n, n+1) = sqrt(n+1), sqrt(n!) c_n is the monic Charlier polynomial."""
    from .graph import build_graph
    from .multiplicity import MultiplicityFn

    g = build_graph("chain", {}, n + 4, MultiplicityFn("chain_sqrt"))
    f = charlier_fn(g, gamma, (n,))
    spec = PolySpec.charlier(gamma)
    root = sc.sqrt(Fraction(math.factorial(n)))
    for x in range(n + 4):
        lhs, rhs = root * evaluate(f, (x,)), eval_monic(spec, n, x)
        if not sc.close(lhs, rhs):
            return {"ok": False, "x": x, "lhs": lhs, "rhs": rhs}
    return {"ok": True}


def _r(lam) -> int:
    return math.prod(math.factorial(c) for c in Counter(lam).values())


def kingman_meixner_product(beta, Nrows: int, xi, lam, nu):
    """r_lam^{-1/2} sum over distinct indices of prod_k M_{lam_k}(nu_{i_k})."""
    spec = PolySpec.meixner(beta, xi)
    nu = tuple(nu) + (0,) * (Nrows - len(nu))
    total = Fraction(0)
    for idx in permutations(range(Nrows), len(lam)):
        term = Fraction(1)
        for part, i in zip(lam, idx):
            term = term * eval_monic(spec, part, nu[i])
        total = total + term
    return total / sc.sqrt(Fraction(_r(lam)))


def kingman_degenerate_check(beta, Nrows: int, xi, lam, nu, rel: float = 1e-9) -> dict:
    """Eigenfunction of the Kingman graph at (alpha, tau) = (-beta, N beta) vs symmetrized Meixner products."""
    lam, nu = tuple(lam), tuple(nu)
    if len(lam) > Nrows or len(nu) > Nrows:
        raise ValueError(f"partitions must have at most {Nrows} rows")
    depth = max(sum(lam), sum(nu), 1)
    k = make_kerov("kingman", depth, alpha=-beta, tau=Nrows * beta)
    lhs = evaluate(meixner_fn(k, xi, lam), nu)
    rhs = kingman_meixner_product(beta, Nrows, xi, lam, nu)
    if sc.is_exact(lhs) and sc.is_exact(rhs):
        ok = lhs == rhs
    else:
        ok = sc.close(lhs, rhs, rel, rel)
    return {"ok": ok, "lhs": lhs, "rhs": rhs}


def kingman_stationary_check(beta, Nrows: int, xi, depth: int) -> dict:
    """M_xi(lam) = N! / r~_lam prod_i pi_{beta,xi}(lam_i) on Y(N), levels <= depth."""
    k = make_kerov("kingman", depth, alpha=-beta, tau=Nrows * beta)
    mm = MixedMeasure(k, xi)
    for n in range(depth + 1):
        for lam in k.graph.vertices(n):
            if len(lam) > Nrows:
                if mm(lam) != 0:
                    return {"ok": False, "lambda": lam, "mass": mm(lam)}
                continue
            padded = lam + (0,) * (Nrows - len(lam))
            rhs = Fraction(math.factorial(Nrows)) / _r(padded)
            for p in padded:
                rhs = rhs * negative_binomial(beta, xi, p)
            if not sc.close(mm(lam), rhs):
                return {"ok": False, "lambda": lam, "lhs": mm(lam), "rhs": rhs}
    return {"ok": True}


# --- rim hooks --------------------------------------------------------------------

def _hook_weight(z, r, boxes):
    return z + Fraction(sum(j - i for i, j in boxes), r * r)


def rimhook_direct(r: int, z, zp, depth: int) -> dict:
    """Levels of r-decomposable partitions with path sums of the rim-hook U_r and D_r weights."""
    z, zp = Fraction(z), Fraction(zp)
    levels = [[()]]
    up_sum, down_sum = {(): Fraction(1)}, {(): Fraction(1)}
    edges: dict = {}
    for n in range(depth):
        nxt = set()
        for lam in levels[n]:
            for nu in rim_hook_up(lam, r):
                boxes = skew_boxes(nu, lam)
                edges[(lam, nu)] = boxes
                up_sum[nu] = up_sum.get(nu, 0) + up_sum[lam] * _hook_weight(z, r, boxes)
                down_sum[nu] = down_sum.get(nu, 0) + down_sum[lam] * _hook_weight(zp, r, boxes)
                nxt.add(nu)
        levels.append(sorted(nxt))
    t = r * z * zp + Fraction(r * r - 1, 12 * r)
    return {"levels": levels, "up": up_sum, "down": down_sum, "edges": edges, "t": t}


def rimhook_check(r: int, z, zp, depth: int = 3) -> dict:
    """Rim-hook weights vs the product construction on r-tuples of partitions."""
    d = rimhook_direct(r, z, zp, depth)
    k = make_kerov("rimhook", depth, r=r, z=z, zp=zp)
    g = k.graph
    if not sc.close(k.t, d["t"]):
        return {"ok": False, "t_product": k.t, "t_direct": d["t"]}
    for n in range(depth + 1):
        prod = coherent_measure(k, n)
        z_n = math.factorial(n) * sc.pochhammer(d["t"], n)
        if len(d["levels"][n]) != len(prod):
            return {"ok": False, "level": n, "sizes": (len(d["levels"][n]), len(prod))}
        for lam in d["levels"][n]:
            core, quot = r_quotient(lam, r)
            if core or from_r_quotient(quot, r) != lam:
                return {"ok": False, "lambda": lam, "reason": "quotient map"}
            direct = d["up"][lam] * d["down"][lam] / z_n
            if direct != prod[quot]:
                return {"ok": False, "lambda": lam, "direct": direct, "product": prod[quot]}
    comm = rimhook_commutator(r, z, zp, depth, d)
    return {"ok": comm["ok"], "commutator": comm}


def rimhook_commutator(r: int, z, zp, depth: int, d: dict | None = None) -> dict:
    """[D_r, U_r] is diagonal with eigenvalue 2|lam|/r + r z z' + (r^2 - 1)/(12 r)."""
    d = d or rimhook_direct(r, z, zp, depth)
    z, zp = Fraction(z), Fraction(zp)
    ups: dict = {}
    downs: dict = {}
    for (lam, nu), boxes in d["edges"].items():
        ups.setdefault(lam, []).append((nu, _hook_weight(z, r, boxes)))
        downs.setdefault(nu, []).append((lam, _hook_weight(zp, r, boxes)))
    for n in range(depth):
        for lam in d["levels"][n]:
            acc: dict = {}
            for nu, u in ups.get(lam, []):
                for rho, w in downs[nu]:
                    acc[rho] = acc.get(rho, 0) + u * w
            for mu, w in downs.get(lam, []):
                for rho, u in ups[mu]:
                    acc[rho] = acc.get(rho, 0) - u * w
            target = Fraction(2 * sum(lam), r) + r * z * zp + Fraction(r * r - 1, 12 * r)
            for rho, v in acc.items():
                want = target if rho == lam else 0
                if v != want:
                    return {"ok": False, "lambda": lam, "rho": rho, "value": v, "expected": want}
    return {"ok": True}
