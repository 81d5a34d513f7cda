"""Edge multiplicity catalog and the UD-duality algebra."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

from . import scalar as sc
from .families import conjugate, partition_boxes


class PoleError(ArithmeticError):
    pass


class GaugeError(ArithmeticError):
    pass


SELFDUAL_KINDS = {"jack_selfdual", "macdonald_selfdual", "kingman_selfdual", "schur", "tree", "chain_sqrt"}
KINDS = {
    "trivial", "jack", "jack_dual", "jack_selfdual", "macdonald", "macdonald_dual",
    "macdonald_selfdual", "kingman", "kingman_dual", "kingman_selfdual", "schur", "tree", "chain_sqrt",
}


class MultiplicityFn:
    """A multiplicity kind with its parameters.

    Self-dual kinds are stored as a (base, dual) pair: kappa-tilde squared is
    ``base * dual`` and kappa-tilde itself carries ``sqrt(g(mu)/g(lam))``.
    ``chain_sqrt`` is kappa(n, n+1) = sqrt(n+1) on the chain.
    """

    def __init__(self, kind: str, **params):
        if kind not in KINDS:
            raise ValueError(f"unknown multiplicity kind {kind!r}")
        self.kind = kind
        params = {k: _exactify(v) for k, v in params.items()}
        self.params = params
        if kind.startswith("jack"):
            self.theta = params["theta"]
        if kind.startswith("macdonald"):
            self.q = params["q"]
            self.t = params["t"]

    @property
    def selfdual(self) -> bool:
        return self.kind in SELFDUAL_KINDS

    def __repr__(self):
        ps = ", ".join(f"{k}={sc.format_exact(v)}" for k, v in self.params.items())
        return f"MultiplicityFn({self.kind}{', ' + ps if ps else ''})"

    def _side(self, which: str) -> str:
        k = self.kind
        if k.endswith("_selfdual"):
            root = k[: -len("_selfdual")]
            return root if which == "base" else root + "_dual"
        return k

    def base(self, g, mu, lam):
        return _evaluate(self, self._side("base"), g, mu, lam, "base")

    def dual(self, g, mu, lam):
        return _evaluate(self, self._side("dual"), g, mu, lam, "dual")


def _evaluate(m: MultiplicityFn, kind: str, g, mu, lam, side: str):
    box = g.box(mu, lam)
    if kind == "trivial":
        return Fraction(1)
    if kind == "jack":
        return jack_kappa(mu, box, m.theta)
    if kind == "jack_dual":
        return jack_dual_kappa(lam, box, m.theta)
    if kind == "macdonald":
        return macdonald_kappa(mu, box, m.q, m.t)
    if kind == "macdonald_dual":
        return macdonald_dual_kappa(lam, box, m.q, m.t)
    if kind == "kingman":
        return kingman_kappa(lam, box)
    if kind == "kingman_dual":
        return kingman_dual_kappa(mu, box)
    if kind == "schur":
        if side == "base":
            return Fraction(1)
        return Fraction(2) if len(lam) == len(mu) else Fraction(1)
    if kind == "tree":
        n, mm = box
        return Fraction(n if side == "base" else mm)
    if kind == "chain_sqrt":
        return Fraction(1) if side == "base" else Fraction(g.level(lam))
    raise ValueError(kind)


# --- Jack / Macdonald --------------------------------------------------------

def _exactify(x):
    return Fraction(x) if isinstance(x, int) and not isinstance(x, bool) else x


def _one(x):
    return Fraction(1) if sc.is_exact(x) else 1.0


def jack_F(a, l, theta):
    return (a + theta * (l + 2)) * (a + 1 + theta * l) / ((a + theta * (l + 1)) * (a + 1 + theta * (l + 1)))


def jack_kappa(mu, box, theta):
    """Product of F_theta(a, l) over the boxes of mu above the new box (arm/leg in mu)."""
    i0, j = box
    out = _one(theta)
    for i in range(1, i0):
        a = mu[i - 1] - j
        l = (i0 - 1) - i
        den = (a + theta * (l + 1)) * (a + 1 + theta * (l + 1))
        if den == 0:
            raise PoleError(f"Jack factor vanishes at box ({i},{j}) with a={a}, l={l}")
        out = out * jack_F(a, l, theta)
    return out


def _below_blocks(nu, box):
    """Rows strictly below the new box grouped by equal row length: (a, l_start, l_end or None)."""
    i0, j = box
    rows = list(nu[i0:])
    blocks = []
    l = 0
    idx = 0
    while idx < len(rows):
        v = rows[idx]
        start = l
        while idx < len(rows) and rows[idx] == v:
            idx += 1
            l += 1
        blocks.append((j - v - 1, start, l - 1))
    blocks.append((j - 1, l, None))  # empty rows below the diagram
    return blocks


def _telescoped(nu, box, x, y, x_inf, y_inf):
    out = None
    for a, ls, le in _below_blocks(nu, box):
        xs, ys = x(a, ls), y(a, ls)
        if xs == 0:
            raise PoleError(f"dual factor vanishes: a={a}, l={ls}")
        if le is None:
            xe, ye = x_inf(a), y_inf(a)
        else:
            xe, ye = x(a, le + 1), y(a, le + 1)
        if ye == 0:
            raise PoleError(f"dual factor vanishes: a={a}, l={le}")
        term = xe * ys / (xs * ye)
        out = term if out is None else out * term
    return out


def jack_dual_kappa(nu, box, theta):
    """Boxes below the new box, distances to the boundary of nu; closed-form telescoping."""
    return _telescoped(
        nu, box,
        lambda a, l: a + theta * (l + 1),
        lambda a, l: a + 1 + theta * l,
        lambda a: _one(theta),
        lambda a: _one(theta),
    )


def mac_F(a, l, q, t):
    num = (1 - q ** a * t ** (l + 2)) * (1 - q ** (a + 1) * t ** l)
    den = (1 - q ** a * t ** (l + 1)) * (1 - q ** (a + 1) * t ** (l + 1))
    if den == 0:
        raise PoleError(f"Macdonald factor 1 - q^{a} t^{l + 1} or 1 - q^{a + 1} t^{l + 1} vanishes")
    return num / den


def macdonald_kappa(mu, box, q, t):
    i0, j = box
    out = _one(q)
    for i in range(1, i0):
        out = out * mac_F(mu[i - 1] - j, (i0 - 1) - i, q, t)
    return out


def macdonald_dual_kappa(nu, box, q, t):
    if abs(sc.to_float(t)) < 1:
        x_inf = y_inf = lambda a: _one(q)
    elif t == 1:
        x_inf = lambda a: 1 - q ** a
        y_inf = lambda a: 1 - q ** (a + 1)
    else:
        raise PoleError("dual Macdonald product needs |t| < 1 (or t = 1)")
    return _telescoped(
        nu, box,
        lambda a, l: 1 - q ** a * t ** (l + 1),
        lambda a, l: 1 - q ** (a + 1) * t ** l,
        x_inf, y_inf,
    )


def macdonald_b(lam, q, t):
    """b_lam(q,t) = prod over boxes (1 - q^a t^(l+1)) / (1 - q^(a+1) t^l) (test oracle)."""
    lc = conjugate(lam)
    out = _one(q)
    for (i, j) in partition_boxes(lam):
        a = lam[i - 1] - j
        l = lc[j - 1] - i
        out = out * (1 - q ** a * t ** (l + 1)) / (1 - q ** (a + 1) * t ** l)
    return out


def jack_b(lam, theta):
    lc = conjugate(lam)
    out = _one(theta)
    for (i, j) in partition_boxes(lam):
        a = lam[i - 1] - j
        l = lc[j - 1] - i
        out = out * (a + theta * (l + 1)) / (a + 1 + theta * l)
    return out


# --- Kingman -------------------------------------------------------------------

def row_counts(lam) -> Counter:
    return Counter(lam)


def kingman_kappa(nu, box):
    """r_k(nu) with k the length of the row receiving the new box."""
    k = box[1]
    return Fraction(row_counts(nu)[k])


def kingman_dual_kappa(lam, box):
    """r_{k-1}(lam) for k >= 2; edges opening a new row get 1."""
    k = box[1]
    if k == 1:
        return Fraction(1)
    return Fraction(row_counts(lam)[k - 1])


# --- duality checks --------------------------------------------------------------

def quadrangles(g, n: int) -> list:
    """(mu, rho, lam, nu) with mu->rho->nu, mu->lam->nu, rho != lam, level(lam) = n."""
    if not 1 <= n <= g.depth - 1:
        raise ValueError("quadrangles need 1 <= n <= depth - 1")
    out = []
    for nu in g.vertices(n + 1):
        lower = sorted(g.cocovers(nu), key=g.family.sort_key, reverse=True)
        for a in range(len(lower)):
            for b in range(a + 1, len(lower)):
                rho, lam = lower[a], lower[b]
                common = set(g.cocovers(rho)) & set(g.cocovers(lam))
                for mu in sorted(common, key=g.family.sort_key):
                    out.append((mu, rho, lam, nu))
    return out


def _ksq(g, m, mu, lam):
    gg = g if g.multiplicity is m else g.with_multiplicity(m)
    return gg.kappa_sq(mu, lam)


def check_ud_self_dual(g, m=None, N: int | None = None) -> dict:
    m = m or g.multiplicity
    gg = g if g.multiplicity is m else g.with_multiplicity(m)
    N = g.depth if N is None else N
    for n in range(1, N):
        for mu, rho, lam, nu in quadrangles(gg, n):
            left = gg.kappa_sq(mu, lam) * gg.kappa_sq(mu, rho)
            right = gg.kappa_sq(lam, nu) * gg.kappa_sq(rho, nu)
            if not sc.close(left, right):
                return {"ok": False, "witness": _quad_codes(g, (mu, rho, lam, nu)), "lhs": left, "rhs": right}
    return {"ok": True}


def check_ud_dual(g, m, m2, N: int | None = None) -> dict:
    """kappa(lam,nu) kappa'(rho,nu) = kappa'(mu,lam) kappa(mu,rho) on every quadrangle (both orientations)."""
    ga, gb = g.with_multiplicity(m), g.with_multiplicity(m2)
    N = g.depth if N is None else N
    for n in range(1, N):
        for mu, rho, lam, nu in quadrangles(g, n):
            for r, l in ((rho, lam), (lam, rho)):
                left = ga.kappa_base(l, nu) * gb.kappa_base(r, nu)
                right = gb.kappa_base(mu, l) * ga.kappa_base(mu, r)
                if not sc.close(left, right):
                    return {"ok": False, "witness": _quad_codes(g, (mu, r, l, nu)), "lhs": left, "rhs": right}
    return {"ok": True}


def gauge_factor(g, m, m2, lam):
    """g(lam) = product of kappa/kappa' along a path; every cocover path is cross-checked."""
    from .graph import _gauge_at

    ga, gb = g.with_multiplicity(m), g.with_multiplicity(m2)
    known: dict = {}
    for n in range(g.level(lam) + 1):
        for v in g.vertices(n):
            known[v] = _gauge_at(g, v, ga.kappa_base, gb.kappa_base, known)
    return known[lam]


def commutator_diagonal(g, N: int | None = None) -> dict:
    """h(lam) = sum over covers of kappa^2 - sum over cocovers of kappa^2, lam at levels <= N-1."""
    N = g.depth if N is None else N
    h = {}
    for n in range(N):
        for lam in g.vertices(n):
            up = sum((g.kappa_sq(lam, nu) for nu in g.covers(lam)), Fraction(0))
            down = sum((g.kappa_sq(mu, lam) for mu in g.cocovers(lam)), Fraction(0))
            h[lam] = up - down
    vals = list(h.values())
    if vals and all(sc.close(v, vals[0]) for v in vals):
        cls = {"kind": "heisenberg", "r": vals[0]}
    else:
        sd = check_ud_self_dual(g, None, N) if g.family.ideal else check_offdiagonal(g, None, N)
        cls = {"kind": "diagonal-only"} if sd["ok"] else {"kind": "non-diagonal", "witness": sd}
    return {"h": h, "classification": cls}


def check_offdiagonal(g, m=None, N: int | None = None) -> dict:
    """Vanishing of the off-diagonal part of [D, U], as sums over common covers and cocovers.

    The q-weights on the two sides coincide (same boxes for ideals, constant for
    trees), so only the kappa products are compared.
    """
    g = g if m is None or g.multiplicity is m else g.with_multiplicity(m)
    N = g.depth if N is None else N
    for n in range(1, N):
        lvl = g.vertices(n)
        for a, lam in enumerate(lvl):
            for rho in lvl[a + 1:]:
                up_common = set(g.covers(lam)) & set(g.covers(rho))
                down_common = set(g.cocovers(lam)) & set(g.cocovers(rho))
                if not up_common and not down_common:
                    continue
                up = sum((g.kappa(lam, nu) * g.kappa(rho, nu) for nu in up_common), Fraction(0))
                down = sum((g.kappa(mu, lam) * g.kappa(mu, rho) for mu in down_common), Fraction(0))
                if not sc.close(up, down):
                    return {"ok": False, "witness": (g.code(lam), g.code(rho)), "lhs": up, "rhs": down}
    return {"ok": True}


def _quad_codes(g, quad):
    return tuple(g.code(v) for v in quad)


def multiplicity_table(g, n: int) -> list[tuple[str, str, str]]:
    """Rows (from, to, kappa_squared) for edges leaving level n."""
    rows = []
    for u in g.vertices(n):
        for w in g.covers(u):
            rows.append((g.code(u), g.code(w), sc.format_exact(g.kappa_sq(u, w))))
    return rows
