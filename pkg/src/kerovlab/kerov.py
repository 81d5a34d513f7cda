"""Kerov data: q^2 catalog, the parameter t, sl(2) verification and the linear q-solver."""

from __future__ import annotations

import json
from fractions import Fraction

from . import scalar as sc
from .graph import BranchingGraph, build_graph
from .multiplicity import MultiplicityFn, _exactify, check_offdiagonal, check_ud_self_dual


class NoKerovError(ValueError):
    """Family admits no Kerov operators (or none is catalogued)."""


class DegenerateError(ValueError):
    pass


# --- closed forms ---------------------------------------------------------------

def jack_q2(box, z, zp, theta=1):
    i, j = box
    c = (j - 1) - theta * (i - 1)
    return (z + c) * (zp + c)


def kingman_q2(box, alpha, tau):
    i, j = box
    if j == 1:
        return tau + (i - 1) * alpha
    return j * (j - 1 - alpha)


def schur_q2(box, a):
    i, j = box
    return (Fraction((j - i + 1) * (j - i)) + a) / 2


def chain_q2(n, t):
    return n * (n - 1 + t)


def rimhook_z(r, z, i):
    return z + Fraction(r + 1 - 2 * i, 2 * r)


def q_squared(family: str, params: dict, box):
    """Closed-form q^2 of a catalogued family at one box."""
    p = params
    if family == "young":
        return jack_q2(box, p["z"], p["zp"], p.get("theta", 1))
    if family == "kingman":
        return kingman_q2(box, p["alpha"], p["tau"])
    if family == "schur":
        return schur_q2(box, p["a"])
    if family in ("chain", "finite_chain"):
        t = p["t"] if family == "chain" else -p["size"]
        return chain_q2(box[1], t)
    if family in ("pascal", "pascal_d"):
        c, n = box
        return chain_q2(n, p["ts"][c - 1])
    if family in ("rimhook", "rimhook_r"):
        c, (i, j) = box
        r = p["r"]
        return jack_q2((i, j), rimhook_z(r, p["z"], c), rimhook_z(r, p["zp"], c))
    if family == "trees":
        return Fraction(2)
    if family in ("plane_partitions", "macdonald"):
        raise NoKerovError(f"{family} admits no Kerov operators")
    raise NoKerovError(f"no q^2 catalogued for {family!r}")


# --- Kerov data -----------------------------------------------------------------

class KerovData:
    """A graph with self-dual multiplicity, q^2 on edges and the derived t."""

    def __init__(self, graph: BranchingGraph, q2_box, name: str = "", params: dict | None = None):
        self.graph = graph
        self._q2_box = q2_box
        self.name = name
        self.params = dict(params or {})
        self._prod: dict = {}
        self._t = None

    def __repr__(self):
        return f"KerovData({self.name}, depth={self.graph.depth})"

    @property
    def depth(self) -> int:
        return self.graph.depth

    def q2_box(self, box):
        return self._q2_box(box)

    def q2_edge(self, mu, lam):
        if not self.graph.family.ideal:
            return self._q2_box(None)
        return self._q2_box(self.graph.box(mu, lam))

    def q2_prod(self, lam):
        """Product of q^2 over the boxes of lam (2^|lam| for trees)."""
        if lam not in self._prod:
            g = self.graph
            if not g.family.ideal:
                self._prod[lam] = self._q2_box(None) ** g.level(lam)
            else:
                out = _unit(self)
                for b in g.boxes(lam):
                    out = out * self._q2_box(b)
                self._prod[lam] = out
        return self._prod[lam]

    def q2_skew(self, mu, lam):
        g = self.graph
        if not g.family.ideal:
            return self._q2_box(None) ** (g.level(lam) - g.level(mu))
        out = _unit(self)
        for b in g.boxes(lam) - g.boxes(mu):
            out = out * self._q2_box(b)
        return out

    @property
    def t(self):
        if self._t is None:
            g = self.graph
            root = g.family.root()
            self._t = sum((g.kappa_sq(root, nu) * self.q2_edge(root, nu) for nu in g.covers(root)), 0 * _unit(self))
        return self._t

    @property
    def exact(self) -> bool:
        return sc.is_exact(self.t)

    def all_boxes(self) -> set:
        out = set()
        for (_, _), b in self.graph._box.items():
            out.add(b)
        return out

    def degenerate_boxes(self) -> list:
        if not self.graph.family.ideal:
            return []
        return sorted(b for b in self.all_boxes() if self._q2_box(b) == 0)

    def is_positive(self) -> bool:
        """All q^2 in depth real and > 0, and t > 0."""
        vals = [self._q2_box(b) for b in self.all_boxes()] if self.graph.family.ideal else [self._q2_box(None)]
        vals.append(self.t)
        for v in vals:
            v = sc.to_float(v)
            if isinstance(v, complex) and v.imag != 0:
                return False
            if (v.real if isinstance(v, complex) else v) <= 0:
                return False
        return True

    def support(self) -> "KerovData":
        """Restrict to vertices containing no box with q^2 = 0."""
        bad = set(self.degenerate_boxes())
        if not bad:
            return self
        g = self.graph.restricted(lambda v: not (self.graph.boxes(v) & bad))
        return KerovData(g, self._q2_box, self.name + "|support", self.params)

    def require_nondegenerate(self, allow_degenerate: bool = False) -> "KerovData":
        bad = self.degenerate_boxes()
        if bad and not allow_degenerate:
            raise DegenerateError(f"q^2 vanishes at boxes {bad[:4]}; pass allow_degenerate to restrict the graph")
        return self.support() if bad else self


def _unit(k):
    if k.graph.family.ideal:
        try:
            x = k._q2_box(next(iter(k.graph._box.values())))
        except StopIteration:
            return Fraction(1)
    else:
        x = k._q2_box(None)
    return Fraction(1) if sc.is_exact(x) else 1.0


def make_kerov(family: str, depth: int, **params) -> KerovData:
    """Catalogue constructor.

    young(z, zp, theta), kingman(alpha, tau), schur(a), chain(t),
    finite_chain(size), pascal(ts), rimhook(r, z, zp), trees.
    """
    p = {key: (_exactify(v) if key != "ts" else tuple(_exactify(x) for x in v)) for key, v in params.items()}
    if family == "young":
        theta = p.setdefault("theta", Fraction(1))
        m = MultiplicityFn("trivial") if theta == 1 else MultiplicityFn("jack_selfdual", theta=theta)
        g = build_graph("young", {}, depth, m)
    elif family == "kingman":
        g = build_graph("kingman", {}, depth, MultiplicityFn("kingman_selfdual"))
    elif family == "schur":
        g = build_graph("schur", {}, depth, MultiplicityFn("schur"))
    elif family == "chain":
        g = build_graph("chain", {}, depth)
    elif family == "finite_chain":
        g = build_graph("finite_chain", {"size": p["size"]}, min(depth, int(p["size"])))
    elif family in ("pascal", "pascal_d"):
        family = "pascal"
        p["ts"] = tuple(p["ts"])
        g = build_graph("pascal_d", {"d": len(p["ts"])}, depth)
    elif family in ("rimhook", "rimhook_r"):
        family = "rimhook"
        g = build_graph("rimhook_r", {"r": p["r"]}, depth)
    elif family == "trees":
        g = build_graph("trees", {}, depth, MultiplicityFn("tree"))
    else:
        raise NoKerovError(f"{family} admits no Kerov operators")
    g.params.update(p)
    return KerovData(g, lambda box: q_squared(family, p, box), family, p)


def t_param(k: KerovData):
    return k.t


def verify_sl2(k: KerovData, N: int | None = None) -> dict:
    """sum_cov kappa^2 q^2 - sum_cocov kappa^2 q^2 = 2|lam| + t at every lam of level <= N-1,
    plus vanishing of the off-diagonal part of [D, U]."""
    g = k.graph
    N = g.depth if N is None else N
    t = k.t
    for n in range(N):
        for lam in g.vertices(n):
            lhs = sum((g.kappa_sq(lam, nu) * k.q2_edge(lam, nu) for nu in g.covers(lam)), 0 * t)
            lhs = lhs - sum((g.kappa_sq(mu, lam) * k.q2_edge(mu, lam) for mu in g.cocovers(lam)), 0 * t)
            rhs = 2 * n + t
            if not sc.close(lhs, rhs):
                return {"ok": False, "lambda": g.code(lam), "lhs": lhs, "rhs": rhs, "t": t}
    off = check_ud_self_dual(g, None, N) if g.family.ideal else check_offdiagonal(g, None, N)
    if not off["ok"]:
        return {"ok": False, "offdiagonal": off, "t": t}
    return {"ok": True, "t": t}


# --- linear solver ------------------------------------------------------------------

def box_code(box) -> str:
    if isinstance(box, tuple) and len(box) == 2 and isinstance(box[1], tuple):
        return f"{box[0]}:{','.join(map(str, box[1]))}"
    return ",".join(map(str, box))


class _Eliminator:
    """Incremental exact row reduction (Gauss-Jordan over Fractions)."""

    def __init__(self, nvars: int):
        self.n = nvars
        self.rows: dict[int, tuple[dict, Fraction]] = {}  # pivot -> (coeffs, rhs)

    def reduce(self, coeffs: dict, rhs: Fraction):
        coeffs = {k: v for k, v in coeffs.items() if v != 0}
        for p in sorted(set(coeffs) & set(self.rows)):
            if p not in coeffs:
                continue
            c = coeffs[p]
            pc, pr = self.rows[p]
            for k, v in pc.items():
                coeffs[k] = coeffs.get(k, 0) - c * v
                if coeffs[k] == 0:
                    del coeffs[k]
            rhs -= c * pr
        # a pivot's row may have introduced other pivots' columns: repeat until clean
        if set(coeffs) & set(self.rows):
            return self.reduce(coeffs, rhs)
        return coeffs, rhs

    def add(self, coeffs: dict, rhs) -> bool:
        coeffs, rhs = self.reduce(coeffs, Fraction(rhs))
        if not coeffs:
            return rhs == 0
        p = max(coeffs)  # late boxes become pivots, early boxes stay free
        c = coeffs[p]
        coeffs = {k: v / c for k, v in coeffs.items()}
        rhs = rhs / c
        # keep rows fully reduced against the new pivot
        for q, (qc, qr) in list(self.rows.items()):
            if p in qc:
                f = qc[p]
                nc = dict(qc)
                for k, v in coeffs.items():
                    nc[k] = nc.get(k, 0) - f * v
                    if nc[k] == 0:
                        del nc[k]
                self.rows[q] = (nc, qr - f * rhs)
        self.rows[p] = (coeffs, rhs)
        return True


def solve_q(g: BranchingGraph, N: int | None = None) -> dict:
    """Solve the q-condition for q^2 as unknowns on the boxes of levels <= N."""
    N = g.depth if N is None else N
    if not g.family.ideal:
        raise NoKerovError("solve_q handles lattices of ideals only")
    sd = check_ud_self_dual(g, None, N)
    if not sd["ok"]:
        raise ValueError(f"multiplicity is not UD-self-dual: {sd}")
    boxes = sorted({b for (u, w), b in g._box.items() if g.level(w) <= N}, key=lambda b: (str(type(b)), b))
    idx = {b: i for i, b in enumerate(boxes)}
    root = g.family.root()
    t_row: dict = {}
    for nu in g.covers(root):
        i = idx[g.box(root, nu)]
        t_row[i] = t_row.get(i, 0) + g.kappa_sq(root, nu)
    elim = _Eliminator(len(boxes))
    for n in range(1, N):
        for lam in g.vertices(n):
            row: dict = {}
            for nu in g.covers(lam):
                i = idx[g.box(lam, nu)]
                row[i] = row.get(i, 0) + g.kappa_sq(lam, nu)
            for mu in g.cocovers(lam):
                i = idx[g.box(mu, lam)]
                row[i] = row.get(i, 0) - g.kappa_sq(mu, lam)
            for i, v in t_row.items():
                row[i] = row.get(i, 0) - v
            if not elim.add(row, 2 * n):
                return {"feasible": False, "level": n, "lambda": g.code(lam), "depth": N,
                        "unknowns": len(boxes)}
    free = [i for i in range(len(boxes)) if i not in elim.rows]
    pname = {i: f"p{k + 1}" for k, i in enumerate(free)}
    exprs = {}
    for i, b in enumerate(boxes):
        if i in elim.rows:
            coeffs, rhs = elim.rows[i]
            terms = {pname[k]: -v for k, v in coeffs.items() if k != i}
            exprs[box_code(b)] = (rhs, terms)
        else:
            exprs[box_code(b)] = (Fraction(0), {pname[i]: Fraction(1)})
    return {
        "feasible": True,
        "dimension": len(free),
        "free_params": [{"name": pname[i], "box": box_code(boxes[i])} for i in free],
        "q_squared": exprs,
        "boxes": boxes,
    }


def format_linear(c0, terms: dict) -> str:
    out = str(c0)
    for name in sorted(terms, key=lambda s: int(s[1:])):
        out += f" + {terms[name]}*{name}"
    return out


def solution_json(sol: dict) -> str:
    if not sol["feasible"]:
        return json.dumps({k: v for k, v in sol.items()}, indent=1)
    return json.dumps({
        "free_params": [p["name"] for p in sol["free_params"]],
        "free_boxes": {p["name"]: p["box"] for p in sol["free_params"]},
        "q_squared": {b: format_linear(*e) for b, e in sol["q_squared"].items()},
    }, indent=1)


def evaluate_solution(sol: dict, values: dict) -> dict:
    """Plug free parameter values (name -> number) into the solved family."""
    out = {}
    for b, (c0, terms) in sol["q_squared"].items():
        out[b] = c0 + sum((v * values[name] for name, v in terms.items()), Fraction(0))
    return out
