"""Branching graphs truncated at a fixed depth, with (relative) dimensions."""

from __future__ import annotations

import csv
import io
import json
import os
from fractions import Fraction

from . import scalar as sc
from .families import Family, make_family

DEFAULT_VERTEX_BUDGET = 500_000


class GraphError(ValueError):
    pass


class TruncatedError(GraphError):
    """Raised when an operation needs the level above the truncation depth."""


class BudgetError(GraphError):
    pass


def csv_text(header, rows) -> str:
    """CSV with minimal quoting (vertex codes may contain commas)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def vertex_budget() -> int:
    return int(os.environ.get("KEROVLAB_VERTEX_BUDGET", DEFAULT_VERTEX_BUDGET))


class BranchingGraph:
    """Levels 0..depth of a branching graph together with a multiplicity function.

    Vertices inside a level are ordered by ``family.sort_key``; that order is
    used for every exported matrix.
    """

    def __init__(self, family: Family, depth: int, params: dict | None = None, multiplicity=None):
        from .multiplicity import MultiplicityFn

        if depth < 0:
            raise GraphError("depth must be >= 0")
        cap = family.depth_cap
        if cap is not None and depth > cap:
            raise GraphError(f"{family.name} depth capped at {cap}")
        self.family = family
        self.depth = depth
        self.params = dict(params or {})
        self._enumerate()
        self.multiplicity = multiplicity or MultiplicityFn("trivial")
        self._reset_caches()

    # construction ------------------------------------------------------------
    def _enumerate(self):
        fam = self.family
        budget = vertex_budget()
        levels = [[fam.root()]]
        up: dict = {}
        down: dict = {fam.root(): []}
        box: dict = {}
        total = 1
        for n in range(self.depth):
            nxt = set()
            for v in levels[n]:
                ups = fam.up(v)
                up[v] = [w for w, _ in ups]
                for w, b in ups:
                    box[(v, w)] = b
                    nxt.add(w)
            total += len(nxt)
            if total > budget:
                growth = len(nxt) / max(1, len(levels[n]))
                estimate = int(total + len(nxt) * sum(growth ** k for k in range(1, self.depth - n)))
                raise BudgetError(
                    f"enumeration exceeds vertex budget {budget} at level {n + 1} "
                    f"(estimated {estimate} vertices to depth {self.depth}); "
                    "raise KEROVLAB_VERTEX_BUDGET or lower the depth"
                )
            lvl = sorted(nxt, key=fam.sort_key)
            for w in lvl:
                down[w] = [u for u, _ in fam.down(w)]
            levels.append(lvl)
        self.levels = levels
        self._up = up
        self._down = down
        self._box = box
        self._level = {v: n for n, lvl in enumerate(levels) for v in lvl}
        self._index = {v: i for lvl in levels for i, v in enumerate(lvl)}

    def with_multiplicity(self, m) -> "BranchingGraph":
        """Same lattice, different multiplicity."""
        g = object.__new__(BranchingGraph)
        g.__dict__.update(self.__dict__)
        g.multiplicity = m
        g._reset_caches()
        return g

    def _reset_caches(self):
        self._kbase: dict = {}
        self._kdual: dict = {}
        self._gauge: dict = {}
        self._dim: dict = {}
        self._reldim: dict = {}

    # structure ----------------------------------------------------------------
    def __contains__(self, v):
        return v in self._level

    def __repr__(self):
        return f"BranchingGraph({self.family.name}, depth={self.depth}, kappa={self.multiplicity.kind})"

    def _check(self, v):
        if v not in self._level:
            raise GraphError(f"vertex {v!r} not in graph (depth {self.depth})")

    def level(self, v) -> int:
        self._check(v)
        return self._level[v]

    def index(self, v) -> int:
        self._check(v)
        return self._index[v]

    def vertices(self, n: int | None = None) -> list:
        if n is None:
            return [v for lvl in self.levels for v in lvl]
        if n > self.depth:
            raise TruncatedError(f"level {n} beyond depth {self.depth}")
        return list(self.levels[n])

    def covers(self, v) -> list:
        self._check(v)
        top = self.family.max_level()
        if self._level[v] >= self.depth and (top is None or self._level[v] < top):
            raise TruncatedError(f"covers of {self.code(v)!r} lie above depth {self.depth}")
        return list(self._up[v])

    def cocovers(self, v) -> list:
        self._check(v)
        return list(self._down[v])

    def box(self, mu, lam):
        try:
            return self._box[(mu, lam)]
        except KeyError:
            raise GraphError(f"{mu!r} -> {lam!r} is not an edge") from None

    def edges(self):
        for n in range(self.depth):
            for v in self.levels[n]:
                for w in self._up[v]:
                    yield v, w

    def boxes(self, v) -> frozenset:
        return self.family.boxes(v)

    def code(self, v) -> str:
        return self.family.code(v)

    def parse(self, s: str):
        return self.family.parse(s)

    def level_sizes(self) -> list[int]:
        return [len(lvl) for lvl in self.levels]

    # multiplicities -----------------------------------------------------------
    def kappa_base(self, mu, lam):
        key = (mu, lam)
        if key not in self._kbase:
            self._kbase[key] = self.multiplicity.base(self, mu, lam)
        return self._kbase[key]

    def kappa_dual(self, mu, lam):
        key = (mu, lam)
        if key not in self._kdual:
            self._kdual[key] = self.multiplicity.dual(self, mu, lam)
        return self._kdual[key]

    def kappa_sq(self, mu, lam):
        """kappa-tilde squared = kappa * kappa' (rational in the exact backend)."""
        return self.kappa_base(mu, lam) * self.kappa_dual(mu, lam)

    def kappa(self, mu, lam):
        """Self-dual multiplicity kappa * sqrt(g(mu)/g(lam))."""
        b = self.kappa_base(mu, lam)
        if not self.multiplicity.selfdual:
            return b
        return b * sc.sqrt(self.gauge(mu) / self.gauge(lam))

    def gauge(self, lam):
        """g with kappa'(mu,lam) g(lam) = g(mu) kappa(mu,lam), g(root) = 1."""
        if lam in self._gauge:
            return self._gauge[lam]
        self._check(lam)
        if not self.multiplicity.selfdual:
            return Fraction(1)
        # fill levels bottom-up
        for n in range(self._level[lam] + 1):
            for v in self.levels[n]:
                if v not in self._gauge:
                    self._gauge[v] = _gauge_at(self, v, self.kappa_base, self.kappa_dual, self._gauge)
        return self._gauge[lam]

    # dimensions ----------------------------------------------------------------
    def dim_base(self, lam):
        """Path sum of base kappa from the root."""
        return self.rel_dim_base(self.family.root(), lam)

    def rel_dim_base(self, mu, lam):
        self._check(mu)
        self._check(lam)
        table = self._reldim.get(mu)
        if table is None:
            table = {mu: Fraction(1)}
            m = self._level[mu]
            frontier = {mu}
            for n in range(m, self.depth):
                nxt = set()
                for v in frontier:
                    for w in self._up[v]:
                        table[w] = table.get(w, 0) + self.kappa_base(v, w) * table[v]
                        nxt.add(w)
                frontier = nxt
            self._reldim[mu] = table
        return table.get(lam, Fraction(0))

    def dimension(self, lam):
        """dim(lam) for the (self-dual) multiplicity of the graph."""
        return self.relative_dimension(self.family.root(), lam)

    def relative_dimension(self, mu, lam):
        d = self.rel_dim_base(mu, lam)
        if not self.multiplicity.selfdual or d == 0:
            return d
        return d * sc.sqrt(self.gauge(mu) / self.gauge(lam))

    def dimension_sq(self, lam):
        d = self.dim_base(lam)
        if not self.multiplicity.selfdual:
            return d * d
        return d * d / self.gauge(lam)

    def restricted(self, keep) -> "BranchingGraph":
        """Subgraph on the vertices satisfying ``keep`` (must be a down-closed set)."""
        g = object.__new__(BranchingGraph)
        g.__dict__.update(self.__dict__)
        g.levels = [[v for v in lvl if keep(v)] for lvl in self.levels]
        alive = {v for lvl in g.levels for v in lvl}
        g._up = {v: [w for w in self._up[v] if w in alive] for v in alive if v in self._up}
        g._down = {v: [u for u in self._down[v] if u in alive] for v in alive}
        g._box = {e: b for e, b in self._box.items() if e[0] in alive and e[1] in alive}
        g._level = {v: n for n, lvl in enumerate(g.levels) for v in lvl}
        g._index = {v: i for lvl in g.levels for i, v in enumerate(lvl)}
        g._reset_caches()
        return g

    # export ----------------------------------------------------------------
    def to_json(self) -> str:
        data = {
            "family": self.family.name,
            "params": {k: sc.format_exact(v) for k, v in self.params.items()},
            "N": self.depth,
            "levels": [[self.code(v) for v in lvl] for lvl in self.levels],
            "edges": [[self.code(u), self.code(w), sc.format_exact(self.kappa(u, w))] for u, w in self.edges()],
        }
        return json.dumps(data, indent=1)


def _gauge_at(g, v, kb, kd, known):
    lower = g.cocovers(v)
    if not lower:
        return Fraction(1)
    vals = []
    for u in lower:
        vals.append((u, known[u] * kb(u, v) / kd(u, v)))
    u0, first = vals[0]
    for u, val in vals[1:]:
        if not sc.close(val, first):
            from .multiplicity import GaugeError

            raise GaugeError(
                f"gauge factor path-dependent at {g.code(v)!r}: via {g.code(u0)!r} gives "
                f"{sc.format_exact(first)}, via {g.code(u)!r} gives {sc.format_exact(val)}"
            )
    return first


def build_graph(family: str, params: dict | None = None, depth: int = 4, multiplicity=None) -> BranchingGraph:
    """Enumerate levels 0..depth of a built-in family.

    ``params`` carries family shape parameters (``d`` for pascal_d, ``r`` for
    rimhook_r, ``size`` for finite_chain); anything else is recorded verbatim.
    """
    params = dict(params or {})
    fam = make_family(family, **params)
    return BranchingGraph(fam, depth, params, multiplicity)


def brute_force_paths(g: BranchingGraph, mu, lam):
    """Sum over explicit paths of kappa products (oracle for the level DP)."""
    if mu == lam:
        return Fraction(1)
    total = Fraction(0)
    stack = [(mu, Fraction(1))]
    target = g.level(lam)
    while stack:
        v, w = stack.pop()
        if v == lam:
            total = total + w
            continue
        if g.level(v) >= target:
            continue
        for u in g.covers(v):
            stack.append((u, w * g.kappa(v, u)))
    return total
