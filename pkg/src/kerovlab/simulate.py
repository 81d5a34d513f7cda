"""Seeded Monte Carlo for the level process, the jump process and the up/down chains.

Randomness comes from numpy's PCG64. A single trajectory uses
``default_rng(SeedSequence(seed))``. Replica batches use
``SeedSequence(seed).spawn(n_batches)``, one child per batch of
``BATCH`` replicas, so results do not depend on how batches are scheduled.
"""

from __future__ import annotations

import json
from collections import Counter

import numpy as np
from scipy import stats

from . import scalar as sc
from .kerov import KerovData
from .measures import MeasureError, down_kernel, up_kernel

BATCH = 10_000


class CapError(RuntimeError):
    pass


class Trajectory:
    """Jump records (time, state); the first record is the start at time 0."""

    def __init__(self, records, seed, params: dict, cap_hit: bool = False, code=str):
        self.records = records
        self.seed = seed
        self.params = params
        self.cap_hit = cap_hit
        self._code = code

    def __len__(self):
        return len(self.records)

    @property
    def states(self):
        return [s for _, s in self.records]

    def final(self):
        return self.records[-1][1]

    def to_jsonl(self) -> str:
        head = {"seed": self.seed, "params": self.params, "cap_hit": self.cap_hit}
        lines = [json.dumps(head)]
        lines += [json.dumps({"time": float(t), "vertex": self._code(s)}) for t, s in self.records]
        return "\n".join(lines) + "\n"


def _check(t, xi, T_end):
    if not float(t) > 0:
        raise MeasureError("t must be > 0")
    if not 0 < float(xi) < 1:
        raise MeasureError("xi must lie in (0, 1)")
    if not float(T_end) > 0:
        raise MeasureError("T_end must be > 0")


# --- birth and death on the levels ---------------------------------------------

def _bd_rates(n, t, xi):
    return xi * (n + t) / (1 - xi), n / (1 - xi)


def simulate_birth_death(t, xi, T_end, seed, start: int = 0, cap: int = 10_000) -> Trajectory:
    t, xi, T_end = float(sc.to_float(t)), float(sc.to_float(xi)), float(T_end)
    _check(t, xi, T_end)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    n, now = start, 0.0
    rec = [(0.0, n)]
    while True:
        up, down = _bd_rates(n, t, xi)
        now += rng.exponential(1 / (up + down))
        if now > T_end:
            break
        n = n + 1 if rng.random() * (up + down) < up else n - 1
        rec.append((now, n))
        if n >= cap:
            return Trajectory(rec, seed, {"t": t, "xi": xi, "T": T_end}, cap_hit=True)
    return Trajectory(rec, seed, {"t": t, "xi": xi, "T": T_end})


def _batches(seed, replicas):
    nb = -(-replicas // BATCH)
    kids = np.random.SeedSequence(seed).spawn(nb)
    for b in range(nb):
        yield np.random.default_rng(kids[b]), min(BATCH, replicas - b * BATCH)


def birth_death_levels(t, xi, T_end, replicas: int, seed, start: int = 0, stats_out: dict | None = None):
    """Levels at time T_end of independent replicas (vectorized Gillespie)."""
    t, xi, T_end = float(sc.to_float(t)), float(sc.to_float(xi)), float(T_end)
    _check(t, xi, T_end)
    out = []
    jumps = Counter()
    for rng, m in _batches(seed, replicas):
        n = np.full(m, start, dtype=np.int64)
        now = np.zeros(m)
        live = np.arange(m)
        while live.size:
            up = xi * (n[live] + t) / (1 - xi)
            tot = up + n[live] / (1 - xi)
            now[live] += rng.exponential(1.0, live.size) / tot
            go = now[live] <= T_end
            live = live[go]
            u = rng.random(live.size) * tot[go] < up[go]
            jumps["up"] += int(u.sum())
            jumps["down"] += int((~u).sum())
            n[live] += np.where(u, 1, -1)
        out.append(n)
    if stats_out is not None:
        stats_out.update(jumps)
    return np.concatenate(out)


# --- jump process on the graph ----------------------------------------------------

class JumpTables:
    """Float rate tables of the jump process on levels 0..depth; level depth is the cap."""

    def __init__(self, k: KerovData, xi, N: int | None = None):
        g = k.graph
        t = sc.to_float(k.t)
        if isinstance(t, complex) or t <= 0:
            raise MeasureError("jump dynamics need t > 0")
        x = float(sc.to_float(xi))
        if not 0 < x < 1:
            raise MeasureError("xi must lie in (0, 1)")
        self.k, self.xi, self.graph = k, x, g
        self.N = g.depth if N is None else N
        self.verts = [v for n in range(self.N + 1) for v in g.vertices(n)]
        self.index = {v: i for i, v in enumerate(self.verts)}
        V = len(self.verts)
        self.level = np.array([g.level(v) for v in self.verts])
        ups = [self._row(up_kernel(k, v)) if g.level(v) < self.N else ([], []) for v in self.verts]
        downs = [self._row(down_kernel(g, v)) for v in self.verts]
        width = max([1] + [len(a) for a, _ in ups] + [len(a) for a, _ in downs])
        self.up_to = np.full((V, width), -1, dtype=np.int64)
        self.up_cum = np.ones((V, width))
        self.down_to = np.full((V, width), -1, dtype=np.int64)
        self.down_cum = np.ones((V, width))
        for i, ((ut, up), (dt, dp)) in enumerate(zip(ups, downs)):
            self.up_to[i, :len(ut)] = ut
            self.up_cum[i, :len(up)] = np.cumsum(up)
            self.down_to[i, :len(dt)] = dt
            self.down_cum[i, :len(dp)] = np.cumsum(dp)
        n = self.level.astype(float)
        self.rate_up = x * (n + t) / (1 - x)
        self.rate_down = n / (1 - x)

    def _row(self, kernel: dict):
        to = [self.index[w] for w in kernel]
        p = np.array([float(np.real(sc.to_float(q))) for q in kernel.values()])
        if len(p) and (p.min() < -1e-14):
            raise MeasureError("negative transition probability (degenerate or nonpositive data)")
        p = np.clip(p, 0, None)
        return to, (p / p.sum() if len(p) else p)

    @staticmethod
    def _pick(cum, to, rows, u):
        j = (u[:, None] > cum[rows]).sum(axis=1)
        return to[rows, j]


def simulate_jump(k: KerovData, xi, T_end, seed, start=None, tables: JumpTables | None = None) -> Trajectory:
    """One trajectory; up-targets from p_up, down-targets from p_down. Stops if the cap level is reached."""
    tb = tables or JumpTables(k, xi)
    g = tb.graph
    s = tb.index[g.family.root() if start is None else start]
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    now = 0.0
    rec = [(0.0, tb.verts[s])]
    params = {"family": k.name, "xi": tb.xi, "T": float(T_end), "N": tb.N}
    while True:
        up, down = tb.rate_up[s], tb.rate_down[s]
        now += rng.exponential(1 / (up + down))
        if now > T_end:
            break
        rows = np.array([s])
        if rng.random() * (up + down) < up:
            s = int(tb._pick(tb.up_cum, tb.up_to, rows, rng.random(1))[0])
        else:
            s = int(tb._pick(tb.down_cum, tb.down_to, rows, rng.random(1))[0])
        rec.append((now, tb.verts[s]))
        if tb.level[s] >= tb.N:
            return Trajectory(rec, seed, params, cap_hit=True, code=g.code)
    return Trajectory(rec, seed, params, code=g.code)


def jump_final_states(k: KerovData, xi, T_end, replicas: int, seed, start=None,
                      tables: JumpTables | None = None) -> dict:
    """States at T_end of independent replicas; replicas that reach the cap level are dropped and counted."""
    tb = tables or JumpTables(k, xi)
    g = tb.graph
    s0 = tb.index[g.family.root() if start is None else start]
    finals, capped = [], 0
    jumps = Counter()
    for rng, m in _batches(seed, replicas):
        s = np.full(m, s0, dtype=np.int64)
        now = np.zeros(m)
        live = np.arange(m)
        dead = np.zeros(m, dtype=bool)
        while live.size:
            up, down = tb.rate_up[s[live]], tb.rate_down[s[live]]
            tot = up + down
            now[live] += rng.exponential(1.0, live.size) / tot
            go = now[live] <= T_end
            live, up, tot = live[go], up[go], tot[go]
            u = rng.random(live.size) * tot < up
            jumps["up"] += int(u.sum())
            jumps["down"] += int((~u).sum())
            r = rng.random(live.size)
            new = s[live].copy()
            if u.any():
                new[u] = tb._pick(tb.up_cum, tb.up_to, s[live][u], r[u])
            if (~u).any():
                new[~u] = tb._pick(tb.down_cum, tb.down_to, s[live][~u], r[~u])
            s[live] = new
            hit = tb.level[new] >= tb.N
            if hit.any():
                dead[live[hit]] = True
                live = live[~hit]
        capped += int(dead.sum())
        finals.append(s[~dead])
    idx = np.concatenate(finals)
    counts = Counter(idx.tolist())
    return {"counts": {tb.verts[i]: c for i, c in counts.items()}, "capped": capped,
            "replicas": replicas, "jumps": dict(jumps)}


# --- up/down chain ---------------------------------------------------------------

def simulate_updown(k: KerovData, n: int, steps: int, seed, start=None) -> list:
    """Two-stage steps: up by p_up, then down by p_down."""
    g = k.graph
    if n > g.depth - 1:
        raise MeasureError(f"up/down chain at level {n} needs depth {n + 1}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    cache: dict = {}

    def kernel(v, up):
        key = (v, up)
        if key not in cache:
            ker = up_kernel(k, v) if up else down_kernel(g, v)
            vs = list(ker)
            p = np.array([float(np.real(sc.to_float(x))) for x in ker.values()])
            cache[key] = (vs, np.cumsum(p / p.sum()))
        return cache[key]

    s = g.vertices(n)[0] if start is None else start
    out = [s]
    for _ in range(steps):
        vs, cum = kernel(s, True)
        nu = vs[min(int(np.searchsorted(cum, rng.random(), side="right")), len(vs) - 1)]
        vs, cum = kernel(nu, False)
        s = vs[min(int(np.searchsorted(cum, rng.random(), side="right")), len(vs) - 1)]
        out.append(s)
    return out


# --- diagnostics -----------------------------------------------------------------

def stationarity_report(samples, exact: dict, threshold: float | None = None, code=str) -> dict:
    """TV distance and chi-square of empirical counts against exact probabilities.

    ``samples`` is a sequence of states or a mapping state -> count. States
    absent from ``exact`` count as mass outside the reference.
    """
    counts = Counter(samples) if not isinstance(samples, dict) else Counter(samples)
    total = sum(counts.values())
    if total == 0:
        raise ValueError("no samples")
    ref = {s: float(np.real(sc.to_float(p))) for s, p in exact.items()}
    keys = list(ref) + [s for s in counts if s not in ref]
    table, tv = [], 0.0
    for s in keys:
        e = ref.get(s, 0.0)
        o = counts.get(s, 0) / total
        tv += abs(o - e)
        table.append({"state": code(s), "empirical": o, "exact": e})
    tv /= 2
    # chi-square on cells with expected count >= 5, the rest lumped together
    big = [s for s in ref if ref[s] * total >= 5]
    obs = [counts.get(s, 0) for s in big]
    exp = [ref[s] * total for s in big]
    rest_o, rest_e = total - sum(obs), total - sum(exp)
    if rest_e >= 5:
        obs.append(rest_o)
        exp.append(rest_e)
    chi2 = float(sum((o - e) ** 2 / e for o, e in zip(obs, exp)))
    dof = max(1, len(obs) - 1)
    rep = {"tv": tv, "chi2": chi2, "dof": dof, "p_value": float(stats.chi2.sf(chi2, dof)),
           "samples": total, "table": table}
    if threshold is not None:
        rep["threshold"] = threshold
        rep["flag"] = tv > threshold
    return rep


def lumped_by_level(exact: dict, graph, N: int) -> dict:
    """Reference measure on {|lam| <= N} plus one overflow cell ``"> N"`` holding the rest."""
    out = {s: p for s, p in exact.items() if graph.level(s) <= N}
    out[f">{N}"] = 1 - sum(float(np.real(sc.to_float(p))) for p in out.values())
    return out


def lump_counts(counts: dict, graph, N: int) -> Counter:
    out = Counter()
    for s, c in counts.items():
        out[s if graph.level(s) <= N else f">{N}"] += c
    return out


def two_sample_chi2(a, b) -> dict:
    """Homogeneity test of two samples of integers (cells with few counts merged into the tail)."""
    ca, cb = Counter(a), Counter(b)
    top = max(list(ca) + list(cb))
    cut = top
    while cut > 0 and ca.get(cut, 0) + cb.get(cut, 0) < 10:
        cut -= 1
    rows = [[ca.get(v, 0) for v in range(cut)] + [sum(c for v, c in ca.items() if v >= cut)],
            [cb.get(v, 0) for v in range(cut)] + [sum(c for v, c in cb.items() if v >= cut)]]
    keep = [j for j in range(len(rows[0])) if rows[0][j] + rows[1][j] > 0]
    table = np.array([[r[j] for j in keep] for r in rows])
    chi2, p, dof, _ = stats.chi2_contingency(table)
    return {"chi2": float(chi2), "p_value": float(p), "dof": int(dof)}
