"""Command-line front end: catalog, verification, and data export.

Exit codes: 0 pass, 1 a mathematical check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import dimfun, dynamics, kerov, measures, multiplicity, simulate
from . import scalar as sc
from .graph import GraphError, build_graph, csv_text
from .multiplicity import MultiplicityFn

KEROV_FAMILIES = ("young", "kingman", "schur", "chain", "finite_chain", "pascal", "rimhook", "trees")
GRAPH_ONLY = ("macdonald", "plane_partitions")
FAMILIES = KEROV_FAMILIES + GRAPH_ONLY
CHECKS = ("sl2", "duality", "coherency", "zn", "comb_identity", "tn_action", "spectrum", "eigen",
          "orthogonality", "autoduality", "heisenberg", "kingman_degenerate", "rimhook")
NUMERIC = ("z", "zp", "theta", "alpha", "tau", "a", "t1", "t2", "q", "t", "xi", "gamma", "beta", "T")

CATALOG = {
    "young": {"params": ["z", "zp", "theta"], "vertex": "partition", "kerov": "jack q-function: q^2(i,j) = (z+j-1-theta(i-1))(zp+j-1-theta(i-1)), t = z*zp/theta",
              "multiplicity": "trivial (theta=1) or self-dual jack(theta)"},
    "kingman": {"params": ["alpha", "tau"], "vertex": "partition", "kerov": "q^2(i,1) = tau+(i-1)alpha, q^2(i,j) = j(j-1-alpha) for j>=2, t = tau",
                "multiplicity": "self-dual kingman"},
    "schur": {"params": ["a"], "vertex": "strict partition", "kerov": "q^2(i,j) = ((j-i+1)(j-i)+a)/2, t = a/2",
              "multiplicity": "kappa_S in {1, sqrt 2}"},
    "chain": {"params": ["t"], "vertex": "integer", "kerov": "q^2(n) = n(n-1+t)", "multiplicity": "trivial"},
    "finite_chain": {"params": ["size"], "vertex": "integer <= size", "kerov": "q^2(n) = n(n-1-size)", "multiplicity": "trivial"},
    "pascal": {"params": ["t1", "t2", "ts"], "vertex": "d-tuple", "kerov": "componentwise q^2(n) = n(n-1+t_i), t = sum t_i",
               "multiplicity": "trivial"},
    "rimhook": {"params": ["r", "z", "zp"], "vertex": "r-tuple of partitions", "kerov": "product of jack(z_i, zp_i) with z_i = z+(r+1-2i)/(2r)",
                "multiplicity": "trivial"},
    "trees": {"params": [], "vertex": "rooted tree (canonical code)", "kerov": "q^2 = 2, H eigenvalue 2|t|+2",
              "multiplicity": "kappa_T = sqrt(n m)"},
    "macdonald": {"params": ["q", "t"], "vertex": "partition", "kerov": None,
                  "multiplicity": "self-dual macdonald(q,t)", "heisenberg": "r = (1-q)/(1-t)"},
    "plane_partitions": {"params": [], "vertex": "plane partition", "kerov": None, "no_kerov": True,
                         "multiplicity": "trivial", "depth_cap": 6},
}


class UsageError(ValueError):
    pass


# --- config ------------------------------------------------------------------------

def _number(name, text, warned):
    x = sc.parse_number(text)
    if isinstance(x, (float, complex)) and name not in warned:
        print(f"warning: decimal value for --{name} forces the float backend", file=sys.stderr)
        warned.add(name)
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=FAMILIES, default="young")
    common.add_argument("--depth", type=int)
    for name in ("z", "zp", "theta", "alpha", "tau", "a", "t1", "t2", "q", "t", "xi", "gamma", "beta"):
        common.add_argument(f"--{name}")
    common.add_argument("--ts", help="comma-separated pascal parameters (overrides --t1 --t2)")
    common.add_argument("--r", type=int)
    common.add_argument("--size", type=int)
    common.add_argument("--rows", type=int, help="row bound for the degenerate kingman case")
    common.add_argument("--n", type=int)
    common.add_argument("--eps", type=float, default=1e-6)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--out")

    p = argparse.ArgumentParser(prog="kerovlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("catalog", help="list families and parameters")
    v = sub.add_parser("verify", parents=[common], help="run identity checks")
    v.add_argument("which", choices=CHECKS)
    sub.add_parser("measure", parents=[common], help="coherent measure on a level")
    sub.add_parser("spectrum", parents=[common], help="up/down chain spectrum")
    e = sub.add_parser("eigenfunctions", parents=[common], help="eigenfunction coefficients")
    e.add_argument("--kind", choices=("meixner", "charlier"), default="meixner")
    s = sub.add_parser("simulate", parents=[common], help="seeded trajectories")
    s.add_argument("--process", choices=("jump", "birth_death", "updown"), default="jump")
    s.add_argument("--T", default="10")
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--replicas", type=int, default=1)
    s.add_argument("--start")
    return p


def make_config(ns) -> dict:
    """Parsed and validated configuration; numbers are exact unless given as decimals."""
    warned: set = set()
    cfg = {"command": ns.command}
    for key, val in vars(ns).items():
        if key == "command" or val is None:
            continue
        if key in NUMERIC:
            cfg[key] = _number(key, val, warned)
        elif key == "ts":
            cfg[key] = tuple(_number("ts", x, warned) for x in val.split(","))
        else:
            cfg[key] = val
    if "depth" in cfg and cfg["depth"] < 0:
        raise UsageError("--depth must be >= 0")
    if "n" in cfg and cfg["n"] < 0:
        raise UsageError("--n must be >= 0")
    if "xi" in cfg and not 0 < float(sc.to_float(cfg["xi"]).real) < 1:
        raise UsageError("--xi must lie in (0, 1)")
    if cfg.get("eps", 1) <= 0:
        raise UsageError("--eps must be > 0")
    return cfg


def _need(cfg, *names):
    missing = [n for n in names if n not in cfg]
    if missing:
        raise UsageError(f"family {cfg['family']} needs " + " ".join(f"--{n}" for n in missing))
    return [cfg[n] for n in names]


def kerov_params(cfg) -> dict:
    fam = cfg["family"]
    if fam == "young":
        z, zp = _need(cfg, "z", "zp")
        return {"z": z, "zp": zp, "theta": cfg.get("theta", Fraction(1))}
    if fam == "kingman":
        return dict(zip(("alpha", "tau"), _need(cfg, "alpha", "tau")))
    if fam == "schur":
        return {"a": _need(cfg, "a")[0]}
    if fam == "chain":
        return {"t": _need(cfg, "t")[0]}
    if fam == "finite_chain":
        return {"size": _need(cfg, "size")[0]}
    if fam == "pascal":
        if "ts" in cfg:
            return {"ts": cfg["ts"]}
        return {"ts": tuple(_need(cfg, "t1", "t2"))}
    if fam == "rimhook":
        z, zp = _need(cfg, "z", "zp")
        return {"r": cfg.get("r", 2), "z": z, "zp": zp}
    return {}


def make_kerov(cfg, depth=None):
    fam = cfg["family"]
    if fam in GRAPH_ONLY:
        raise kerov.NoKerovError(f"{fam} carries no Kerov data")
    return kerov.make_kerov(fam, cfg.get("depth", 5) if depth is None else depth, **kerov_params(cfg))


def make_graph(cfg, depth=None):
    """Graph (with its multiplicity) for any family, including those without Kerov data."""
    depth = cfg.get("depth", 5) if depth is None else depth
    fam = cfg["family"]
    if fam == "macdonald":
        q, t = _need(cfg, "q", "t")
        return build_graph("young", {"q": q, "t": t}, depth, MultiplicityFn("macdonald_selfdual", q=q, t=t))
    if fam == "plane_partitions":
        return build_graph("plane_partitions", {}, depth)
    return make_kerov(cfg, depth).graph


# --- output --------------------------------------------------------------------------

def plain(x):
    """JSON-ready copy of nested results."""
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, (Fraction, sc.Surd)):
        return sc.format_exact(x)
    if isinstance(x, complex):
        return x.real if x.imag == 0 else str(x)
    if hasattr(x, "item"):
        return plain(x.item())
    return str(x)


def config_block(cfg) -> dict:
    return {k: plain(v) for k, v in cfg.items() if k not in ("out", "command")}


def emit(cfg, text: str, sidecar: dict | None = None):
    out = cfg.get("out")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        if sidecar is not None:
            with open(out + ".config.json", "w") as fh:
                fh.write(json.dumps(sidecar, indent=1) + "\n")
    else:
        sys.stdout.write(text)


def report(cfg, checks: list, extra: dict | None = None) -> int:
    ok = all(c["ok"] for c in checks)
    data = {"command": cfg["command"], "config": config_block(cfg), "ok": ok, "checks": plain(checks)}
    if extra:
        data.update(plain(extra))
    if cfg.get("format") == "csv":
        rows = [(c["name"], "pass" if c["ok"] else "fail", json.dumps(plain({k: v for k, v in c.items() if k not in ("name", "ok")})))
                for c in checks]
        emit(cfg, csv_text(["check", "result", "detail"], rows), {"config": config_block(cfg), "ok": ok})
    else:
        emit(cfg, json.dumps(data, indent=1) + "\n")
    return 0 if ok else 1


def _check(name, res) -> dict:
    res = dict(res)
    ok = bool(res.pop("ok"))
    return {"name": name, "ok": ok, **res}


# --- verify ----------------------------------------------------------------------------

def _levels(g, top):
    return [v for n in range(top + 1) for v in g.vertices(n)]


def verify_sl2(cfg):
    fam = cfg["family"]
    if fam in GRAPH_ONLY:
        g = make_graph(cfg)
        sol = kerov.solve_q(g)
        if sol["feasible"]:
            res = {"ok": True, "feasible": True, "dimension": sol["dimension"], "depth": g.depth,
                   "note": "q-condition solvable through this depth; no catalogue q^2"}
        else:
            res = {"ok": False, "feasible": False, "infeasible_at": sol["lambda"], "level": sol["level"],
                   "depth": g.depth, "unknowns": sol["unknowns"]}
        return [_check("solve_q", res)]
    k = make_kerov(cfg)
    res = kerov.verify_sl2(k)
    return [_check("sl2", {**res, "t": res["t"]})]


def verify_duality(cfg):
    g = make_graph(cfg)
    out = [_check("ud_self_dual", multiplicity.check_ud_self_dual(g))]
    m = g.multiplicity
    if m.kind.endswith("_selfdual"):
        root = m.kind[: -len("_selfdual")]
        a, b = MultiplicityFn(root, **m.params), MultiplicityFn(root + "_dual", **m.params)
        out.append(_check("ud_dual", multiplicity.check_ud_dual(g, a, b)))
    return out


def verify_heisenberg(cfg):
    g = make_graph(cfg)
    cls = multiplicity.commutator_diagonal(g)["classification"]
    res = {"ok": cls["kind"] == "heisenberg", "classification": cls["kind"]}
    if "r" in cls:
        res["r"] = cls["r"]
    return [_check("commutator_diagonal", res)]


def _kerov_checks(cfg, which):
    k = make_kerov(cfg)
    g = k.graph
    N = g.depth
    xi = cfg.get("xi", Fraction(1, 2))
    out = []
    if which == "coherency":
        for n in range(min(cfg.get("n", N - 1), N - 1) + 1):
            out.append(_check(f"coherency n={n}", measures.check_coherency(k, n)))
    elif which == "zn":
        for n in range(min(cfg.get("n", N), N) + 1):
            out.append(_check(f"Z_n n={n}", measures.normalization_check(k, n)))
    elif which == "comb_identity":
        top = min(cfg.get("n", N - 1), N - 1)
        for lam in _levels(g, top):
            for mu in _levels(g, min(g.level(lam) + 1, N)):
                r = dimfun.check_comb_identity(k, mu, lam)
                if not r["ok"]:
                    out.append(_check(f"comb_identity {g.code(mu)} / {g.code(lam)}", r))
        out.append({"name": "comb_identity", "ok": not out, "levels": top})
    elif which == "tn_action":
        k = k.require_nondegenerate(allow_degenerate=True)
        n = min(cfg.get("n", N - 1), N - 1)
        for mu in _levels(k.graph, n):
            out.append(_check(f"T_n action n={n} mu={k.graph.code(mu)}", dynamics.check_Tn_action(k, n, mu)))
    elif which == "spectrum":
        for n in range(1, min(cfg.get("n", N - 1), N - 1) + 1):
            s = dynamics.updown_spectrum(k, n, tol=1e-9)
            out.append({"name": f"spectrum n={n}", "ok": bool(s["ok"]), "max_deviation": s["max_deviation"],
                        "method": s["method"]})
    elif which == "eigen":
        gen = dynamics.generator_on_A(k, xi, N)
        bad = []
        for lam in _levels(g, min(cfg.get("n", N), N)):
            r = dynamics.check_meixner_eigen(k, xi, lam, gen)
            if not r["ok"]:
                bad.append(g.code(lam))
        out.append({"name": "generator eigen", "ok": not bad, "failed": bad, "xi": xi,
                    "spectrum": {str(a): b for a, b in sorted(gen.spectrum().items())}})
    elif which == "orthogonality":
        top = min(cfg.get("n", 2), N)
        for lam in _levels(g, top):
            for mu in _levels(g, top):
                if g.index(mu) + 1000 * g.level(mu) < g.index(lam) + 1000 * g.level(lam):
                    continue
                r = dynamics.check_orthogonality(k, xi, lam, mu, cfg["eps"])
                out.append(_check(f"({g.code(lam)}, {g.code(mu)})", r))
    elif which == "autoduality":
        top = min(cfg.get("n", N), N)
        vs = _levels(g, top)
        out.append(_check("moment functional",
                          {"ok": all(sc.close(dynamics.moment_functional(k, xi, dynamics.meixner_fn(k, xi, lam)),
                                              1 if g.level(lam) == 0 else 0) for lam in vs)}))
        # the normalization of the dual function divides by prod q^2
        live = [v for v in vs if not sc.is_zero(k.q2_prod(v))]
        bad = []
        for a, lam in enumerate(live):
            for rho in live[a + 1:]:
                r = dynamics.check_autoduality(k, xi, lam, rho)
                if not r["ok"]:
                    bad.append((g.code(lam), g.code(rho)))
        out.append({"name": "autoduality", "ok": not bad, "failed": bad,
                    "skipped": [g.code(v) for v in vs if v not in live]})
    return out


def verify_kingman_degenerate(cfg):
    beta = _need(cfg, "beta")[0] if "beta" in cfg else Fraction(1)
    rows = cfg.get("rows", 2)
    xi = cfg.get("xi", Fraction(1, 2))
    depth = cfg.get("depth", 4)
    k = kerov.make_kerov("kingman", depth, alpha=-beta, tau=rows * beta)
    g = k.graph
    vs = [v for v in _levels(g, depth) if len(v) <= rows]
    bad = []
    for lam in vs:
        for nu in vs:
            r = dynamics.kingman_degenerate_check(beta, rows, xi, lam, nu)
            if not r["ok"]:
                bad.append((g.code(lam), g.code(nu)))
    return [{"name": "meixner products", "ok": not bad, "failed": bad, "pairs": len(vs) ** 2},
            _check("stationary factorization", dynamics.kingman_stationary_check(beta, rows, xi, depth))]


def verify_rimhook(cfg):
    z, zp = _need(cfg, "z", "zp")
    r = cfg.get("r", 2)
    res = dynamics.rimhook_check(r, z, zp, cfg.get("depth", 3))
    return [_check(f"rimhook r={r}", res)]


def cmd_verify(cfg) -> int:
    which = cfg["which"]
    if which == "sl2":
        checks = verify_sl2(cfg)
    elif which == "duality":
        checks = verify_duality(cfg)
    elif which == "heisenberg":
        checks = verify_heisenberg(cfg)
    elif which == "kingman_degenerate":
        checks = verify_kingman_degenerate(cfg)
    elif which == "rimhook":
        checks = verify_rimhook(cfg)
    else:
        checks = _kerov_checks(cfg, which)
    return report(cfg, checks)


# --- data commands -------------------------------------------------------------------

def cmd_catalog(cfg) -> int:
    data = {"families": CATALOG, "checks": list(CHECKS), "env": {"KEROVLAB_VERTEX_BUDGET": "caps enumeration"}}
    emit(cfg, json.dumps(data, indent=1, sort_keys=True) + "\n")
    return 0


def cmd_measure(cfg) -> int:
    n = cfg.get("n", 3)
    depth = max(cfg.get("depth", n + 1), n + 1) if cfg["family"] != "finite_chain" else cfg.get("depth", n + 1)
    cfg["depth"] = depth
    if cfg["family"] == "macdonald":
        g = make_graph(cfg)
        lm = measures.plancherel(g, n)
    else:
        lm = measures.coherent_measure(make_kerov(cfg), n)
    total = lm.total()
    if cfg.get("format", "csv") == "csv":
        emit(cfg, lm.to_csv(), {"config": config_block(cfg), "total": plain(total)})
    else:
        data = {"config": config_block(cfg), "n": n, "total": plain(total),
                "masses": {lm.graph.code(v): plain(m) for v, m in lm.items()}}
        emit(cfg, json.dumps(data, indent=1) + "\n")
    return 0 if sc.close(total, 1) else 1


def cmd_spectrum(cfg) -> int:
    n = cfg.get("n", 3)
    cfg["depth"] = max(cfg.get("depth", n + 1), n + 1)
    k = make_kerov(cfg)
    s = dynamics.updown_spectrum(k, n, tol=1e-9)
    if cfg.get("format", "csv") == "csv":
        emit(cfg, dynamics.spectrum_csv(s), {"config": config_block(cfg), "ok": bool(s["ok"]),
                                             "max_deviation": s["max_deviation"], "method": s["method"]})
    else:
        data = {"config": config_block(cfg), "ok": bool(s["ok"]), "max_deviation": s["max_deviation"],
                "method": s["method"], "rows": plain(s["rows"])}
        emit(cfg, json.dumps(data, indent=1) + "\n")
    return 0 if s["ok"] else 1


def cmd_eigenfunctions(cfg) -> int:
    n = cfg.get("n", 2)
    cfg["depth"] = max(cfg.get("depth", n), n)
    if cfg["kind"] == "charlier":
        g = make_graph(cfg)
        gamma = cfg.get("gamma", Fraction(1))
        fns = {lam: dynamics.charlier_fn(g, gamma, lam) for lam in _levels(g, n)}
    else:
        k = make_kerov(cfg)
        g = k.graph
        xi = cfg.get("xi", Fraction(1, 2))
        fns = {lam: dynamics.meixner_fn(k, xi, lam) for lam in _levels(g, n)}
    if cfg.get("format", "json") == "csv":
        rows = [(g.code(lam), g.code(mu), sc.format_exact(c)) for lam, f in fns.items() for mu, c in f.items()]
        emit(cfg, csv_text(["lambda", "mu", "coefficient"], rows), {"config": config_block(cfg)})
    else:
        data = {"config": config_block(cfg), "basis": "pstar",
                "functions": {g.code(lam): plain(f.to_codes()) for lam, f in fns.items()}}
        emit(cfg, json.dumps(data, indent=1) + "\n")
    return 0


def cmd_simulate(cfg) -> int:
    xi = cfg.get("xi", Fraction(1, 2))
    T = cfg.get("T", 10)
    seed = cfg["seed"]
    proc = cfg["process"]
    if proc == "birth_death":
        t = cfg["t"] if "t" in cfg else make_kerov(cfg, 1).t
        traj = simulate.simulate_birth_death(t, xi, T, seed)
        traj.params = config_block(cfg)
        emit(cfg, traj.to_jsonl())
        return 0
    depth = cfg.get("depth", 12)
    cfg["depth"] = depth
    k = make_kerov(cfg, depth).require_nondegenerate(allow_degenerate=True)
    g = k.graph
    start = g.parse(cfg["start"]) if "start" in cfg else None
    if proc == "updown":
        n = cfg.get("n", 3)
        states = simulate.simulate_updown(k, n, cfg["steps"], seed, start)
        head = {"seed": seed, "config": config_block(cfg)}
        lines = [json.dumps(head)] + [json.dumps({"step": i, "vertex": g.code(s)}) for i, s in enumerate(states)]
        emit(cfg, "\n".join(lines) + "\n")
        return 0
    if cfg["replicas"] <= 1:
        traj = simulate.simulate_jump(k, xi, T, seed, start)
        traj.params = config_block(cfg)
        emit(cfg, traj.to_jsonl())
        return 0
    res = simulate.jump_final_states(k, xi, T, cfg["replicas"], seed, start)
    N = min(cfg.get("n", 10), depth - 1)
    exact = measures.mixed_measure(k, xi).table(depth - 1)
    rep = simulate.stationarity_report(simulate.lump_counts(res["counts"], g, N),
                                       simulate.lumped_by_level(exact, g, N),
                                       code=lambda s: s if isinstance(s, str) else g.code(s))
    data = {"config": config_block(cfg), "capped": res["capped"], "replicas": res["replicas"],
            "jumps": res["jumps"], "report": plain(rep)}
    emit(cfg, json.dumps(data, indent=1) + "\n")
    return 0


COMMANDS = {"catalog": cmd_catalog, "verify": cmd_verify, "measure": cmd_measure, "spectrum": cmd_spectrum,
            "eigenfunctions": cmd_eigenfunctions, "simulate": cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        cfg = make_config(ns)
        return COMMANDS[cfg["command"]](cfg)
    except (UsageError, GraphError, kerov.NoKerovError, kerov.DegenerateError, measures.MeasureError,
            multiplicity.PoleError, ValueError, ZeroDivisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
