import csv
import io
from fractions import Fraction as F

import pytest

from kerovlab import dynamics as dy
from kerovlab import scalar as sc
from kerovlab.dimfun import AVector, basis, evaluate
from kerovlab.graph import build_graph
from kerovlab.kerov import make_kerov
from kerovlab.measures import coherent_measure, mixed_measure
from kerovlab.multiplicity import MultiplicityFn

XI = F(1, 2)


def levels(g, top):
    return [v for n in range(top + 1) for v in g.vertices(n)]


# --- up/down chain -------------------------------------------------------------

def test_chain_updown_is_identity():
    T = dy.updown_matrix(make_kerov("chain", 4, t=F(7, 2)), 3)
    assert T.matrix == [[1]]


def test_pascal_T1_entries():
    T = dy.updown_matrix(make_kerov("pascal", 3, ts=(1, 2)), 1)
    assert T.vertices == [(0, 1), (1, 0)]
    assert T.matrix == [[F(7, 8), F(1, 8)], [F(1, 4), F(3, 4)]]


def test_updown_stochastic_reversible_and_local(young23):
    g = young23.graph
    for n in range(1, 5):
        T = dy.updown_matrix(young23, n)
        assert T.rows_ok()
        assert T.detailed_balance(dict(coherent_measure(young23, n).items()))["ok"]
        for a, lam in enumerate(T.vertices):
            for b, mu in enumerate(T.vertices):
                if T.matrix[a][b] != 0 and lam != mu:
                    assert len(g.boxes(lam) - g.boxes(mu)) == 1


def test_Tn_action(young23):
    assert dy.check_Tn_action(young23, 3, (2,))["ok"]
    for n in range(1, 5):
        for mu in levels(young23.graph, n):
            assert dy.check_Tn_action(young23, n, mu)["ok"]


def test_pascal_spectrum_simple():
    t = F(3)
    s = dy.updown_spectrum(make_kerov("pascal", 3, ts=(1, 2)), 2)
    assert s["method"] == "charpoly" and s["ok"] and s["max_deviation"] == 0
    assert [r["eigenvalue"] for r in s["rows"]] == [0, -t / (3 * (2 + t)), -2 * (1 + t) / (3 * (2 + t))]
    assert all(r["multiplicity"] == 1 for r in s["rows"])


def test_young_spectrum_multiplicities(young23):
    s = dy.updown_spectrum(young23, 3)
    assert [r["multiplicity"] for r in s["rows"]] == [1, 0, 1, 1]
    assert s["rows"][0]["multiplicity"] == 1


def test_float_spectrum_path(young23):
    s = dy.updown_spectrum(young23, 4, exact=False)
    assert s["method"] == "symmetrized-float" and s["ok"] and s["max_deviation"] < 1e-12


def test_spectrum_csv(young23):
    rows = list(csv.reader(io.StringIO(dy.spectrum_csv(dy.updown_spectrum(young23, 3)))))
    assert rows[0] == ["eigenvalue", "multiplicity", "predicted", "deviation"] and len(rows) == 4


# --- jump rates ---------------------------------------------------------------

def test_jump_rate_diagonal(young23):
    xi = F(2, 5)
    row = dy.jump_rates(young23, xi, (2, 1))
    assert row[(2, 1)] == -(3 + xi * 9) / (1 - xi)
    assert sum(row.values()) == 0


def test_jump_rates_balance(young23):
    for xi in (F(1, 2), F(2, 5)):
        assert dy.check_jump_rates(young23, xi, 5)["ok"]


def test_conjugation():
    for k in (make_kerov("young", 5, z=F(4, 3), zp=F(5, 3)), make_kerov("schur", 5, a=5),
              make_kerov("pascal", 5, ts=(1, 2))):
        assert dy.check_conjugation(k, F(1, 3), 4)["ok"]


def test_embedded_chain(young23):
    for n in range(1, 5):
        assert dy.check_embedded_chain(young23, F(2, 5), n)["ok"]


# --- generator on A -------------------------------------------------------------

def test_generator_structure(young23):
    gen = dy.generator_on_A(young23, XI, 5)
    assert gen.respects_filtration()
    assert gen.columns[()] == AVector(young23.graph, {(): 0})
    assert gen.spectrum() == {0: 1, -1: 1, -2: 2, -3: 3, -4: 5, -5: 7}


def test_chain_generator_bidiagonal():
    t, xi = F(7, 2), F(1, 3)
    gen = dy.generator_on_A(make_kerov("chain", 5, t=t), xi, 5)
    for m in range(1, 6):
        assert gen.entry((m - 1,), (m,)) == xi / (1 - xi) * m * (m - 1 + t)


@pytest.mark.parametrize("fam,params", [
    ("young", dict(z=2, zp=3)), ("young", dict(z=F(3, 2), zp=F(5, 2), theta=2)),
    ("kingman", dict(alpha=F(1, 3), tau=2)), ("schur", dict(a=5)), ("pascal", dict(ts=(1, 2, 3))),
    ("chain", dict(t=F(7, 2))), ("trees", {}), ("rimhook", dict(r=2, z=2, zp=3)),
])
def test_meixner_eigen(fam, params):
    k = make_kerov(fam, 5, **params)
    gen = dy.generator_on_A(k, XI, 5)
    for lam in levels(k.graph, 5):
        assert dy.check_meixner_eigen(k, XI, lam, gen)["ok"]


def test_meixner_small_cases():
    t, xi = F(7, 2), F(1, 3)
    k = make_kerov("chain", 5, t=t)
    assert dy.meixner_fn(k, xi, (0,)) == AVector(k.graph, {(0,): 1})
    f = dy.meixner_fn(k, xi, (1,))
    assert evaluate(f, (4,)) == 4 - xi * t / (1 - xi)
    assert dy.moment_functional(k, xi, f) == 0
    assert dy.moment_functional(k, xi, basis(k.graph, (1,))) == xi * t / (1 - xi)


def test_moment_functional_kills_eigenfunctions(young23):
    for lam in levels(young23.graph, 4):
        val = dy.moment_functional(young23, XI, dy.meixner_fn(young23, XI, lam))
        assert val == (1 if lam == () else 0)


def test_autoduality_examples(young23):
    assert dy.meixner_prime(young23, XI, (), (2,)) == 1
    assert dy.meixner_prime(young23, XI, (2,), ()) == 1
    assert dy.check_autoduality(young23, XI, (1,), (2,))["ok"]


def test_autoduality_nondegenerate():
    k = make_kerov("young", 4, z=F(3, 2), zp=F(5, 2), theta=2)
    vs = levels(k.graph, 3)
    for a, lam in enumerate(vs):
        for rho in vs[a:]:
            assert dy.check_autoduality(k, F(1, 3), lam, rho)["ok"]


# --- pairings -----------------------------------------------------------------

def test_inner_product_constants(young23):
    one = basis(young23.graph, ())
    p = dy.inner_product_Mxi(young23, XI, one, one, 1e-8)
    assert float(p.value) == pytest.approx(1, abs=1e-8) and p.bound <= 1e-8
    p1 = dy.inner_product_Mxi(young23, XI, basis(young23.graph, (1,)), one, 1e-8)
    assert p1.value == pytest.approx(float(dy.moment_functional(young23, XI, basis(young23.graph, (1,)))), abs=1e-8)


def test_chain_meixner_norm():
    t, xi = F(7, 2), F(1, 3)
    k = make_kerov("chain", 3, t=t)
    r = dy.check_orthogonality(k, xi, (1,), (1,), 1e-8)
    assert r["ok"] and r["expected"] == xi * t / (1 - xi) ** 2


def test_young_orthogonality_small(young23):
    r = dy.check_orthogonality(young23, XI, (1,), (2,), 1e-6)
    assert r["ok"] and r["expected"] == 0 and r["bound"] <= 1e-6


def test_unattainable_tolerance(young23):
    with pytest.raises(dy.ToleranceError):
        dy.inner_product_Mxi(young23, XI, basis(young23.graph, (2,)), basis(young23.graph, (2,)), 1e-6,
                             max_level=5)


def test_F_functions():
    k = make_kerov("young", 16, z=F(4, 3), zp=F(5, 3))
    for lam in levels(k.graph, 2):
        assert dy.check_f_relation(k, F(1, 5), lam, 6)["ok"]
    vals = dy.f_fn(k, F(1, 5), (), 4)
    mm = mixed_measure(k, F(1, 5))
    assert all(vals[v] == pytest.approx(float(sc.to_float(mm(v))) ** 0.5) for v in vals)
    assert dy.f_pairing(k, F(1, 5), (), ())["ok"]
    assert dy.f_pairing(k, F(1, 5), (1,), ())["ok"]


# --- Heisenberg ----------------------------------------------------------------

def test_charlier_eigen_and_norm():
    g = build_graph("young", {}, 8, MultiplicityFn("macdonald_selfdual", q=F(1, 3), t=F(1, 2)))
    gamma = F(1, 2)
    assert dy.charlier_fn(g, gamma, ()) == AVector(g, {(): 1})
    for lam in levels(g, 3):
        assert dy.check_charlier_eigen(g, gamma, lam)["ok"]
    for lam in levels(g, 2):
        for mu in levels(g, 2):
            assert dy.check_charlier_norm(g, gamma, lam, mu, 1e-9)["ok"]


def test_poisson_moment_matches_measure():
    g = build_graph("young", {}, 8, MultiplicityFn("macdonald_selfdual", q=F(1, 3), t=F(1, 2)))
    gamma, one = F(1, 2), basis(g, ())
    for mu in levels(g, 3):
        exact = float(sc.to_float(dy.poisson_moment(g, gamma, basis(g, mu))))
        assert dy.inner_product_Pl(g, gamma, basis(g, mu), one, 1e-10).value == pytest.approx(exact, abs=1e-9)


def test_poisson_moment_uses_factorial():
    g = build_graph("young", {}, 4)
    gamma = F(1, 2)
    # trivial young, r = 1: phi(P*_(2,1)) = gamma^3 dim / 3! = 1/24
    assert dy.poisson_moment(g, gamma, basis(g, (2, 1))) == F(1, 24)


def test_chain_classical_degenerations():
    for n in range(7):
        assert dy.check_chain_meixner(F(7, 2), F(1, 3), n)["ok"]
        assert dy.check_chain_charlier(F(3, 2), n)["ok"]


def test_kingman_degenerate_small():
    beta, xi = F(1), F(1, 3)
    assert dy.kingman_degenerate_check(beta, 1, xi, (1,), (3,))["ok"]
    assert dy.kingman_degenerate_check(beta, 2, xi, (1, 1), (2, 1))["ok"]
    with pytest.raises(ValueError):
        dy.kingman_degenerate_check(beta, 1, xi, (1, 1), (2,))
    assert dy.kingman_stationary_check(beta, 2, xi, 4)["ok"]


def test_rimhook():
    assert dy.rimhook_check(2, 2, 3, 3)["ok"]
    assert dy.rimhook_check(3, F(1, 2), 2, 2)["ok"]
    d = dy.rimhook_direct(2, 2, 3, 1)
    assert d["t"] == 2 * 2 * 3 + F(3, 24)
    zs = [F(2) + F(3 - 2 * i, 4) for i in (1, 2)]
    zps = [F(3) + F(3 - 2 * i, 4) for i in (1, 2)]
    assert d["t"] == sum(a * b for a, b in zip(zs, zps))
