import csv
import io
from fractions import Fraction as F
from math import factorial

import numpy as np
import pytest

from kerovlab import scalar as sc
from kerovlab.dimfun import (AVector, apply_kerov_D, apply_kerov_U, basis, check_comb_identity, check_kerov_action,
                             check_pieri, check_recurrence, evaluate, evaluation_determinant, gram_matrix,
                             level_function, pieri_multiply_p, pstar_csv, pstar_value)
from kerovlab.graph import TruncatedError, build_graph
from kerovlab.kerov import DegenerateError, make_kerov
from kerovlab.multiplicity import MultiplicityFn

GRAPHS = [
    ("young", None), ("schur", MultiplicityFn("schur")), ("trees", MultiplicityFn("tree")),
    ("young", MultiplicityFn("jack_selfdual", theta=F(2))),
]


def test_pstar_empty_is_one():
    g = build_graph("young", {}, 4)
    assert all(pstar_value(g, (), lam) == 1 for lam in g.vertices())


def test_pstar_pascal_falling_factorials():
    g = build_graph("pascal_d", {"d": 2}, 6)
    for mu in g.vertices():
        for lam in g.vertices():
            expect = sc.falling(lam[0], mu[0]) * sc.falling(lam[1], mu[1])
            assert pstar_value(g, mu, lam) == expect


def test_pstar_vanishes_off_containment():
    g = build_graph("young", {}, 3)
    assert pstar_value(g, (2,), (1, 1)) == 0


@pytest.mark.parametrize("fam,m", GRAPHS)
def test_interpolation_properties(fam, m):
    g = build_graph(fam, {}, 5, m)
    for mu in g.vertices():
        n = g.level(mu)
        assert sc.close(pstar_value(g, mu, mu), factorial(n) / g.dimension(mu))
        # dim(mu) dim(mu, lam) <= dim(lam) gives the bound |lam|^(down n) / dim(mu)
        cap = 1 / sc.to_float(g.dimension(mu))
        for lam in g.vertices():
            v = sc.to_float(pstar_value(g, mu, lam))
            assert 0 <= v <= sc.falling(g.level(lam), n) * max(1, cap) + 1e-12
            if cap <= 1:
                assert v <= sc.falling(g.level(lam), n) + 1e-12


def test_plain_estimate_needs_dim_at_least_one():
    g = build_graph("young", {}, 2, MultiplicityFn("jack_selfdual", theta=F(2)))
    assert pstar_value(g, (1,), (1,)) == sc.Surd(1, 2)


@pytest.mark.parametrize("fam,m", GRAPHS)
def test_recurrence(fam, m):
    g = build_graph(fam, {}, 5, m)
    for mu in g.vertices(2):
        for lam in g.vertices():
            if g.level(lam) > 0:
                assert check_recurrence(g, mu, lam)["ok"]


def test_pieri_examples():
    g = build_graph("young", {}, 3)
    assert pieri_multiply_p(basis(g, ())).equals(level_function(g))
    assert pieri_multiply_p(basis(g, (1,))).equals(AVector(g, {(1,): 1, (2,): 1, (1, 1): 1}))
    gc = build_graph("chain", {}, 4)
    assert pieri_multiply_p(basis(gc, (2,))).equals(AVector(gc, {(2,): 2, (3,): 1}))


@pytest.mark.parametrize("fam,m", GRAPHS)
def test_pieri_pointwise(fam, m):
    g = build_graph(fam, {}, 5, m)
    for mu in g.vertices(3):
        assert check_pieri(basis(g, mu))["ok"]


def test_pieri_truncation():
    g = build_graph("young", {}, 2)
    with pytest.raises(TruncatedError):
        pieri_multiply_p(basis(g, (2,)))


@pytest.mark.parametrize("fam,params", [
    ("young", dict(z=F(4, 3), zp=F(5, 3))), ("schur", dict(a=5)), ("chain", dict(t=F(7, 2))),
    ("pascal", dict(ts=(1, 2))), ("kingman", dict(alpha=F(1, 3), tau=2)), ("trees", {}),
])
def test_kerov_action_against_raw_operators(fam, params):
    k = make_kerov(fam, 4, **params)
    for mu in [v for n in range(4) for v in k.graph.vertices(n)]:
        assert check_kerov_action(k, F(1, 4), mu)["ok"]


def test_D_lower_terms():
    k = make_kerov("chain", 5, t=F(7, 2))
    low = apply_kerov_D(k, F(1, 4), (3,)).lower()
    assert low == AVector(k.graph, {(2,): F(1, 2) * 3 * (2 + F(7, 2))})
    ky = make_kerov("young", 3, z=F(4, 3), zp=F(5, 3))
    assert apply_kerov_D(ky, F(1, 4), (1,)).lower() == AVector(ky.graph, {(): F(1, 2) * F(20, 9)})
    assert apply_kerov_D(ky, F(1, 4), ()).lower() == AVector(ky.graph)
    assert apply_kerov_U(ky, F(1, 4), (1,)).terms == [(2, 1, -1, (1,))]


def test_action_refuses_degenerate_data():
    with pytest.raises(DegenerateError):
        apply_kerov_D(make_kerov("young", 4, z=2, zp=3), F(1, 2), (1,))


@pytest.mark.parametrize("fam,params", [("young", dict(z=2, zp=3)), ("schur", dict(a=5)),
                                        ("young", dict(z=F(3, 2), zp=F(5, 2), theta=2)), ("trees", {})])
def test_comb_identity(fam, params):
    k = make_kerov(fam, 5, **params)
    g = k.graph
    for lam in [v for n in range(5) for v in g.vertices(n)]:
        for mu in [v for n in range(g.level(lam) + 2) for v in g.vertices(n)]:
            assert check_comb_identity(k, mu, lam)["ok"]


def test_evaluation_matrix_invertible():
    g = build_graph("young", {}, 5)
    for n in range(6):
        assert evaluation_determinant(g, n) != 0


def test_gram_positive_definite():
    k = make_kerov("young", 18, z=2, zp=3)
    mus = [v for n in range(3) for v in k.graph.vertices(n)]
    G, tail = gram_matrix(k, F(1, 5), mus)
    assert tail < 1e-3
    assert np.linalg.eigvalsh(G).min() > 10 * tail


def test_evaluate_linear():
    g = build_graph("young", {}, 3)
    f = AVector(g, {(): 2, (1,): -1})
    assert evaluate(f, (2, 1)) == 2 - 3


def test_pstar_csv():
    rows = list(csv.reader(io.StringIO(pstar_csv(build_graph("pascal_d", {"d": 2}, 1), 1))))
    assert rows[0] == ["mu", "lambda", "value"]
    assert ["0,0", "1,0", "1"] in rows
