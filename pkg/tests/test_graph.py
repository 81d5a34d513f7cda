import json
from fractions import Fraction as F
from math import comb

import pytest
from sympy import partition

from kerovlab.graph import BudgetError, GraphError, TruncatedError, brute_force_paths, build_graph
from kerovlab.families import tree_code, tree_parse
from kerovlab.multiplicity import MultiplicityFn, quadrangles


def test_pascal_level_sizes():
    assert build_graph("pascal_d", {"d": 2}, 3).level_sizes() == [1, 2, 3, 4]


def test_young_level_sizes_match_partition_count():
    g = build_graph("young", {}, 8)
    assert g.level_sizes() == [int(partition(n)) for n in range(9)]


def test_chain_one_vertex_per_level():
    assert build_graph("chain", {}, 5).level_sizes() == [1] * 6


def test_tree_counts():
    # rooted unlabeled trees with n+1 vertices: 1, 1, 2, 4, 9, 20
    assert build_graph("trees", {}, 5).level_sizes() == [1, 1, 2, 4, 9, 20]


def test_strict_partition_counts():
    # partitions into distinct parts: 1, 1, 1, 2, 2, 3, 4, 5
    assert build_graph("schur", {}, 7).level_sizes() == [1, 1, 1, 2, 2, 3, 4, 5]


def test_pascal_covers():
    g = build_graph("pascal_d", {"d": 2}, 3)
    assert set(g.covers((1, 1))) == {(2, 1), (1, 2)}


def test_root_has_no_cocovers():
    for fam in ("young", "schur", "trees", "pascal_d"):
        g = build_graph(fam, {}, 2)
        assert g.cocovers(g.family.root()) == []


def test_young_covers_of_one():
    g = build_graph("young", {}, 3)
    assert set(g.covers((1,))) == {(2,), (1, 1)}


def test_covers_above_depth_are_truncated():
    g = build_graph("young", {}, 2)
    with pytest.raises(TruncatedError):
        g.covers((2,))


def test_vertex_membership():
    g = build_graph("young", {}, 2)
    with pytest.raises(GraphError):
        g.level((3,))


def test_covers_and_cocovers_are_inverse():
    g = build_graph("young", {}, 5)
    for n in range(5):
        for v in g.vertices(n):
            for w in g.covers(v):
                assert v in g.cocovers(w)
    for v in g.vertices():
        assert len(set(g.cocovers(v))) == len(g.cocovers(v))


def test_every_vertex_has_a_cocover():
    for fam in ("young", "schur", "trees", "pascal_d", "rimhook_r"):
        g = build_graph(fam, {}, 4)
        assert all(g.cocovers(v) for n in range(1, 5) for v in g.vertices(n))


def test_pascal_dimension_is_binomial():
    g = build_graph("pascal_d", {"d": 2}, 6)
    for k, l in g.vertices(6):
        assert g.dimension((k, l)) == comb(k + l, k)


def test_young_dimension_small():
    g = build_graph("young", {}, 4)
    assert g.dimension((2, 1)) == 2
    assert g.dimension((2, 2)) == 2
    assert g.dimension((3, 1)) == 3


def test_relative_dimension_diagonal_and_zero():
    g = build_graph("young", {}, 4)
    assert g.relative_dimension((2,), (2,)) == 1
    assert g.relative_dimension((2,), (1, 1, 1)) == 0


@pytest.mark.parametrize("fam,m", [("young", None), ("schur", MultiplicityFn("schur")),
                                   ("trees", MultiplicityFn("tree")),
                                   ("young", MultiplicityFn("jack_selfdual", theta=F(2)))])
def test_dp_matches_path_enumeration(fam, m):
    g = build_graph(fam, {}, 5, m)
    root = g.family.root()
    for lam in g.vertices():
        assert g.dimension(lam) == brute_force_paths(g, root, lam)
    for mu in g.vertices(2):
        for lam in g.vertices(5):
            assert g.relative_dimension(mu, lam) == brute_force_paths(g, mu, lam)


def test_tree_codes_canonical():
    g = build_graph("trees", {}, 4)
    for v in g.vertices():
        assert tree_parse(tree_code(v)) == v
    assert tree_parse("((())())") == tree_parse("(()(()))")


def test_codes_round_trip():
    for fam, p in [("young", {}), ("schur", {}), ("pascal_d", {"d": 3}), ("rimhook_r", {"r": 2})]:
        g = build_graph(fam, p, 3)
        for v in g.vertices():
            assert g.parse(g.code(v)) == v


def test_quadrangles():
    assert len(quadrangles(build_graph("pascal_d", {"d": 2}, 3), 1)) == 1
    assert all(not quadrangles(build_graph("chain", {}, 4), n) for n in range(1, 4))
    q = quadrangles(build_graph("young", {}, 3), 2)
    assert ((1,), (2,), (1, 1), (2, 1)) in q


def test_vertex_budget(monkeypatch):
    monkeypatch.setenv("KEROVLAB_VERTEX_BUDGET", "50")
    with pytest.raises(BudgetError, match="estimated"):
        build_graph("young", {}, 12)


def test_plane_partition_cap():
    with pytest.raises(GraphError):
        build_graph("plane_partitions", {}, 7)
    assert build_graph("plane_partitions", {}, 3).level_sizes() == [1, 1, 3, 6]


def test_json_export():
    d = json.loads(build_graph("young", {}, 2).to_json())
    assert d["levels"] == [[""], ["1"], ["1,1", "2"]]
    assert d["N"] == 2 and len(d["edges"]) == 3
