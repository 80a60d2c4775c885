import itertools
import json

import pytest
from hypothesis import given, settings

from arbor.errors import (
    CycleDetected,
    DanglingParent,
    InvalidNode,
    MultipleRoots,
    NotAPartialOrder,
    ParamOutOfRange,
    StructureError,
    TooManyChains,
)
from arbor.tree import (
    FinitePoset,
    FiniteTree,
    all_posets,
    all_trees,
    classify_subset,
    gen_tree,
    node_queries,
    sigma_prime,
    tree_from_parent,
)

from oracles import ancestors, cone, is_antichain, is_chain
from strategies import parents, trees


def test_tree_from_parent_examples():
    T = tree_from_parent([None, 0, 0])
    assert (T.n, T.root, T.height) == (3, 0, 2)
    P = tree_from_parent([None, 0, 1, 2])
    assert P.is_chain(range(4))
    with pytest.raises(CycleDetected):
        tree_from_parent([None, 2, 1])


@pytest.mark.parametrize(
    "parent, err",
    [([0, 0], CycleDetected), ([1, 0], CycleDetected), ([None, None], MultipleRoots), ([None, 5], DanglingParent), ([], StructureError)],
)
def test_tree_rejects(parent, err):
    with pytest.raises(err):
        tree_from_parent(parent)


def test_node_queries_examples():
    q = node_queries(gen_tree("path", n=4), 3)
    assert q.pred == {0, 1, 2} and q.height == 3
    T = tree_from_parent([None, 0, 0])
    assert node_queries(T, 0).cone == {0, 1, 2}
    assert node_queries(T, 1).cone == frozenset()
    with pytest.raises(InvalidNode):
        node_queries(T, 3)


def test_root_need_not_be_node_zero():
    T = tree_from_parent([1, None, 1])
    assert T.root == 1 and T.cone(1) == {0, 1, 2} and T.pred(2) == {1}


def test_classify_subset_examples():
    T = tree_from_parent([None, 0, 0])
    c = classify_subset(T, {1, 2})
    assert c.is_antichain and not c.is_chain and c.isolated_points == {1, 2}
    assert classify_subset(gen_tree("path", n=4), {0, 2}).is_chain


def test_gen_tree_examples():
    p = gen_tree("path", n=4)
    assert p.n == 4 and p.height == 4
    assert gen_tree("complete", branching=2, levels=3).n == 7
    w = gen_tree("wq", m=3, d=2)
    assert w.n == 7 and w.height == 3
    assert gen_tree("random", seed=5, n=9).parent == gen_tree("random", seed=5, n=9).parent
    for kind, params in [("path", {}), ("path", {"n": 0}), ("bogus", {"n": 3}), ("complete", {"branching": 2})]:
        with pytest.raises(ParamOutOfRange):
            gen_tree(kind, **params)


@pytest.mark.parametrize("n, count", [(1, 1), (2, 1), (3, 2), (4, 4), (5, 9), (6, 20), (7, 48)])
def test_all_trees_counts(n, count):
    shapes = list(all_trees(n))
    assert len(shapes) == count
    # pairwise non-isomorphic: compare canonical forms computed independently
    def canon(parent, v):
        kids = [u for u, p in enumerate(parent) if p == v]
        return "(" + "".join(sorted(canon(parent, u) for u in kids)) + ")"

    forms = {canon(T.parent, T.root) for T in shapes}
    assert len(forms) == count


@pytest.mark.parametrize("n, count", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 16)])
def test_all_posets_counts(n, count):
    assert len(list(all_posets(n))) == count


def test_poset_validation():
    with pytest.raises(NotAPartialOrder):
        FinitePoset(3, {(0, 1), (1, 2)})
    with pytest.raises(NotAPartialOrder):
        FinitePoset(2, {(0, 1), (1, 0)})
    with pytest.raises(NotAPartialOrder):
        FinitePoset(1, {(0, 0)})
    with pytest.raises(InvalidNode):
        FinitePoset(2, {(0, 2)})
    P = FinitePoset.from_relation(3, {(0, 1), (1, 2)})
    assert P.less(0, 2)


def test_json_round_trip_and_errors():
    T = gen_tree("random", seed=3, n=8)
    text = T.to_json()
    assert FiniteTree.from_json(text).to_json() == text
    assert json.loads(text)["format_version"] == 1
    P = FinitePoset.from_relation(4, {(0, 1), (0, 2), (2, 3)})
    assert FinitePoset.from_json(P.to_json()).to_json() == P.to_json()
    assert FiniteTree.from_json('{"parent": [null]}').n == 1
    for bad in ["", "[]", '{"parent": [null, 0, 7]}', '{"format_version": 2, "parent": [null]}', '{"format_version": 1, "parent": "x"}']:
        with pytest.raises(StructureError):
            FiniteTree.from_json(bad)


def test_dot_output():
    dot = gen_tree("path", n=3).to_dot()
    assert dot.startswith("digraph") and "0 -> 1" in dot


def test_sigma_prime_examples():
    anti = FinitePoset(2, set())
    assert sigma_prime(anti).tree.n == 3
    chain = FinitePoset(2, {(0, 1)})
    sp = sigma_prime(chain)
    assert sp.tree.n == 4 and sp.tree.height == 3
    assert sigma_prime(FinitePoset(3, {(0, 1)})).tree.n == 5
    with pytest.raises(TooManyChains):
        sigma_prime(FinitePoset.from_relation(6, {(i, i + 1) for i in range(5)}), max_chains=10)


@pytest.mark.parametrize("n", range(0, 5))
def test_sigma_prime_properties(n):
    for P in all_posets(n):
        sp = sigma_prime(P)
        T = sp.tree
        # every nonempty chain of P appears exactly once
        chains = {frozenset(c) for r in range(1, n + 1) for c in itertools.combinations(range(n), r) if is_chain(P.less, c)}
        assert sorted(map(frozenset, sp.chains[1:]), key=sorted) == sorted(chains, key=sorted)
        for a, b in T.comparable_pairs:
            if a != T.root:
                assert P.less(sp.max_map[a], sp.max_map[b])
        for t in T.nodes:
            assert is_chain(T.less, ancestors(T.parent, t))


@settings(max_examples=150)
@given(parents(max_n=9))
def test_tree_queries_match_recomputation(parent):
    T = tree_from_parent(parent)
    for t in T.nodes:
        assert T.pred(t) == ancestors(parent, t)
        assert T.cone(t) == cone(parent, t)
        assert len(T.pred(t)) == T.depth[t]
        if t != T.root:
            assert is_chain(T.less, T.pred(t) | {t})
    for s, t in itertools.combinations(range(T.n), 2):
        if not T.comparable(s, t) and T.root not in (s, t):
            assert not T.cone(s) & T.cone(t)
    assert T.height == 1 + max(T.depth)


@settings(max_examples=100)
@given(trees(max_n=8))
def test_chain_antichain_and_longest_chain(T):
    for mask in range(1 << T.n):
        nodes = [v for v in range(T.n) if mask >> v & 1]
        assert T.is_chain(nodes) == is_chain(T.less, nodes)
        assert T.is_antichain(nodes) == is_antichain(T.less, nodes)
        if mask % 7 == 0:
            assert T.longest_chain_in(mask) == max((T.depth[v] + 1 - len(T.pred(v) - set(nodes)) for v in nodes), default=0)
