import pytest

from graphalg.errors import InvalidDerivation, RangeError
from graphalg.formats import parse_grammar
from graphalg.grammar import (DerivationTree, derivation_size,
                              enumerate_language, validate_grammar, yield_of)
from graphalg.hr import SourcedHypergraph, is_isomorphic
from graphalg.poly import FreeHrAlgebra
from graphalg.ranked import make_alphabet

from oracles import is_balanced_binary_tree, is_tree_toward_source

EDGE = make_alphabet([("edge", 2)])


def load(name):
    with open(f"data/{name}") as fh:
        return parse_grammar(fh.read())


@pytest.fixture(scope="module")
def exp_grammar():
    return load("exp.grammar")


@pytest.fixture(scope="module")
def cycle_grammar():
    return load("cycles.grammar")


@pytest.fixture(scope="module")
def balanced_grammar():
    return load("balanced.grammar")


@pytest.fixture(scope="module")
def trees_grammar():
    return load("trees.grammar")


def test_exponentiating_grammar_is_valid(exp_grammar):
    assert validate_grammar(exp_grammar).ok


def test_rule_arity_mismatch_is_reported(exp_grammar):
    from graphalg.grammar import Grammar, Rule
    bad_rule = Rule("x", exp_grammar.rules[0].rhs)
    nts = make_alphabet([("x", 1)])
    bad = Grammar(exp_grammar.terminals, nts, "x", (bad_rule,))
    report = validate_grammar(bad)
    assert not report.ok and "arity" in report.errors[0]


def test_missing_start_rule_warns(exp_grammar):
    from graphalg.grammar import Grammar
    empty = Grammar(exp_grammar.terminals, exp_grammar.nonterminals, "x", ())
    report = validate_grammar(empty)
    assert report.ok
    assert any("empty" in w for w in report.warnings)


def test_depth_one_yield(exp_grammar):
    d = DerivationTree(0)
    out = yield_of(d, exp_grammar, FreeHrAlgebra(EDGE))
    assert out.n_edges() == 1 and out.arity == 2


def test_depth_three_doubling_derivation(exp_grammar):
    # x -> xx applied twice over x -> a: a word of length 4.
    leaf = DerivationTree(0)
    d2 = DerivationTree(1, {"x": leaf})
    d3 = DerivationTree(1, {"x": d2})
    out = yield_of(d3, exp_grammar, FreeHrAlgebra(EDGE))
    assert out.n_edges() == 4
    assert derivation_size(d3, exp_grammar) == 7


def test_derivation_with_wrong_child_rejected(exp_grammar):
    with pytest.raises(InvalidDerivation):
        yield_of(DerivationTree(1, {}), exp_grammar, FreeHrAlgebra(EDGE))


def test_balanced_tree_depth_two(balanced_grammar):
    d = DerivationTree(1, {"y": DerivationTree(0)})
    out = yield_of(d, balanced_grammar, FreeHrAlgebra(EDGE))
    expected = SourcedHypergraph.make(
        {1, 2, 3}, [(0, "edge", (2, 1)), (1, "edge", (3, 1))], (1,), EDGE)
    assert is_isomorphic(out, expected)


def test_exponentiating_language_bound_15(exp_grammar):
    lang = enumerate_language(exp_grammar, FreeHrAlgebra(EDGE), 15)
    assert sorted(g.n_edges() for g in lang) == [1, 2, 4, 8]


def test_no_odd_lengths_appear(exp_grammar):
    # Repeated variables receive the same value, unlike context-free rules:
    # lengths stay powers of two (no length 3 at any bound).
    lang = enumerate_language(exp_grammar, FreeHrAlgebra(EDGE), 24)
    lengths = sorted(g.n_edges() for g in lang)
    assert all(length & (length - 1) == 0 for length in lengths)
    assert 3 not in lengths


def test_cycle_language(cycle_grammar):
    lang = enumerate_language(cycle_grammar, FreeHrAlgebra(EDGE), 6)
    assert len(lang) == 5
    for g in lang:
        n = g.n_vertices()
        cycle = SourcedHypergraph.make(
            range(1, n + 1),
            [(i, "edge", (i + 1, (i + 1) % n + 1)) for i in range(n)], (), EDGE)
        assert any(is_isomorphic(g, c) for c in [cycle])
    assert sorted(g.n_vertices() for g in lang) == [2, 3, 4, 5, 6]


def test_trees_grammar_yields_trees(trees_grammar):
    lang = enumerate_language(trees_grammar, FreeHrAlgebra(EDGE), 8)
    assert lang
    for g in lang:
        assert is_tree_toward_source(g)
    # Both 3-vertex rooted trees (path and star) appear.
    shapes = {(g.n_vertices(), g.n_edges()) for g in lang}
    assert (3, 2) in shapes
    three = [g for g in lang if g.n_vertices() == 3]
    assert len(three) == 2


def test_balanced_grammar_yields_balanced(balanced_grammar):
    lang = enumerate_language(balanced_grammar, FreeHrAlgebra(EDGE), 15)
    assert lang
    for g in lang:
        assert is_balanced_binary_tree(g)
    assert sorted(g.n_vertices() for g in lang) == [1, 3, 7, 15]


def test_enumeration_monotone_in_bound(cycle_grammar):
    alg = FreeHrAlgebra(EDGE)
    previous = set()
    for bound in range(1, 7):
        current = {g.digest() for g in enumerate_language(cycle_grammar, alg, bound)}
        assert previous <= current
        previous = current


def test_bound_validation(exp_grammar):
    with pytest.raises(RangeError):
        enumerate_language(exp_grammar, FreeHrAlgebra(EDGE), 0)
