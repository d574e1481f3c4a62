import pytest

from graphalg.algebra import divisibility_algebra
from graphalg.errors import ArityMismatch, MissingVariable
from graphalg.hr import SourcedHypergraph, flatten, is_isomorphic, map_labels, unit
from graphalg.poly import (Const, EquivalencePartition, FreeHrAlgebra,
                           PolynomialTerm, Var, check_congruence,
                           eval_polynomial, is_linear_unary)
from graphalg.ranked import make_alphabet

EDGE = make_alphabet([("edge", 2)])
FREE = FreeHrAlgebra(EDGE)


def term(vs, edges, sources, variables):
    body = SourcedHypergraph.make(vs, [(i, lab, p) for i, (lab, p) in enumerate(edges)], sources)
    return PolynomialTerm(body, variables)


def path(n):
    """The word a^n as an arity-2 path of edge-hyperedges."""
    vs = range(1, n + 2)
    return SourcedHypergraph.make(vs, [(i, "edge", (i + 1, i + 2)) for i in range(n)],
                                  (1, n + 1), EDGE)


def test_unit_shaped_term_is_identity():
    x = make_alphabet([("x", 2)])
    t = term({1, 2}, [(Var("x", 2), (1, 2))], (1, 2), x)
    g = path(3)
    assert eval_polynomial(t, {"x": g}, FREE) == g


def test_variable_free_term_is_constant():
    g = path(2)
    t = term({1, 2}, [(Const(g, 2), (1, 2))], (1, 2), make_alphabet([]))
    out1 = eval_polynomial(t, {}, FREE)
    out2 = eval_polynomial(t, {"x": path(5)}, FREE)
    assert out1 == out2 == g


def test_word_monoid_xax():
    # [[xax]](w) = waw in the word model.
    x = make_alphabet([("x", 2)])
    t = term({1, 2, 3, 4},
             [(Var("x", 2), (1, 2)), (Const(unit(EDGE, "edge"), 2), (2, 3)), (Var("x", 2), (3, 4))],
             (1, 4), x)
    for n in range(1, 4):
        out = eval_polynomial(t, {"x": path(n)}, FREE)
        assert is_isomorphic(out, path(2 * n + 1))


def test_eval_errors():
    x = make_alphabet([("x", 2)])
    t = term({1, 2}, [(Var("x", 2), (1, 2))], (1, 2), x)
    with pytest.raises(MissingVariable):
        eval_polynomial(t, {}, FREE)
    wrong_arity = SourcedHypergraph.make({1}, [], (1,))
    with pytest.raises(ArityMismatch):
        eval_polynomial(t, {"x": wrong_arity}, FREE)


def test_eval_equals_flatten_of_substitution():
    # With unit constants, eval is literally flatten after substitution.
    x = make_alphabet([("x", 1)])
    t = term({1, 2}, [(Var("x", 1), (2,)), (Const(unit(EDGE, "edge"), 2), (2, 1))], (1,), x)
    g = SourcedHypergraph.make({1, 2}, [(0, "edge", (1, 2))], (1,), EDGE)
    direct = eval_polynomial(t, {"x": g}, FREE)
    substituted = map_labels(t.body, lambda lab: lab.value if isinstance(lab, Const) else g)
    assert direct == flatten(substituted)


def test_is_linear_unary():
    x = make_alphabet([("x", 1)])
    one = term({1}, [(Var("x", 1), (1,))], (1,), x)
    assert is_linear_unary(one)
    twice = term({1, 2}, [(Var("x", 1), (1,)), (Var("x", 1), (2,))], (1,), x)
    assert not is_linear_unary(twice)
    point = SourcedHypergraph.make({1}, [], (1,))
    none = term({1}, [(Const(point, 1), (1,))], (1,), make_alphabet([]))
    assert not is_linear_unary(none)


AB_A = make_alphabet([("a", 1)])


def oplus_term(n):
    xs = make_alphabet([("x", n), ("y", n)])
    vs = tuple(range(1, n + 1))
    body = SourcedHypergraph.make(vs, [(0, Var("x", n), vs), (1, Var("y", n), vs)], vs)
    return PolynomialTerm(body, xs)


def test_congruence_trivial_partitions():
    alg, hom, acc = divisibility_algebra("a", 2, AB_A, 1)
    ops = [oplus_term(0), oplus_term(1)]
    one_class = EquivalencePartition.from_blocks(
        {n: [list(alg.universe(n))] for n in range(2)})
    assert check_congruence(one_class, ops, alg).compatible
    singletons = EquivalencePartition.from_blocks(
        {n: [[x] for x in alg.universe(n)] for n in range(2)})
    assert check_congruence(singletons, ops, alg).compatible


def test_congruence_counterexample_for_merged_accepting():
    # Merging residues 0 and 1 at arity 0 only (keeping arity 1 split) is not
    # compatible: composing with an arity-1 context separates them.
    alg, hom, acc = divisibility_algebra("a", 2, AB_A, 1)
    merged = EquivalencePartition.from_blocks(
        {0: [[(0, 0), (0, 1)]], 1: [[(1, 0)], [(1, 1)]]})
    xs = make_alphabet([("x", 0)])
    body = SourcedHypergraph.make({1}, [(0, Var("x", 0), ()), (1, Const((1, 1), 1), (1,))], (1,))
    context = PolynomialTerm(body, xs)
    report = check_congruence(merged, [context], alg)
    assert not report.compatible
    assert report.counterexample is not None


def test_linear_unary_compatibility_implies_general():
    # For sampled term families over the mod-2 algebra, a partition that is
    # compatible with the linear unary contexts is compatible with the
    # repeated-variable ones too, and an incompatible partition is caught
    # already by a linear unary context.
    alg, hom, acc = divisibility_algebra("a", 2, AB_A, 1)
    xs1 = make_alphabet([("x", 1)])
    # One occurrence, one extra a-edge, sources forgotten: arity 1 -> 0.
    linear = [PolynomialTerm(SourcedHypergraph.make({1}, [(0, Var("x", 1), (1,)), (1, Const((1, 1), 1), (1,))], ()), xs1)]
    doubled = [PolynomialTerm(SourcedHypergraph.make({1}, [(0, Var("x", 1), (1,)), (1, Var("x", 1), (1,))], ()), xs1)]
    congruent = EquivalencePartition.from_blocks(
        {0: [[(0, 0)], [(0, 1)]], 1: [[(1, 0)], [(1, 1)]]})
    bad = EquivalencePartition.from_blocks(
        {0: [[(0, 0)], [(0, 1)]], 1: [[(1, 0), (1, 1)]]})
    assert check_congruence(congruent, linear, alg).compatible
    assert check_congruence(congruent, doubled, alg).compatible
    assert not check_congruence(bad, linear, alg).compatible
