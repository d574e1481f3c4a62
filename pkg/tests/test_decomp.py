import itertools
import random

import pytest

from graphalg.decomp import (UNDEFINED, AlgebraicDecomposition, Leaf, Oplus,
                             TreeDecomposition, UnaryOp, binarise,
                             eval_algebraic_decomposition, exact_treewidth,
                             is_valid_decomposition, width)
from graphalg.errors import TooLarge
from graphalg.hr import (SourcedHypergraph, enumerate_hypergraphs,
                         is_isomorphic, parallel_compose, unit)
from graphalg.laws import random_graph_over
from graphalg.poly import Const, PolynomialTerm, Var, FreeHrAlgebra, eval_polynomial
from graphalg.ranked import make_alphabet

from oracles import primal_adjacency, treewidth_by_elimination

EDGE = make_alphabet([("edge", 2)])
MIXED = make_alphabet([("edge", 2), ("t", 3)])


def graph(vs, edges, sources, alphabet=EDGE):
    return SourcedHypergraph.make(vs, [(i, l, p) for i, (l, p) in enumerate(edges)],
                                  sources, alphabet)


def test_single_bag_is_valid():
    g = graph({1, 2, 3}, [("edge", (1, 2)), ("edge", (2, 3))], ())
    t = TreeDecomposition.make(0, {0: {1, 2, 3}}, {})
    assert is_valid_decomposition(g, t)
    assert width(t) == 2


def test_path_decomposition_is_valid():
    g = graph({1, 2, 3, 4}, [("edge", (1, 2)), ("edge", (2, 3)), ("edge", (3, 4))], ())
    t = TreeDecomposition.make(0, {0: {1, 2}, 1: {2, 3}, 2: {3, 4}}, {0: [1], 1: [2]})
    assert is_valid_decomposition(g, t)
    assert width(t) == 1


def test_disconnected_occurrence_is_invalid():
    g = graph({1, 2, 3}, [("edge", (1, 2)), ("edge", (2, 3))], ())
    t = TreeDecomposition.make(0, {0: {1, 2}, 1: {2}, 2: {2, 3, 1}}, {0: [1], 1: [2]})
    # Vertex 1 occurs in bags 0 and 2 but not 1: disconnected.
    assert not is_valid_decomposition(g, t)


def test_missing_edge_cover_is_invalid():
    g = graph({1, 2}, [("edge", (1, 2))], ())
    t = TreeDecomposition.make(0, {0: {1}, 1: {2}}, {0: [1]})
    assert not is_valid_decomposition(g, t)


def test_sources_in_root_flag():
    g = graph({1, 2, 3}, [("edge", (1, 2))], (1, 3))
    t = TreeDecomposition.make(0, {0: {1, 2}, 1: {3}}, {0: [1]})
    assert is_valid_decomposition(g, t)
    assert not is_valid_decomposition(g, t, sources_in_root=True)
    t2 = TreeDecomposition.make(0, {0: {1, 3}, 1: {1, 2}}, {0: [1]})
    assert is_valid_decomposition(g, t2, sources_in_root=True)


def test_width_of_empty_bag():
    t = TreeDecomposition.make(0, {0: set()}, {})
    assert width(t) == -1


def test_exact_treewidth_examples():
    k4 = graph({1, 2, 3, 4},
               [("edge", p) for p in itertools.combinations(range(1, 5), 2)], ())
    assert exact_treewidth(k4) == 3
    tree = graph({1, 2, 3, 4, 5},
                 [("edge", (2, 1)), ("edge", (3, 1)), ("edge", (4, 2)), ("edge", (5, 2))], ())
    assert exact_treewidth(tree) == 1
    assert exact_treewidth(graph({1, 2, 3}, [], ())) == 0
    assert exact_treewidth(graph(set(), [], ())) == -1


def test_exact_treewidth_respects_limit():
    big = graph(set(range(1, 12)), [], ())
    with pytest.raises(TooLarge):
        exact_treewidth(big)


def test_exact_treewidth_matches_elimination_oracle_enumerated():
    for g in enumerate_hypergraphs(MIXED, 0, 4, 2):
        assert exact_treewidth(g) == treewidth_by_elimination(primal_adjacency(g))


def test_exact_treewidth_matches_oracle_structured_and_random():
    cases = []
    for n in range(2, 8):
        cases.append(graph(set(range(1, n + 1)),
                           [("edge", p) for p in itertools.combinations(range(1, n + 1), 2)], ()))
        cases.append(graph(set(range(1, n + 1)),
                           [("edge", (i, i + 1)) for i in range(1, n)], ()))
        cases.append(graph(set(range(1, n + 1)),
                           [("edge", (i, i + 1)) for i in range(1, n)] + [("edge", (n, 1))], ()))
    rng = random.Random(20240817)
    for _ in range(30):
        cases.append(random_graph_over(rng, EDGE, 0, max_vertices=7, max_edges=9))
    for g in cases:
        assert exact_treewidth(g) == treewidth_by_elimination(primal_adjacency(g))


def test_sourced_treewidth_forces_sources_together():
    g = graph({1, 2, 3, 4}, [("edge", (1, 2)), ("edge", (2, 3)), ("edge", (3, 4))],
              (1, 4))
    assert exact_treewidth(g) == 1
    oracle = treewidth_by_elimination(primal_adjacency(g, extra_cliques=[(1, 4)]))
    assert exact_treewidth(g, sources_in_root=True) == oracle


# -- the width bound for polynomial operations -----------------------------------


def sourced_tw(g):
    return exact_treewidth(g, sources_in_root=True)


def random_term_and_valuation(rng):
    nvars = rng.randint(1, 2)
    var_arities = {f"x{i}": rng.randint(0, 2) for i in range(nvars)}
    variables = make_alphabet(sorted(var_arities.items()))
    labels = [(Var(n, k), k) for n, k in var_arities.items()]
    labels.append((Const(unit(EDGE, "edge"), 2), 2))
    from graphalg.laws import random_graph
    body = random_graph(rng, labels, rng.randint(0, 2), max_vertices=4, max_edges=3)
    used = {e.label.name for e in body.edges if isinstance(e.label, Var)}
    eta = {}
    for name in used:
        eta[name] = random_graph_over(rng, EDGE, var_arities[name],
                                      max_vertices=3, max_edges=2)
    term = PolynomialTerm(body, variables)
    return term, eta


def test_width_bound_for_polynomial_operations():
    rng = random.Random(101)
    checked = 0
    attempts = 0
    while checked < 100:
        attempts += 1
        assert attempts < 2000
        term, eta = random_term_and_valuation(rng)
        if not eta:
            continue
        k = sourced_tw(term.body)
        out = eval_polynomial(term, eta, FreeHrAlgebra(EDGE))
        if out.n_vertices() > 10:
            continue
        bound = k + max(sourced_tw(g) for g in eta.values())
        assert sourced_tw(out) <= bound
        checked += 1


# -- algebraic decompositions -------------------------------------------------------


def test_leaf_evaluates_to_itself():
    g = graph({1, 2}, [("edge", (1, 2))], (1,))
    t = AlgebraicDecomposition(0, {0: Leaf(g)}, {})
    assert eval_algebraic_decomposition(t) == g


def test_oplus_node_is_parallel_composition():
    g = graph({1, 2}, [("edge", (1, 2))], (1, 2))
    h = graph({1, 2}, [("edge", (2, 1))], (1, 2))
    t = AlgebraicDecomposition(0, {0: Oplus(2), 1: Leaf(g), 2: Leaf(h)}, {0: (1, 2)})
    assert eval_algebraic_decomposition(t) == parallel_compose(g, h)


def test_sibling_permutation_irrelevant():
    g = graph({1, 2}, [("edge", (1, 2))], (1, 2))
    h = graph({1, 2, 3}, [("edge", (1, 3)), ("edge", (3, 2))], (1, 2))
    k = graph({1, 2}, [], (1, 2))
    for order in itertools.permutations((1, 2, 3)):
        t = AlgebraicDecomposition(0, {0: Oplus(2), 1: Leaf(g), 2: Leaf(h), 3: Leaf(k)},
                                   {0: order})
        base = AlgebraicDecomposition(0, {0: Oplus(2), 1: Leaf(g), 2: Leaf(h), 3: Leaf(k)},
                                      {0: (1, 2, 3)})
        assert eval_algebraic_decomposition(t) == eval_algebraic_decomposition(base)


def test_unary_node_applies_polynomial():
    unary = PolynomialTerm(
        SourcedHypergraph.make({1, 2}, [(0, Var("x", 1), (2,)),
                                        (1, Const(unit(EDGE, "edge"), 2), (2, 1))], (1,)),
        make_alphabet([("x", 1)]))
    leaf = graph({1}, [], (1,))
    t = AlgebraicDecomposition(0, {0: UnaryOp(unary), 1: Leaf(leaf)}, {0: (1,)})
    out = eval_algebraic_decomposition(t)
    assert out.n_vertices() == 2 and out.n_edges() == 1


def test_undefined_propagates_on_arity_mismatch():
    g1 = graph({1, 2}, [("edge", (1, 2))], (1, 2))
    wrong = graph({1}, [], (1,))
    t = AlgebraicDecomposition(0, {0: Oplus(2), 1: Leaf(g1), 2: Leaf(wrong)}, {0: (1, 2)})
    assert eval_algebraic_decomposition(t) is UNDEFINED
    unary = PolynomialTerm(
        SourcedHypergraph.make({1}, [(0, Var("x", 1), (1,))], (1,)),
        make_alphabet([("x", 1)]))
    t2 = AlgebraicDecomposition(0, {0: UnaryOp(unary), 1: Leaf(g1)}, {0: (1,)})
    assert eval_algebraic_decomposition(t2) is UNDEFINED


# -- binarisation -----------------------------------------------------------------


def test_binarise_single_edge():
    got = binarise(unit(EDGE, "edge"))
    expected = SourcedHypergraph.make(
        {1, 2, 3}, [(0, "c1", (3, 1)), (1, "c2", (3, 2))], (1, 2),
        make_alphabet([("c1", 2), ("c2", 2)]))
    assert got == expected


def test_binarise_no_edges():
    g = graph({1, 2, 3}, [], (2,))
    out = binarise(g)
    assert out.n_vertices() == 3 and out.n_edges() == 0


def test_binarise_vertex_count():
    for g in itertools.islice(enumerate_hypergraphs(MIXED, 1, 3, 2), 50):
        out = binarise(g)
        assert out.n_vertices() == g.n_vertices() + g.n_edges()


def test_binarisation_treewidth_bound():
    # tw(binarise(G)) <= max(tw(G), max hyperedge rank) on enumerated graphs.
    for alphabet, max_v, max_e in ((EDGE, 6, 2), (MIXED, 4, 2)):
        max_rank = alphabet.max_arity()
        for g in enumerate_hypergraphs(alphabet, 0, max_v, max_e):
            lhs = exact_treewidth(binarise(g))
            assert lhs <= max(exact_treewidth(g), max_rank)
