import itertools

import pytest
from hypothesis import given, settings, strategies as st

from graphalg.errors import ArityMismatch, NotInjective, RangeError, UnknownSymbol
from graphalg.hr import (
    SourcedHypergraph, add_isolated_source, empty_graph, enumerate_hypergraphs,
    flatten, forget_sources, is_isomorphic, map_labels, parallel_compose,
    relabel, unit, unit_label,
)
from graphalg.ranked import RankedMap, make_alphabet

from oracles import iso_brute

AB = make_alphabet([("edge", 2), ("a", 1), ("z", 0)])


def graph(vertices, edges, sources, alphabet=AB):
    triples = [(i, lab, pins) for i, (lab, pins) in enumerate(edges)]
    return SourcedHypergraph.make(vertices, triples, sources, alphabet)


# -- unit -------------------------------------------------------------------

def test_unit_binary():
    g = unit(AB, "edge")
    assert g.n_vertices() == 2 and g.n_edges() == 1 and g.arity == 2
    (e,) = g.edges
    assert e.pins == g.sources


def test_unit_nullary():
    g = unit(AB, "z")
    assert g.n_vertices() == 0 and g.n_edges() == 1 and g.arity == 0
    assert g.edges[0].pins == ()


def test_unit_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        unit(AB, "nope")


# -- relabel / functor laws ---------------------------------------------------

def test_relabel_unit_naturality():
    b = make_alphabet([("f", 2)])
    m = RankedMap.from_dict(make_alphabet([("edge", 2)]), b, {"edge": "f"})
    assert relabel(unit(AB, "edge"), m) == unit(b, "f")


def test_relabel_identity_law():
    g = graph({1, 2, 3}, [("edge", (1, 2)), ("a", (3,))], (1,))
    assert relabel(g, RankedMap.identity(AB)) == g


def test_relabel_composition_law():
    b = make_alphabet([("u", 2), ("v", 1), ("w", 0)])
    c = make_alphabet([("x", 2), ("y", 1), ("q", 0)])
    f = RankedMap.from_dict(AB, b, {"edge": "u", "a": "v", "z": "w"})
    g_map = RankedMap.from_dict(b, c, {"u": "x", "v": "y", "w": "q"})
    g = graph({1, 2}, [("edge", (1, 2)), ("a", (2,)), ("z", ())], (2,))
    assert relabel(relabel(g, f), g_map) == relabel(g, f.compose(g_map))


def test_relabel_missing_symbol():
    b = make_alphabet([("u", 2)])
    m = RankedMap.from_dict(make_alphabet([("edge", 2)]), b, {"edge": "u"})
    g = graph({1}, [("a", (1,))], ())
    with pytest.raises(UnknownSymbol):
        relabel(g, m)


# -- flatten ------------------------------------------------------------------

def test_flatten_of_units_is_right_unit_law():
    g = graph({1, 2, 3}, [("edge", (1, 2)), ("edge", (2, 3)), ("a", (3,))], (1, 3))
    nested = map_labels(g, lambda name: unit(AB, name))
    assert flatten(nested) == g


def test_flatten_figure_style_instance():
    # Outer graph: one binary hyperedge whose label is a path of two edges
    # through an internal vertex, plus a unary hyperedge labelled by a graph
    # that hangs one extra non-source vertex off its source.
    path = graph({1, 2, 3}, [("edge", (1, 2)), ("edge", (2, 3))], (1, 3))
    hang = graph({1, 2}, [("edge", (1, 2))], (1,))
    outer = SourcedHypergraph.make(
        {10, 11}, [(0, path, (10, 11)), (1, hang, (11,))], (10,))
    got = flatten(outer)
    # By hand: vertices 10, 11, the path midpoint, and the hanging vertex.
    expected = graph({1, 2, 3, 4},
                     [("edge", (1, 3)), ("edge", (3, 2)), ("edge", (2, 4))],
                     (1,))
    assert got == expected
    assert iso_brute(got, expected)


def test_flatten_arity_mismatch():
    # The mismatch is caught as early as construction of the nested graph.
    with pytest.raises(ArityMismatch):
        SourcedHypergraph.make({1}, [(0, empty_graph(2, AB), (1,))], ())
    # Non-graph labels are rejected by flatten itself.
    with pytest.raises(ArityMismatch):
        flatten(unit(AB, "edge"))


def test_flatten_associativity_small():
    # Triple-nested graph flattened both ways; oracle is the explicit
    # bijection ((e,f),g) -> (e,(f,g)) realised by brute-force isomorphism.
    inner1 = graph({1, 2}, [("edge", (1, 2)), ("a", (2,))], (1, 2))
    inner2 = graph({1, 2, 3}, [("edge", (3, 1))], (1, 2))
    mid = SourcedHypergraph.make({1, 2, 3}, [(0, inner1, (1, 2)), (1, inner2, (2, 3))], (1, 3))
    top = SourcedHypergraph.make({5, 6}, [(0, mid, (5, 6))], (6, 5))
    both = flatten(flatten(top))
    other = flatten(map_labels(top, flatten))
    assert both == other
    assert iso_brute(both, other)


# -- canonical form / isomorphism ---------------------------------------------

def rename_copy(g, vshift=100, eshift=50):
    vmap = {v: v + vshift for v in g.vertices}
    return SourcedHypergraph.make(
        [vmap[v] for v in g.vertices],
        [(e.id + eshift, e.label, tuple(vmap[v] for v in e.pins)) for e in g.edges],
        tuple(vmap[v] for v in g.sources), g.alphabet)


def test_digest_invariant_under_renaming():
    g = graph({1, 2, 3}, [("edge", (1, 2)), ("edge", (2, 3)), ("a", (1,))], (3,))
    assert g.digest() == rename_copy(g).digest()


def test_digest_separates_labels():
    b = make_alphabet([("a", 1), ("b", 1)])
    assert unit(b, "a").digest() != unit(b, "b").digest()


def test_digest_separates_equal_degree_sequences():
    # Directed 4-cycle vs two directed 2-cycles: every vertex has in- and
    # out-degree one in both, but they are not isomorphic (oracle: brute force).
    c4 = graph({1, 2, 3, 4}, [("edge", (1, 2)), ("edge", (2, 3)),
                              ("edge", (3, 4)), ("edge", (4, 1))], ())
    c2c2 = graph({1, 2, 3, 4}, [("edge", (1, 2)), ("edge", (2, 1)),
                                ("edge", (3, 4)), ("edge", (4, 3))], ())
    assert not iso_brute(c4, c2c2)
    assert c4.digest() != c2c2.digest()


def test_is_isomorphic_reflexive():
    g = graph({1, 2}, [("edge", (1, 2))], (1,))
    assert is_isomorphic(g, g)


def test_is_isomorphic_arity_sensitive():
    g1 = graph({1, 2}, [("edge", (1, 2))], (1,))
    g2 = graph({1, 2}, [("edge", (1, 2))], (1, 2))
    assert not is_isomorphic(g1, g2)


def test_parallel_edges_are_counted():
    one = graph({1, 2}, [("edge", (1, 2))], ())
    two = graph({1, 2}, [("edge", (1, 2)), ("edge", (1, 2))], ())
    assert not is_isomorphic(one, two)


# -- hr operations --------------------------------------------------------------

def test_parallel_compose_neutral():
    g = graph({1, 2, 3}, [("edge", (1, 2)), ("edge", (2, 3))], (1, 2))
    assert parallel_compose(g, empty_graph(2, AB)) == g


def test_parallel_compose_commutative():
    g = graph({1, 2}, [("edge", (1, 2))], (1,))
    h = graph({1, 2, 3}, [("edge", (2, 1)), ("a", (3,))], (2,))
    assert parallel_compose(g, h) == parallel_compose(h, g)


def test_parallel_compose_double_edge():
    got = parallel_compose(unit(AB, "edge"), unit(AB, "edge"))
    expected = graph({1, 2}, [("edge", (1, 2)), ("edge", (1, 2))], (1, 2))
    assert is_isomorphic(got, expected)


def test_parallel_compose_arity_mismatch():
    with pytest.raises(ArityMismatch):
        parallel_compose(unit(AB, "edge"), unit(AB, "a"))


def test_add_isolated_source_on_empty():
    g = add_isolated_source(empty_graph(0, AB))
    assert g.n_vertices() == 1 and g.arity == 1 and g.n_edges() == 0


def test_add_isolated_source_counts():
    g = graph({1, 2}, [("edge", (1, 2))], (1,))
    g2 = add_isolated_source(g)
    assert g2.n_vertices() == g.n_vertices() + 1
    assert g2.arity == g.arity + 1


def test_iterated_sources_make_independent_set():
    g = empty_graph(0, AB)
    for _ in range(4):
        g = add_isolated_source(g)
    assert g.n_vertices() == 4 and g.arity == 4 and g.n_edges() == 0


def test_forget_sources_identity():
    g = graph({1, 2, 3}, [("edge", (1, 2))], (1, 2, 3))
    assert forget_sources(g, [1, 2, 3]) == g


def test_forget_all_sources():
    g = graph({1, 2}, [("edge", (1, 2))], (1, 2))
    assert forget_sources(g, []).arity == 0


def test_forget_sources_figure_example():
    # f: {1,2} -> {1,2,3,4} with 1 -> 3, 2 -> 1.
    g = graph({1, 2, 3, 4}, [("edge", (1, 2)), ("edge", (3, 4))], (1, 2, 3, 4))
    out = forget_sources(g, [3, 1])
    assert out.sources == (3, 1)


def test_forget_sources_errors():
    g = graph({1, 2}, [], (1, 2))
    with pytest.raises(NotInjective):
        forget_sources(g, [1, 1])
    with pytest.raises(RangeError):
        forget_sources(g, [3])


# -- enumerator -----------------------------------------------------------------

def test_enumerate_zero_vertices():
    a = make_alphabet([("a", 1)])
    got = list(enumerate_hypergraphs(a, 0, 0, 2))
    assert len(got) == 1
    assert got[0] == empty_graph(0, a)


def test_enumerate_unary_five_classes():
    # Oracle (hand enumeration): empty; one vertex; one vertex + unary edge;
    # two vertices; two vertices + one unary edge.
    a = make_alphabet([("a", 1)])
    got = list(enumerate_hypergraphs(a, 0, 2, 1))
    assert len(got) == 5
    sizes = sorted((g.n_vertices(), g.n_edges()) for g in got)
    assert sizes == [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1)]


def test_enumerate_pairwise_noniso():
    a = make_alphabet([("edge", 2)])
    got = list(enumerate_hypergraphs(a, 1, 3, 2))
    digests = [g.digest() for g in got]
    assert len(digests) == len(set(digests))


def test_enumerate_is_deterministic():
    a = make_alphabet([("edge", 2), ("a", 1)])
    run1 = [g.digest() for g in enumerate_hypergraphs(a, 0, 3, 1)]
    run2 = [g.digest() for g in enumerate_hypergraphs(a, 0, 3, 1)]
    assert run1 == run2


def test_digest_equality_matches_brute_isomorphism():
    a = make_alphabet([("edge", 2), ("a", 1)])
    graphs = list(enumerate_hypergraphs(a, 1, 3, 2))
    assert len(graphs) > 20
    for g, h in itertools.combinations(graphs, 2):
        assert (g.digest() == h.digest()) == iso_brute(g, h)
    for g in graphs:
        assert iso_brute(g, rename_copy(g))
        assert g.digest() == rename_copy(g).digest()


# -- property tests -------------------------------------------------------------

@st.composite
def small_graphs(draw, arity=None):
    if arity is None:
        arity = draw(st.integers(0, 2))
    nv = draw(st.integers(arity, 4))
    verts = list(range(1, nv + 1))
    edges = []
    for i in range(draw(st.integers(0, 3))):
        name, k = draw(st.sampled_from(list(AB.symbols)))
        if k > nv:
            continue
        pins = tuple(draw(st.permutations(verts))[:k])
        edges.append((name, pins))
    return graph(set(verts), edges, tuple(verts[:arity]))


@given(small_graphs(arity=1), small_graphs(arity=1))
@settings(max_examples=40, deadline=None)
def test_oplus_commutative_property(g, h):
    assert parallel_compose(g, h) == parallel_compose(h, g)


@given(small_graphs(), st.integers(1, 1000), st.integers(1, 1000))
@settings(max_examples=40, deadline=None)
def test_digest_renaming_property(g, vs, es):
    assert g.digest() == rename_copy(g, vs, es).digest()


@given(small_graphs())
@settings(max_examples=30, deadline=None)
def test_flatten_left_unit_property(g):
    # flatten(unit_{H Sigma}(G)) == G
    assert flatten(unit_label(g, g.arity)) == g


def test_oplus_associative_on_enumerated():
    a = make_alphabet([("edge", 2)])
    pool = list(enumerate_hypergraphs(a, 1, 3, 1))
    for g, h, k in itertools.islice(itertools.product(pool, pool, pool), 200):
        lhs = parallel_compose(parallel_compose(g, h), k)
        rhs = parallel_compose(g, parallel_compose(h, k))
        assert lhs == rhs
