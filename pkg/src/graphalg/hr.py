"""Sourced hypergraphs and the hyperedge-replacement monad.

A sourced hypergraph has a finite vertex set, labelled directed hyperedges
with non-repeating incidence lists, and an injective ordered list of source
vertices.  All values are immutable; public equality and hashing are at the
level of isomorphism classes, via a canonical form computed by colour
refinement with backtracking over refined orbits.

Vertex and edge ids are opaque integers local to one graph.  Labels are
arbitrary values: symbol names (strings, arities from an alphabet), other
sourced hypergraphs (for nested graphs fed to ``flatten``), or any object
exposing ``label_arity``/``label_sort_key`` semantics via `label_key`.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Iterable, Iterator, NamedTuple, Optional, Sequence

from .errors import ArityMismatch, NotInjective, RangeError, UnknownSymbol
from .ranked import RankedAlphabet, RankedMap


class Hyperedge(NamedTuple):
    id: int
    label: Any
    pins: tuple[int, ...]


def label_key(label: Any) -> str:
    """Deterministic string key identifying a label up to the right equality.

    Nested graphs are keyed by their canonical digest, so two nested labels
    get equal keys exactly when they are isomorphic.
    """
    if isinstance(label, str):
        return "s:" + label
    if isinstance(label, SourcedHypergraph):
        return "g:" + label.digest()
    if isinstance(label, bool):
        return "b:" + str(label)
    if isinstance(label, int):
        return "i:" + str(label)
    if isinstance(label, tuple):
        return "t:(" + ",".join(label_key(x) for x in label) + ")"
    if isinstance(label, frozenset):
        return "f:{" + ",".join(sorted(label_key(x) for x in label)) + "}"
    custom = getattr(label, "label_key", None)
    if custom is not None:
        return custom()
    raise TypeError(f"cannot key label {label!r}")


def label_arity(label: Any, alphabet: Optional[RankedAlphabet]) -> Optional[int]:
    """Arity of a label when it is known; None for opaque labels."""
    if isinstance(label, str):
        if alphabet is None:
            return None
        return alphabet.arity(label)
    if isinstance(label, SourcedHypergraph):
        return label.arity
    custom = getattr(label, "arity", None)
    if isinstance(custom, int):
        return custom
    return None


@dataclass(frozen=True)
class CanonicalForm:
    """Digest plus the vertex/edge order that realises it."""

    digest: str
    vertex_order: tuple[int, ...]
    edge_order: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SourcedHypergraph:
    vertices: frozenset[int]
    edges: tuple[Hyperedge, ...]
    sources: tuple[int, ...]
    alphabet: Optional[RankedAlphabet] = None

    def __post_init__(self):
        seen_sources = set(self.sources)
        if len(seen_sources) != len(self.sources):
            raise NotInjective(f"sources {self.sources} repeat a vertex")
        if not seen_sources <= self.vertices:
            raise RangeError("source not among vertices")
        ids = set()
        for e in self.edges:
            if e.id in ids:
                raise RangeError(f"duplicate edge id {e.id}")
            ids.add(e.id)
            if len(set(e.pins)) != len(e.pins):
                raise RangeError(f"edge {e.id} has a repeating incidence list")
            if not set(e.pins) <= self.vertices:
                raise RangeError(f"edge {e.id} incident to a missing vertex")
            k = label_arity(e.label, self.alphabet)
            if k is not None and k != len(e.pins):
                raise ArityMismatch(
                    f"edge {e.id}: label arity {k} != incidence length {len(e.pins)}")

    @classmethod
    def make(cls, vertices: Iterable[int], edges: Iterable[tuple[int, Any, Sequence[int]]],
             sources: Sequence[int], alphabet: Optional[RankedAlphabet] = None) -> "SourcedHypergraph":
        es = tuple(sorted((Hyperedge(i, lab, tuple(pins)) for i, lab, pins in edges),
                          key=lambda e: e.id))
        return cls(frozenset(vertices), es, tuple(sources), alphabet)

    @property
    def arity(self) -> int:
        return len(self.sources)

    def n_vertices(self) -> int:
        return len(self.vertices)

    def n_edges(self) -> int:
        return len(self.edges)

    def labels(self) -> list[Any]:
        return [e.label for e in self.edges]

    def digest(self) -> str:
        return self.canonical_form.digest

    def __eq__(self, other) -> bool:
        if not isinstance(other, SourcedHypergraph):
            return NotImplemented
        return self.digest() == other.digest()

    def __hash__(self) -> int:
        return hash(self.digest())

    def __repr__(self) -> str:
        return (f"SourcedHypergraph(|V|={len(self.vertices)}, |E|={len(self.edges)}, "
                f"arity={self.arity})")

    # -- canonical form ----------------------------------------------------

    @cached_property
    def canonical_form(self) -> CanonicalForm:
        return _canonicalize(self)


# ---------------------------------------------------------------------------
# Canonical labelling: colour refinement + backtracking over refined orbits.
# Sources are individually pinned from the start, so they never take part in
# the branching.  Isolated non-source vertices are interchangeable and enter
# the certificate only through their count.
# ---------------------------------------------------------------------------


def _canonicalize(g: SourcedHypergraph) -> CanonicalForm:
    src_index = {v: i for i, v in enumerate(g.sources)}
    incident: dict[int, list[tuple[int, int]]] = {v: [] for v in g.vertices}
    for ei, e in enumerate(g.edges):
        for pos, v in enumerate(e.pins):
            incident[v].append((ei, pos))

    active = sorted(v for v in g.vertices if incident[v] or v in src_index)
    isolated = sorted(v for v in g.vertices if not incident[v] and v not in src_index)
    edge_labels = [label_key(e.label) for e in g.edges]

    best: list[Optional[tuple]] = [None]
    best_order: list[Optional[tuple[int, ...]]] = [None]

    init = {v: ("src", src_index[v]) if v in src_index else ("v",) for v in active}

    def refine(colour: dict[int, tuple]) -> dict[int, int]:
        # Returns a stable integer colouring of the active vertices.
        cur = _rank_colours(colour)
        while True:
            ecol = {}
            for ei, e in enumerate(g.edges):
                ecol[ei] = (edge_labels[ei], tuple(cur[v] for v in e.pins))
            sig = {}
            for v in active:
                sig[v] = (cur[v], tuple(sorted((ecol[ei], pos) for ei, pos in incident[v])))
            nxt = _rank_colours(sig)
            if nxt == cur:
                return cur
            cur = nxt

    def certificate(order: dict[int, int]) -> tuple:
        edges = sorted((edge_labels[ei], tuple(order[v] for v in e.pins))
                       for ei, e in enumerate(g.edges))
        return (len(active), len(isolated), tuple(order[v] for v in g.sources), tuple(edges))

    def search(colour: dict[int, tuple]):
        cur = refine(colour)
        classes: dict[int, list[int]] = {}
        for v in active:
            classes.setdefault(cur[v], []).append(v)
        target = None
        for c in sorted(classes):
            if len(classes[c]) > 1:
                target = classes[c]
                break
        if target is None:
            order = {v: cur[v] for v in active}
            cert = certificate(order)
            if best[0] is None or cert < best[0]:
                best[0] = cert
                best_order[0] = tuple(sorted(active, key=lambda v: order[v]))
            return
        pinned = max(cur.values(), default=-1) + 1
        for v in sorted(target):
            branched = {w: (cur[w],) for w in active}
            branched[v] = (pinned,)
            search(branched)

    if active:
        search(init)
        cert = best[0]
        ordered_active = list(best_order[0])
    else:
        cert = (0, len(isolated), (), ())
        ordered_active = []

    payload = repr(cert).encode()
    digest = hashlib.sha256(payload).hexdigest()
    vertex_order = tuple(ordered_active + isolated)
    edge_rank = sorted(range(len(g.edges)),
                       key=lambda ei: (edge_labels[ei],
                                       tuple(vertex_order.index(v) for v in g.edges[ei].pins)))
    return CanonicalForm(digest, vertex_order, tuple(g.edges[ei].id for ei in edge_rank))


def _rank_colours(colour: dict[int, Any]) -> dict[int, int]:
    ranks = {c: i for i, c in enumerate(sorted(set(colour.values())))}
    return {v: ranks[c] for v, c in colour.items()}


def canonicalize(g: SourcedHypergraph) -> CanonicalForm:
    """Canonical form; equal digests iff `is_isomorphic`."""
    return g.canonical_form


def is_isomorphic(g: SourcedHypergraph, h: SourcedHypergraph) -> bool:
    if g.arity != h.arity or len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return False
    return g.digest() == h.digest()


# ---------------------------------------------------------------------------
# Monad structure
# ---------------------------------------------------------------------------


def unit(alphabet: RankedAlphabet, name: str) -> SourcedHypergraph:
    """The one-hyperedge graph of a symbol: vertices 1..n, sources 1..n."""
    if name not in alphabet:
        raise UnknownSymbol(f"symbol {name!r} not in alphabet")
    return unit_label(name, alphabet.arity(name), alphabet)


def unit_label(label: Any, arity: int, alphabet: Optional[RankedAlphabet] = None) -> SourcedHypergraph:
    """Unit of an arbitrary label of known arity (element of H(A) for any A)."""
    vs = range(1, arity + 1)
    return SourcedHypergraph.make(vs, [(0, label, tuple(vs))], tuple(vs), alphabet)


def map_labels(g: SourcedHypergraph, fn: Callable[[Any], Any],
               alphabet: Optional[RankedAlphabet] = None) -> SourcedHypergraph:
    """Functor action on an arbitrary label function (arities must be preserved)."""
    edges = [(e.id, fn(e.label), e.pins) for e in g.edges]
    return SourcedHypergraph.make(g.vertices, edges, g.sources, alphabet)


def relabel(g: SourcedHypergraph, m: RankedMap) -> SourcedHypergraph:
    """Apply an arity-preserving symbol map to every edge label."""
    table = m.as_dict()

    def fn(label):
        if label not in table:
            raise UnknownSymbol(f"label {label!r} not in map domain")
        return table[label]

    return map_labels(g, fn, m.codomain)


def flatten(g: SourcedHypergraph) -> SourcedHypergraph:
    """Monad multiplication: substitute each hyperedge's label graph in place.

    Hyperedges of the result are pairs (e, f); vertices are the outer vertices
    plus pairs (e, v) for non-source vertices v of the label of e.  The pin
    list of (e, f) is f's pin list pushed through the parent function: the
    i-th source of the label becomes e's i-th pin, everything else stays
    inside its copy.
    """
    labels: dict[int, SourcedHypergraph] = {}
    for e in g.edges:
        lab = e.label
        if not isinstance(lab, SourcedHypergraph):
            raise ArityMismatch(f"edge {e.id} label is not a sourced hypergraph")
        if lab.arity != len(e.pins):
            raise ArityMismatch(
                f"edge {e.id}: label arity {lab.arity} != incidence length {len(e.pins)}")
        labels[e.id] = lab

    new_vertices: list[tuple] = [("v", v) for v in sorted(g.vertices)]
    for e in g.edges:
        inner = labels[e.id]
        inner_sources = set(inner.sources)
        for v in sorted(inner.vertices):
            if v not in inner_sources:
                new_vertices.append(("w", e.id, v))
    vmap = {key: i + 1 for i, key in enumerate(new_vertices)}

    def parent(e: Hyperedge, v: int) -> int:
        inner = labels[e.id]
        try:
            i = inner.sources.index(v)
        except ValueError:
            return vmap[("w", e.id, v)]
        return vmap[("v", e.pins[i])]

    new_edges = []
    next_id = 0
    for e in g.edges:
        inner = labels[e.id]
        for f in inner.edges:
            new_edges.append((next_id, f.label, tuple(parent(e, v) for v in f.pins)))
            next_id += 1

    inner_alphabet = None
    for e in g.edges:
        if labels[e.id].alphabet is not None:
            inner_alphabet = labels[e.id].alphabet
            break
    return SourcedHypergraph.make(
        vmap.values(), new_edges, tuple(vmap[("v", s)] for s in g.sources), inner_alphabet)


# ---------------------------------------------------------------------------
# HR operations
# ---------------------------------------------------------------------------


def parallel_compose(g: SourcedHypergraph, h: SourcedHypergraph) -> SourcedHypergraph:
    """Disjoint union fusing source i of g with source i of h."""
    if g.arity != h.arity:
        raise ArityMismatch(f"arities differ: {g.arity} vs {h.arity}")
    voff = max(g.vertices, default=0) + 1
    vmap = {}
    for i, s in enumerate(h.sources):
        vmap[s] = g.sources[i]
    for v in sorted(h.vertices):
        if v not in vmap:
            vmap[v] = voff
            voff += 1
    eoff = max((e.id for e in g.edges), default=-1) + 1
    edges = [(e.id, e.label, e.pins) for e in g.edges]
    edges += [(eoff + i, e.label, tuple(vmap[v] for v in e.pins))
              for i, e in enumerate(h.edges)]
    vertices = set(g.vertices) | set(vmap.values())
    return SourcedHypergraph.make(vertices, edges, g.sources, g.alphabet or h.alphabet)


def empty_graph(arity: int = 0, alphabet: Optional[RankedAlphabet] = None) -> SourcedHypergraph:
    """The sources-only graph: arity-many isolated vertices, all sources."""
    vs = range(1, arity + 1)
    return SourcedHypergraph.make(vs, [], tuple(vs), alphabet)


def add_isolated_source(g: SourcedHypergraph) -> SourcedHypergraph:
    fresh = max(g.vertices, default=0) + 1
    return SourcedHypergraph.make(set(g.vertices) | {fresh},
                                  [(e.id, e.label, e.pins) for e in g.edges],
                                  g.sources + (fresh,), g.alphabet)


def forget_sources(g: SourcedHypergraph, f: Sequence[int]) -> SourcedHypergraph:
    """Precompose the source function with the injective f: {1..k} -> {1..n}.

    ``f`` is given as the sequence (f(1), ..., f(k)) of 1-based positions.
    """
    n = g.arity
    if len(set(f)) != len(f):
        raise NotInjective(f"map {tuple(f)} is not injective")
    for i in f:
        if not 1 <= i <= n:
            raise RangeError(f"source position {i} outside 1..{n}")
    return SourcedHypergraph.make(g.vertices,
                                  [(e.id, e.label, e.pins) for e in g.edges],
                                  tuple(g.sources[i - 1] for i in f), g.alphabet)


def enumerate_hypergraphs(alphabet: RankedAlphabet, arity: int,
                          max_vertices: int, max_edges: int) -> Iterator[SourcedHypergraph]:
    """All isomorphism classes within the bounds, one representative each.

    Deterministic order: by vertex count, then edge count, then the generation
    order induced by the alphabet's symbol order.
    """
    if arity < 0 or max_vertices < 0 or max_edges < 0:
        raise RangeError("bounds must be non-negative")
    seen: set[str] = set()
    for nv in range(arity, max_vertices + 1):
        verts = tuple(range(1, nv + 1))
        sources = tuple(range(1, arity + 1))
        shapes: list[tuple[str, tuple[int, ...]]] = []
        for name, k in alphabet.symbols:
            for pins in itertools.permutations(verts, k):
                shapes.append((name, pins))
        for ne in range(0, max_edges + 1):
            for combo in itertools.combinations_with_replacement(range(len(shapes)), ne):
                edges = [(i, shapes[si][0], shapes[si][1]) for i, si in enumerate(combo)]
                g = SourcedHypergraph.make(verts, edges, sources, alphabet)
                d = g.digest()
                if d not in seen:
                    seen.add(d)
                    yield g
