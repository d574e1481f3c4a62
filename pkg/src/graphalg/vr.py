"""The vertex-replacement monad: hypervertices with corners and ports.

A V-hypergraph has a nonempty set of ranked hypervertices, a binary edge
relation on their corners (no edge from a corner to itself), and a total,
not necessarily surjective, port map from corners to {1..arity}.  Values are
immutable and compared up to isomorphism, like sourced hypergraphs.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from .errors import ArityMismatch, RangeError, TooLarge, UnknownSymbol, ZeroArity
from .hr import label_key
from .ranked import RankedAlphabet

Corner = tuple[int, int]  # (hypervertex id, 1-based corner index)


class Hypervertex(NamedTuple):
    id: int
    label: Any
    arity: int


def v_label_key(label: Any) -> str:
    if isinstance(label, VHypergraph):
        return "vg:" + label.digest()
    return label_key(label)


def v_label_arity(label: Any, alphabet: Optional[RankedAlphabet]) -> Optional[int]:
    if isinstance(label, str):
        return alphabet.arity(label) if alphabet is not None else None
    if isinstance(label, VHypergraph):
        return label.arity
    custom = getattr(label, "arity", None)
    return custom if isinstance(custom, int) else None


@dataclass(frozen=True, eq=False)
class VHypergraph:
    hypervertices: tuple[Hypervertex, ...]
    edges: frozenset[tuple[Corner, Corner]]
    ports: Mapping[Corner, int]
    arity: int
    alphabet: Optional[RankedAlphabet] = None

    def __post_init__(self):
        if not self.hypervertices:
            raise RangeError("a V-hypergraph needs at least one hypervertex")
        if self.arity < 1:
            raise ZeroArity("arity must be at least 1")
        ids = set()
        corners = set()
        for hv in self.hypervertices:
            if hv.id in ids:
                raise RangeError(f"duplicate hypervertex id {hv.id}")
            ids.add(hv.id)
            if hv.arity < 1:
                raise ZeroArity(f"hypervertex {hv.id} has arity 0")
            k = v_label_arity(hv.label, self.alphabet)
            if k is not None and k != hv.arity:
                raise ArityMismatch(f"hypervertex {hv.id}: label arity {k} != {hv.arity}")
            corners.update((hv.id, i) for i in range(1, hv.arity + 1))
        if set(self.ports) != corners:
            raise RangeError("port map must be total on the corners")
        for c, p in self.ports.items():
            if not 1 <= p <= self.arity:
                raise RangeError(f"port {p} of corner {c} outside 1..{self.arity}")
        for c, d in self.edges:
            if c not in corners or d not in corners:
                raise RangeError(f"edge {(c, d)} touches a missing corner")
            if c == d:
                raise RangeError(f"edge from corner {c} to itself")

    @classmethod
    def make(cls, hypervertices: Iterable[tuple[int, Any, int]],
             edges: Iterable[tuple[Corner, Corner]], ports: Mapping[Corner, int],
             arity: int, alphabet: Optional[RankedAlphabet] = None) -> "VHypergraph":
        hvs = tuple(sorted((Hypervertex(i, lab, k) for i, lab, k in hypervertices),
                           key=lambda h: h.id))
        return cls(hvs, frozenset((tuple(c), tuple(d)) for c, d in edges),
                   dict(ports), arity, alphabet)

    def corners(self) -> list[Corner]:
        return [(hv.id, i) for hv in self.hypervertices for i in range(1, hv.arity + 1)]

    def n_hypervertices(self) -> int:
        return len(self.hypervertices)

    def hypervertex(self, vid: int) -> Hypervertex:
        for hv in self.hypervertices:
            if hv.id == vid:
                return hv
        raise RangeError(f"no hypervertex {vid}")

    def digest(self) -> str:
        return self.canonical_digest

    def __eq__(self, other):
        if not isinstance(other, VHypergraph):
            return NotImplemented
        return self.digest() == other.digest()

    def __hash__(self):
        return hash(self.digest())

    def __repr__(self):
        return (f"VHypergraph(|V|={len(self.hypervertices)}, |E|={len(self.edges)}, "
                f"arity={self.arity})")

    @cached_property
    def canonical_digest(self) -> str:
        return _v_canonical_digest(self)


def _v_canonical_digest(g: VHypergraph) -> str:
    """Refinement + backtracking canonical form; hypervertices are coloured by
    (label, arity, port vector, internal edge pattern) and refined by their
    corner-level adjacencies.  Hypervertices with no edges to other
    hypervertices are interchangeable within one colour and enter the
    certificate only as counts."""
    labels = {hv.id: v_label_key(hv.label) for hv in g.hypervertices}
    out_adj: dict[int, list[tuple[int, int, int]]] = {hv.id: [] for hv in g.hypervertices}
    in_adj: dict[int, list[tuple[int, int, int]]] = {hv.id: [] for hv in g.hypervertices}
    selfpairs: dict[int, list[tuple[int, int]]] = {hv.id: [] for hv in g.hypervertices}
    for (v, i), (w, j) in g.edges:
        if v == w:
            selfpairs[v].append((i, j))
        else:
            out_adj[v].append((i, j, w))
            in_adj[w].append((j, i, v))

    def init_colour(hv: Hypervertex) -> tuple:
        return (labels[hv.id], hv.arity,
                tuple(g.ports[(hv.id, i)] for i in range(1, hv.arity + 1)),
                tuple(sorted(selfpairs[hv.id])))

    hvs = [hv for hv in g.hypervertices if out_adj[hv.id] or in_adj[hv.id]]
    isolated: dict[tuple, int] = {}
    for hv in g.hypervertices:
        if not out_adj[hv.id] and not in_adj[hv.id]:
            key = init_colour(hv)
            isolated[key] = isolated.get(key, 0) + 1
    iso_part = tuple(sorted(isolated.items()))

    init = {hv.id: init_colour(hv) for hv in hvs}

    def refine(colour: dict[int, Any]) -> dict[int, int]:
        cur = _rank(colour)
        while True:
            sig = {}
            for hv in hvs:
                outs = tuple(sorted((i, j, cur[w]) for i, j, w in out_adj[hv.id]))
                ins = tuple(sorted((j, i, cur[w]) for j, i, w in in_adj[hv.id]))
                sig[hv.id] = (cur[hv.id], outs, ins)
            nxt = _rank(sig)
            if nxt == cur:
                return cur
            cur = nxt

    best: list[Optional[tuple]] = [None]

    def certificate(order: dict[int, int]) -> tuple:
        verts = tuple(sorted((order[hv.id], labels[hv.id], hv.arity) for hv in hvs))
        ports = tuple(sorted((order[hv.id], i, g.ports[(hv.id, i)])
                             for hv in hvs for i in range(1, hv.arity + 1)))
        edges = tuple(sorted(((order[v], i), (order[w], j))
                             for (v, i), (w, j) in g.edges
                             if v in order and w in order))
        return (g.arity, verts, ports, edges)

    def search(colour):
        cur = refine(colour)
        classes: dict[int, list[int]] = {}
        for hv in hvs:
            classes.setdefault(cur[hv.id], []).append(hv.id)
        target = None
        for c in sorted(classes):
            if len(classes[c]) > 1:
                target = classes[c]
                break
        if target is None:
            cert = certificate(cur)
            if best[0] is None or cert < best[0]:
                best[0] = cert
            return
        pinned = max(cur.values()) + 1
        for v in sorted(target):
            branched = {w: (cur[w],) for w in cur}
            branched[v] = (pinned,)
            search(branched)

    if hvs:
        search(init)
        cert = best[0]
    else:
        cert = (g.arity, (), (), ())
    return hashlib.sha256(repr((cert, iso_part)).encode()).hexdigest()


def _rank(colour: dict[int, Any]) -> dict[int, int]:
    ranks = {c: i for i, c in enumerate(sorted(set(colour.values())))}
    return {v: ranks[c] for v, c in colour.items()}


def v_isomorphic(g: VHypergraph, h: VHypergraph) -> bool:
    return g.digest() == h.digest()


# ---------------------------------------------------------------------------
# Monad structure
# ---------------------------------------------------------------------------


def v_unit(alphabet: RankedAlphabet, name: str) -> VHypergraph:
    if name not in alphabet:
        raise UnknownSymbol(f"symbol {name!r} not in alphabet")
    return v_unit_label(name, alphabet.arity(name), alphabet)


def v_unit_label(label: Any, arity: int, alphabet: Optional[RankedAlphabet] = None) -> VHypergraph:
    """One hypervertex, no edges, port map corner i -> i."""
    if arity < 1:
        raise ZeroArity("unit needs arity >= 1")
    ports = {(0, i): i for i in range(1, arity + 1)}
    return VHypergraph.make([(0, label, arity)], [], ports, arity, alphabet)


def v_map_labels(g: VHypergraph, fn: Callable[[Any], Any],
                 alphabet: Optional[RankedAlphabet] = None) -> VHypergraph:
    return VHypergraph.make([(hv.id, fn(hv.label), hv.arity) for hv in g.hypervertices],
                            g.edges, g.ports, g.arity, alphabet)


def v_relabel(g: VHypergraph, m) -> VHypergraph:
    table = m.as_dict()

    def fn(label):
        if label not in table:
            raise UnknownSymbol(f"label {label!r} not in map domain")
        return table[label]

    return v_map_labels(g, fn, m.codomain)


def v_flatten(g: VHypergraph) -> VHypergraph:
    """Substitute each hypervertex's label graph in place.

    The new hypervertices are pairs (v, w); corner (v,w)[i] gets the port of
    v[j] in the outer graph, where j is the port of w[i] inside the label of
    v.  Edges come either from inside one label or from an outer edge between
    the port classes.
    """
    inner: dict[int, VHypergraph] = {}
    for hv in g.hypervertices:
        lab = hv.label
        if not isinstance(lab, VHypergraph):
            raise ArityMismatch(f"hypervertex {hv.id} label is not a V-hypergraph")
        if lab.arity != hv.arity:
            raise ArityMismatch(
                f"hypervertex {hv.id}: label arity {lab.arity} != {hv.arity}")
        inner[hv.id] = lab

    pairs = [(hv.id, w.id) for hv in g.hypervertices for w in inner[hv.id].hypervertices]
    idmap = {pair: i for i, pair in enumerate(pairs)}

    hvs = []
    ports = {}
    for hv in g.hypervertices:
        for w in inner[hv.id].hypervertices:
            nid = idmap[(hv.id, w.id)]
            hvs.append((nid, w.label, w.arity))
            for i in range(1, w.arity + 1):
                j = inner[hv.id].ports[(w.id, i)]
                ports[(nid, i)] = g.ports[(hv.id, j)]

    edges = set()
    for hv in g.hypervertices:
        for (w, i), (w2, i2) in inner[hv.id].edges:
            edges.add(((idmap[(hv.id, w)], i), (idmap[(hv.id, w2)], i2)))
    # Outer edges connect whole port classes of the substituted labels.
    port_corners: dict[tuple[int, int], list[Corner]] = {}
    for hv in g.hypervertices:
        lab = inner[hv.id]
        for w in lab.hypervertices:
            for i in range(1, w.arity + 1):
                j = lab.ports[(w.id, i)]
                port_corners.setdefault((hv.id, j), []).append((idmap[(hv.id, w.id)], i))
    for (v, j), (v2, j2) in g.edges:
        for c in port_corners.get((v, j), ()):
            for d in port_corners.get((v2, j2), ()):
                if c != d:
                    edges.add((c, d))

    alphabet = None
    for hv in g.hypervertices:
        if inner[hv.id].alphabet is not None:
            alphabet = inner[hv.id].alphabet
            break
    return VHypergraph.make(hvs, edges, ports, g.arity, alphabet)


# ---------------------------------------------------------------------------
# VR operations
# ---------------------------------------------------------------------------


def v_disjoint_union(g: VHypergraph, h: VHypergraph) -> VHypergraph:
    """Disjoint union; the arity is the maximum of the input arities."""
    off = max(hv.id for hv in g.hypervertices) + 1
    hvs = [(hv.id, hv.label, hv.arity) for hv in g.hypervertices]
    hvs += [(hv.id + off, hv.label, hv.arity) for hv in h.hypervertices]
    edges = set(g.edges)
    edges |= {(((v + off), i), ((w + off), j)) for (v, i), (w, j) in h.edges}
    ports = dict(g.ports)
    ports.update({(v + off, i): p for (v, i), p in h.ports.items()})
    return VHypergraph.make(hvs, edges, ports, max(g.arity, h.arity),
                            g.alphabet or h.alphabet)


def v_relabel_ports(g: VHypergraph, f: Sequence[int], m: Optional[int] = None) -> VHypergraph:
    """Update ports along the total map f: {1..n} -> {1..m}, given as the
    sequence (f(1), ..., f(n))."""
    if len(f) != g.arity:
        raise RangeError(f"map must be total on 1..{g.arity}")
    m = m if m is not None else max(f)
    for t in f:
        if not 1 <= t <= m:
            raise RangeError(f"target {t} outside 1..{m}")
    ports = {c: f[p - 1] for c, p in g.ports.items()}
    return VHypergraph.make([(hv.id, hv.label, hv.arity) for hv in g.hypervertices],
                            g.edges, ports, m, g.alphabet)


def v_add_edges(g: VHypergraph, pairs: Iterable[tuple[int, int]],
                allow_same_port: bool = True) -> VHypergraph:
    """Add an edge from every i-port corner to every j-port corner, for each
    (i, j) in the set.  Pairs with i = j connect distinct corners sharing the
    port and never create an edge from a corner to itself; pass
    ``allow_same_port=False`` to reject such pairs instead."""
    edges = set(g.edges)
    by_port: dict[int, list[Corner]] = {}
    for c, p in g.ports.items():
        by_port.setdefault(p, []).append(c)
    for i, j in pairs:
        if not (1 <= i <= g.arity and 1 <= j <= g.arity):
            raise RangeError(f"pair {(i, j)} outside 1..{g.arity}")
        if i == j and not allow_same_port:
            raise RangeError(f"pair {(i, j)} connects a port to itself")
        for c in by_port.get(i, ()):
            for d in by_port.get(j, ()):
                if c != d:
                    edges.add((c, d))
    return VHypergraph.make([(hv.id, hv.label, hv.arity) for hv in g.hypervertices],
                            edges, g.ports, g.arity, g.alphabet)


# ---------------------------------------------------------------------------
# VR terms and cliquewidth
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VrConst:
    symbol: str


@dataclass(frozen=True)
class VrUnion:
    left: "VrTerm"
    right: "VrTerm"


@dataclass(frozen=True)
class VrRelabel:
    child: "VrTerm"
    f: tuple[int, ...]
    m: int


@dataclass(frozen=True)
class VrAddEdges:
    child: "VrTerm"
    pairs: frozenset


VrTerm = Union[VrConst, VrUnion, VrRelabel, VrAddEdges]


def eval_vr_term(t: VrTerm, alphabet: RankedAlphabet) -> VHypergraph:
    if isinstance(t, VrConst):
        return v_unit(alphabet, t.symbol)
    if isinstance(t, VrUnion):
        return v_disjoint_union(eval_vr_term(t.left, alphabet), eval_vr_term(t.right, alphabet))
    if isinstance(t, VrRelabel):
        return v_relabel_ports(eval_vr_term(t.child, alphabet), t.f, t.m)
    if isinstance(t, VrAddEdges):
        return v_add_edges(eval_vr_term(t.child, alphabet), sorted(t.pairs))
    raise TypeError(f"not a VR term: {t!r}")


def term_max_arity(t: VrTerm, alphabet: RankedAlphabet) -> int:
    if isinstance(t, VrConst):
        return alphabet.arity(t.symbol)
    if isinstance(t, VrUnion):
        return max(term_max_arity(t.left, alphabet), term_max_arity(t.right, alphabet))
    if isinstance(t, VrRelabel):
        return max(term_max_arity(t.child, alphabet), t.m)
    if isinstance(t, VrAddEdges):
        return term_max_arity(t.child, alphabet)
    raise TypeError(f"not a VR term: {t!r}")


CLIQUEWIDTH_STATE_CAP = 60000


def cliquewidth_upper(g: VHypergraph, n: int) -> bool:
    """Can g be produced by VR operations using arities at most n?

    Exhaustive reachability over values: starting from the units of the
    labels appearing in g, close under relabelling, single-pair edge
    additions, and unions whose label multiset stays inside g's.  Values are
    deduplicated by canonical form.  Enforced for at most 6 hypervertices.
    """
    if g.n_hypervertices() > 6:
        raise TooLarge("cliquewidth search is enforced for <= 6 hypervertices")
    if n < 1:
        raise RangeError("arity bound must be >= 1")
    if g.arity > n:
        return False
    target_labels = _label_multiset(g)
    if any(k > n for (_, k) in target_labels):
        return False
    target = g.digest()

    seeds = []
    seen_seed = set()
    for hv in g.hypervertices:
        key = (v_label_key(hv.label), hv.arity)
        if key not in seen_seed:
            seen_seed.add(key)
            seeds.append(v_unit_label(hv.label, hv.arity, g.alphabet))

    states: dict[str, VHypergraph] = {}
    order: list[VHypergraph] = []

    def push(s: VHypergraph) -> bool:
        d = s.digest()
        if d in states:
            return False
        if not _submultiset(_label_multiset(s), target_labels):
            return False
        states[d] = s
        order.append(s)
        return True

    for s in seeds:
        push(s)
    i = 0
    while i < len(order):
        if target in states:
            return True
        s = order[i]
        i += 1
        if len(states) > CLIQUEWIDTH_STATE_CAP:
            raise TooLarge("cliquewidth state space exceeded the cap")
        k = s.arity
        for m in range(1, n + 1):
            for f in itertools.product(range(1, m + 1), repeat=k):
                push(v_relabel_ports(s, f, m))
        for pair in itertools.product(range(1, k + 1), repeat=2):
            push(v_add_edges(s, [pair]))
        for other in list(order):
            if len(_label_multiset(s)) + len(_label_multiset(other)) <= len(target_labels):
                push(v_disjoint_union(s, other))
    return target in states


def _label_multiset(g: VHypergraph) -> tuple:
    return tuple(sorted((v_label_key(hv.label), hv.arity) for hv in g.hypervertices))


def _submultiset(a: tuple, b: tuple) -> bool:
    from collections import Counter
    ca, cb = Counter(a), Counter(b)
    return all(ca[k] <= cb[k] for k in ca)


# ---------------------------------------------------------------------------
# VR operations as polynomial operations over the free V-algebra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VConst:
    value: VHypergraph

    @property
    def arity(self) -> int:
        return self.value.arity

    def label_key(self) -> str:
        return "vc:" + self.value.digest()


@dataclass(frozen=True)
class VVar:
    name: str
    arity: int

    def label_key(self) -> str:
        return "vx:" + self.name


def eval_v_polynomial(body: VHypergraph, eta: Mapping[str, VHypergraph]) -> VHypergraph:
    """Evaluate a polynomial term over the free V-algebra: substitute the
    valuation into the Const/Var-labelled body and flatten."""

    def substitute(label):
        if isinstance(label, VVar):
            if label.name not in eta:
                raise RangeError(f"valuation misses {label.name!r}")
            return eta[label.name]
        if isinstance(label, VConst):
            return label.value
        raise ArityMismatch(f"body labels must be VConst or VVar, got {label!r}")

    return v_flatten(v_map_labels(body, substitute))


def union_poly_body(n1: int, n2: int) -> VHypergraph:
    """Defining body of disjoint union for arities n1, n2."""
    ports = {(0, i): i for i in range(1, n1 + 1)}
    ports.update({(1, i): i for i in range(1, n2 + 1)})
    return VHypergraph.make([(0, VVar("x", n1), n1), (1, VVar("y", n2), n2)],
                            [], ports, max(n1, n2))


def relabel_poly_body(f: Sequence[int], m: int) -> VHypergraph:
    """Defining body of a port relabelling along f into {1..m}."""
    n = len(f)
    ports = {(0, i): f[i - 1] for i in range(1, n + 1)}
    return VHypergraph.make([(0, VVar("x", n), n)], [], ports, m)


def add_edges_poly_body(n: int, pairs: Iterable[tuple[int, int]]) -> VHypergraph:
    """Defining body of an edge addition.

    Pairs (i, i) are not expressible this way: the body would need an edge
    from a corner to itself, which the edge relation does not admit.
    """
    edges = []
    for i, j in pairs:
        if i == j:
            raise RangeError("(i, i) edge additions have no defining polynomial body")
        edges.append(((0, i), (0, j)))
    ports = {(0, i): i for i in range(1, n + 1)}
    return VHypergraph.make([(0, VVar("x", n), n)], edges, ports, n)
