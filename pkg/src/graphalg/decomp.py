"""Tree decompositions, exact treewidth, algebraic decompositions, and
binarisation.

Width convention: the width of a decomposition is the maximal bag size minus
one (so cliques on n vertices have treewidth n-1).  The source literature
words this differently, but relies on the standard convention elsewhere
(forbidden minors, K_n), so the standard convention is used throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Sequence, Union

from .errors import RangeError, TooLarge
from .hr import SourcedHypergraph
from .poly import PolynomialTerm, eval_polynomial, FreeHrAlgebra
from .ranked import RankedAlphabet, make_alphabet


@dataclass(frozen=True)
class TreeDecomposition:
    """A rooted unordered tree with a vertex bag per node."""

    root: int
    bags: Mapping[int, frozenset]
    children: Mapping[int, tuple[int, ...]]

    def __post_init__(self):
        if self.root not in self.bags:
            raise RangeError("root is not a node")
        seen = set()
        stack = [self.root]
        while stack:
            x = stack.pop()
            if x in seen:
                raise RangeError("child relation has a cycle or a repeated node")
            seen.add(x)
            for c in self.children.get(x, ()):
                if c not in self.bags:
                    raise RangeError(f"child {c} has no bag")
                stack.append(c)
        if seen != set(self.bags):
            raise RangeError("nodes unreachable from the root")

    @classmethod
    def make(cls, root: int, bags: Mapping[int, Sequence],
             children: Mapping[int, Sequence[int]]) -> "TreeDecomposition":
        return cls(root, {k: frozenset(v) for k, v in bags.items()},
                   {k: tuple(v) for k, v in children.items()})

    def nodes(self) -> list[int]:
        return sorted(self.bags)


def width(t: TreeDecomposition) -> int:
    """Max bag size minus one; a single empty bag has width -1."""
    return max(len(b) for b in t.bags.values()) - 1


def is_valid_decomposition(g: SourcedHypergraph, t: TreeDecomposition,
                           sources_in_root: bool = False) -> bool:
    """Both tree-decomposition conditions: every incidence list inside some
    bag, and every vertex's bags forming a nonempty connected subtree.  With
    ``sources_in_root``, the sources must additionally sit in the root bag."""
    for bag in t.bags.values():
        if not bag <= g.vertices:
            return False
    for e in g.edges:
        pins = set(e.pins)
        if not any(pins <= bag for bag in t.bags.values()):
            return False
    # Connectivity of the occurrence set of each vertex, via the child relation.
    neighbours: dict[int, set[int]] = {x: set() for x in t.bags}
    for x, cs in t.children.items():
        for c in cs:
            neighbours[x].add(c)
            neighbours[c].add(x)
    for v in g.vertices:
        holders = [x for x in t.bags if v in t.bags[x]]
        if not holders:
            return False
        seen = {holders[0]}
        stack = [holders[0]]
        holder_set = set(holders)
        while stack:
            x = stack.pop()
            for y in neighbours[x]:
                if y in holder_set and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != holder_set:
            return False
    if sources_in_root and not set(g.sources) <= t.bags[t.root]:
        return False
    return True


TREEWIDTH_VERTEX_LIMIT = 10


def exact_treewidth(g: SourcedHypergraph, sources_in_root: bool = False) -> int:
    """Exact treewidth by dynamic programming over vertex subsets.

    Works on the primal graph (each incidence list becomes a clique, which is
    faithful by the Helly property of subtrees).  With ``sources_in_root``
    the sources are additionally forced into one bag.  Enforced for at most
    10 vertices.
    """
    verts = sorted(g.vertices)
    n = len(verts)
    if n > TREEWIDTH_VERTEX_LIMIT:
        raise TooLarge(f"{n} vertices exceed the exact-treewidth bound")
    if n == 0:
        return -1
    index = {v: i for i, v in enumerate(verts)}
    adj = [0] * n
    cliques = [e.pins for e in g.edges]
    if sources_in_root and len(g.sources) >= 2:
        cliques.append(g.sources)
    for pins in cliques:
        for a, b in itertools.combinations(pins, 2):
            adj[index[a]] |= 1 << index[b]
            adj[index[b]] |= 1 << index[a]

    full = (1 << n) - 1

    def q_size(inside: int, v: int) -> int:
        # Vertices outside `inside` reachable from v through `inside`.
        seen = 1 << v
        stack = [v]
        reach = 0
        while stack:
            u = stack.pop()
            fresh = adj[u] & ~seen
            seen |= fresh
            m = fresh
            while m:
                w = (m & -m).bit_length() - 1
                m &= m - 1
                if inside >> w & 1:
                    stack.append(w)
                else:
                    reach |= 1 << w
        return bin(reach).count("1")

    best = {0: -1}
    for size in range(1, n + 1):
        nxt: dict[int, int] = {}
        for s, val in best.items():
            m = full & ~s
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                cand = max(val, q_size(s, v))
                t = s | (1 << v)
                if cand < nxt.get(t, n):
                    nxt[t] = cand
        best = nxt
    return best[full]


# ---------------------------------------------------------------------------
# Algebraic tree decompositions
# ---------------------------------------------------------------------------


class _Undefined:
    def __repr__(self):
        return "UNDEFINED"


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class Leaf:
    value: SourcedHypergraph


@dataclass(frozen=True)
class UnaryOp:
    term: PolynomialTerm  # exactly one variable

    def __post_init__(self):
        if len(self.term.variables) != 1:
            raise RangeError("unary nodes carry one-variable polynomial operations")


@dataclass(frozen=True)
class Oplus:
    rank: int


NodeLabel = Union[Leaf, UnaryOp, Oplus]


@dataclass(frozen=True)
class AlgebraicDecomposition:
    """Unordered tree: leaves carry graphs, degree-1 nodes carry one-variable
    polynomial operations, higher-degree nodes carry a parallel-composition
    marker with its rank."""

    root: int
    labels: Mapping[int, NodeLabel]
    children: Mapping[int, tuple[int, ...]]

    def __post_init__(self):
        for x, lab in self.labels.items():
            deg = len(self.children.get(x, ()))
            if isinstance(lab, Leaf) and deg != 0:
                raise RangeError(f"leaf node {x} has children")
            if isinstance(lab, UnaryOp) and deg != 1:
                raise RangeError(f"unary node {x} must have exactly one child")
            if isinstance(lab, Oplus) and deg < 2:
                raise RangeError(f"oplus node {x} must have at least two children")


def eval_algebraic_decomposition(t: AlgebraicDecomposition):
    """Bottom-up value; UNDEFINED propagates on arity mismatches.  Sibling
    order is irrelevant because parallel composition is commutative."""
    from .hr import parallel_compose

    def value(x: int):
        lab = t.labels[x]
        if isinstance(lab, Leaf):
            return lab.value
        kids = [value(c) for c in t.children[x]]
        if any(v is UNDEFINED for v in kids):
            return UNDEFINED
        if isinstance(lab, UnaryOp):
            (var_name, var_arity), = lab.term.variables.symbols
            (kid,) = kids
            if kid.arity != var_arity:
                return UNDEFINED
            return eval_polynomial(lab.term, {var_name: kid}, FreeHrAlgebra(kid.alphabet))
        if any(v.arity != lab.rank for v in kids):
            return UNDEFINED
        acc = kids[0]
        for v in kids[1:]:
            acc = parallel_compose(acc, v)
        return acc

    return value(t.root)


# ---------------------------------------------------------------------------
# Binarisation
# ---------------------------------------------------------------------------


def binarise_alphabet(max_rank: int) -> RankedAlphabet:
    return make_alphabet([(f"c{i}", 2) for i in range(1, max_rank + 1)])


def binarise(g: SourcedHypergraph) -> SourcedHypergraph:
    """Encode a hypergraph as an edge-coloured directed graph: the vertices
    are the vertices plus the hyperedges, with a colour-i edge from each
    hyperedge to its i-th incident vertex.  Sources carry over."""
    max_rank = g.alphabet.max_arity() if g.alphabet is not None else \
        max((len(e.pins) for e in g.edges), default=0)
    alphabet = binarise_alphabet(max_rank)
    vmap = {("v", v): i + 1 for i, v in enumerate(sorted(g.vertices))}
    for e in g.edges:
        vmap[("e", e.id)] = len(vmap) + 1
    edges = []
    nid = 0
    for e in g.edges:
        for pos, v in enumerate(e.pins, start=1):
            edges.append((nid, f"c{pos}", (vmap[("e", e.id)], vmap[("v", v)])))
            nid += 1
    sources = tuple(vmap[("v", s)] for s in g.sources)
    return SourcedHypergraph.make(vmap.values(), edges, sources, alphabet)
