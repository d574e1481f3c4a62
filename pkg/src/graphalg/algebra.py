"""Computable algebras of sourced hypergraphs, finite on every arity.

Elements are (arity, payload) pairs; an algebra is a per-arity universe up
to an arity cap plus a product oracle on element-labelled sourced
hypergraphs.  Includes recognising algebras for the base languages, the
powerset algebra with its distributive law, parallel composition on
elements, aperiodicity, Cartesian products, syntactic quotients, and the
aperiodicity-based star-freeness profile.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

from .errors import ArityMismatch, NotACongruence, RangeError, TooLarge
from .hr import (SourcedHypergraph, empty_graph, label_key, map_labels,
                 unit_label)
from .mso import base_count_divisible, base_shared_vertex
from .poly import (Const, EquivalencePartition, PolynomialTerm, Var,
                   check_congruence)
from .ranked import RankedAlphabet, make_alphabet

Element = tuple[int, Any]  # (arity, payload)


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """Per-arity universes plus a product oracle.

    The product must satisfy the Eilenberg-Moore axioms; the unit law is
    exact by construction of the oracles here, associativity is checked by
    the test-suite on sampled nested inputs.  Arity-cap violations raise.
    """

    name: str
    arity_cap: int
    universes: Mapping[int, tuple[Element, ...]]
    product_fn: Callable[[SourcedHypergraph], Element]

    def universe(self, n: int) -> tuple[Element, ...]:
        if n < 0 or n > self.arity_cap:
            raise RangeError(f"arity {n} outside 0..{self.arity_cap}")
        return self.universes[n]

    def element_arity(self, x: Element) -> int:
        return x[0]

    def product(self, g: SourcedHypergraph) -> Element:
        if g.arity > self.arity_cap:
            raise RangeError(f"product arity {g.arity} exceeds cap {self.arity_cap}")
        for e in g.edges:
            if len(e.pins) > self.arity_cap:
                raise RangeError(f"label arity {len(e.pins)} exceeds cap {self.arity_cap}")
        return self.product_fn(g)

    def __repr__(self):
        sizes = {n: len(self.universes[n]) for n in sorted(self.universes)}
        return f"FiniteAlgebra({self.name!r}, sizes={sizes})"


@dataclass(frozen=True)
class Homomorphism:
    """Structural-recursion evaluation of graphs over an alphabet: replace
    each symbol by its image element and apply the product."""

    alphabet: RankedAlphabet
    algebra: FiniteAlgebra
    images: Mapping[str, Element]

    def __call__(self, g: SourcedHypergraph) -> Element:
        return self.algebra.product(map_labels(g, lambda name: self.images[name]))


@dataclass(frozen=True)
class Language:
    """A language of rank-0 graphs: a direct membership predicate, optionally
    with a recognising homomorphism and accepting set."""

    alphabet: RankedAlphabet
    membership: Callable[[SourcedHypergraph], bool]
    recogniser: Optional[tuple[Homomorphism, frozenset]] = None

    def accepts(self, g: SourcedHypergraph) -> bool:
        return bool(self.membership(g))

    def recognised_accepts(self, g: SourcedHypergraph) -> bool:
        if self.recogniser is None:
            raise RangeError("language has no recogniser")
        h, acc = self.recogniser
        return h(g) in acc


# ---------------------------------------------------------------------------
# Parallel composition on algebra elements, aperiodicity
# ---------------------------------------------------------------------------


def oplus_in_algebra(alg, a, b):
    """Parallel composition inside an algebra: the product of the two-edge
    graph whose edges are labelled a and b on shared sources."""
    n1, n2 = alg.element_arity(a), alg.element_arity(b)
    if n1 != n2:
        raise ArityMismatch(f"arities differ: {n1} vs {n2}")
    verts = tuple(range(1, n1 + 1))
    g = SourcedHypergraph.make(verts, [(0, a, verts), (1, b, verts)], verts)
    return alg.product(g)


@dataclass(frozen=True)
class AperiodicityReport:
    aperiodic: bool
    witness: Optional[tuple[int, Element]] = None  # (arity, element)

    def __bool__(self):
        return self.aperiodic


def is_aperiodic(alg: FiniteAlgebra, arity_bound: int) -> AperiodicityReport:
    """Does every element satisfy s^k = s^(k+1) under parallel composition,
    on every arity up to the bound?  Returns a failing element otherwise."""
    if arity_bound > alg.arity_cap:
        raise RangeError(f"bound {arity_bound} exceeds cap {alg.arity_cap}")
    for n in range(arity_bound + 1):
        universe = alg.universe(n)
        for s in universe:
            power = s
            seen = {label_key(power)}
            ok = False
            for _ in range(len(universe) + 1):
                nxt = oplus_in_algebra(alg, power, s)
                if nxt == power:
                    ok = True
                    break
                if label_key(nxt) in seen:
                    break
                seen.add(label_key(nxt))
                power = nxt
            if not ok:
                return AperiodicityReport(False, (n, s))
    return AperiodicityReport(True)


# ---------------------------------------------------------------------------
# Concrete recognising algebras for the base languages
# ---------------------------------------------------------------------------


def divisibility_algebra(symbol: str, m: int, alphabet: RankedAlphabet,
                         arity_cap: int) -> tuple[FiniteAlgebra, Homomorphism, frozenset]:
    """Counts ``symbol``-labelled hyperedges modulo m; accepts count 0 mod m."""
    if m < 1:
        raise RangeError("modulus must be >= 1")
    universes = {n: tuple((n, r) for r in range(m)) for n in range(arity_cap + 1)}

    def product(g: SourcedHypergraph) -> Element:
        total = sum(e.label[1] for e in g.edges) % m
        return (g.arity, total)

    alg = FiniteAlgebra(f"mod{m}[{symbol}]", arity_cap, universes, product)
    images = {name: (k, 1 % m if name == symbol else 0) for name, k in alphabet.symbols}
    hom = Homomorphism(alphabet, alg, images)
    return alg, hom, frozenset({(0, 0)})


def divisibility_language(symbol: str, m: int, alphabet: RankedAlphabet,
                          arity_cap: int = 3) -> Language:
    alg, hom, acc = divisibility_algebra(symbol, m, alphabet, arity_cap)
    return Language(alphabet, lambda g: base_count_divisible(g, symbol, m), (hom, acc))


TOP = "TOP"


def shared_vertex_algebra(first: tuple[str, int], second: tuple[str, int],
                          alphabet: RankedAlphabet,
                          arity_cap: int) -> tuple[FiniteAlgebra, Homomorphism, frozenset]:
    """Recognises graphs with hyperedges labelled a, b sharing e[i] = f[j].

    Elements are TOP (the condition already holds) or a per-source pin state:
    0 = untouched, 1 = hit by an (a, i) slot, 2 = hit by a (b, j) slot.  A
    vertex collecting both pin kinds jumps to TOP; pins on non-source
    vertices are discarded, since no later composition can reach them.
    """
    (a, i), (b, j) = first, second
    if not 1 <= i <= alphabet.arity(a):
        raise RangeError(f"position {i} out of range for symbol {a!r}")
    if not 1 <= j <= alphabet.arity(b):
        raise RangeError(f"position {j} out of range for symbol {b!r}")

    universes = {n: ((n, TOP),) + tuple((n, t) for t in itertools.product((0, 1, 2), repeat=n))
                 for n in range(arity_cap + 1)}

    def product(g: SourcedHypergraph) -> Element:
        kinds: dict[int, set[int]] = {v: set() for v in g.vertices}
        for e in g.edges:
            payload = e.label[1]
            if payload == TOP:
                return (g.arity, TOP)
            for pos, state in enumerate(payload):
                if state:
                    kinds[e.pins[pos]].add(state)
        if any(len(ks) == 2 for ks in kinds.values()):
            return (g.arity, TOP)
        return (g.arity, tuple(next(iter(kinds[s]), 0) for s in g.sources))

    alg = FiniteAlgebra(f"shared[{a}.{i}={b}.{j}]", arity_cap, universes, product)
    images = {}
    for name, k in alphabet.symbols:
        state = [0] * k
        top = False
        if name == a:
            state[i - 1] = 1
        if name == b:
            if state[j - 1] == 1 and name == a and i == j:
                top = True
            else:
                state[j - 1] = 2 if state[j - 1] == 0 else state[j - 1]
        if name == a == b and i != j:
            state[i - 1], state[j - 1] = 1, 2
        images[name] = (k, TOP) if top else (k, tuple(state))
    hom = Homomorphism(alphabet, alg, images)
    return alg, hom, frozenset({(0, TOP)})


def shared_vertex_language(first, second, alphabet, arity_cap: int = 3) -> Language:
    alg, hom, acc = shared_vertex_algebra(first, second, alphabet, arity_cap)
    return Language(alphabet, lambda g: base_shared_vertex(g, first, second), (hom, acc))


def saturating_count_algebra(symbol: str, saturation: int, alphabet: RankedAlphabet,
                             arity_cap: int) -> tuple[FiniteAlgebra, Homomorphism]:
    """Counts ``symbol``-labelled hyperedges, saturating at the given cap."""
    if saturation < 1:
        raise RangeError("saturation must be >= 1")
    universes = {n: tuple((n, c) for c in range(saturation + 1)) for n in range(arity_cap + 1)}

    def product(g: SourcedHypergraph) -> Element:
        return (g.arity, min(sum(e.label[1] for e in g.edges), saturation))

    alg = FiniteAlgebra(f"sat{saturation}[{symbol}]", arity_cap, universes, product)
    images = {name: (k, min(1, saturation) if name == symbol else 0)
              for name, k in alphabet.symbols}
    return alg, Homomorphism(alphabet, alg, images)


def threshold_language(symbol: str, threshold: int, alphabet: RankedAlphabet,
                       arity_cap: int = 3) -> Language:
    """The graphs with at least ``threshold`` hyperedges labelled ``symbol``."""
    alg, hom = saturating_count_algebra(symbol, threshold, alphabet, arity_cap)
    acc = frozenset({(0, threshold)})
    return Language(alphabet,
                    lambda g: sum(1 for e in g.edges if e.label == symbol) >= threshold,
                    (hom, acc))


# ---------------------------------------------------------------------------
# Products of algebras and language combinators
# ---------------------------------------------------------------------------


def product_algebra(a: FiniteAlgebra, b: FiniteAlgebra, name: Optional[str] = None) -> FiniteAlgebra:
    cap = min(a.arity_cap, b.arity_cap)
    universes = {n: tuple((n, (pa, pb)) for (_, pa) in a.universes[n] for (_, pb) in b.universes[n])
                 for n in range(cap + 1)}

    def product(g: SourcedHypergraph) -> Element:
        ga = map_labels(g, lambda el: (el[0], el[1][0]))
        gb = map_labels(g, lambda el: (el[0], el[1][1]))
        return (g.arity, (a.product(ga)[1], b.product(gb)[1]))

    return FiniteAlgebra(name or f"{a.name}*{b.name}", cap, universes, product)


def pair_homomorphism(ha: Homomorphism, hb: Homomorphism,
                      alg: Optional[FiniteAlgebra] = None) -> Homomorphism:
    alg = alg or product_algebra(ha.algebra, hb.algebra)
    images = {name: (k, (ha.images[name][1], hb.images[name][1]))
              for name, k in ha.alphabet.symbols}
    return Homomorphism(ha.alphabet, alg, images)


def complement_language(lang: Language) -> Language:
    rec = None
    if lang.recogniser is not None:
        hom, acc = lang.recogniser
        rec = (hom, frozenset(hom.algebra.universe(0)) - acc)
    return Language(lang.alphabet, lambda g: not lang.membership(g), rec)


def _combine_languages(l1: Language, l2: Language, keep) -> Language:
    rec = None
    if l1.recogniser is not None and l2.recogniser is not None:
        h1, acc1 = l1.recogniser
        h2, acc2 = l2.recogniser
        alg = product_algebra(h1.algebra, h2.algebra)
        hom = pair_homomorphism(h1, h2, alg)
        acc = frozenset(x for x in alg.universe(0)
                        if keep((0, x[1][0]) in acc1, (0, x[1][1]) in acc2))
        rec = (hom, acc)
    return Language(l1.alphabet, lambda g: keep(l1.membership(g), l2.membership(g)), rec)


def union_language(l1: Language, l2: Language) -> Language:
    return _combine_languages(l1, l2, lambda x, y: x or y)


def intersection_language(l1: Language, l2: Language) -> Language:
    return _combine_languages(l1, l2, lambda x, y: x and y)


# ---------------------------------------------------------------------------
# Powerset algebra and the distributive law
# ---------------------------------------------------------------------------


def delta(g: SourcedHypergraph) -> list[SourcedHypergraph]:
    """All refinements of a graph whose labels are sets of elements: pick one
    member per hyperedge.  The result has one graph per choice function."""
    pools = []
    for e in g.edges:
        members = sorted(e.label, key=label_key)
        pools.append([(e.id, x) for x in members])
    out = []
    for choice in itertools.product(*pools):
        table = dict(choice)
        out.append(SourcedHypergraph.make(
            g.vertices, [(e.id, table[e.id], e.pins) for e in g.edges], g.sources))
    return out


DELTA_CHOICE_CAP = 1_000_000


def powerset_algebra(alg: FiniteAlgebra) -> FiniteAlgebra:
    """Universe: all subsets per arity; the product of a set-labelled graph is
    the set of products of its refinements."""
    for n in range(alg.arity_cap + 1):
        if len(alg.universes[n]) > 10:
            raise TooLarge(f"arity-{n} universe too large for the powerset algebra")
    universes = {}
    for n in range(alg.arity_cap + 1):
        subsets = []
        elems = list(alg.universes[n])
        for k in range(len(elems) + 1):
            for combo in itertools.combinations(elems, k):
                subsets.append((n, frozenset(combo)))
        universes[n] = tuple(subsets)

    def product(g: SourcedHypergraph) -> Element:
        count = 1
        for e in g.edges:
            count *= len(e.label[1])
            if count > DELTA_CHOICE_CAP:
                raise TooLarge("too many refinements in the powerset product")
        unwrapped = map_labels(g, lambda el: el[1])
        values = frozenset(alg.product(h) for h in delta(unwrapped))
        return (g.arity, values)

    return FiniteAlgebra(f"P({alg.name})", alg.arity_cap, universes, product)


# ---------------------------------------------------------------------------
# Syntactic quotient and the star-freeness profile
# ---------------------------------------------------------------------------


def forget_to_rank0(alg, x) -> Any:
    """Apply the source-forgetting context: the product of the graph with one
    x-labelled hyperedge on all-forgotten sources."""
    n = alg.element_arity(x)
    verts = tuple(range(1, n + 1))
    return alg.product(SourcedHypergraph.make(verts, [(0, x, verts)], ()))


@dataclass(frozen=True)
class QuotientResult:
    algebra: FiniteAlgebra
    hom: Homomorphism
    accepting: frozenset
    partition: EquivalencePartition
    class_of: Mapping[int, Mapping[str, int]] = field(repr=False, default=None)

    def __iter__(self):
        return iter((self.algebra, self.hom))


def syntactic_quotient(lang: Language, arity_bound: int,
                       congruence_terms: Optional[Sequence[PolynomialTerm]] = None,
                       ) -> QuotientResult:
    """Quotient a recognising algebra by parallel-composition environments.

    Two arity-n elements are identified when, for every arity-n environment
    element c, forgetting all sources of a (+) c lands in the accepting set
    exactly as often.  The resulting partition is re-verified to be a
    congruence on a family of small polynomial contexts before the quotient
    algebra is built; a violation raises NotACongruence.
    """
    if lang.recogniser is None:
        raise RangeError("syntactic quotient needs a recognising algebra")
    hom, acc = lang.recogniser
    alg = hom.algebra
    if arity_bound > alg.arity_cap:
        raise RangeError(f"bound {arity_bound} exceeds cap {alg.arity_cap}")

    def accepted(x: Element) -> bool:
        return forget_to_rank0(alg, x) in acc

    blocks: dict[int, tuple[tuple[Element, ...], ...]] = {}
    for n in range(arity_bound + 1):
        universe = list(alg.universe(n))
        sig: dict[str, list[Element]] = {}
        order: list[str] = []
        for x in universe:
            s = tuple(accepted(oplus_in_algebra(alg, x, c)) for c in universe)
            key = repr(s)
            if key not in sig:
                sig[key] = []
                order.append(key)
            sig[key].append(x)
        blocks[n] = tuple(tuple(sig[key]) for key in order)

    partition = EquivalencePartition.from_blocks(blocks)
    terms = congruence_terms if congruence_terms is not None else _default_context_terms(arity_bound)
    report = check_congruence(partition, terms, alg)
    if not report.compatible:
        raise NotACongruence("environment partition is not a congruence",
                             report.counterexample)

    class_index: dict[int, dict[str, int]] = {}
    reps: dict[int, list[Element]] = {}
    for n in range(arity_bound + 1):
        class_index[n] = {}
        reps[n] = []
        for bi, blk in enumerate(blocks[n]):
            reps[n].append(blk[0])
            for x in blk:
                class_index[n][label_key(x)] = bi

    universes = {n: tuple((n, bi) for bi in range(len(blocks[n])))
                 for n in range(arity_bound + 1)}

    def q_product(g: SourcedHypergraph) -> Element:
        lifted = map_labels(g, lambda el: reps[el[0]][el[1]])
        y = alg.product(lifted)
        return (y[0], class_index[y[0]][label_key(y)])

    q_alg = FiniteAlgebra(f"synt({alg.name})", arity_bound, universes, q_product)
    q_images = {name: (k, class_index[k][label_key(hom.images[name])])
                for name, k in hom.alphabet.symbols if k <= arity_bound}
    q_hom = Homomorphism(hom.alphabet, q_alg, q_images)
    q_acc = frozenset((0, class_index[0][label_key(x)])
                      for x in alg.universe(0) if x in acc)
    return QuotientResult(q_alg, q_hom, q_acc, partition, class_index)


def _default_context_terms(arity_bound: int) -> list[PolynomialTerm]:
    """Small polynomial contexts used to re-verify that the environment
    partition is a congruence: parallel composition, source forgetting, and a
    separated two-variable context on every arity within the bound."""
    terms = []
    for n in range(arity_bound + 1):
        xs = make_alphabet([("x", n), ("y", n)])
        verts = tuple(range(1, n + 1))
        body = SourcedHypergraph.make(verts, [(0, Var("x", n), verts), (1, Var("y", n), verts)], verts)
        terms.append(PolynomialTerm(body, xs))
        for keep in range(n):
            body = SourcedHypergraph.make(verts, [(0, Var("x", n), verts)], verts[:keep])
            terms.append(PolynomialTerm(body, make_alphabet([("x", n)])))
        if n >= 1:
            # Two copies sharing one vertex, then all sources forgotten.
            m = 2 * n - 1
            verts2 = tuple(range(1, m + 1))
            pins_x = tuple(range(1, n + 1))
            pins_y = tuple(range(n, m + 1))
            body = SourcedHypergraph.make(
                verts2, [(0, Var("x", n), pins_x), (1, Var("y", n), pins_y)], ())
            terms.append(PolynomialTerm(body, make_alphabet([("x", n), ("y", n)])))
    return terms


@dataclass(frozen=True)
class StarFreeReport:
    aperiodic: bool
    witness: Optional[tuple[int, Element]]
    quotient: QuotientResult

    def __bool__(self):
        return self.aperiodic


def decide_star_free_profile(lang: Language, n0: int) -> StarFreeReport:
    """The algebraic star-freeness test: compute the syntactic quotient and
    check aperiodicity of its parallel-composition semigroups on arities up
    to n0.  (Deriving n0 from a formula is out of scope.)"""
    q = syntactic_quotient(lang, n0)
    rep = is_aperiodic(q.algebra, n0)
    return StarFreeReport(rep.aperiodic, rep.witness, q)
