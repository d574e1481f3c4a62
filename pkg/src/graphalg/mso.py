"""Finite relational models, hypergraph encodings, powerset models, and
quantifier-rank equivalence.

Counting-MSO equivalence of two models is decided as plain first-order
equivalence (Hintikka rank types) of their powerset models; the powerset
model carries inclusion, singletons, lifted relations, set constants for a
finite family of quantifier-free generator formulas, and modulo-counting
predicates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Optional, Sequence

from .errors import (ArityMismatch, ConstantViolatesRestriction, RangeError,
                     TooLarge, VocabularyMismatch)
from .formulas import (And, ConstName, Eq, FALSE, FalseF, FoVar, Formula, Not,
                       Or, Rel, SetOf, TRUE, TrueF, eval_formula,
                       print_formula, quantifier_rank)
from .hr import SourcedHypergraph
from .ranked import RankedAlphabet


@dataclass(frozen=True, eq=False)
class Model:
    """A finite relational structure with named relations and constants."""

    universe: frozenset
    relations: Mapping[str, frozenset]
    rel_arities: Mapping[str, int]
    constants: Mapping[str, Any]

    def __post_init__(self):
        for name, tuples in self.relations.items():
            k = self.rel_arities[name]
            for t in tuples:
                if len(t) != k:
                    raise ArityMismatch(f"relation {name!r}: tuple {t!r} has arity != {k}")
                if not set(t) <= self.universe:
                    raise RangeError(f"relation {name!r}: tuple {t!r} outside universe")
        for name, v in self.constants.items():
            if v not in self.universe:
                raise RangeError(f"constant {name!r} outside universe")

    @classmethod
    def make(cls, universe: Iterable, relations: Mapping[str, Iterable],
             rel_arities: Mapping[str, int], constants: Mapping[str, Any]) -> "Model":
        return cls(frozenset(universe),
                   {n: frozenset(tuple(t) for t in ts) for n, ts in relations.items()},
                   dict(rel_arities), dict(constants))

    def vocabulary(self) -> tuple[frozenset, frozenset]:
        return (frozenset(self.rel_arities.items()), frozenset(self.constants))

    def size(self) -> int:
        return len(self.universe)

    def __repr__(self):
        return f"Model(|U|={len(self.universe)}, rels={sorted(self.rel_arities)})"


def same_vocabulary(a: Model, b: Model) -> bool:
    return a.vocabulary() == b.vocabulary()


def eval_cmso(phi: Formula, m: Model) -> bool:
    """Evaluate a counting-MSO sentence on a model."""
    from .formulas import formula_vocabulary
    rels, consts = formula_vocabulary(phi)
    for name, k in rels:
        if name not in m.rel_arities or m.rel_arities[name] != k:
            raise VocabularyMismatch(f"relation {name!r}/{k} not in model vocabulary")
    for name in consts:
        if name not in m.constants:
            raise VocabularyMismatch(f"constant {name!r} not in model vocabulary")
    return eval_formula(phi, m)


# ---------------------------------------------------------------------------
# Encodings of graphs as models
# ---------------------------------------------------------------------------


def encode_h(g: SourcedHypergraph, alphabet: Optional[RankedAlphabet] = None) -> Model:
    """Relational encoding of a sourced hypergraph.

    Universe is vertices plus hyperedges; one unary relation per label, a
    binary incidence relation per position up to the alphabet's maximal
    arity, and a constant per source.
    """
    alphabet = alphabet or g.alphabet
    if alphabet is None:
        raise VocabularyMismatch("encode_h needs an alphabet")
    universe = [("v", v) for v in sorted(g.vertices)]
    universe += [("e", e.id) for e in g.edges]
    relations: dict[str, set] = {f"lab_{name}": set() for name, _ in alphabet.symbols}
    arities: dict[str, int] = {f"lab_{name}": 1 for name, _ in alphabet.symbols}
    for i in range(1, alphabet.max_arity() + 1):
        relations[f"inc_{i}"] = set()
        arities[f"inc_{i}"] = 2
    for e in g.edges:
        relations[f"lab_{e.label}"].add((("e", e.id),))
        for pos, v in enumerate(e.pins, start=1):
            relations[f"inc_{pos}"].add((("e", e.id), ("v", v)))
    constants = {f"src_{i}": ("v", s) for i, s in enumerate(g.sources, start=1)}
    return Model.make(universe, relations, arities, constants)


def encode_v(g, alphabet: Optional[RankedAlphabet] = None) -> Model:
    """Relational encoding of a V-hypergraph: the universe is the corners."""
    alphabet = alphabet or g.alphabet
    if alphabet is None:
        raise VocabularyMismatch("encode_v needs an alphabet")
    universe = list(g.corners())
    relations: dict[str, set] = {"edge": set(g.edges)}
    arities: dict[str, int] = {"edge": 2}
    for name, k in alphabet.symbols:
        for i in range(1, k + 1):
            relations[f"lab_{name}_{i}"] = set()
            arities[f"lab_{name}_{i}"] = 1
    for hv in g.hypervertices:
        for i in range(1, hv.arity + 1):
            relations[f"lab_{hv.label}_{i}"].add(((hv.id, i),))
    for p in range(1, g.arity + 1):
        relations[f"port_{p}"] = {(c,) for c, q in g.ports.items() if q == p}
        arities[f"port_{p}"] = 1
    return Model.make(universe, relations, arities, constants={})


# ---------------------------------------------------------------------------
# The four model operations compatible with FO (products also with FO only)
# ---------------------------------------------------------------------------


def model_product(models: Sequence[Model]) -> Model:
    """Cartesian product; relations are read off factorwise through the
    projections, constants are all families of factor constants."""
    universes = [sorted(m.universe, key=repr) for m in models]
    universe = [tuple(t) for t in itertools.product(*universes)]
    relations: dict[str, set] = {}
    arities: dict[str, int] = {}
    for i, m in enumerate(models):
        for name, k in m.rel_arities.items():
            rel = m.relations[name]
            out = set()
            for tup in universe_tuples(universe, k):
                if tuple(x[i] for x in tup) in rel:
                    out.add(tup)
            relations[f"{name}@{i}"] = out
            arities[f"{name}@{i}"] = k
    constants = {}
    names = [sorted(m.constants) for m in models]
    for family in itertools.product(*names):
        value = tuple(models[i].constants[family[i]] for i in range(len(models)))
        constants[f"<{'|'.join(family)}>"] = value
    return Model.make(universe, relations, arities, constants)


def universe_tuples(universe, k):
    return itertools.product(universe, repeat=k)


def model_disjoint_union(models: Sequence[Model]) -> Model:
    """Tagged disjoint union; relations and constants are indexed by summand."""
    universe = [(i, u) for i, m in enumerate(models) for u in sorted(m.universe, key=repr)]
    relations = {}
    arities = {}
    constants = {}
    for i, m in enumerate(models):
        for name, k in m.rel_arities.items():
            relations[f"{name}@{i}"] = {tuple((i, x) for x in t) for t in m.relations[name]}
            arities[f"{name}@{i}"] = k
        for name, v in m.constants.items():
            constants[f"{name}@{i}"] = (i, v)
    return Model.make(universe, relations, arities, constants)


def qf_restrict(m: Model, phi: SetOf) -> Model:
    """Restrict the universe to the elements satisfying a quantifier-free
    one-variable formula.  Undefined (error) if a constant violates it."""
    if quantifier_rank(phi.body) != 0:
        raise RangeError("restriction formula must be quantifier-free")
    keep = frozenset(u for u in m.universe
                     if eval_formula(phi.body, m, {phi.var: u}))
    for name, v in m.constants.items():
        if v not in keep:
            raise ConstantViolatesRestriction(f"constant {name!r} violates the restriction")
    relations = {name: frozenset(t for t in ts if set(t) <= keep)
                 for name, ts in m.relations.items()}
    return Model.make(keep, relations, dict(m.rel_arities), dict(m.constants))


@dataclass(frozen=True)
class Interpretation:
    """A quantifier-free interpretation: formulas for the output relations and
    input constant names for the output constants."""

    relations: Mapping[str, tuple[tuple[str, ...], Formula]]
    constants: Mapping[str, str]

    def __post_init__(self):
        for name, (args, body) in self.relations.items():
            if quantifier_rank(body) != 0:
                raise RangeError(f"interpretation of {name!r} is not quantifier-free")


def qf_interpret(m: Model, interp: Interpretation) -> Model:
    relations = {}
    arities = {}
    for name, (args, body) in interp.relations.items():
        k = len(args)
        rel = set()
        for tup in itertools.product(sorted(m.universe, key=repr), repeat=k):
            if eval_formula(body, m, dict(zip(args, tup))):
                rel.add(tup)
        relations[name] = rel
        arities[name] = k
    constants = {}
    for out, src in interp.constants.items():
        if src not in m.constants:
            raise VocabularyMismatch(f"constant {src!r} not in model")
        constants[out] = m.constants[src]
    return Model.make(m.universe, relations, arities, constants)


# ---------------------------------------------------------------------------
# Powerset models and CMSO equivalence
# ---------------------------------------------------------------------------

POWERSET_UNIVERSE_LIMIT = 12


def default_generators(m: Model) -> tuple[SetOf, ...]:
    """[true], [false], every atomic one-variable formula, and their negations."""
    x = "x"
    atoms: list[Formula] = []
    terms = [FoVar(x)] + [ConstName(c) for c in sorted(m.constants)]
    for name in sorted(m.rel_arities):
        k = m.rel_arities[name]
        for args in itertools.product(terms, repeat=k):
            if any(isinstance(a, FoVar) for a in args):
                atoms.append(Rel(name, args))
    for c in sorted(m.constants):
        atoms.append(Eq(FoVar(x), ConstName(c)))
    gens: list[SetOf] = [SetOf(x, TRUE), SetOf(x, FALSE)]
    for a in atoms:
        gens.append(SetOf(x, a))
        gens.append(SetOf(x, Not(a)))
    return tuple(gens)


@dataclass(frozen=True)
class CmsoSignature:
    """Rank, moduli, and the finite family of set-constant generators."""

    rank: int
    moduli: frozenset[int] = frozenset()
    generators: Optional[tuple[SetOf, ...]] = None

    def __post_init__(self):
        for m in self.moduli:
            if m < 2:
                raise RangeError(f"modulus {m} must be >= 2")

    @classmethod
    def of(cls, rank: int, moduli: Iterable[int] = (), generators=None) -> "CmsoSignature":
        return cls(rank, frozenset(moduli), tuple(generators) if generators is not None else None)


def set_constant_name(phi: SetOf) -> str:
    return "[" + print_formula(phi.body) + "]"


def powerset_model(m: Model, sig: CmsoSignature) -> Model:
    """The powerset structure: inclusion, singletons, relations lifted to
    singletons, one set constant per generator formula, and modulo-counting
    predicates for the signature's moduli."""
    n = len(m.universe)
    if n > POWERSET_UNIVERSE_LIMIT:
        raise TooLarge(f"universe of size {n} exceeds the powerset bound")
    base = sorted(m.universe, key=repr)
    universe = [frozenset(s) for k in range(n + 1) for s in itertools.combinations(base, k)]
    relations: dict[str, set] = {}
    arities: dict[str, int] = {}
    relations["subset"] = {(s, t) for s in universe for t in universe if s <= t}
    arities["subset"] = 2
    relations["sing"] = {(s,) for s in universe if len(s) == 1}
    arities["sing"] = 1
    for name, k in m.rel_arities.items():
        relations[name] = {tuple(frozenset({x}) for x in t) for t in m.relations[name]}
        arities[name] = k
    for mod in sorted(sig.moduli):
        for k in range(mod):
            relations[f"mod{mod}_{k}"] = {(s,) for s in universe if len(s) % mod == k}
            arities[f"mod{mod}_{k}"] = 1
    constants = {}
    generators = sig.generators if sig.generators is not None else default_generators(m)
    for gen in generators:
        if quantifier_rank(gen.body) != 0:
            raise RangeError("generator formulas must be quantifier-free")
        value = frozenset(u for u in base if eval_formula(gen.body, m, {gen.var: u}))
        constants[set_constant_name(gen)] = value
    return Model.make(universe, relations, arities, constants)


# -- Hintikka rank types -------------------------------------------------------


@dataclass(frozen=True)
class RankType:
    """Value describing a model up to quantifier rank r.

    Rank 0 is the atomic diagram over constants and pebbles; rank r+1 pairs
    the atomic diagram with the set of rank-r types of all one-element
    extensions.  Type equality decides r-equivalence.
    """

    rank: int
    payload: Any


class _RankComputer:
    def __init__(self, m: Model):
        self.m = m
        self.universe = sorted(m.universe, key=repr)
        self.const_names = sorted(m.constants)
        self.const_vals = [m.constants[c] for c in self.const_names]
        self.rel_names = sorted(m.rel_arities)
        self._memo: dict[tuple, Any] = {}
        self._const_atoms = self._atoms_over(self.const_vals, all_terms=True)

    def _atoms_over(self, vals, all_terms: bool) -> frozenset:
        # With all_terms=False, only atoms touching at least one pebble
        # (index >= number of constants) are produced.
        ncon = len(self.const_vals)
        n = len(vals)
        atoms = []
        for i in range(n):
            for j in range(i + 1, n):
                if not all_terms and j < ncon:
                    continue
                if vals[i] == vals[j]:
                    atoms.append(("=", i, j))
        for name in self.rel_names:
            k = self.m.rel_arities[name]
            rel = self.m.relations[name]
            for idxs in itertools.product(range(n), repeat=k):
                if not all_terms and all(i < ncon for i in idxs):
                    continue
                if tuple(vals[i] for i in idxs) in rel:
                    atoms.append((name, idxs))
        return frozenset(atoms)

    def type_of(self, pebbles: tuple, r: int) -> Any:
        key = (pebbles, r)
        if key in self._memo:
            return self._memo[key]
        vals = self.const_vals + list(pebbles)
        atomic = (self._const_atoms, self._atoms_over(vals, all_terms=False))
        if r == 0:
            out = atomic
        else:
            ext = frozenset(self.type_of(pebbles + (u,), r - 1) for u in self.universe)
            out = (atomic, ext)
        self._memo[key] = out
        return out


def rank_type(m: Model, r: int) -> RankType:
    if r < 0:
        raise RangeError("rank must be non-negative")
    return RankType(r, _RankComputer(m).type_of((), r))


def equiv_r(m1: Model, m2: Model, r: int) -> bool:
    """First-order equivalence up to quantifier rank r (Hintikka types)."""
    if not same_vocabulary(m1, m2):
        raise VocabularyMismatch("models have different vocabularies")
    return rank_type(m1, r) == rank_type(m2, r)


def cmso_equiv(m1: Model, m2: Model, sig: CmsoSignature) -> bool:
    """Counting-MSO equivalence at the signature's rank and moduli, decided
    on the powerset models.  Generators default to the shared atomic family."""
    if not same_vocabulary(m1, m2):
        raise VocabularyMismatch("models have different vocabularies")
    sig_shared = sig
    if sig.generators is None:
        gens = default_generators(m1)
        sig_shared = CmsoSignature(sig.rank, sig.moduli, gens)
    p1 = powerset_model(m1, sig_shared)
    p2 = powerset_model(m2, sig_shared)
    return equiv_r(p1, p2, sig.rank)


# ---------------------------------------------------------------------------
# Base predicates of the variable-free MSO presentation
# ---------------------------------------------------------------------------


def base_shared_vertex(g: SourcedHypergraph, first: tuple[str, int],
                       second: tuple[str, int], distinct: bool = False) -> bool:
    """Is there a pair of hyperedges labelled a, b with e[i] = f[j]?

    With ``distinct`` the two hyperedges must differ; the default reads the
    definition literally and allows e = f.
    """
    (a, i), (b, j) = first, second
    alphabet = g.alphabet
    if alphabet is not None:
        if i < 1 or i > alphabet.arity(a):
            raise RangeError(f"position {i} out of range for {a!r}")
        if j < 1 or j > alphabet.arity(b):
            raise RangeError(f"position {j} out of range for {b!r}")
    for e in g.edges:
        if e.label != a or i > len(e.pins):
            continue
        for f in g.edges:
            if f.label != b or j > len(f.pins):
                continue
            if distinct and e.id == f.id:
                continue
            if e.pins[i - 1] == f.pins[j - 1]:
                return True
    return False


def base_count_divisible(g: SourcedHypergraph, a: str, m: int) -> bool:
    """Is the number of hyperedges labelled ``a`` divisible by m?"""
    if m < 1:
        raise RangeError("modulus must be >= 1")
    return sum(1 for e in g.edges if e.label == a) % m == 0


# ---------------------------------------------------------------------------
# The fixed interpretation turning a product of powersets into the powerset
# of a disjoint union (used to validate that powersets turn unions into
# products).
# ---------------------------------------------------------------------------


def restrict_formula_to_factor(phi: Formula, i: int) -> Formula:
    """Restrict a quantifier-free formula over a two-summand union vocabulary
    to summand ``i``: atoms of the other summand become false."""
    suffix = f"@{i}"

    def walk(f: Formula) -> Formula:
        if isinstance(f, (TrueF, FalseF)):
            return f
        if isinstance(f, Rel):
            if f.name.endswith(suffix):
                return Rel(f.name[: -len(suffix)], tuple(map(strip_term, f.args)))
            return FALSE
        if isinstance(f, Eq):
            lt, rt = strip_term(f.left), strip_term(f.right)
            if lt is None or rt is None:
                return FALSE
            return Eq(lt, rt)
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, And):
            return And(tuple(walk(p) for p in f.parts))
        if isinstance(f, Or):
            return Or(tuple(walk(p) for p in f.parts))
        raise RangeError(f"formula not quantifier-free first-order: {f!r}")

    def strip_term(t):
        if isinstance(t, FoVar):
            return t
        if t.name.endswith(suffix):
            return ConstName(t.name[: -len(suffix)])
        return None

    out = walk(phi)
    return out


def powerset_of_union_via_product(mA: Model, mB: Model, sig: CmsoSignature) -> Model:
    """Interpret `powerset_model(model_disjoint_union([mA, mB]), sig)` inside
    the product of the factor powersets, up to the bijection sending a set to
    its pair of summand components."""
    union = model_disjoint_union([mA, mB])
    generators = sig.generators if sig.generators is not None else default_generators(union)
    factor_gens = []
    for i, m in enumerate((mA, mB)):
        gens = [SetOf(g.var, restrict_formula_to_factor(g.body, i)) for g in generators]
        gens.append(SetOf("x", FALSE))
        factor_gens.append(tuple(gens))
    pA = powerset_model(mA, CmsoSignature(sig.rank, sig.moduli, factor_gens[0]))
    pB = powerset_model(mB, CmsoSignature(sig.rank, sig.moduli, factor_gens[1]))
    prod = model_product([pA, pB])

    ff = f"<{set_constant_name(SetOf('x', FALSE))}|{set_constant_name(SetOf('x', FALSE))}>"

    def empty_at(side: int, var: str) -> Formula:
        return Rel(f"subset@{side}", (FoVar(var), ConstName(ff)))

    x, y = FoVar("u"), FoVar("v")
    relations: dict[str, tuple[tuple[str, ...], Formula]] = {}
    relations["subset"] = (("u", "v"), And((Rel("subset@0", (x, y)), Rel("subset@1", (x, y)))))
    relations["sing"] = (("u",), Or((
        And((Rel("sing@0", (x,)), empty_at(1, "u"))),
        And((Rel("sing@1", (x,)), empty_at(0, "u"))),
    )))
    for i, m in enumerate((mA, mB)):
        for name, k in m.rel_arities.items():
            args = tuple(f"u{t}" for t in range(k))
            lifted = Rel(f"{name}@{i}", tuple(FoVar(a) for a in args))
            others = tuple(empty_at(1 - i, a) for a in args)
            relations[f"{name}@{i}"] = (args, And((lifted,) + others))
    for mod in sorted(sig.moduli):
        for k in range(mod):
            parts = []
            for k0 in range(mod):
                k1 = (k - k0) % mod
                parts.append(And((Rel(f"mod{mod}_{k0}@0", (x,)),
                                  Rel(f"mod{mod}_{k1}@1", (x,)))))
            relations[f"mod{mod}_{k}"] = (("u",), Or(tuple(parts)))
    constants = {}
    for g in generators:
        n0 = set_constant_name(SetOf(g.var, restrict_formula_to_factor(g.body, 0)))
        n1 = set_constant_name(SetOf(g.var, restrict_formula_to_factor(g.body, 1)))
        constants[set_constant_name(g)] = f"<{n0}|{n1}>"
    return qf_interpret(prod, Interpretation(relations, constants))


def union_powerset_bijection(mA: Model, mB: Model):
    """The canonical map from subsets of the union to pairs of subsets."""

    def fn(s: frozenset):
        return (frozenset(u for i, u in s if i == 0), frozenset(u for i, u in s if i == 1))

    return fn
