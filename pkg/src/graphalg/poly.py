"""Polynomial operations over an algebra of sourced hypergraphs.

A polynomial term is a sourced hypergraph whose hyperedge labels are either
constants (opaque algebra elements) or variables; evaluating it substitutes a
valuation and applies the algebra's product.  The free algebra over an
alphabet uses flattening as its product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional, Protocol, Sequence

from .errors import ArityMismatch, MissingVariable
from .hr import SourcedHypergraph, flatten, label_key, map_labels, unit, unit_label
from .ranked import RankedAlphabet


@dataclass(frozen=True)
class Const:
    """A constant label: an element of the target algebra."""

    value: Any
    arity: int

    def label_key(self) -> str:
        return "c:" + label_key(self.value)


@dataclass(frozen=True)
class Var:
    """A variable label, to be substituted by the valuation."""

    name: str
    arity: int

    def label_key(self) -> str:
        return "x:" + self.name


@dataclass(frozen=True)
class PolynomialTerm:
    """Term body plus the declared ranked set of variables."""

    body: SourcedHypergraph
    variables: RankedAlphabet

    def __post_init__(self):
        for e in self.body.edges:
            if isinstance(e.label, Var):
                if e.label.name not in self.variables:
                    raise MissingVariable(f"undeclared variable {e.label.name!r}")
                if self.variables.arity(e.label.name) != e.label.arity:
                    raise ArityMismatch(
                        f"variable {e.label.name!r} declared with arity "
                        f"{self.variables.arity(e.label.name)}, used with {e.label.arity}")
            elif not isinstance(e.label, Const):
                raise ArityMismatch(f"term labels must be Const or Var, got {e.label!r}")

    @property
    def arity(self) -> int:
        return self.body.arity

    def used_variables(self) -> dict[str, int]:
        """Occurrence counts per variable name."""
        counts: dict[str, int] = {}
        for e in self.body.edges:
            if isinstance(e.label, Var):
                counts[e.label.name] = counts.get(e.label.name, 0) + 1
        return counts


Valuation = Mapping[str, Any]


class AlgebraHandle(Protocol):
    """Anything with a product on element-labelled sourced hypergraphs."""

    def product(self, g: SourcedHypergraph) -> Any: ...

    def element_arity(self, x: Any) -> int: ...


class FreeHrAlgebra:
    """The free algebra over an alphabet: elements are sourced hypergraphs,
    the product is flattening."""

    def __init__(self, alphabet: RankedAlphabet):
        self.alphabet = alphabet

    def product(self, g: SourcedHypergraph) -> SourcedHypergraph:
        return flatten(g)

    def element_arity(self, x: SourcedHypergraph) -> int:
        return x.arity

    def unit_of(self, name: str) -> SourcedHypergraph:
        return unit(self.alphabet, name)


def term_from_symbols(body: SourcedHypergraph, terminals: RankedAlphabet,
                      variables: RankedAlphabet) -> PolynomialTerm:
    """Lift a graph over terminals+variables to a term, replacing each
    terminal symbol by its unit (constants of the free algebra)."""

    def lift(label):
        if isinstance(label, (Const, Var)):
            return label
        if isinstance(label, str):
            if label in variables:
                return Var(label, variables.arity(label))
            return Const(unit(terminals, label), terminals.arity(label))
        if isinstance(label, SourcedHypergraph):
            return Const(label, label.arity)
        raise ArityMismatch(f"cannot lift label {label!r}")

    return PolynomialTerm(map_labels(body, lift), variables)


def eval_polynomial(t: PolynomialTerm, eta: Valuation, alg: AlgebraHandle) -> Any:
    """Substitute the valuation into the term and apply the algebra product."""
    for name, count in t.used_variables().items():
        if name not in eta:
            raise MissingVariable(f"valuation misses variable {name!r}")
        want = t.variables.arity(name)
        got = alg.element_arity(eta[name])
        if got != want:
            raise ArityMismatch(f"variable {name!r}: arity {want} != value arity {got}")

    def substitute(label):
        if isinstance(label, Var):
            return eta[label.name]
        return label.value

    return alg.product(map_labels(t.body, substitute))


def is_linear_unary(t: PolynomialTerm) -> bool:
    """True iff the term uses exactly one variable on exactly one hyperedge."""
    counts = t.used_variables()
    return len(counts) == 1 and sum(counts.values()) == 1


# ---------------------------------------------------------------------------
# Congruence checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivalencePartition:
    """Per-arity partitions of (sampled) algebra elements.

    ``blocks[n]`` is a sequence of blocks; blocks are disjoint and cover the
    elements of arity n that the partition talks about.
    """

    blocks: Mapping[int, tuple[tuple[Any, ...], ...]]
    _index: Mapping[int, dict[str, int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index: dict[int, dict[str, int]] = {}
        for n, blks in self.blocks.items():
            table: dict[str, int] = {}
            for bi, blk in enumerate(blks):
                for x in blk:
                    key = label_key(x)
                    if key in table:
                        raise ArityMismatch(f"element {x!r} appears in two blocks")
                    table[key] = bi
            index[n] = table
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_blocks(cls, blocks: Mapping[int, Iterable[Iterable[Any]]]) -> "EquivalencePartition":
        return cls({n: tuple(tuple(b) for b in blks) for n, blks in blocks.items()})

    def class_of(self, arity: int, x: Any) -> int:
        try:
            return self._index[arity][label_key(x)]
        except KeyError:
            raise MissingVariable(f"element {x!r} (arity {arity}) not covered by partition") from None

    def same(self, arity: int, x: Any, y: Any) -> bool:
        return self.class_of(arity, x) == self.class_of(arity, y)

    def elements(self, arity: int) -> list[Any]:
        return [x for blk in self.blocks.get(arity, ()) for x in blk]


@dataclass(frozen=True)
class CongruenceReport:
    compatible: bool
    checked: int
    counterexample: Optional[tuple] = None  # (term, eta1, eta2, out1, out2)

    def __bool__(self) -> bool:
        return self.compatible


def check_congruence(rel: EquivalencePartition, ops: Sequence[PolynomialTerm],
                     alg: AlgebraHandle, max_checks: int = 100000) -> CongruenceReport:
    """Test compatibility of a partition with a set of polynomial operations.

    For every operation and every pair of pointwise-equivalent valuations
    built from the partition's elements, the outputs must land in the same
    block.  Returns the first counterexample found, if any.
    """
    checked = 0
    for t in ops:
        names = sorted(t.used_variables())
        pools = []
        for name in names:
            n = t.variables.arity(name)
            pools.append([(x, rel.class_of(n, x)) for x in rel.elements(n)])
        out_arity = t.arity

        def valuations(i: int, eta1: dict, eta2: dict):
            nonlocal checked
            if i == len(names):
                y1 = eval_polynomial(t, eta1, alg)
                y2 = eval_polynomial(t, eta2, alg)
                checked += 1
                if not rel.same(out_arity, y1, y2):
                    return (t, dict(eta1), dict(eta2), y1, y2)
                return None
            for x1, c1 in pools[i]:
                for x2, c2 in pools[i]:
                    if c1 != c2:
                        continue
                    if checked >= max_checks:
                        return None
                    eta1[names[i]] = x1
                    eta2[names[i]] = x2
                    bad = valuations(i + 1, eta1, eta2)
                    if bad is not None:
                        return bad
            return None

        bad = valuations(0, {}, {})
        if bad is not None:
            return CongruenceReport(False, checked, bad)
    return CongruenceReport(True, checked)
