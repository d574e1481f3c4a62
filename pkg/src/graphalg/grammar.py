"""Grammars over an algebra: rules are polynomial operations, derivations
substitute one value per variable (repeated occurrences of a variable in a
rule body receive the same value), and the language is the set of yields of
start-rooted derivations, deduplicated up to isomorphism.

The enumeration bound counts derivation nodes with each occurrence of a
variable expanded: a rule node costs one plus the (expanded) sizes of its
children, counted once per occurrence in the body.  This is the natural
proxy for the size of the derived object and keeps enumeration finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

from .errors import InvalidDerivation, RangeError
from .hr import label_key
from .poly import PolynomialTerm, eval_polynomial
from .ranked import RankedAlphabet


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: PolynomialTerm


@dataclass(frozen=True)
class Grammar:
    terminals: RankedAlphabet
    nonterminals: RankedAlphabet
    start: str
    rules: tuple[Rule, ...]


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[str, ...]
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_grammar(g: Grammar) -> ValidationReport:
    errors: list[str] = []
    warnings: list[str] = []
    if g.start not in g.nonterminals:
        errors.append(f"start nonterminal {g.start!r} is not declared")
    for idx, rule in enumerate(g.rules):
        if rule.lhs not in g.nonterminals:
            errors.append(f"rule {idx}: unknown nonterminal {rule.lhs!r}")
            continue
        want = g.nonterminals.arity(rule.lhs)
        if rule.rhs.arity != want:
            errors.append(f"rule {idx}: rhs arity {rule.rhs.arity} != arity {want} of {rule.lhs!r}")
        for name, _ in rule.rhs.variables.symbols:
            if name in rule.rhs.used_variables():
                if name not in g.nonterminals:
                    errors.append(f"rule {idx}: rhs uses unknown nonterminal {name!r}")
                elif g.nonterminals.arity(name) != rule.rhs.variables.arity(name):
                    errors.append(f"rule {idx}: nonterminal {name!r} used at wrong arity")
    by_lhs: dict[str, list[Rule]] = {}
    for rule in g.rules:
        by_lhs.setdefault(rule.lhs, []).append(rule)
    if g.start in g.nonterminals and not by_lhs.get(g.start):
        warnings.append(f"no rule for start nonterminal {g.start!r}: the language is empty")
    reachable = {g.start}
    frontier = [g.start]
    while frontier:
        x = frontier.pop()
        for rule in by_lhs.get(x, ()):
            for name in rule.rhs.used_variables():
                if name not in reachable:
                    reachable.add(name)
                    frontier.append(name)
    for name, _ in g.nonterminals.symbols:
        if name not in reachable:
            warnings.append(f"nonterminal {name!r} is unreachable from the start")
    return ValidationReport(tuple(errors), tuple(warnings))


@dataclass(frozen=True)
class DerivationTree:
    """A rule index plus one child derivation per variable used by the rule."""

    rule: int
    children: Mapping[str, "DerivationTree"] = field(default_factory=dict)


def yield_of(d: DerivationTree, g: Grammar, alg) -> Any:
    """Bottom-up evaluation of a derivation's value in the algebra."""
    if not 0 <= d.rule < len(g.rules):
        raise InvalidDerivation(f"no rule {d.rule}")
    rule = g.rules[d.rule]
    used = rule.rhs.used_variables()
    if set(d.children) != set(used):
        raise InvalidDerivation(
            f"rule {d.rule} needs children for {sorted(used)}, got {sorted(d.children)}")
    eta = {}
    for name, child in d.children.items():
        child_rule = g.rules[child.rule]
        if child_rule.lhs != name:
            raise InvalidDerivation(
                f"child for {name!r} derives {child_rule.lhs!r}")
        eta[name] = yield_of(child, g, alg)
    return eval_polynomial(rule.rhs, eta, alg)


def derivation_size(d: DerivationTree, g: Grammar) -> int:
    """Expanded node count: variable occurrences each carry their own copy."""
    rule = g.rules[d.rule]
    total = 1
    for name, mult in rule.rhs.used_variables().items():
        total += mult * derivation_size(d.children[name], g)
    return total


def nonterminal_of(d: DerivationTree, g: Grammar) -> str:
    return g.rules[d.rule].lhs


def _element_key(x: Any) -> str:
    digest = getattr(x, "digest", None)
    if callable(digest):
        return digest()
    return label_key(x)


def enumerate_language(g: Grammar, alg, bound: int) -> list[Any]:
    """All yields of start-rooted derivations of expanded size <= bound,
    deduplicated up to isomorphism, in a deterministic order.

    Least-fixpoint computation: per nonterminal, a pool of known yields with
    the minimal size at which each was derived; rules fire over pools until
    nothing new is produced within the bound.
    """
    if bound < 1:
        raise RangeError("bound must be >= 1")
    report = validate_grammar(g)
    if not report.ok:
        raise RangeError("invalid grammar: " + "; ".join(report.errors))

    pools: dict[str, dict[str, tuple[Any, int]]] = {name: {} for name, _ in g.nonterminals.symbols}
    fired: dict[tuple[int, tuple[str, ...]], int] = {}

    changed = True
    while changed:
        changed = False
        for ridx, rule in enumerate(g.rules):
            used = rule.rhs.used_variables()
            names = sorted(used)
            choices = [list(pools[name].items()) for name in names]
            if any(not c for c in choices):
                continue

            def run(i: int, eta: dict, keys: list, size: int):
                nonlocal changed
                if size > bound:
                    return
                if i == len(names):
                    sig = (ridx, tuple(keys))
                    if sig in fired and fired[sig] <= size:
                        return
                    fired[sig] = size
                    value = eval_polynomial(rule.rhs, eta, alg)
                    key = _element_key(value)
                    pool = pools[rule.lhs]
                    known = pool.get(key)
                    if known is None or size < known[1]:
                        pool[key] = (value, size)
                        changed = True
                    return
                for key, (value, vsize) in choices[i]:
                    eta[names[i]] = value
                    keys.append(key)
                    run(i + 1, eta, keys, size + used[names[i]] * vsize)
                    keys.pop()

            run(0, {}, [], 1)

    out = sorted(pools[g.start].values(), key=lambda pair: (pair[1], _element_key(pair[0])))
    return [value for value, _ in out]
