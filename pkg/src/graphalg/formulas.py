"""Counting-MSO formulas: AST, s-expression syntax, and evaluation.

The syntax is the extended one: besides relation atoms, equality, membership
and quantifiers, there are second-order atoms for set inclusion, singleton
tests, modulo counting, and set constants ``(set-of x phi)`` denoting the
elements satisfying a quantifier-free formula.

First-order terms are variables or constant names; which is which is decided
by scoping (symbols not bound by a quantifier are constants).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator, Mapping, Union

from . import sexpr
from .errors import ParseError, RangeError, TooLarge, VocabularyMismatch

# -- terms -------------------------------------------------------------------


@dataclass(frozen=True)
class FoVar:
    name: str


@dataclass(frozen=True)
class ConstName:
    name: str


@dataclass(frozen=True)
class SoVar:
    name: str


@dataclass(frozen=True)
class SetOf:
    """The set of elements satisfying a quantifier-free one-variable formula."""

    var: str
    body: "Formula"

    def __post_init__(self):
        if quantifier_rank(self.body) != 0:
            raise RangeError("set-of body must be quantifier-free")


Term = Union[FoVar, ConstName]
SetTerm = Union[SoVar, SetOf]


# -- formulas ------------------------------------------------------------------


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Member:
    element: Term
    of: SetTerm


@dataclass(frozen=True)
class Subset:
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class Singleton:
    of: SetTerm


@dataclass(frozen=True)
class ModCount:
    of: SetTerm
    residue: int
    modulus: int

    def __post_init__(self):
        if not (self.modulus >= 1 and 0 <= self.residue < self.modulus):
            raise RangeError(f"need 0 <= k < m, got k={self.residue} m={self.modulus}")


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class ExistsFo:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForallFo:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsSo:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForallSo:
    var: str
    body: "Formula"


Formula = Union[TrueF, FalseF, Rel, Eq, Member, Subset, Singleton, ModCount,
                Not, And, Or, ExistsFo, ForallFo, ExistsSo, ForallSo]

TRUE = TrueF()
FALSE = FalseF()


def quantifier_rank(phi: Formula) -> int:
    """Nesting depth of quantifiers; first- and second-order count alike."""
    if isinstance(phi, (TrueF, FalseF, Rel, Eq, Member, Subset, Singleton, ModCount)):
        return 0
    if isinstance(phi, Not):
        return quantifier_rank(phi.body)
    if isinstance(phi, (And, Or)):
        return max((quantifier_rank(p) for p in phi.parts), default=0)
    if isinstance(phi, (ExistsFo, ForallFo, ExistsSo, ForallSo)):
        return 1 + quantifier_rank(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def subformula_moduli(phi: Formula) -> set[int]:
    out: set[int] = set()

    def walk(f):
        if isinstance(f, ModCount):
            out.add(f.modulus)
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, (And, Or)):
            for p in f.parts:
                walk(p)
        elif isinstance(f, (ExistsFo, ForallFo, ExistsSo, ForallSo)):
            walk(f.body)
        elif isinstance(f, (Member, Subset, Singleton)):
            for s in _set_terms(f):
                if isinstance(s, SetOf):
                    walk(s.body)

    walk(phi)
    return out


def _set_terms(phi) -> Iterator[SetTerm]:
    if isinstance(phi, Member):
        yield phi.of
    elif isinstance(phi, Subset):
        yield phi.left
        yield phi.right
    elif isinstance(phi, (Singleton, ModCount)):
        yield phi.of


def formula_vocabulary(phi: Formula) -> tuple[set[tuple[str, int]], set[str]]:
    """(relation name, arity) pairs and constant names used by a formula."""
    rels: set[tuple[str, int]] = set()
    consts: set[str] = set()

    def term(t):
        if isinstance(t, ConstName):
            consts.add(t.name)

    def walk(f):
        if isinstance(f, Rel):
            rels.add((f.name, len(f.args)))
            for a in f.args:
                term(a)
        elif isinstance(f, Eq):
            term(f.left)
            term(f.right)
        elif isinstance(f, Member):
            term(f.element)
            walk_set(f.of)
        elif isinstance(f, (Subset, Singleton, ModCount)):
            for s in _set_terms(f):
                walk_set(s)
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, (And, Or)):
            for p in f.parts:
                walk(p)
        elif isinstance(f, (ExistsFo, ForallFo, ExistsSo, ForallSo)):
            walk(f.body)

    def walk_set(s):
        if isinstance(s, SetOf):
            walk(s.body)

    walk(phi)
    return rels, consts


# -- evaluation ---------------------------------------------------------------

SO_UNIVERSE_LIMIT = 20


def eval_formula(phi: Formula, model, fo_env: Mapping[str, Any] = None,
                 so_env: Mapping[str, Any] = None, so_limit: int = SO_UNIVERSE_LIMIT) -> bool:
    """Evaluate a formula on a model (see `graphalg.mso.Model`).

    Second-order quantifiers enumerate all subsets of the universe, so they
    are refused on universes larger than ``so_limit``.
    """
    fo_env = dict(fo_env or {})
    so_env = dict(so_env or {})
    universe = sorted(model.universe, key=repr)
    if _has_so_quantifier(phi) and len(universe) > so_limit:
        raise TooLarge(f"universe of size {len(universe)} too large for set quantification")

    def term_value(t, env):
        if isinstance(t, FoVar):
            if t.name not in env:
                raise VocabularyMismatch(f"unbound first-order variable {t.name!r}")
            return env[t.name]
        if t.name not in model.constants:
            raise VocabularyMismatch(f"constant {t.name!r} not in model")
        return model.constants[t.name]

    def set_value(s, fenv, senv) -> frozenset:
        if isinstance(s, SoVar):
            if s.name not in senv:
                raise VocabularyMismatch(f"unbound set variable {s.name!r}")
            return senv[s.name]
        return frozenset(u for u in universe if ev(s.body, {**fenv, s.var: u}, senv))

    def ev(f, fenv, senv) -> bool:
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, Rel):
            if f.name not in model.relations:
                raise VocabularyMismatch(f"relation {f.name!r} not in model")
            tup = tuple(term_value(a, fenv) for a in f.args)
            return tup in model.relations[f.name]
        if isinstance(f, Eq):
            return term_value(f.left, fenv) == term_value(f.right, fenv)
        if isinstance(f, Member):
            return term_value(f.element, fenv) in set_value(f.of, fenv, senv)
        if isinstance(f, Subset):
            return set_value(f.left, fenv, senv) <= set_value(f.right, fenv, senv)
        if isinstance(f, Singleton):
            return len(set_value(f.of, fenv, senv)) == 1
        if isinstance(f, ModCount):
            return len(set_value(f.of, fenv, senv)) % f.modulus == f.residue
        if isinstance(f, Not):
            return not ev(f.body, fenv, senv)
        if isinstance(f, And):
            return all(ev(p, fenv, senv) for p in f.parts)
        if isinstance(f, Or):
            return any(ev(p, fenv, senv) for p in f.parts)
        if isinstance(f, ExistsFo):
            return any(ev(f.body, {**fenv, f.var: u}, senv) for u in universe)
        if isinstance(f, ForallFo):
            return all(ev(f.body, {**fenv, f.var: u}, senv) for u in universe)
        if isinstance(f, (ExistsSo, ForallSo)):
            subsets = _all_subsets(universe)
            if isinstance(f, ExistsSo):
                return any(ev(f.body, fenv, {**senv, f.var: s}) for s in subsets)
            return all(ev(f.body, fenv, {**senv, f.var: s}) for s in subsets)
        raise TypeError(f"not a formula: {f!r}")

    return ev(phi, fo_env, so_env)


def _all_subsets(universe) -> Iterator[frozenset]:
    n = len(universe)
    for mask in range(1 << n):
        yield frozenset(universe[i] for i in range(n) if mask >> i & 1)


def _has_so_quantifier(phi) -> bool:
    if isinstance(phi, (ExistsSo, ForallSo)):
        return True
    if isinstance(phi, Not):
        return _has_so_quantifier(phi.body)
    if isinstance(phi, (And, Or)):
        return any(_has_so_quantifier(p) for p in phi.parts)
    if isinstance(phi, (ExistsFo, ForallFo)):
        return _has_so_quantifier(phi.body)
    return False


# -- s-expression surface syntax ------------------------------------------------

_KEYWORDS = {"and", "or", "not", "implies", "=", "in", "sub", "sing", "mod",
             "exists", "forall", "exists-set", "forall-set", "set-of", "true", "false"}


def parse_formula(text: str) -> Formula:
    return formula_from_sexpr(sexpr.loads(text))


def formula_from_sexpr(expr) -> Formula:
    return _from_sexpr(expr, set(), set())


def _term_from(expr, fo_scope) -> Term:
    if not isinstance(expr, str):
        raise ParseError(f"expected a term, got {expr!r}")
    return FoVar(expr) if expr in fo_scope else ConstName(expr)


def _set_from(expr, fo_scope, so_scope) -> SetTerm:
    if isinstance(expr, str):
        if expr in so_scope:
            return SoVar(expr)
        raise ParseError(f"unbound set variable {expr!r}")
    if isinstance(expr, list) and expr and expr[0] == "set-of":
        if len(expr) != 3 or not isinstance(expr[1], str):
            raise ParseError("expected (set-of VAR FORMULA)")
        body = _from_sexpr(expr[2], fo_scope | {expr[1]}, so_scope)
        return SetOf(expr[1], body)
    raise ParseError(f"expected a set term, got {expr!r}")


def _from_sexpr(expr, fo_scope: set, so_scope: set) -> Formula:
    if expr == "true":
        return TRUE
    if expr == "false":
        return FALSE
    if not isinstance(expr, list) or not expr:
        raise ParseError(f"expected a formula, got {expr!r}")
    head = expr[0]
    args = expr[1:]
    if head == "and":
        return And(tuple(_from_sexpr(a, fo_scope, so_scope) for a in args))
    if head == "or":
        return Or(tuple(_from_sexpr(a, fo_scope, so_scope) for a in args))
    if head == "not":
        (a,) = args
        return Not(_from_sexpr(a, fo_scope, so_scope))
    if head == "implies":
        a, b = args
        return Or((Not(_from_sexpr(a, fo_scope, so_scope)), _from_sexpr(b, fo_scope, so_scope)))
    if head == "=":
        a, b = args
        return Eq(_term_from(a, fo_scope), _term_from(b, fo_scope))
    if head == "in":
        a, b = args
        return Member(_term_from(a, fo_scope), _set_from(b, fo_scope, so_scope))
    if head == "sub":
        a, b = args
        return Subset(_set_from(a, fo_scope, so_scope), _set_from(b, fo_scope, so_scope))
    if head == "sing":
        (a,) = args
        return Singleton(_set_from(a, fo_scope, so_scope))
    if head == "mod":
        a, k, m = args
        return ModCount(_set_from(a, fo_scope, so_scope), int(k), int(m))
    if head in ("exists", "forall"):
        var, body = args
        sub = _from_sexpr(body, fo_scope | {var}, so_scope)
        return ExistsFo(var, sub) if head == "exists" else ForallFo(var, sub)
    if head in ("exists-set", "forall-set"):
        var, body = args
        sub = _from_sexpr(body, fo_scope, so_scope | {var})
        return ExistsSo(var, sub) if head == "exists-set" else ForallSo(var, sub)
    if isinstance(head, str) and head not in _KEYWORDS:
        return Rel(head, tuple(_term_from(a, fo_scope) for a in args))
    raise ParseError(f"cannot parse formula head {head!r}")


def formula_to_sexpr(phi: Formula):
    if isinstance(phi, TrueF):
        return "true"
    if isinstance(phi, FalseF):
        return "false"
    if isinstance(phi, Rel):
        return [phi.name] + [_term_sexpr(a) for a in phi.args]
    if isinstance(phi, Eq):
        return ["=", _term_sexpr(phi.left), _term_sexpr(phi.right)]
    if isinstance(phi, Member):
        return ["in", _term_sexpr(phi.element), _set_sexpr(phi.of)]
    if isinstance(phi, Subset):
        return ["sub", _set_sexpr(phi.left), _set_sexpr(phi.right)]
    if isinstance(phi, Singleton):
        return ["sing", _set_sexpr(phi.of)]
    if isinstance(phi, ModCount):
        return ["mod", _set_sexpr(phi.of), phi.residue, phi.modulus]
    if isinstance(phi, Not):
        return ["not", formula_to_sexpr(phi.body)]
    if isinstance(phi, And):
        return ["and"] + [formula_to_sexpr(p) for p in phi.parts]
    if isinstance(phi, Or):
        return ["or"] + [formula_to_sexpr(p) for p in phi.parts]
    if isinstance(phi, ExistsFo):
        return ["exists", phi.var, formula_to_sexpr(phi.body)]
    if isinstance(phi, ForallFo):
        return ["forall", phi.var, formula_to_sexpr(phi.body)]
    if isinstance(phi, ExistsSo):
        return ["exists-set", phi.var, formula_to_sexpr(phi.body)]
    if isinstance(phi, ForallSo):
        return ["forall-set", phi.var, formula_to_sexpr(phi.body)]
    raise TypeError(f"not a formula: {phi!r}")


def _term_sexpr(t: Term):
    return t.name


def _set_sexpr(s: SetTerm):
    if isinstance(s, SoVar):
        return s.name
    return ["set-of", s.var, formula_to_sexpr(s.body)]


def print_formula(phi: Formula) -> str:
    return sexpr.dumps(formula_to_sexpr(phi))
