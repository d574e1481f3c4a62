"""Ranked sets and arity-preserving maps.

A ranked alphabet is an ordered list of symbols, each with a fixed arity.
Symbol identity is by name; the declared order is the deterministic
enumeration order used everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DuplicateName, UnknownSymbol


@dataclass(frozen=True)
class RankedAlphabet:
    """Ordered ranked set of symbols; immutable and thread-safe."""

    symbols: tuple[tuple[str, int], ...]
    _arity: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_arity", dict(self.symbols))

    def __contains__(self, name: str) -> bool:
        return name in self._arity

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def arity(self, name: str) -> int:
        try:
            return self._arity[name]
        except KeyError:
            raise UnknownSymbol(f"symbol {name!r} not in alphabet") from None

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)

    def max_arity(self) -> int:
        return max((k for _, k in self.symbols), default=0)

    def restrict(self, names: Iterable[str]) -> "RankedAlphabet":
        keep = set(names)
        return RankedAlphabet(tuple(s for s in self.symbols if s[0] in keep))

    def union(self, other: "RankedAlphabet") -> "RankedAlphabet":
        merged = list(self.symbols)
        for name, k in other.symbols:
            if name in self._arity:
                if self._arity[name] != k:
                    raise DuplicateName(f"symbol {name!r} declared with arities {self._arity[name]} and {k}")
            else:
                merged.append((name, k))
        return RankedAlphabet(tuple(merged))


def make_alphabet(entries: Sequence[tuple[str, int]]) -> RankedAlphabet:
    """Build an alphabet, rejecting duplicate names and negative arities."""
    seen = set()
    for name, k in entries:
        if name in seen:
            raise DuplicateName(f"duplicate symbol {name!r}")
        if k < 0:
            raise ValueError(f"negative arity for {name!r}")
        seen.add(name)
    return RankedAlphabet(tuple((str(name), int(k)) for name, k in entries))


@dataclass(frozen=True)
class RankedMap:
    """A function between ranked alphabets, intended to preserve arities."""

    domain: RankedAlphabet
    codomain: RankedAlphabet
    mapping: tuple[tuple[str, str], ...]

    @classmethod
    def from_dict(cls, domain: RankedAlphabet, codomain: RankedAlphabet, mapping: Mapping[str, str]) -> "RankedMap":
        return cls(domain, codomain, tuple(sorted(mapping.items())))

    @classmethod
    def identity(cls, alphabet: RankedAlphabet) -> "RankedMap":
        return cls(alphabet, alphabet, tuple((n, n) for n in alphabet.names()))

    def as_dict(self) -> dict[str, str]:
        return dict(self.mapping)

    def __call__(self, name: str) -> str:
        for src, dst in self.mapping:
            if src == name:
                return dst
        raise UnknownSymbol(f"symbol {name!r} not in map domain")

    def compose(self, then: "RankedMap") -> "RankedMap":
        """The map ``g o f`` where ``f`` is self and ``g`` is ``then``."""
        return RankedMap(self.domain, then.codomain,
                         tuple((src, then(dst)) for src, dst in self.mapping))


def check_rank_preserving(m: RankedMap) -> bool:
    """True iff ``m`` is total on its domain and never changes arity."""
    table = m.as_dict()
    for name, k in m.domain.symbols:
        dst = table.get(name)
        if dst is None or dst not in m.codomain:
            return False
        if m.codomain.arity(dst) != k:
            return False
    return True
