"""Seeded random instances and the monad-law suites for both monads.

Each suite checks the six axiom diagrams (functor composition and identity,
naturality of unit and flattening, associativity of flattening, and the two
unit laws) on randomly generated nested instances, up to isomorphism.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .hr import (SourcedHypergraph, flatten, is_isomorphic, map_labels,
                 relabel, unit, unit_label)
from .ranked import RankedAlphabet, RankedMap, make_alphabet
from . import vr


# ---------------------------------------------------------------------------
# Random generators
# ---------------------------------------------------------------------------


def random_alphabet(rng: random.Random, max_symbols: int = 3, max_arity: int = 2,
                    min_arity: int = 0, prefix: str = "a") -> RankedAlphabet:
    n = rng.randint(1, max_symbols)
    return make_alphabet([(f"{prefix}{i}", rng.randint(min_arity, max_arity))
                          for i in range(n)])


def random_rank_map(rng: random.Random, domain: RankedAlphabet,
                    prefix: str = "b") -> RankedMap:
    """A random arity-preserving map onto a fresh codomain."""
    arities = sorted({k for _, k in domain.symbols})
    codomain_syms = []
    for k in arities:
        for copy in range(rng.randint(1, 2)):
            codomain_syms.append((f"{prefix}{k}_{copy}", k))
    codomain = make_alphabet(codomain_syms)
    by_arity: dict[int, list[str]] = {}
    for name, k in codomain.symbols:
        by_arity.setdefault(k, []).append(name)
    mapping = {name: rng.choice(by_arity[k]) for name, k in domain.symbols}
    return RankedMap.from_dict(domain, codomain, mapping)


def random_graph(rng: random.Random, labels: list[tuple[object, int]], arity: int,
                 max_vertices: int = 5, max_edges: int = 3) -> SourcedHypergraph:
    """A random sourced hypergraph over (label, arity) pairs."""
    usable_min = max(arity, max((k for _, k in labels), default=0))
    nv = rng.randint(min(usable_min, max_vertices), max_vertices) if labels else \
        rng.randint(arity, max_vertices)
    nv = max(nv, arity)
    verts = list(range(1, nv + 1))
    edges = []
    if labels:
        for i in range(rng.randint(0, max_edges)):
            lab, k = rng.choice(labels)
            if k > nv:
                continue
            pins = tuple(rng.sample(verts, k))
            edges.append((i, lab, pins))
    return SourcedHypergraph.make(verts, edges, tuple(verts[:arity]))


def random_graph_over(rng: random.Random, alphabet: RankedAlphabet, arity: int,
                      max_vertices: int = 5, max_edges: int = 3) -> SourcedHypergraph:
    g = random_graph(rng, list(alphabet.symbols), arity, max_vertices, max_edges)
    return SourcedHypergraph.make(g.vertices, [(e.id, e.label, e.pins) for e in g.edges],
                                  g.sources, alphabet)


def random_nested(rng: random.Random, alphabet: RankedAlphabet, arity: int, depth: int,
                  max_vertices: int = 5, max_edges: int = 3) -> SourcedHypergraph:
    """An element of H^depth applied to the alphabet (depth >= 1 plain graph)."""
    if depth <= 1:
        return random_graph_over(rng, alphabet, arity, max_vertices, max_edges)
    skeleton = random_graph(rng, [(None, k) for k in range(3)], arity,
                            max_vertices, max_edges)
    edges = []
    for e in skeleton.edges:
        inner = random_nested(rng, alphabet, len(e.pins), depth - 1,
                              max_vertices, max_edges)
        edges.append((e.id, inner, e.pins))
    return SourcedHypergraph.make(skeleton.vertices, edges, skeleton.sources)


def random_vgraph(rng: random.Random, labels: list[tuple[object, int]], arity: int,
                  max_hv: int = 4, max_edges: int = 4) -> vr.VHypergraph:
    nhv = rng.randint(1, max_hv)
    hvs = []
    for i in range(nhv):
        lab, k = rng.choice(labels)
        hvs.append((i, lab, k))
    corners = [(i, c) for i, (_, _, k) in enumerate(hvs) for c in range(1, k + 1)]
    ports = {c: rng.randint(1, arity) for c in corners}
    edges = set()
    for _ in range(rng.randint(0, max_edges)):
        c, d = rng.choice(corners), rng.choice(corners)
        if c != d:
            edges.add((c, d))
    return vr.VHypergraph.make(hvs, edges, ports, arity)


def random_vgraph_over(rng, alphabet: RankedAlphabet, arity: int,
                       max_hv: int = 4, max_edges: int = 4) -> vr.VHypergraph:
    g = random_vgraph(rng, list(alphabet.symbols), arity, max_hv, max_edges)
    return vr.VHypergraph.make([(h.id, h.label, h.arity) for h in g.hypervertices],
                               g.edges, g.ports, g.arity, alphabet)


def random_v_nested(rng, alphabet: RankedAlphabet, arity: int, depth: int,
                    max_hv: int = 4, max_edges: int = 4) -> vr.VHypergraph:
    if depth <= 1:
        return random_vgraph_over(rng, alphabet, arity, max_hv, max_edges)
    skeleton = random_vgraph(rng, [(None, k) for k in (1, 2)], arity, max_hv, max_edges)
    hvs = []
    for h in skeleton.hypervertices:
        inner = random_v_nested(rng, alphabet, h.arity, depth - 1, max_hv, max_edges)
        hvs.append((h.id, inner, h.arity))
    return vr.VHypergraph.make(hvs, skeleton.edges, skeleton.ports, skeleton.arity)


# ---------------------------------------------------------------------------
# Law suites
# ---------------------------------------------------------------------------


@dataclass
class LawResult:
    name: str
    cases: int = 0
    failures: int = 0

    @property
    def ok(self) -> bool:
        return self.failures == 0


@dataclass
class LawSuiteReport:
    monad: str
    seed: int
    results: list[LawResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def to_text(self) -> str:
        lines = [f"monad-law suite [{self.monad}] seed={self.seed} ({self.elapsed:.1f}s)"]
        for r in self.results:
            status = "ok" if r.ok else f"FAILED ({r.failures}/{r.cases})"
            lines.append(f"  {r.name}: {r.cases} cases {status}")
        return "\n".join(lines)


def run_h_laws(seed: int, cases: int, max_vertices: int = 5, max_edges: int = 3) -> LawSuiteReport:
    rng = random.Random(seed)
    started = time.monotonic()
    results = {name: LawResult(name) for name in (
        "functor-composition", "functor-identity", "unit-naturality",
        "flatten-naturality", "flatten-associativity", "unit-laws")}

    def check(name: str, good: bool):
        results[name].cases += 1
        if not good:
            results[name].failures += 1

    for _ in range(cases):
        sigma = random_alphabet(rng)
        f = random_rank_map(rng, sigma, prefix="b")
        g_map = random_rank_map(rng, f.codomain, prefix="c")
        arity = rng.randint(0, 2)
        g1 = random_graph_over(rng, sigma, arity, max_vertices, max_edges)

        check("functor-composition",
              relabel(relabel(g1, f), g_map) == relabel(g1, f.compose(g_map)))
        check("functor-identity", relabel(g1, RankedMap.identity(sigma)) == g1)
        name = rng.choice(sigma.names())
        check("unit-naturality", relabel(unit(sigma, name), f) == unit(f.codomain, f(name)))

        g2 = random_nested(rng, sigma, arity, 2, max_vertices, max_edges)
        lhs = flatten(map_labels(g2, lambda inner: relabel(inner, f)))
        rhs = relabel(flatten(g2), f)
        check("flatten-naturality", is_isomorphic(lhs, rhs))

        g3 = random_nested(rng, sigma, arity, 3, min(max_vertices, 4), min(max_edges, 2))
        check("flatten-associativity",
              is_isomorphic(flatten(flatten(g3)), flatten(map_labels(g3, flatten))))

        left = flatten(unit_label(g1, g1.arity))
        right = flatten(map_labels(g1, lambda a: unit(sigma, a)))
        check("unit-laws", left == g1 and right == g1)

    report = LawSuiteReport("h", seed, list(results.values()))
    report.elapsed = time.monotonic() - started
    return report


def run_v_laws(seed: int, cases: int, max_hv: int = 4, max_edges: int = 4) -> LawSuiteReport:
    rng = random.Random(seed)
    started = time.monotonic()
    results = {name: LawResult(name) for name in (
        "functor-composition", "functor-identity", "unit-naturality",
        "flatten-naturality", "flatten-associativity", "unit-laws")}

    def check(name: str, good: bool):
        results[name].cases += 1
        if not good:
            results[name].failures += 1

    for _ in range(cases):
        sigma = random_alphabet(rng, min_arity=1, max_arity=2)
        f = random_rank_map(rng, sigma, prefix="b")
        g_map = random_rank_map(rng, f.codomain, prefix="c")
        arity = rng.randint(1, 2)
        g1 = random_vgraph_over(rng, sigma, arity, max_hv, max_edges)

        check("functor-composition",
              vr.v_relabel(vr.v_relabel(g1, f), g_map) == vr.v_relabel(g1, f.compose(g_map)))
        check("functor-identity", vr.v_relabel(g1, RankedMap.identity(sigma)) == g1)
        name = rng.choice(sigma.names())
        check("unit-naturality",
              vr.v_relabel(vr.v_unit(sigma, name), f) == vr.v_unit(f.codomain, f(name)))

        g2 = random_v_nested(rng, sigma, arity, 2, max_hv, max_edges)
        lhs = vr.v_flatten(vr.v_map_labels(g2, lambda inner: vr.v_relabel(inner, f)))
        rhs = vr.v_relabel(vr.v_flatten(g2), f)
        check("flatten-naturality", lhs == rhs)

        g3 = random_v_nested(rng, sigma, arity, 3, min(max_hv, 3), max_edges)
        check("flatten-associativity",
              vr.v_flatten(vr.v_flatten(g3)) == vr.v_flatten(vr.v_map_labels(g3, vr.v_flatten)))

        left = vr.v_flatten(vr.v_unit_label(g1, g1.arity))
        right = vr.v_flatten(vr.v_map_labels(g1, lambda a: vr.v_unit(sigma, a)))
        check("unit-laws", left == g1 and right == g1)

    report = LawSuiteReport("v", seed, list(results.values()))
    report.elapsed = time.monotonic() - started
    return report
