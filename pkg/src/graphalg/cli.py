"""Command-line front end.

Exit codes: 0 for success (and decisions that come out true), 1 for
decisions that come out false or failed property runs, 2 for errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import formats
from .algebra import Language, decide_star_free_profile, is_aperiodic
from .decomp import binarise, exact_treewidth, is_valid_decomposition, width
from .errors import GraphAlgError
from .formulas import parse_formula
from .grammar import enumerate_language, validate_grammar
from .hr import SourcedHypergraph, flatten
from .laws import run_h_laws, run_v_laws
from .mso import CmsoSignature, cmso_equiv, encode_h, encode_v, eval_cmso
from .poly import FreeHrAlgebra
from .ranked import make_alphabet
from .vr import cliquewidth_upper


def infer_alphabet(g: SourcedHypergraph):
    seen: dict[str, int] = {}
    for e in g.edges:
        if isinstance(e.label, str):
            k = seen.setdefault(e.label, len(e.pins))
            if k != len(e.pins):
                raise GraphAlgError(f"label {e.label!r} used at arities {k} and {len(e.pins)}")
        elif isinstance(e.label, SourcedHypergraph):
            for name, k in infer_alphabet(e.label).symbols:
                if seen.setdefault(name, k) != k:
                    raise GraphAlgError(f"label {name!r} used at two arities")
    return make_alphabet(sorted(seen.items()))


def infer_v_alphabet(g):
    seen: dict[str, int] = {}
    for hv in g.hypervertices:
        if seen.setdefault(str(hv.label), hv.arity) != hv.arity:
            raise GraphAlgError(f"label {hv.label!r} used at two arities")
    return make_alphabet(sorted(seen.items()))


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_graph(path: str, alphabet_path=None):
    alphabet = formats.parse_alphabet(_read(alphabet_path)) if alphabet_path else None
    g, names = formats.parse_graph_with_names(_read(path), alphabet)
    if alphabet is None and all(isinstance(e.label, str) for e in g.edges):
        inferred = infer_alphabet(g)
        g = SourcedHypergraph.make(g.vertices, [(e.id, e.label, e.pins) for e in g.edges],
                                   g.sources, inferred)
    return g, names


def _dot_out(directory: str, name: str, content: str):
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(content + "\n")
    return path


def cmd_grammar_enum(args) -> int:
    grammar = formats.parse_grammar(_read(args.file))
    report = validate_grammar(grammar)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not report.ok:
        for e in report.errors:
            print(f"error: {e}", file=sys.stderr)
        return 2
    language = enumerate_language(grammar, FreeHrAlgebra(grammar.terminals), args.bound)
    rows = []
    for i, g in enumerate(language):
        rows.append({"index": i, "vertices": g.n_vertices(), "edges": g.n_edges(),
                     "arity": g.arity, "digest": g.digest()[:12]})
        if args.dot:
            _dot_out(args.dot, f"yield{i}.dot", formats.graph_to_dot(g, f"yield{i}"))
    if args.json:
        print(json.dumps({"bound": args.bound, "count": len(language), "yields": rows},
                         indent=2, sort_keys=True))
    else:
        print(f"{len(language)} yields within bound {args.bound}")
        for row in rows:
            print(f"  [{row['index']}] vertices={row['vertices']} edges={row['edges']} "
                  f"digest={row['digest']}")
    return 0


def cmd_mso_eval(args) -> int:
    phi = parse_formula(_read(args.formula))
    if args.encoding == "h":
        g, _ = _load_graph(args.graph, args.alphabet)
        model = encode_h(g)
    else:
        alphabet = formats.parse_alphabet(_read(args.alphabet)) if args.alphabet else None
        vg = formats.parse_vgraph(_read(args.graph), alphabet)
        if vg.alphabet is None:
            vg = formats.parse_vgraph(_read(args.graph), infer_v_alphabet(vg))
        model = encode_v(vg)
    value = eval_cmso(phi, model)
    print("true" if value else "false")
    return 0 if value else 1


def cmd_mso_equiv(args) -> int:
    moduli = [int(m) for m in args.moduli.split(",") if m] if args.moduli else []
    sig = CmsoSignature.of(args.rank, moduli)
    if args.encoding == "h":
        g1, _ = _load_graph(args.g1, args.alphabet)
        g2, _ = _load_graph(args.g2, args.alphabet)
        shared = g1.alphabet.union(g2.alphabet) if args.alphabet is None else g1.alphabet
        m1, m2 = encode_h(g1, shared), encode_h(g2, shared)
    else:
        alphabet = formats.parse_alphabet(_read(args.alphabet)) if args.alphabet else None
        v1 = formats.parse_vgraph(_read(args.g1), alphabet)
        v2 = formats.parse_vgraph(_read(args.g2), alphabet)
        if alphabet is None:
            alphabet = infer_v_alphabet(v1).union(infer_v_alphabet(v2))
        m1, m2 = encode_v(v1, alphabet), encode_v(v2, alphabet)
    value = cmso_equiv(m1, m2, sig)
    print("equivalent" if value else "distinguishable")
    return 0 if value else 1


def cmd_tw(args) -> int:
    g, names = _load_graph(args.file, args.alphabet)
    if args.dec:
        name_map = names
        t = formats.parse_tdec(_read(args.dec), name_map)
        valid = is_valid_decomposition(g, t, sources_in_root=args.sourced)
        print(f"decomposition: {'valid' if valid else 'INVALID'}, width {width(t)}")
        if not valid:
            return 1
        return 0
    tw = exact_treewidth(g, sources_in_root=args.sourced)
    print(f"treewidth {tw}")
    return 0


def cmd_cw(args) -> int:
    vg = formats.parse_vgraph(_read(args.file))
    vg = formats.parse_vgraph(_read(args.file), infer_v_alphabet(vg))
    ok = cliquewidth_upper(vg, args.max_arity)
    print(f"cliquewidth <= {args.max_arity}: {'yes' if ok else 'no'}")
    return 0 if ok else 1


def cmd_algebra_aperiodic(args) -> int:
    alg, hom, acc, alphabet = formats.load_algebra(_read(args.file))
    report = is_aperiodic(alg, args.arity)
    if report.aperiodic:
        print(f"aperiodic up to arity {args.arity}")
        return 0
    n, s = report.witness
    print(f"not aperiodic: element {s[1]} at arity {n} never stabilises under oplus")
    return 1


def cmd_algebra_minimize(args) -> int:
    alg, hom, acc, alphabet = formats.load_algebra(_read(args.file))
    lang = Language(alphabet, lambda g: hom(g) in acc, (hom, acc))
    bound = args.arity if args.arity is not None else alg.arity_cap
    from .algebra import syntactic_quotient
    q = syntactic_quotient(lang, bound)
    for n in range(bound + 1):
        print(f"arity {n}: {len(alg.universe(n))} -> {len(q.algebra.universe(n))} elements")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(formats.serialize_algebra(q.algebra, q.hom, q.accepting) + "\n")
        print(f"wrote {args.out}")
    return 0


def cmd_monad_check(args) -> int:
    run = run_h_laws if args.monad == "h" else run_v_laws
    report = run(seed=args.seed, cases=args.cases)
    print(report.to_text())
    return 0 if report.ok else 1


def cmd_flatten(args) -> int:
    g, _ = _load_graph(args.file, None)
    out = flatten(g)
    text = formats.print_graph(out)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.dot:
        _dot_out(args.dot, "flattened.dot", formats.graph_to_dot(out, "flattened"))
    return 0


def cmd_binarise(args) -> int:
    g, _ = _load_graph(args.file, args.alphabet)
    out = binarise(g)
    text = formats.print_graph(out)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.dot:
        _dot_out(args.dot, "binarised.dot", formats.graph_to_dot(out, "binarised"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphalg",
                                     description="graph monads, grammars, logic, algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grammar", help="grammar operations")
    gsub = g.add_subparsers(dest="subcommand", required=True)
    ge = gsub.add_parser("enum", help="enumerate the language up to a derivation bound")
    ge.add_argument("file")
    ge.add_argument("--bound", type=int, required=True)
    ge.add_argument("--dot", metavar="DIR")
    ge.add_argument("--json", action="store_true")
    ge.set_defaults(fn=cmd_grammar_enum)

    m = sub.add_parser("mso", help="counting-MSO model checking")
    msub = m.add_subparsers(dest="subcommand", required=True)
    me = msub.add_parser("eval", help="evaluate a sentence on a graph's model")
    me.add_argument("graph")
    me.add_argument("formula")
    me.add_argument("--encoding", choices=("h", "v"), default="h")
    me.add_argument("--alphabet")
    me.set_defaults(fn=cmd_mso_eval)
    mq = msub.add_parser("equiv", help="counting-MSO equivalence of two graphs")
    mq.add_argument("g1")
    mq.add_argument("g2")
    mq.add_argument("--rank", type=int, required=True)
    mq.add_argument("--moduli", default="")
    mq.add_argument("--encoding", choices=("h", "v"), default="h")
    mq.add_argument("--alphabet")
    mq.set_defaults(fn=cmd_mso_equiv)

    t = sub.add_parser("tw", help="exact treewidth / decomposition check")
    t.add_argument("file")
    t.add_argument("--dec", help="validate this decomposition instead")
    t.add_argument("--sourced", action="store_true",
                   help="require sources in the root bag")
    t.add_argument("--alphabet")
    t.set_defaults(fn=cmd_tw)

    c = sub.add_parser("cw", help="cliquewidth upper-bound decision")
    c.add_argument("file")
    c.add_argument("--max-arity", type=int, required=True)
    c.set_defaults(fn=cmd_cw)

    a = sub.add_parser("algebra", help="finite-algebra tooling")
    asub = a.add_subparsers(dest="subcommand", required=True)
    ap = asub.add_parser("aperiodic", help="test aperiodicity up to an arity")
    ap.add_argument("file")
    ap.add_argument("--arity", type=int, required=True)
    ap.set_defaults(fn=cmd_algebra_aperiodic)
    am = asub.add_parser("minimize", help="syntactic quotient of the algebra's language")
    am.add_argument("file")
    am.add_argument("--arity", type=int)
    am.add_argument("--out")
    am.set_defaults(fn=cmd_algebra_minimize)

    mc = sub.add_parser("monad-check", help="run the seeded monad-law suite")
    mc.add_argument("--monad", choices=("h", "v"), default="h")
    mc.add_argument("--seed", type=int, default=7)
    mc.add_argument("--cases", type=int, default=200)
    mc.set_defaults(fn=cmd_monad_check)

    f = sub.add_parser("flatten", help="flatten a nested graph file")
    f.add_argument("file")
    f.add_argument("--out")
    f.add_argument("--dot", metavar="DIR")
    f.set_defaults(fn=cmd_flatten)

    b = sub.add_parser("binarise", help="binarise a hypergraph")
    b.add_argument("file")
    b.add_argument("--out")
    b.add_argument("--dot", metavar="DIR")
    b.add_argument("--alphabet")
    b.set_defaults(fn=cmd_binarise)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GraphAlgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
