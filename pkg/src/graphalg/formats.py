"""File formats (s-expressions) for every value the CLI exchanges, plus DOT
export.  Printing is canonical: reparsing a printed file gives an equal
value, and printing is a fixpoint on files it produced.
"""

from __future__ import annotations

import itertools
from typing import Any, Mapping, Optional

from . import sexpr
from .algebra import FiniteAlgebra, Homomorphism, Language, oplus_in_algebra
from .errors import ParseError, RangeError
from .decomp import TreeDecomposition
from .grammar import Grammar, Rule
from .hr import SourcedHypergraph, empty_graph, unit
from .poly import Const, PolynomialTerm, Var
from .ranked import RankedAlphabet, make_alphabet
from .vr import VHypergraph


def _expect(cond: bool, message: str):
    if not cond:
        raise ParseError(message)


def _section(items: list, head: str, required: bool = True):
    for item in items:
        if isinstance(item, list) and item and item[0] == head:
            return item[1:]
    _expect(not required, f"missing ({head} ...) section")
    return None


# -- alphabets -----------------------------------------------------------------


def parse_alphabet(text: str) -> RankedAlphabet:
    expr = sexpr.loads(text)
    return alphabet_from_sexpr(expr)


def alphabet_from_sexpr(expr) -> RankedAlphabet:
    _expect(isinstance(expr, list) and expr and expr[0] == "alphabet", "expected (alphabet ...)")
    entries = []
    for item in expr[1:]:
        _expect(isinstance(item, list) and len(item) == 2, "expected (NAME ARITY)")
        entries.append((str(item[0]), int(item[1])))
    return make_alphabet(entries)


def alphabet_to_sexpr(a: RankedAlphabet):
    return ["alphabet"] + [[name, k] for name, k in a.symbols]


def print_alphabet(a: RankedAlphabet) -> str:
    return sexpr.dumps(alphabet_to_sexpr(a))


# -- graphs ----------------------------------------------------------------------


def parse_graph(text: str, alphabet: Optional[RankedAlphabet] = None) -> SourcedHypergraph:
    g, _ = parse_graph_with_names(text, alphabet)
    return g


def parse_graph_with_names(text: str, alphabet: Optional[RankedAlphabet] = None):
    expr = sexpr.loads(text)
    return graph_from_sexpr(expr, alphabet)


def graph_from_sexpr(expr, alphabet: Optional[RankedAlphabet] = None,
                     label_parser=None):
    """Returns (graph, vertex-name -> id map).  Labels are symbols, nested
    (graph ...) forms, or whatever ``label_parser`` produces."""
    _expect(isinstance(expr, list) and expr and expr[0] == "graph", "expected (graph ...)")
    items = expr[1:]
    arity_field = _section(items, "arity", required=False)
    vnames = _section(items, "vertices", required=True)
    snames = _section(items, "sources", required=True)
    edge_forms = _section(items, "edges", required=False) or []
    name_map = {}
    for name in vnames:
        name = str(name)
        _expect(name not in name_map, f"duplicate vertex {name!r}")
        name_map[name] = len(name_map) + 1
    edges = []
    eid = 0
    for form in edge_forms:
        _expect(isinstance(form, list) and len(form) >= 2, "expected (ID LABEL v...)")
        raw_label = form[1]
        if label_parser is not None:
            label = label_parser(raw_label)
        elif isinstance(raw_label, list):
            label, _ = graph_from_sexpr(raw_label, alphabet, label_parser)
        else:
            label = str(raw_label)
        pins = []
        for v in form[2:]:
            _expect(str(v) in name_map, f"edge {form[0]!r} uses unknown vertex {v!r}")
            pins.append(name_map[str(v)])
        edges.append((eid, label, tuple(pins)))
        eid += 1
    sources = []
    for v in snames:
        _expect(str(v) in name_map, f"source {v!r} is not a vertex")
        sources.append(name_map[str(v)])
    g = SourcedHypergraph.make(name_map.values(), edges, sources, alphabet)
    if arity_field is not None:
        _expect(int(arity_field[0]) == g.arity,
                f"declared arity {arity_field[0]} != {g.arity} sources")
    return g, name_map


def graph_to_sexpr(g: SourcedHypergraph, label_printer=None):
    form = g.canonical_form
    vname = {v: f"v{i + 1}" for i, v in enumerate(form.vertex_order)}
    eorder = {eid: i for i, eid in enumerate(form.edge_order)}
    out = ["graph", ["arity", g.arity],
           ["vertices"] + [vname[v] for v in form.vertex_order],
           ["sources"] + [vname[v] for v in g.sources]]
    edges = []
    for e in sorted(g.edges, key=lambda e: eorder[e.id]):
        if label_printer is not None:
            label = label_printer(e.label)
        elif isinstance(e.label, SourcedHypergraph):
            label = graph_to_sexpr(e.label)
        else:
            label = str(e.label)
        edges.append([f"e{eorder[e.id] + 1}", label] + [vname[v] for v in e.pins])
    out.append(["edges"] + edges)
    return out


def print_graph(g: SourcedHypergraph) -> str:
    return sexpr.dumps(graph_to_sexpr(g), indent=True)


# -- polynomial terms -------------------------------------------------------------


def term_from_sexpr(expr, terminals: RankedAlphabet, variables: RankedAlphabet,
                    alphabet_for_consts: Optional[RankedAlphabet] = None) -> PolynomialTerm:
    """Terms are graphs whose labels are (const SYMBOL), (const (graph ...)),
    (var NAME), or bare symbols classified by the two alphabets."""
    consts_alphabet = alphabet_for_consts or terminals

    def parse_label(raw):
        if isinstance(raw, list) and raw and raw[0] == "const":
            _expect(len(raw) == 2, "expected (const SYMBOL) or (const (graph ...))")
            inner = raw[1]
            if isinstance(inner, list):
                value, _ = graph_from_sexpr(inner, consts_alphabet)
            else:
                value = unit(consts_alphabet, str(inner))
            return Const(value, value.arity)
        if isinstance(raw, list) and raw and raw[0] == "var":
            _expect(len(raw) == 2, "expected (var NAME)")
            name = str(raw[1])
            return Var(name, variables.arity(name))
        name = str(raw)
        if name in variables:
            return Var(name, variables.arity(name))
        value = unit(consts_alphabet, name)
        return Const(value, value.arity)

    body, _ = graph_from_sexpr(expr, None, label_parser=parse_label)
    return PolynomialTerm(body, variables)


def parse_term(text: str, terminals: RankedAlphabet, variables: RankedAlphabet) -> PolynomialTerm:
    return term_from_sexpr(sexpr.loads(text), terminals, variables)


def term_to_sexpr(t: PolynomialTerm):
    def print_label(label):
        if isinstance(label, Var):
            return ["var", label.name]
        return ["const", graph_to_sexpr(label.value)]

    return graph_to_sexpr(t.body, label_printer=print_label)


def print_term(t: PolynomialTerm) -> str:
    return sexpr.dumps(term_to_sexpr(t), indent=True)


# -- grammars ----------------------------------------------------------------------


def parse_grammar(text: str) -> Grammar:
    expr = sexpr.loads(text)
    _expect(isinstance(expr, list) and expr and expr[0] == "grammar", "expected (grammar ...)")
    items = expr[1:]
    terminals = make_alphabet([(str(n), int(k)) for n, k in _section(items, "terminals")])
    nonterminals = make_alphabet([(str(n), int(k)) for n, k in _section(items, "nonterminals")])
    start = str(_section(items, "start")[0])
    rules = []
    for item in items:
        if isinstance(item, list) and item and item[0] == "rule":
            _expect(len(item) == 3, "expected (rule NONTERMINAL TERM)")
            lhs = str(item[1])
            rhs = term_from_sexpr(item[2], terminals, nonterminals)
            rules.append(Rule(lhs, rhs))
    return Grammar(terminals, nonterminals, start, tuple(rules))


def grammar_to_sexpr(g: Grammar):
    out = ["grammar",
           ["terminals"] + [[n, k] for n, k in g.terminals.symbols],
           ["nonterminals"] + [[n, k] for n, k in g.nonterminals.symbols],
           ["start", g.start]]
    for rule in g.rules:
        out.append(["rule", rule.lhs, term_to_sexpr(rule.rhs)])
    return out


def print_grammar(g: Grammar) -> str:
    return sexpr.dumps(grammar_to_sexpr(g), indent=True)


# -- tree decompositions --------------------------------------------------------------


def parse_tdec(text: str, name_map: Optional[Mapping[str, int]] = None) -> TreeDecomposition:
    """Vertex names in bags are resolved through ``name_map`` (from the graph
    file the decomposition belongs to) when given."""
    expr = sexpr.loads(text)
    _expect(isinstance(expr, list) and expr and expr[0] == "tdec", "expected (tdec ...)")
    _expect(len(expr) == 2, "expected a single root (node ...)")
    bags: dict[int, frozenset] = {}
    children: dict[int, tuple] = {}
    ids: dict[str, int] = {}

    def intern(name) -> int:
        name = str(name)
        if name not in ids:
            ids[name] = len(ids)
        return ids[name]

    def resolve(v):
        if name_map is not None:
            _expect(str(v) in name_map, f"bag vertex {v!r} not in the graph")
            return name_map[str(v)]
        return v

    def walk(form) -> int:
        _expect(isinstance(form, list) and form and form[0] == "node", "expected (node ...)")
        _expect(len(form) >= 3, "expected (node ID (bag ...) ...)")
        nid = intern(form[1])
        _expect(nid not in bags, f"duplicate node {form[1]!r}")
        bag_form = form[2]
        _expect(isinstance(bag_form, list) and bag_form and bag_form[0] == "bag",
                "expected (bag v...)")
        bags[nid] = frozenset(resolve(v) for v in bag_form[1:])
        kids = []
        for item in form[3:]:
            _expect(isinstance(item, list) and item and item[0] == "children",
                    "expected (children (node ...) ...)")
            for sub in item[1:]:
                kids.append(walk(sub))
        children[nid] = tuple(kids)
        return nid

    root = walk(expr[1])
    return TreeDecomposition(root, bags, children)


def tdec_to_sexpr(t: TreeDecomposition, names: Optional[Mapping[int, str]] = None):
    def vname(v):
        return names[v] if names is not None else v

    def walk(x: int):
        form = ["node", f"n{x}", ["bag"] + sorted((vname(v) for v in t.bags[x]), key=str)]
        kids = t.children.get(x, ())
        if kids:
            form.append(["children"] + [walk(c) for c in kids])
        return form

    return ["tdec", walk(t.root)]


def print_tdec(t: TreeDecomposition, names: Optional[Mapping[int, str]] = None) -> str:
    return sexpr.dumps(tdec_to_sexpr(t, names), indent=True)


# -- V-hypergraphs -----------------------------------------------------------------


def parse_vgraph(text: str, alphabet: Optional[RankedAlphabet] = None) -> VHypergraph:
    expr = sexpr.loads(text)
    _expect(isinstance(expr, list) and expr and expr[0] == "vgraph", "expected (vgraph ...)")
    items = expr[1:]
    arity = int(_section(items, "arity")[0])
    hv_forms = _section(items, "hypervertices")
    port_forms = _section(items, "ports")
    edge_forms = _section(items, "edges", required=False) or []
    ids: dict[str, int] = {}
    hvs = []
    for form in hv_forms:
        _expect(isinstance(form, list) and len(form) == 3, "expected (ID LABEL ARITY)")
        name = str(form[0])
        _expect(name not in ids, f"duplicate hypervertex {name!r}")
        ids[name] = len(ids)
        hvs.append((ids[name], str(form[1]), int(form[2])))

    def corner(form):
        _expect(isinstance(form, list) and len(form) == 2, "expected (ID IDX)")
        _expect(str(form[0]) in ids, f"unknown hypervertex {form[0]!r}")
        return (ids[str(form[0])], int(form[1]))

    ports = {}
    for form in port_forms:
        _expect(isinstance(form, list) and len(form) == 3, "expected (ID IDX PORT)")
        ports[(ids[str(form[0])], int(form[1]))] = int(form[2])
    edges = [(corner(form[0]), corner(form[1])) for form in edge_forms]
    return VHypergraph.make(hvs, edges, ports, arity, alphabet)


def vgraph_to_sexpr(g: VHypergraph):
    order = {hv.id: i for i, hv in enumerate(g.hypervertices)}
    name = {hv.id: f"u{order[hv.id] + 1}" for hv in g.hypervertices}
    out = ["vgraph", ["arity", g.arity],
           ["hypervertices"] + [[name[hv.id], str(hv.label), hv.arity]
                                for hv in g.hypervertices],
           ["ports"] + [[name[v], i, p] for (v, i), p in
                        sorted(g.ports.items(), key=lambda kv: (order[kv[0][0]], kv[0][1]))]]
    edges = sorted(g.edges, key=lambda e: (order[e[0][0]], e[0][1], order[e[1][0]], e[1][1]))
    out.append(["edges"] + [[[name[v], i], [name[w], j]] for (v, i), (w, j) in edges])
    return out


def print_vgraph(g: VHypergraph) -> str:
    return sexpr.dumps(vgraph_to_sexpr(g), indent=True)


# -- computable algebras --------------------------------------------------------------
#
# An algebra file carries per-arity universes and generator tables for the
# hr-operations: parallel composition, adding a source, forgetting the last
# source, and adjacent source swaps, plus the unit images of the alphabet
# symbols.  Every product decomposes into these generators, so the tables
# determine the product on any element-labelled graph whose vertex count
# stays within the tabulated arities.


def _tables_product(g: SourcedHypergraph, cap: int, empty_el, oplus, add_source,
                    forget_last, swap):
    n = g.arity
    src = set(g.sources)
    verts = list(g.sources) + sorted(v for v in g.vertices if v not in src)
    total = len(verts)
    if total > cap:
        raise RangeError(f"product needs arity {total}, tables stop at {cap}")
    pos = {v: p for p, v in enumerate(verts, start=1)}

    acc = empty_el
    for _ in range(total):
        acc = add_source[acc[0]][acc]
    for e in g.edges:
        x = e.label
        k = x[0]
        while x[0] < total:
            x = add_source[x[0]][x]
        targets = [pos[v] for v in e.pins]
        rest = [p for p in range(1, total + 1) if p not in set(targets)]
        goal = [0] * total  # goal[p-1] = original source index that position p must hold
        for j, p in enumerate(targets, start=1):
            goal[p - 1] = j
        for j, p in enumerate(rest, start=k + 1):
            goal[p - 1] = j
        arr = list(range(1, total + 1))
        for p in range(total):
            q = arr.index(goal[p], p)
            while q > p:
                x = swap[(total, q)][x]
                arr[q - 1], arr[q] = arr[q], arr[q - 1]
                q -= 1
        acc = oplus[total][(acc, x)]
    for _ in range(total - n):
        acc = forget_last[acc[0]][acc]
    return acc


def serialize_algebra(alg: FiniteAlgebra, hom: Homomorphism, accepting: frozenset,
                      name: Optional[str] = None) -> str:
    """Write universes and generator tables computed from the algebra's own
    product oracle."""
    cap = alg.arity_cap
    names: dict[int, dict[str, str]] = {}
    from .hr import label_key
    for n in range(cap + 1):
        names[n] = {label_key(x): f"e{n}_{i}" for i, x in enumerate(alg.universe(n))}

    def nm(x) -> str:
        return names[x[0]][label_key(x)]

    out = ["algebra", ["name", name or alg.name], ["arity-cap", cap],
           ["alphabet"] + [[s, k] for s, k in hom.alphabet.symbols]]
    for n in range(cap + 1):
        out.append(["universe", n] + [nm(x) for x in alg.universe(n)])
    out.append(["empty", nm(alg.product(empty_graph(0)))])
    for s, k in hom.alphabet.symbols:
        if k <= cap:
            out.append(["unit", s, nm(hom.images[s])])
    for n in range(cap + 1):
        table = ["oplus", n]
        for x in alg.universe(n):
            for y in alg.universe(n):
                table.append([nm(x), nm(y), nm(oplus_in_algebra(alg, x, y))])
        out.append(table)
    for n in range(cap):
        table = ["add-source", n]
        for x in alg.universe(n):
            verts = tuple(range(1, n + 2))
            lifted = alg.product(SourcedHypergraph.make(verts, [(0, x, verts[:n])], verts))
            table.append([nm(x), nm(lifted)])
        out.append(table)
    for n in range(1, cap + 1):
        table = ["forget-last", n]
        for x in alg.universe(n):
            verts = tuple(range(1, n + 1))
            y = alg.product(SourcedHypergraph.make(verts, [(0, x, verts)], verts[:n - 1]))
            table.append([nm(x), nm(y)])
        out.append(table)
    for n in range(2, cap + 1):
        for i in range(1, n):
            table = ["swap", n, i]
            for x in alg.universe(n):
                verts = tuple(range(1, n + 1))
                swapped = list(verts)
                swapped[i - 1], swapped[i] = swapped[i], swapped[i - 1]
                y = alg.product(SourcedHypergraph.make(verts, [(0, x, verts)], swapped))
                table.append([nm(x), nm(y)])
            out.append(table)
    out.append(["accepting"] + [nm(x) for x in sorted(accepting, key=nm)])
    return sexpr.dumps(out, indent=True)


def load_algebra(text: str):
    """Returns (FiniteAlgebra, Homomorphism, accepting set, alphabet)."""
    expr = sexpr.loads(text)
    _expect(isinstance(expr, list) and expr and expr[0] == "algebra", "expected (algebra ...)")
    items = expr[1:]
    name = str(_section(items, "name")[0])
    cap = int(_section(items, "arity-cap")[0])
    alphabet = make_alphabet([(str(n), int(k)) for n, k in _section(items, "alphabet")])

    universes: dict[int, tuple] = {}
    by_name: dict[str, tuple] = {}
    for item in items:
        if isinstance(item, list) and item and item[0] == "universe":
            n = int(item[1])
            elems = tuple((n, str(e)) for e in item[2:])
            universes[n] = elems
            for x in elems:
                _expect(x[1] not in by_name or by_name[x[1]] == x,
                        f"element name {x[1]!r} reused across arities")
                by_name[x[1]] = x
    for n in range(cap + 1):
        _expect(n in universes, f"missing universe for arity {n}")

    def el(n, raw) -> tuple:
        x = (n, str(raw))
        _expect(x in set(universes[n]), f"unknown element {raw!r} at arity {n}")
        return x

    empty_el = el(0, _section(items, "empty")[0])
    oplus: dict[int, dict] = {n: {} for n in range(cap + 1)}
    add_source: dict[int, dict] = {n: {} for n in range(cap)}
    forget_last: dict[int, dict] = {n: {} for n in range(1, cap + 1)}
    swap: dict[tuple, dict] = {}
    images = {}
    for item in items:
        if not (isinstance(item, list) and item):
            continue
        head = item[0]
        if head == "oplus":
            n = int(item[1])
            for a, b, c in item[2:]:
                oplus[n][(el(n, a), el(n, b))] = el(n, c)
        elif head == "add-source":
            n = int(item[1])
            for a, b in item[2:]:
                add_source[n][el(n, a)] = el(n + 1, b)
        elif head == "forget-last":
            n = int(item[1])
            for a, b in item[2:]:
                forget_last[n][el(n, a)] = el(n - 1, b)
        elif head == "swap":
            n, i = int(item[1]), int(item[2])
            swap.setdefault((n, i), {})
            for a, b in item[3:]:
                swap[(n, i)][el(n, a)] = el(n, b)
        elif head == "unit":
            sym = str(item[1])
            images[sym] = el(alphabet.arity(sym), item[2])
    accepting_form = _section(items, "accepting", required=False) or []
    accepting = frozenset(el(0, a) for a in accepting_form)

    def product(g: SourcedHypergraph):
        return _tables_product(g, cap, empty_el, oplus, add_source, forget_last, swap)

    alg = FiniteAlgebra(name, cap, universes, product)
    hom = Homomorphism(alphabet, alg, images)
    return alg, hom, accepting, alphabet


# -- DOT export -------------------------------------------------------------------


def graph_to_dot(g: SourcedHypergraph, title: str = "G") -> str:
    form = g.canonical_form
    vname = {v: f"v{i + 1}" for i, v in enumerate(form.vertex_order)}
    src_index = {v: i for i, v in enumerate(g.sources, start=1)}
    lines = [f'digraph "{title}" {{']
    for v in form.vertex_order:
        label = vname[v] + (f" ({src_index[v]})" if v in src_index else "")
        shape = "doublecircle" if v in src_index else "circle"
        lines.append(f'  {vname[v]} [label="{label}", shape={shape}];')
    for i, e in enumerate(g.edges):
        if len(e.pins) == 2:
            a, b = e.pins
            lines.append(f'  {vname[a]} -> {vname[b]} [label="{e.label}"];')
        else:
            box = f"h{i}"
            lines.append(f'  {box} [label="{e.label}", shape=box];')
            for pos, v in enumerate(e.pins, start=1):
                lines.append(f'  {box} -> {vname[v]} [label="{pos}", style=dashed];')
    lines.append("}")
    return "\n".join(lines)


def vgraph_to_dot(g: VHypergraph, title: str = "G") -> str:
    name = {hv.id: f"u{i + 1}" for i, hv in enumerate(g.hypervertices)}
    lines = [f'digraph "{title}" {{', "  compound=true;"]
    for hv in g.hypervertices:
        lines.append(f"  subgraph cluster_{name[hv.id]} {{")
        lines.append(f'    label="{name[hv.id]}:{hv.label}";')
        for i in range(1, hv.arity + 1):
            port = g.ports[(hv.id, i)]
            lines.append(f'    {name[hv.id]}_{i} [label="{i} (p{port})", shape=circle];')
        lines.append("  }")
    for (v, i), (w, j) in sorted(g.edges):
        lines.append(f"  {name[v]}_{i} -> {name[w]}_{j};")
    lines.append("}")
    return "\n".join(lines)


def tdec_to_dot(t: TreeDecomposition, title: str = "T") -> str:
    lines = [f'digraph "{title}" {{']
    for x in t.nodes():
        bag = ",".join(str(v) for v in sorted(t.bags[x], key=repr))
        lines.append(f'  n{x} [label="{{{bag}}}", shape=box];')
    for x, kids in t.children.items():
        for c in kids:
            lines.append(f"  n{x} -> n{c};")
    lines.append("}")
    return "\n".join(lines)
