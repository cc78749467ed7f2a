"""The line-oriented definition-file language.

A document is a sequence of declarations and tasks, one per line; blank
lines and lines starting with # are ignored.  Expressions use the scalar
grammar inline.  Statements:

    opaque <name> <arity> [eval <builtin>] : <drule1> ; ... ; <drulek>
    chart <name> : <coord> <coord> ...
    scalar <name> = <expr>
    map <name> : <chart> -> <chart> = <expr> ; <expr> ; ...
    vvform <name> on <chart> degree <k> : (<in>,..|<out>) = <expr> ; ...
    algebroid <name> on <chart> rank <r> : rho(<coord>|<idx>) = <expr> ;
        c(<idx>,<idx>|<idx>) = <expr> ; ...
    bundlemap <name> : <chart> rank <r> : (<idx>|<coord>) = <expr> ; ...
    groupoid <name> : G=<chart> M=<chart> s=<map> t=<map> u=<map> i=<map>
        G2=<chart> p1=<map> p2=<map> m=<map> ul=<map> ur=<map> il=<map>
        ir=<map> mi=<map> [G3=<chart> q12=<map> q23=<map>]
    task <kind> <arg> [<arg>]

Task kinds: torsion, algebroid-check, theorem1, theorem2, lemma,
multiplicative, catalog.  Frame indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from .algebroids import AlgebroidData, BundleMapU
from .groupoids import GroupoidPresentation
from .scalars import (
    ExprError,
    Scalar,
    ZERO,
    parse as parse_expr,
    register_opaque,
    to_text,
)
from .tensors import Chart, SmoothMap, VVForm

TASK_KINDS = (
    "torsion",
    "algebroid-check",
    "theorem1",
    "theorem2",
    "lemma",
    "multiplicative",
    "catalog",
)


class DocumentError(ValueError):
    def __init__(self, message: str, line: int, col: int | None = None):
        place = f"line {line}" + (f", col {col}" if col is not None else "")
        super().__init__(f"{place}: {message}")
        self.line = line
        self.col = col


@dataclass
class Task:
    kind: str
    args: tuple[str, ...]
    line: int

    def label(self) -> str:
        return " ".join((self.kind,) + self.args)


@dataclass
class Document:
    opaques: list[str] = field(default_factory=list)
    charts: dict[str, Chart] = field(default_factory=dict)
    scalars: dict[str, Scalar] = field(default_factory=dict)
    maps: dict[str, SmoothMap] = field(default_factory=dict)
    vvforms: dict[str, tuple[str, VVForm]] = field(default_factory=dict)
    algebroids: dict[str, AlgebroidData] = field(default_factory=dict)
    bundlemaps: dict[str, tuple[str, str, BundleMapU]] = field(default_factory=dict)
    groupoids: dict[str, GroupoidPresentation] = field(default_factory=dict)
    tasks: list[Task] = field(default_factory=list)


def _expr(text: str, line: int, env: dict) -> Scalar:
    try:
        e = parse_expr(text.strip())
    except ExprError as err:
        raise DocumentError(str(err), line) from err
    subs = {}
    for sym in e.atoms(sp.Symbol):
        if sym.name in env:
            subs[sym] = env[sym.name]
    return e.xreplace(subs) if subs else e


def _split_decl(rest: str, sep: str, line: int, what: str) -> tuple[str, str]:
    if sep not in rest:
        raise DocumentError(f"{what}: expected {sep!r}", line)
    head, tail = rest.split(sep, 1)
    return head.strip(), tail.strip()


def parse_document(text: str, filename: str = "<document>") -> Document:
    doc = Document()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            keyword, rest = (line.split(None, 1) + [""])[:2]
        except ValueError:
            keyword, rest = line, ""
        handler = _HANDLERS.get(keyword)
        if handler is None:
            raise DocumentError(f"unknown statement {keyword!r}", lineno)
        handler(doc, rest, lineno)
    return doc


def _handle_opaque(doc: Document, rest: str, line: int) -> None:
    head, rules_text = _split_decl(rest, ":", line, "opaque")
    parts = head.split()
    if len(parts) < 2:
        raise DocumentError("opaque needs a name and an arity", line)
    name = parts[0]
    try:
        arity = int(parts[1])
    except ValueError:
        raise DocumentError(f"bad arity {parts[1]!r}", line) from None
    evaluator = None
    if len(parts) >= 4 and parts[2] == "eval":
        import mpmath

        builtin = parts[3]
        evaluator = getattr(mpmath, builtin, None)
        if evaluator is None:
            raise DocumentError(f"unknown evaluator {builtin!r}", line)
    rules = [r.strip() for r in rules_text.split(";")]
    if len(rules) != arity:
        raise DocumentError(f"opaque {name}: need {arity} derivative rules", line)
    try:
        register_opaque(name, arity, rules, evaluator)
    except (ExprError, ValueError) as err:
        raise DocumentError(f"opaque {name}: {err}", line) from err
    doc.opaques.append(name)


def _handle_chart(doc: Document, rest: str, line: int) -> None:
    name, coords = _split_decl(rest, ":", line, "chart")
    if name in doc.charts:
        raise DocumentError(f"chart {name!r} already declared", line)
    names = coords.split()
    if not names:
        raise DocumentError("chart needs at least one coordinate", line)
    try:
        doc.charts[name] = Chart.make(name, names)
    except ValueError as err:
        raise DocumentError(str(err), line) from err


def _handle_scalar(doc: Document, rest: str, line: int) -> None:
    name, expr_text = _split_decl(rest, "=", line, "scalar")
    doc.scalars[name.strip()] = _expr(expr_text, line, doc.scalars)


def _handle_map(doc: Document, rest: str, line: int) -> None:
    head, body = _split_decl(rest, "=", line, "map")
    name, charts = _split_decl(head, ":", line, "map")
    src_name, tgt_name = _split_decl(charts, "->", line, "map charts")
    src = _lookup(doc.charts, src_name, "chart", line)
    tgt = _lookup(doc.charts, tgt_name, "chart", line)
    comps = [_expr(c, line, doc.scalars) for c in body.split(";")]
    if len(comps) != tgt.dim:
        raise DocumentError(
            f"map {name}: {len(comps)} components for {tgt.dim}-dimensional target", line
        )
    doc.maps[name] = SmoothMap(name, src, tgt, comps)


def _handle_vvform(doc: Document, rest: str, line: int) -> None:
    head, body = _split_decl(rest, ":", line, "vvform")
    parts = head.split()
    if len(parts) != 5 or parts[1] != "on" or parts[3] != "degree":
        raise DocumentError("vvform syntax: vvform <name> on <chart> degree <k> : ...", line)
    name, chart_name, k_text = parts[0], parts[2], parts[4]
    chart = _lookup(doc.charts, chart_name, "chart", line)
    try:
        k = int(k_text)
    except ValueError:
        raise DocumentError(f"bad degree {k_text!r}", line) from None
    table = {}
    for piece in body.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        key, expr_text = _split_decl(piece, "=", line, "vvform entry")
        if not (key.startswith("(") and ")" in key):
            raise DocumentError(f"vvform entry needs (inputs|output), got {key!r}", line)
        inner = key[1 : key.index(")")]
        ins_text, out_text = _split_decl(inner, "|", line, "vvform entry")
        ins = [c.strip() for c in ins_text.split(",") if c.strip()]
        if len(ins) != k:
            raise DocumentError(f"vvform {name}: entry {key} has {len(ins)} inputs, degree is {k}", line)
        try:
            idx = tuple(chart.index(c) for c in ins)
            out = chart.index(out_text.strip())
        except ValueError as err:
            raise DocumentError(f"vvform {name}: unknown coordinate in {key}", line) from err
        if sorted(idx) != list(idx) or len(set(idx)) != len(idx):
            raise DocumentError(f"vvform {name}: inputs must be strictly increasing", line)
        table[(idx, out)] = _expr(expr_text, line, doc.scalars)
    doc.vvforms[name] = (chart_name, VVForm(chart, k, table))


def _handle_algebroid(doc: Document, rest: str, line: int) -> None:
    head, body = _split_decl(rest, ":", line, "algebroid")
    parts = head.split()
    if len(parts) != 5 or parts[1] != "on" or parts[3] != "rank":
        raise DocumentError("algebroid syntax: algebroid <name> on <chart> rank <r> : ...", line)
    name, chart_name, r_text = parts[0], parts[2], parts[4]
    chart = _lookup(doc.charts, chart_name, "chart", line)
    try:
        r = int(r_text)
    except ValueError:
        raise DocumentError(f"bad rank {r_text!r}", line) from None
    rho = [[ZERO] * r for _ in range(chart.dim)]
    c: dict[tuple[int, int], list[Scalar]] = {}
    for piece in body.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        key, expr_text = _split_decl(piece, "=", line, "algebroid entry")
        value = _expr(expr_text, line, doc.scalars)
        if key.startswith("rho(") and key.endswith(")"):
            coord, idx = _split_decl(key[4:-1], "|", line, "anchor entry")
            try:
                i = chart.index(coord.strip())
            except ValueError:
                raise DocumentError(f"unknown coordinate {coord!r}", line) from None
            al = _frame_index(idx, r, line)
            rho[i][al] = value
        elif key.startswith("c(") and key.endswith(")"):
            pair, g_text = _split_decl(key[2:-1], "|", line, "structure entry")
            a_text, b_text = _split_decl(pair, ",", line, "structure entry")
            al = _frame_index(a_text, r, line)
            be = _frame_index(b_text, r, line)
            ga = _frame_index(g_text, r, line)
            if not al < be:
                raise DocumentError("structure functions are declared for alpha < beta", line)
            c.setdefault((al, be), [ZERO] * r)[ga] = value
        else:
            raise DocumentError(f"algebroid entry must be rho(..) or c(..), got {key!r}", line)
    doc.algebroids[name] = AlgebroidData(
        name, chart, r, rho, {k: tuple(v) for k, v in c.items()}
    )


def _frame_index(text: str, r: int, line: int) -> int:
    try:
        val = int(text.strip())
    except ValueError:
        raise DocumentError(f"bad frame index {text!r}", line) from None
    if not 1 <= val <= r:
        raise DocumentError(f"frame index {val} out of range 1..{r}", line)
    return val - 1


def _handle_bundlemap(doc: Document, rest: str, line: int) -> None:
    head, body = _split_decl(rest, ":", line, "bundlemap")
    name = head.strip()
    shape_part, entries = _split_decl(body, ":", line, "bundlemap")
    parts = shape_part.split()
    if len(parts) != 3 or parts[1] != "rank":
        raise DocumentError("bundlemap syntax: bundlemap <name> : <chart> rank <r> : ...", line)
    chart_name, r_text = parts[0], parts[2]
    chart = _lookup(doc.charts, chart_name, "chart", line)
    try:
        r = int(r_text)
    except ValueError:
        raise DocumentError(f"bad rank {r_text!r}", line) from None
    matrix = [[ZERO] * chart.dim for _ in range(r)]
    for piece in entries.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        key, expr_text = _split_decl(piece, "=", line, "bundlemap entry")
        if not (key.startswith("(") and key.endswith(")")):
            raise DocumentError(f"bundlemap entry needs (idx|coord), got {key!r}", line)
        idx_text, coord = _split_decl(key[1:-1], "|", line, "bundlemap entry")
        al = _frame_index(idx_text, r, line)
        try:
            i = chart.index(coord.strip())
        except ValueError:
            raise DocumentError(f"unknown coordinate {coord!r}", line) from None
        matrix[al][i] = _expr(expr_text, line, doc.scalars)
    doc.bundlemaps[name] = (chart_name, r, BundleMapU.make(matrix))


_GROUPOID_KEYS = ("G", "M", "s", "t", "u", "i", "G2", "p1", "p2", "m",
                  "ul", "ur", "il", "ir", "mi", "G3", "q12", "q23")


def _handle_groupoid(doc: Document, rest: str, line: int) -> None:
    name, body = _split_decl(rest, ":", line, "groupoid")
    fields: dict[str, str] = {}
    for piece in body.split():
        if "=" not in piece:
            raise DocumentError(f"groupoid field must be key=value, got {piece!r}", line)
        key, value = piece.split("=", 1)
        if key not in _GROUPOID_KEYS:
            raise DocumentError(f"unknown groupoid field {key!r}", line)
        fields[key] = value
    required = [k for k in _GROUPOID_KEYS if k not in ("G3", "q12", "q23")]
    missing = [k for k in required if k not in fields]
    if missing:
        raise DocumentError(f"groupoid {name}: missing fields {', '.join(missing)}", line)

    def chart_of(key):
        return _lookup(doc.charts, fields[key], "chart", line)

    def map_of(key):
        return _lookup(doc.maps, fields[key], "map", line)

    kwargs = dict(
        name=name,
        G=chart_of("G"),
        M=chart_of("M"),
        s=map_of("s"),
        t=map_of("t"),
        u=map_of("u"),
        i=map_of("i"),
        G2=chart_of("G2"),
        p1=map_of("p1"),
        p2=map_of("p2"),
        m=map_of("m"),
        unit_left=map_of("ul"),
        unit_right=map_of("ur"),
        inv_left=map_of("il"),
        inv_right=map_of("ir"),
        mi_pair=map_of("mi"),
    )
    if "G3" in fields:
        for key in ("q12", "q23"):
            if key not in fields:
                raise DocumentError(f"groupoid {name}: G3 requires {key}", line)
        kwargs.update(G3=chart_of("G3"), q12=map_of("q12"), q23=map_of("q23"))
    try:
        doc.groupoids[name] = GroupoidPresentation(**kwargs)
    except ValueError as err:
        raise DocumentError(str(err), line) from err


_TASK_ARITY = {
    "torsion": 1,
    "algebroid-check": 1,
    "theorem1": 2,
    "theorem2": 2,
    "lemma": 2,
    "multiplicative": 2,
    "catalog": 1,
}


def _handle_task(doc: Document, rest: str, line: int) -> None:
    parts = rest.split()
    if not parts:
        raise DocumentError("task needs a kind", line)
    kind = parts[0]
    if kind not in TASK_KINDS:
        raise DocumentError(f"unknown task kind {kind!r}", line)
    args = tuple(parts[1:])
    if len(args) != _TASK_ARITY[kind]:
        raise DocumentError(
            f"task {kind} takes {_TASK_ARITY[kind]} argument(s), got {len(args)}", line
        )
    # resolve references now so bad documents fail at parse time
    if kind == "torsion":
        _lookup(doc.vvforms, args[0], "vvform", line)
    elif kind == "algebroid-check":
        _lookup(doc.algebroids, args[0], "algebroid", line)
    elif kind == "theorem1":
        _lookup(doc.algebroids, args[0], "algebroid", line)
        _lookup(doc.bundlemaps, args[1], "bundlemap", line)
    elif kind in ("theorem2", "lemma"):
        _lookup(doc.groupoids, args[0], "groupoid", line)
        _lookup(doc.bundlemaps, args[1], "bundlemap", line)
    elif kind == "multiplicative":
        _lookup(doc.groupoids, args[0], "groupoid", line)
        _lookup(doc.vvforms, args[1], "vvform", line)
    doc.tasks.append(Task(kind, args, line))


def _lookup(table: dict, name: str, what: str, line: int):
    try:
        return table[name]
    except KeyError:
        raise DocumentError(f"undeclared {what} {name!r}", line) from None


_HANDLERS = {
    "opaque": _handle_opaque,
    "chart": _handle_chart,
    "scalar": _handle_scalar,
    "map": _handle_map,
    "vvform": _handle_vvform,
    "algebroid": _handle_algebroid,
    "bundlemap": _handle_bundlemap,
    "groupoid": _handle_groupoid,
    "task": _handle_task,
}


# ---------------------------------------------------------------------------
# serialization (used for catalog round trips)


def chart_decl(chart: Chart) -> str:
    return f"chart {chart.name} : " + " ".join(c.name for c in chart.coords)


def map_decl(f: SmoothMap, name: str | None = None) -> str:
    comps = " ; ".join(to_text(c) for c in f.components)
    return f"map {name or f.name} : {f.source.name} -> {f.target.name} = {comps}"


def vvform_decl(name: str, chart: Chart, T: VVForm) -> str:
    entries = []
    for (idx, out), c in sorted(T.table.items()):
        ins = ",".join(chart.coords[i].name for i in idx)
        entries.append(f"({ins}|{chart.coords[out].name}) = {to_text(c)}")
    body = " ; ".join(entries) if entries else f"(|{chart.coords[0].name}) = 0"
    if T.degree != 0 and not entries:
        ins = ",".join(chart.coords[i].name for i in range(T.degree))
        body = f"({ins}|{chart.coords[0].name}) = 0"
    return f"vvform {name} on {chart.name} degree {T.degree} : {body}"


def algebroid_decl(A: AlgebroidData) -> str:
    entries = []
    for i in range(A.base.dim):
        for al in range(A.rank):
            if A.rho[i][al] != 0:
                entries.append(f"rho({A.base.coords[i].name}|{al+1}) = {to_text(A.rho[i][al])}")
    for (al, be), comps in sorted(A.c.items()):
        for ga, c in enumerate(comps):
            if c != 0:
                entries.append(f"c({al+1},{be+1}|{ga+1}) = {to_text(c)}")
    body = " ; ".join(entries) if entries else f"rho({A.base.coords[0].name}|1) = 0"
    return f"algebroid {A.name} on {A.base.name} rank {A.rank} : {body}"


def bundlemap_decl(name: str, chart: Chart, U: BundleMapU) -> str:
    entries = []
    for al, row in enumerate(U.matrix):
        for i, c in enumerate(row):
            if c != 0:
                entries.append(f"({al+1}|{chart.coords[i].name}) = {to_text(c)}")
    body = " ; ".join(entries) if entries else f"(1|{chart.coords[0].name}) = 0"
    return f"bundlemap {name} : {chart.name} rank {U.rank_rows} : {body}"


def entry_document(entry) -> str:
    """Serialize a catalog entry to definition-file text with its natural
    task; reparsing yields structurally identical objects."""
    from .scalars import OpaqueApplied

    lines: list[str] = [f"# catalog entry {entry.name}"]
    needs_exp = False
    if entry.presentation is not None:
        for f in (entry.presentation.s, entry.presentation.t, entry.presentation.i,
                  entry.presentation.m, entry.presentation.p1, entry.presentation.mi_pair):
            for c in f.components:
                if sp.sympify(c).atoms(OpaqueApplied):
                    needs_exp = True
    if needs_exp:
        lines.append("opaque exp 1 eval exp : exp($1)")
    if entry.presentation is not None:
        P = entry.presentation
        lines.extend(groupoid_decls(P))
        lines.append(bundlemap_decl("U", P.M, entry.bundle_map))
        lines.append(f"task theorem2 {P.name} U")
    elif entry.operator is not None:
        chart = entry.operator.chart
        lines.append(chart_decl(chart))
        lines.append(vvform_decl("N", chart, entry.operator))
        lines.append("task torsion N")
    return "\n".join(lines) + "\n"


def groupoid_decls(P: GroupoidPresentation) -> list[str]:
    lines = [chart_decl(P.M), chart_decl(P.G), chart_decl(P.G2)]
    if P.G3 is not None:
        lines.append(chart_decl(P.G3))
    named = [
        ("s", P.s), ("t", P.t), ("u", P.u), ("i", P.i),
        ("p1", P.p1), ("p2", P.p2), ("m", P.m),
        ("ul", P.unit_left), ("ur", P.unit_right),
        ("il", P.inv_left), ("ir", P.inv_right), ("mi", P.mi_pair),
    ]
    if P.q12 is not None and P.q23 is not None:
        named += [("q12", P.q12), ("q23", P.q23)]
    prefix = f"{P.name}_"
    for nm, f in named:
        lines.append(map_decl(f, prefix + nm))
    fields = [
        f"G={P.G.name}", f"M={P.M.name}",
        f"s={prefix}s", f"t={prefix}t", f"u={prefix}u", f"i={prefix}i",
        f"G2={P.G2.name}", f"p1={prefix}p1", f"p2={prefix}p2", f"m={prefix}m",
        f"ul={prefix}ul", f"ur={prefix}ur", f"il={prefix}il", f"ir={prefix}ir",
        f"mi={prefix}mi",
    ]
    if P.G3 is not None and P.q12 is not None:
        fields += [f"G3={P.G3.name}", f"q12={prefix}q12", f"q23={prefix}q23"]
    lines.append(f"groupoid {P.name} : " + " ".join(fields))
    return lines
