"""CADSPEC: the line-oriented text format for concrete CADs and set families.

A document holds any number of CAD blocks and set lines::

    # comment
    cad C dim=2 class=0
    level1: -1, 1
    cell 1: u=0
    cell 2: u=1; xi2=0
    cell 3: u=2; xi2=-sqrt(1 - x1^2); xi4=sqrt(1 - x1^2)
    cell 4: u=1; xi2=0
    cell 5: u=0
    set D: x1^2 + x2^2 <= 1

Every cell of level below ``dim`` needs its own ``cell`` line; the section
count ``u`` fixes an odd number 2u+1 of children.  Set lines are shared by
all CADs of the document.  ``format_document`` prints a canonical form that
parses back to an equal document.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .algebra import arity
from .cad import ConcreteCad, Family, parse_regularity
from .errors import CadError, ParseError
from .syntax import Parser, format_expr, format_pred, format_value, parse_pred, parse_value
from .tree import format_index, parse_index

_HEADER = re.compile(r"cad(?:\s+(?P<name>[A-Za-z_][\w']*))?\s+dim=(?P<dim>\d+)\s+class=(?P<cls>\w+)\s*$")
_SET = re.compile(r"set\s+(?P<name>[A-Za-z_~][\w'~]*)\s*:(?P<body>.*)$")
_CELL = re.compile(r"cell\s+(?P<idx>[\d.]+)\s*:(?P<body>.*)$")


@dataclass
class Document:
    cads: dict = field(default_factory=dict)
    set_names: list = field(default_factory=list)
    set_preds: list = field(default_factory=list)

    def cad(self, name=None) -> ConcreteCad:
        if name is None:
            if len(self.cads) != 1:
                raise CadError(f"document has {len(self.cads)} CADs; pick one of {sorted(self.cads)}")
            return next(iter(self.cads.values()))
        try:
            return self.cads[name]
        except KeyError:
            raise CadError(f"no CAD named {name!r}; have {sorted(self.cads)}") from None

    def family(self, names=None, n=None) -> Family:
        if not self.set_names:
            raise CadError("document defines no sets")
        if n is None:
            dims = {c.n for c in self.cads.values()}
            n = max(dims) if dims else max(arity(p) for p in self.set_preds)
        fam = Family(tuple(self.set_names), tuple(self.set_preds), n)
        return fam.select(names) if names else fam


def _parse_cell_body(body, lineno):
    p = Parser(body)
    p.take("u")
    p.take("=")
    tok = p.take()
    if tok[0] != "num" or "/" in tok[1]:
        raise ParseError(f"line {lineno}: u must be a natural number")
    u = int(tok[1])
    exprs = []
    while p.at(";"):
        p.take(";")
        name = p.take()[1]
        want = f"xi{2 * len(exprs) + 2}"
        if name != want:
            raise ParseError(f"line {lineno}: expected {want}, got {name}")
        p.take("=")
        exprs.append(p.expr())
    p.expect_end()
    if len(exprs) != u:
        raise ParseError(f"line {lineno}: u={u} but {len(exprs)} section expression(s) given")
    return tuple(exprs)


class _CadBuilder:
    def __init__(self, name, n, r, lineno):
        self.name, self.n, self.r, self.lineno = name, n, r, lineno
        self.level1 = None
        self.sections = {}

    def finish(self):
        if self.level1 is None:
            raise ParseError(f"cad {self.name} (line {self.lineno}): missing level1 line")
        cad = ConcreteCad(self.n, self.r, self.level1, self.sections, self.name)
        expected = set()
        for k in range(1, self.n):
            expected.update(cad_cells(cad, k))
        missing = sorted(expected - set(self.sections))
        extra = sorted(set(self.sections) - expected)
        if missing:
            raise ParseError(f"cad {self.name}: no cell line for {format_index(missing[0])}")
        if extra:
            raise ParseError(f"cad {self.name}: cell {format_index(extra[0])} does not exist")
        for idx, exprs in self.sections.items():
            for e in exprs:
                if arity(e) > len(idx):
                    raise ParseError(f"cad {self.name}: section over {format_index(idx)} uses x{arity(e)}")
        return cad


def cad_cells(cad, level):
    """Cells of a level, tolerating missing parents (used while validating a parse)."""
    out = [()]
    for _ in range(level):
        nxt = []
        for I in out:
            u = len(cad.level1) if not I else len(cad.sections.get(I, ()))
            if I and I not in cad.sections:
                continue
            nxt += [I + (j,) for j in range(1, 2 * u + 2)]
        out = nxt
    return out


def parse_document(text: str) -> Document:
    doc = Document()
    current = None

    def close():
        if current is not None:
            if current.name in doc.cads:
                raise ParseError(f"duplicate cad name {current.name!r}")
            doc.cads[current.name] = current.finish()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("cad ") or line == "cad":
            close()
            m = _HEADER.match(line)
            if not m:
                raise ParseError(f"line {lineno}: bad header {line!r}")
            n = int(m["dim"])
            if n < 1:
                raise ParseError(f"line {lineno}: dimension must be positive")
            try:
                r = parse_regularity(m["cls"])
            except CadError as exc:
                raise ParseError(f"line {lineno}: {exc}") from None
            current = _CadBuilder(m["name"] or "main", n, r, lineno)
            continue
        if line.startswith("set"):
            m = _SET.match(line)
            if not m:
                raise ParseError(f"line {lineno}: bad set line")
            if m["name"] in doc.set_names:
                raise ParseError(f"line {lineno}: duplicate set {m['name']}")
            doc.set_names.append(m["name"])
            doc.set_preds.append(parse_pred(m["body"]))
            continue
        if current is None:
            raise ParseError(f"line {lineno}: {line.split()[0]!r} outside a cad block")
        if line.startswith("level1"):
            body = line.split(":", 1)[1] if ":" in line else None
            if body is None:
                raise ParseError(f"line {lineno}: expected 'level1: ...'")
            vals = tuple(parse_value(t) for t in body.split(",") if t.strip())
            current.level1 = vals
            continue
        m = _CELL.match(line)
        if not m:
            raise ParseError(f"line {lineno}: cannot read {line!r}")
        idx = parse_index(m["idx"])
        if not 1 <= len(idx) < current.n:
            raise ParseError(f"line {lineno}: cell {m['idx']} must have level 1..{current.n - 1}")
        if idx in current.sections:
            raise ParseError(f"line {lineno}: cell {m['idx']} given twice")
        current.sections[idx] = _parse_cell_body(m["body"], lineno)
    close()
    if not doc.cads and not doc.set_names:
        raise ParseError("empty document")
    return doc


def parse_cad(text: str, name=None) -> ConcreteCad:
    return parse_document(text).cad(name)


def format_cad(cad: ConcreteCad) -> str:
    lines = [f"cad {cad.name or 'main'} dim={cad.n} class={cad.r}"]
    lines.append("level1: " + ", ".join(format_value(v) for v in cad.level1))
    for idx in sorted(cad.sections):
        exprs = cad.sections[idx]
        parts = [f"u={len(exprs)}"] + [f"xi{2 * j + 2}={format_expr(e)}" for j, e in enumerate(exprs)]
        lines.append(f"cell {format_index(idx)}: " + "; ".join(parts))
    return "\n".join(lines) + "\n"


def format_document(doc: Document) -> str:
    blocks = [format_cad(c) for c in doc.cads.values()]
    sets = "".join(f"set {s}: {format_pred(p)}\n" for s, p in zip(doc.set_names, doc.set_preds))
    if sets:
        blocks.append(sets)
    return "\n".join(blocks)


def document_of(cads, fam: Family = None) -> Document:
    doc = Document()
    for c in cads:
        doc.cads[c.name or "main"] = c
    if fam is not None:
        doc.set_names, doc.set_preds = list(fam.names), list(fam.preds)
    return doc
