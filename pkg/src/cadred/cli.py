"""Command-line front end.

Every command prints a report whose first line is a schema header; with
``--out DIR`` the report and any CADSPEC or DOT artifacts are also written
there.  Exit status: 0 on success, 1 when ``--expect-unique`` meets several
normal forms, 2 on bad input or a failed computation.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import corpus
from .cad import DEFAULT_PLAN, build_tree, check_cad_structure, cylinder_product
from .cadspec import document_of, format_cad, format_document, parse_document
from .errors import CadError
from .lowdim import (
    behaviour, behaviour_partition, fiber, flat_labels, format_behaviour, format_set,
    minimum_cad_1d, parse_set,
)
from .oracle import bell, cross_validate, format_blocks, poset_below, poset_to_dot
from .reduction import (
    Lifts, apply_reduction, canonical_fingerprint, confluence_report, dag_to_dot, liftable,
    minimal, reduction_dag, trace_to_jsonl, transitive_reduction_check,
)
from .tree import dump_tree, format_label, parse_index, tree_reductions, tree_to_dot

SCHEMA = "cadred-report/1"


class Report:
    def __init__(self, command, args):
        self.lines = [f"# {SCHEMA} command={command}"]
        if getattr(args, "seed", None) is not None:
            self.lines.append(f"# seed={args.seed}")
        self.files = {}
        self.command = command

    def add(self, key, value=None):
        self.lines.append(key if value is None else f"{key}: {value}")

    def block(self, text):
        self.lines += text.rstrip("\n").split("\n")

    def attach(self, name, text):
        self.files[name] = text

    def text(self):
        return "\n".join(self.lines) + "\n"


def _load(args):
    """Document and family from a CADSPEC path or ``corpus:NAME``."""
    src = args.input
    if src.startswith("corpus:"):
        entry = corpus.load(src.split(":", 1)[1])
        doc, fam = entry.document, entry.family
    else:
        try:
            text = Path(src).read_text()
        except OSError as exc:
            raise CadError(f"cannot read {src}: {exc.strerror}") from None
        doc = parse_document(text)
        fam = doc.family() if doc.set_names else None
    if fam is not None and args.family:
        fam = doc.family(args.family.split(","), fam.n)
    return doc, fam


def _cad_and_family(args):
    doc, fam = _load(args)
    cad = doc.cad(args.cad) if args.cad or len(doc.cads) != 1 else doc.cad()
    if fam is None:
        raise CadError("the input defines no sets")
    return cad, fam.with_dim(cad.n)


def _plan(args):
    return replace(DEFAULT_PLAN, audit=args.audit) if args.audit else DEFAULT_PLAN


def _point(text):
    return tuple(Fraction(t.strip()) for t in text.strip("() ").split(",") if t.strip())


# commands -------------------------------------------------------------------------

def cmd_tree(args, rep):
    cad, fam = _cad_and_family(args)
    tree = build_tree(cad, fam, _plan(args))
    rep.add("cad", cad.name)
    rep.add("leaves", tree.leaf_count)
    rep.add("red", "{" + ", ".join(str(a) for a in sorted(tree_reductions(tree))) + "}")
    rep.block(dump_tree(tree))
    if args.dot:
        rep.attach("tree.dot", tree_to_dot(tree, _dot_comment(args)))


def cmd_reduce(args, rep):
    cad, fam = _cad_and_family(args)
    pivot = parse_index(args.pivot)
    verdict = liftable(cad, fam, pivot, _plan(args))
    rep.add("pivot", args.pivot)
    rep.add("verdict", verdict.kind)
    rep.add("detail", str(verdict))
    if isinstance(verdict, Lifts):
        out = apply_reduction(cad, pivot).replace(name=f"{cad.name}_reduced")
        rep.add("fingerprint", canonical_fingerprint(out))
        rep.attach("reduced.cadspec", format_cad(out))
        rep.block(format_cad(out))


def cmd_minimal(args, rep):
    cad, fam = _cad_and_family(args)
    out, trace = minimal(cad, fam, _plan(args))
    out = out.replace(name=f"{cad.name}_min")
    applied = [t for t in trace if t.applied]
    rep.add("steps", len(applied))
    rep.add("trace", "[" + ", ".join(f"Phi_{'.'.join(map(str, t.pivot))}" for t in applied) + "]")
    rep.add("fingerprint", canonical_fingerprint(out))
    rep.block(format_cad(out))
    rep.attach("minimal.cadspec", format_document(document_of([out], fam)))
    rep.attach("trace.jsonl", trace_to_jsonl(trace))


def _dag(args):
    cad, fam = _cad_and_family(args)
    return cad, fam, reduction_dag(cad, fam, _plan(args))


def _names(doc_cads, dag):
    fps = {}
    for name, c in doc_cads.items():
        if c.n == next(iter(dag.cads.values())).n:
            fps.setdefault(canonical_fingerprint(c), name)
    return {fp: fps[fp] for fp in dag.cads if fp in fps}


def cmd_dag(args, rep):
    doc, _ = _load(args)
    cad, fam, dag = _dag(args)
    names = _names(doc.cads, dag)
    rep.add("nodes", len(dag.nodes))
    rep.add("edges", len(dag.edges))
    for fp in dag.nodes:
        rep.add("node", f"{fp} cells={dag.cads[fp].leaf_count} name={names.get(fp, '-')}")
    for src, pivot, dst in dag.edges:
        rep.add("edge", f"{src} Phi_{'.'.join(map(str, pivot))} {dst}")
    if args.dot:
        rep.attach("dag.dot", dag_to_dot(dag, _dot_comment(args), names))


def cmd_confluence(args, rep):
    doc, _ = _load(args)
    cad, fam, dag = _dag(args)
    report = confluence_report(dag)
    names = _names(doc.cads, dag)
    rep.add("verdict", report.verdict)
    rep.add("normal_forms", len(report.normal_forms))
    for fp in report.normal_forms:
        rep.add("normal_form", f"{fp} name={names.get(fp, '-')} cells={dag.cads[fp].leaf_count}")
    rep.add("peaks", len(report.peaks))
    rep.add("joinable", sum(report.joinable))
    rep.add(report.scope)
    for c in report.caveats:
        rep.add("caveat", c)
    for i, fp in enumerate(report.normal_forms):
        rep.attach(f"normal_form_{i}.cadspec", format_cad(dag.cads[fp].replace(name=f"nf{i}")))
    if args.expect_unique and report.verdict != "UniqueNormalForm":
        return 1
    return 0


def cmd_transred(args, rep):
    cad, fam, dag = _dag(args)
    rep.add("transitive_reduction", str(transitive_reduction_check(dag)).lower())
    rep.add("edges", len(dag.edges))


def cmd_min1d(args, rep):
    sets = [parse_set(t) for t in args.sets]
    cad, tree = minimum_cad_1d(sets)
    rep.add("sets", " ; ".join(format_set(s) for s in sets))
    rep.add("sections", "{" + ", ".join(str(v) for v in cad.level1) + "}")
    rep.add("labels", "(" + ", ".join(format_label(l) for l in flat_labels(tree)) + ")")


def cmd_fiber(args, rep):
    doc, fam = _load(args)
    x = _point(args.at)
    rep.add("at", args.at)
    for name, pred in zip(fam.names, fam.preds):
        rep.add(f"fiber {name}", format_set(fiber(pred, x)))


def cmd_behaviour(args, rep):
    doc, fam = _load(args)
    x = _point(args.at)
    fam = fam.with_dim(len(x) + 1)
    rep.add("at", args.at)
    rep.add("behaviour", format_behaviour(behaviour(fam, x)))


def cmd_bpartition(args, rep):
    doc, fam = _load(args)
    base = doc.cad(args.base)
    part = behaviour_partition(fam.with_dim(base.n + 1), base, _plan(args))
    for b, cells in sorted(part.classes.items()):
        rep.add("class", f"{format_behaviour(b)} cells={len(cells)} " +
                ",".join(".".join(map(str, c)) for c in cells))
    rep.add("constant", str(part.constant).lower())
    for idx, seen in part.violations:
        rep.add("violation", ".".join(map(str, idx)) + " " +
                "; ".join(f"{tuple(map(str, p))}->{format_behaviour(b)}" for p, b in seen))
    rep.add("note", part.note)


def cmd_oracle(args, rep):
    cad, fam = _cad_and_family(args)
    poset = poset_below(cad, fam, _plan(args))
    rep.add("method", poset.method)
    rep.add("elements", len(poset.elements))
    rep.add("flagged", len(poset.flagged))
    rep.add("covers", len(poset.covers()))
    if args.mode == "poset":
        for e in sorted(poset.elements, key=len):
            rep.add("element", f"{len(e)} cells: {format_blocks(e)}")
        if args.dot:
            rep.attach("poset.dot", poset_to_dot(poset, _dot_comment(args)))
        return 0
    dag = reduction_dag(cad, fam, _plan(args))
    result = cross_validate(dag, poset)
    rep.add("agreement", str(result.agree).lower())
    rep.add("detail", str(result))
    return 0


def cmd_bell(args, rep):
    rep.add("K", args.K)
    rep.add("bell", bell(args.K))
    rep.add("coarsenings", bell(args.K) - 1)


def cmd_corpus(args, rep):
    if args.action == "list":
        for name in corpus.names():
            rep.add(name, corpus.NOTES.get(name, "four-dimensional trousers"))
        return 0
    if not args.name:
        raise CadError("corpus run needs an entry name")
    entry = corpus.load(args.name)
    rep.add("entry", entry.name)
    rep.add("sets", ", ".join(entry.family.names))
    for cname, cad in entry.cads.items():
        if cad.n != entry.family.n:
            rep.add(f"cad {cname}", f"dim={cad.n} (base)")
            continue
        tree = build_tree(cad, entry.family)
        reds = sorted(tree_reductions(tree))
        verdicts = [f"{a}={liftable(cad, entry.family, a).kind}" for a in reds]
        rep.add(f"cad {cname}", f"leaves={tree.leaf_count} red={{{', '.join(verdicts)}}} "
                                f"fingerprint={canonical_fingerprint(cad)}")
    return 0


def cmd_product(args, rep):
    doc, fam = _load(args)
    cads = [cylinder_product(c) for c in doc.cads.values()]
    out = document_of(cads, fam.with_dim(fam.n + 1) if fam else None)
    for c in cads:
        report = check_cad_structure(c)
        rep.add(f"cad {c.name}", f"dim={c.n} leaves={c.leaf_count} structure={'ok' if report.ok else 'bad'}")
    rep.block(format_document(out))
    rep.attach("product.cadspec", format_document(out))


def _dot_comment(args):
    return "generated by: cadred " + " ".join(args.argv)


# parser ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cad", help="CAD name inside the document")
    common.add_argument("--family", help="comma-separated set names")
    common.add_argument("--out", help="directory for the report and artifacts")
    common.add_argument("--seed", type=int, help="recorded in the report; sampling is deterministic")
    common.add_argument("--expect-unique", action="store_true", help="exit 1 on several normal forms")
    common.add_argument("--audit", type=int, help="samples per cell")
    common.add_argument("--dot", action="store_true", help="also emit Graphviz output")

    p = argparse.ArgumentParser(prog="cadred", description="Reductions of concrete CADs.")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, func, help, inp=True):
        sp = sub.add_parser(name, parents=[common], help=help)
        if inp:
            sp.add_argument("input", help="CADSPEC file or corpus:NAME")
        sp.set_defaults(func=func)
        return sp

    cmd("tree", cmd_tree, "print the labelled CAD tree and its tree reductions")
    cmd("reduce", cmd_reduce, "check and apply one reduction").add_argument("--pivot", required=True)
    cmd("minimal", cmd_minimal, "reduce to a minimal CAD")
    cmd("dag", cmd_dag, "explore all reduction sequences")
    cmd("confluence", cmd_confluence, "normal forms and local peaks of the reduction DAG")
    cmd("transred", cmd_transred, "check the DAG equals its transitive reduction")
    cmd("min1d", cmd_min1d, "minimum CAD of subsets of the line", inp=False).add_argument(
        "sets", nargs="+", help="sets such as '[-2,0) u {1}'")
    cmd("fiber", cmd_fiber, "fibers of each set above a point").add_argument("--at", required=True)
    cmd("behaviour", cmd_behaviour, "behaviour of the family above a point").add_argument("--at", required=True)
    cmd("bpartition", cmd_bpartition, "behaviours over the cells of a base CAD").add_argument(
        "--base", required=True, help="name of the base CAD in the document")
    sp = sub.add_parser("oracle", parents=[common], help="brute-force poset and cross-validation")
    sp.add_argument("mode", choices=["poset", "validate"])
    sp.add_argument("input")
    sp.set_defaults(func=cmd_oracle)
    cmd("bell", cmd_bell, "Bell numbers", inp=False).add_argument("K", type=int)
    sp = sub.add_parser("corpus", parents=[common], help="list or run the worked examples")
    sp.add_argument("action", choices=["list", "run"])
    sp.add_argument("name", nargs="?")
    sp.set_defaults(func=cmd_corpus)
    cmd("product", cmd_product, "multiply every CAD by a line")
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    rep = Report(args.command, args)
    try:
        status = args.func(args, rep) or 0
    except (CadError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(rep.text())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(rep.text())
        for name, text in rep.files.items():
            (out / name).write_text(text)
    elif args.dot:
        for name, text in rep.files.items():
            if name.endswith(".dot"):
                sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
