"""Run every corpus entry: leaf counts, tree reductions with verdicts, and for the
entries that declare a reduction DAG its size and confluence verdict.

    python3 scripts/run_corpus.py [NAME ...] [--skip-dag]
"""
import argparse
import time

from cadred import corpus
from cadred.cad import build_tree
from cadred.reduction import confluence_report, liftable, reduction_dag
from cadred.tree import tree_reductions


def run(name, dags=True):
    t0 = time.perf_counter()
    e = corpus.load(name)
    print(f"{name}: {e.notes}")
    for cname, cad in e.cads.items():
        if cad.n != e.family.n:
            print(f"  {cname}: base CAD of R^{cad.n}, {cad.leaf_count} cells")
            continue
        reds = sorted(tree_reductions(build_tree(cad, e.family)))
        verdicts = ", ".join(f"{a}: {liftable(cad, e.family, a)}" for a in reds) or "none"
        print(f"  {cname}: {cad.leaf_count} cells, class {cad.r}; reductions {verdicts}")
    if dags:
        for root in e.expected.get("dag", {}):
            dag = reduction_dag(e.cad(root), e.family)
            conf = confluence_report(dag)
            print(f"  dag from {root}: {len(dag.nodes)} nodes, {len(dag.edges)} edges, {conf.verdict}")
    print(f"  ({time.perf_counter() - t0:.2f} s)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*")
    ap.add_argument("--skip-dag", action="store_true")
    args = ap.parse_args()
    for name in args.names or corpus.names():
        run(name, not args.skip_dag)


if __name__ == "__main__":
    main()
