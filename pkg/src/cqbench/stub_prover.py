"""Deterministic stand-in prover for tests and offline runs.

Reads one emitted problem file, rebuilds the underlying truth
conjecture, and answers from the taxonomy oracle instead of doing any
first-order search: the truth problem of an entailed question gets
``SZS status Theorem``, the falsity problem of an incompatible one
likewise, and everything else ``GaveUp``. Output and exit codes follow
prover conventions so the harness treats it like any external prover.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .formulas import FofSyntaxError, FormulaShapeError, Not, parse_fof_document
from .generate import make_test_pair
from .kif import build_index, parse_kif
from .oracle import Classification, classify_truth_formula, load_bridge_axioms


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cqbench-stub-prover",
        description="Taxonomy-backed stub prover for emitted problem files.",
    )
    parser.add_argument("problem", help="TPTP problem file")
    parser.add_argument(
        "--kif",
        action="append",
        required=True,
        help="SUO-KIF taxonomy file (repeatable)",
    )
    parser.add_argument("--bridges", help="bridge-axiom CSV", default=None)
    parser.add_argument("--prefix", default="", help="symbol prefix used at emission")
    parser.add_argument("--cpu-limit", default=None, help="accepted and ignored")
    parser.add_argument("--mem-limit", default=None, help="accepted and ignored")
    args = parser.parse_args(argv)

    try:
        exprs = []
        for kif_path in args.kif:
            exprs.extend(parse_kif(Path(kif_path).read_text(encoding="utf-8")))
        index = build_index(exprs)
        bridges = []
        if args.bridges:
            bridges = load_bridge_axioms(Path(args.bridges).read_text(encoding="utf-8"))

        document = parse_fof_document(
            Path(args.problem).read_text(encoding="utf-8"), prefix=args.prefix
        )
        conjecture = document.conjecture()
        if conjecture.name.endswith("_truth"):
            side = "truth"
        elif conjecture.name.endswith("_falsity"):
            side = "falsity"
        else:
            print(
                f"cannot tell truth from falsity test: {conjecture.name}",
                file=sys.stderr,
            )
            return 2

        formula = conjecture.formula
        if side == "truth":
            truth = formula
        elif isinstance(formula, Not):
            # Strict-negation falsity problems wrap the whole conjecture.
            truth = formula.body
        else:
            # Complement-mode falsity problems: flipping the consequent
            # again restores the truth conjecture.
            truth = make_test_pair(formula)[1]

        classification = classify_truth_formula(truth, index, bridges)
    except (OSError, FofSyntaxError, FormulaShapeError, ValueError) as exc:
        print(f"stub prover failed: {exc}", file=sys.stderr)
        return 2

    if side == "truth":
        proved = classification in (Classification.ENTAILED, Classification.CONFLICT)
    else:
        proved = classification in (
            Classification.INCOMPATIBLE,
            Classification.CONFLICT,
        )
    token = "Theorem" if proved else "GaveUp"
    print(f"% SZS status {token} for {os.path.basename(args.problem)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
