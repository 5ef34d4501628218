"""Command-line driver: generate, classify, report, sample.

One TOML config file wires the whole pipeline; command-line flags
override individual settings. Diagnostics go to stderr, data to files
under the configured output directory, and every run drops a
reproducibility stamp (config hash, resource digests, seed) next to its
outputs. Exit code 0 means no errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import analytics, generate, oracle, prover
from .generate import QpKind
from .kif import build_index, parse_kif
from .mapping import load_mapping_dir
from .oracle import Classification
from .wordnet import load_wordnet_dir, parse_morphosemantic_links

CONFIG_ENV_VAR = "CQBENCH_CONFIG"


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    wordnet_dir: str = ""
    mapping_dir: str = ""
    morphosemantic_csv: str = ""
    kif_files: list[str] = field(default_factory=list)
    axiom_file: str = ""
    bridge_csv: str = ""
    output_dir: str = "out"
    prover_command: str = ""
    time_limit: float = 60.0
    memory_limit_mb: int = 2048
    workers: int = 1
    falsity_mode: str = generate.COMPLEMENT
    symbol_prefix: str = ""
    enabled_qps: list[str] = field(default_factory=lambda: [k.value for k in QpKind])
    transitive_hyponyms: bool = False
    sample_fraction: float = 0.01
    sample_seed: int = 0

    def enabled_kinds(self) -> set[QpKind]:
        try:
            return {QpKind(v) for v in self.enabled_qps}
        except ValueError as exc:
            raise CliError(f"unknown question pattern in enabled_qps: {exc}")

    def prover_config(self) -> prover.ProverConfig:
        if not self.prover_command:
            raise CliError("prover mode needs a prover command template")
        return prover.ProverConfig(
            command=self.prover_command,
            time_limit=self.time_limit,
            memory_limit_mb=self.memory_limit_mb,
            workers=self.workers,
        )


def load_config(path: Optional[str]) -> RunConfig:
    config = RunConfig()
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path is None:
        return config
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    paths = data.get("paths", {})
    for key in (
        "wordnet_dir",
        "mapping_dir",
        "morphosemantic_csv",
        "axiom_file",
        "bridge_csv",
        "output_dir",
    ):
        if key in paths:
            setattr(config, key, str(paths[key]))
    if "kif_files" in paths:
        config.kif_files = [str(p) for p in paths["kif_files"]]
    prover_cfg = data.get("prover", {})
    if "command" in prover_cfg:
        config.prover_command = str(prover_cfg["command"])
    if "time_limit" in prover_cfg:
        config.time_limit = float(prover_cfg["time_limit"])
    if "memory_limit_mb" in prover_cfg:
        config.memory_limit_mb = int(prover_cfg["memory_limit_mb"])
    if "workers" in prover_cfg:
        config.workers = int(prover_cfg["workers"])
    gen = data.get("generate", {})
    if "falsity_mode" in gen:
        config.falsity_mode = str(gen["falsity_mode"])
    if "symbol_prefix" in gen:
        config.symbol_prefix = str(gen["symbol_prefix"])
    if "enabled_qps" in gen:
        config.enabled_qps = [str(v) for v in gen["enabled_qps"]]
    if "transitive_hyponyms" in gen:
        config.transitive_hyponyms = bool(gen["transitive_hyponyms"])
    sample = data.get("sample", {})
    if "fraction" in sample:
        config.sample_fraction = float(sample["fraction"])
    if "seed" in sample:
        config.sample_seed = int(sample["seed"])
    return config


def _require(path: str, what: str) -> Path:
    if not path:
        raise CliError(f"config is missing the {what}")
    p = Path(path)
    if not p.exists():
        raise CliError(f"{what} does not exist: {p}")
    return p


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_stamp(config: RunConfig, out: Path, resources: Sequence[Path]) -> None:
    digests = {}
    for p in sorted(set(str(r) for r in resources)):
        path = Path(p)
        if path.is_file():
            digests[p] = _sha256(path.read_bytes())
    stamp = {
        "config_sha256": _sha256(
            json.dumps(asdict(config), sort_keys=True).encode("utf-8")
        ),
        "resource_digests": digests,
        "sample_seed": config.sample_seed,
        "sample_fraction": config.sample_fraction,
        "falsity_mode": config.falsity_mode,
    }
    (out / "stamp.json").write_text(
        json.dumps(stamp, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _load_index(config: RunConfig):
    if not config.kif_files:
        raise CliError("config is missing the SUO-KIF file list")
    exprs = []
    paths = []
    for kif_path in config.kif_files:
        p = _require(kif_path, "SUO-KIF file")
        paths.append(p)
        exprs.extend(parse_kif(p.read_text(encoding="utf-8")))
    index = build_index(exprs)
    for diag in index.diagnostics:
        print(f"kif: {diag}", file=sys.stderr)
    return index, paths


def _load_bridges(config: RunConfig) -> list[oracle.BridgeAxiom]:
    if not config.bridge_csv:
        return []
    path = _require(config.bridge_csv, "bridge-axiom CSV")
    return oracle.load_bridge_axioms(path.read_text(encoding="utf-8"))


def cmd_generate(config: RunConfig, compare_reference: bool = False) -> int:
    wordnet_dir = _require(config.wordnet_dir, "WordNet directory")
    mapping_dir = _require(config.mapping_dir, "mapping directory")
    morph_path = _require(config.morphosemantic_csv, "morphosemantic CSV")
    axiom_path = _require(config.axiom_file, "first-order axiom file")
    index, kif_paths = _load_index(config)

    store = load_wordnet_dir(wordnet_dir)
    mapping_entries, mapping_diags = load_mapping_dir(mapping_dir)
    links = parse_morphosemantic_links(
        morph_path.read_text(encoding="utf-8"), store
    )
    for diag in mapping_diags + store.diagnostics:
        print(f"resources: {diag}", file=sys.stderr)

    cqs, diagnostics = generate.generate_all(
        store,
        mapping_entries,
        index,
        links,
        enabled=config.enabled_kinds(),
        falsity_mode=config.falsity_mode,
        transitive=config.transitive_hyponyms,
    )
    for diag in diagnostics:
        print(f"generate: {diag}", file=sys.stderr)

    out = _out_dir(config)
    rows = generate.write_problems(
        cqs, out / "problems", config.axiom_file, config.symbol_prefix
    )
    generate.write_manifest(rows, out / "manifest.csv")
    table = analytics.build_qp_count_table([cq.kind for cq in cqs])
    counts_md = analytics.render_count_markdown(table)
    if compare_reference:
        lines = ["", "| QP | generated | reference | deviation % |", "|---|---|---|---|"]
        for label, actual, expected, deviation in analytics.compare_reference_counts(
            table
        ):
            lines.append(f"| {label} | {actual} | {expected} | {deviation:+.1f} |")
        counts_md += "\n".join(lines) + "\n"
    (out / "counts.md").write_text(counts_md, encoding="utf-8")
    analytics.write_count_csv(table, out / "counts.csv")
    write_stamp(
        config,
        out,
        [wordnet_dir, mapping_dir, morph_path, axiom_path, *kif_paths],
    )
    print(f"generated {len(cqs)} questions into {out}", file=sys.stderr)
    return 0


RESULT_FIELDS = (
    "cq_id",
    "qp",
    "truth_szs",
    "falsity_szs",
    "classification",
    "truth_time",
    "falsity_time",
)


def _write_results(
    path: Path,
    rows: Sequence[generate.ManifestRow],
    classifications: dict[str, Classification],
    outcomes: Optional[dict[str, prover.TestOutcome]] = None,
    oracle_extra: Optional[dict[str, Classification]] = None,
) -> None:
    import csv

    fields = list(RESULT_FIELDS)
    if oracle_extra is not None:
        fields.append("oracle_classification")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for row in rows:
            outcome = outcomes.get(row.cq_id) if outcomes else None
            record = [
                row.cq_id,
                row.qp.value,
                (outcome.truth.szs or "") if outcome else "",
                (outcome.falsity.szs or "") if outcome else "",
                classifications[row.cq_id].value,
                f"{outcome.truth.wall_time:.3f}" if outcome else "",
                f"{outcome.falsity.wall_time:.3f}" if outcome else "",
            ]
            if oracle_extra is not None:
                record.append(oracle_extra[row.cq_id].value)
            writer.writerow(record)


def cmd_classify(config: RunConfig, mode: str) -> int:
    out = _out_dir(config)
    manifest_path = out / "manifest.csv"
    if not manifest_path.exists():
        raise CliError(f"no manifest at {manifest_path}; run generate first")
    rows = generate.read_manifest(manifest_path)
    index, _ = _load_index(config)
    bridges = _load_bridges(config)

    oracle_result: dict[str, Classification] = {}
    if mode in ("oracle", "both"):
        for row in rows:
            cq = generate.rebuild_cq(row, index, config.falsity_mode)
            oracle_result[row.cq_id] = oracle.oracle_classify(cq, index, bridges)

    outcomes: dict[str, prover.TestOutcome] = {}
    if mode in ("prover", "both"):
        if config.axiom_file:
            _require(config.axiom_file, "first-order axiom file")
        pairs = [
            prover.ProblemPair(
                cq_id=row.cq_id,
                truth_path=str(out / "problems" / row.truth_file),
                falsity_path=str(out / "problems" / row.falsity_file),
            )
            for row in rows
        ]
        results = prover.schedule(
            pairs, config.prover_config(), checkpoint_path=out / "checkpoint.jsonl"
        )
        outcomes = {o.cq_id: o for o in results}

    if mode == "oracle":
        _write_results(out / "results.csv", rows, oracle_result)
    elif mode == "prover":
        _write_results(
            out / "results.csv",
            rows,
            {o.cq_id: o.classification for o in outcomes.values()},
            outcomes,
        )
    else:
        prover_result = {o.cq_id: o.classification for o in outcomes.values()}
        _write_results(
            out / "results.csv", rows, prover_result, outcomes, oracle_extra=oracle_result
        )
        import csv

        with open(out / "disagreements.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(("cq_id", "oracle", "prover", "flagged"))
            for row in rows:
                o_cls = oracle_result[row.cq_id]
                p_cls = prover_result[row.cq_id]
                if o_cls is p_cls:
                    continue
                # A prover proof beyond the taxonomy fragment is expected;
                # the oracle claiming more than the prover is not.
                flagged = o_cls is not Classification.UNKNOWN
                writer.writerow((row.cq_id, o_cls.value, p_cls.value, str(flagged)))
                if flagged:
                    print(
                        f"classify: flagged disagreement on {row.cq_id}:"
                        f" oracle={o_cls.value} prover={p_cls.value}",
                        file=sys.stderr,
                    )
    write_stamp(config, out, [Path(p) for p in config.kif_files])
    print(f"classified {len(rows)} questions ({mode}) into {out}", file=sys.stderr)
    return 0


def _read_results(path: Path) -> dict[str, Classification]:
    import csv

    classifications: dict[str, Classification] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            classifications[rec["cq_id"]] = Classification(rec["classification"])
    return classifications


def cmd_report(config: RunConfig, annotations_path: Optional[str] = None) -> int:
    out = _out_dir(config)
    manifest_path = out / "manifest.csv"
    results_path = out / "results.csv"
    if not manifest_path.exists():
        raise CliError(f"no manifest at {manifest_path}; run generate first")
    if not results_path.exists():
        raise CliError(f"no results at {results_path}; run classify first")
    rows = generate.read_manifest(manifest_path)
    classifications = _read_results(results_path)
    missing = [r.cq_id for r in rows if r.cq_id not in classifications]
    if missing:
        raise CliError(f"results are missing {len(missing)} manifest ids: {missing[:3]}")

    records = [
        analytics.EvaluationRecord(r.cq_id, r.qp, classifications[r.cq_id])
        for r in rows
    ]
    if annotations_path:
        ann_path = _require(annotations_path, "annotation file")
        annotations = analytics.parse_annotations_csv(
            ann_path.read_text(encoding="utf-8")
        )
        records = analytics.merge_annotations(records, annotations)

    index = None
    cqs_by_id = None
    if config.kif_files:
        index, _ = _load_index(config)
        cqs_by_id = {
            row.cq_id: generate.rebuild_cq(row, index, config.falsity_mode)
            for row in rows
        }

    count_table = analytics.build_qp_count_table([r.qp for r in rows])
    analysis = analytics.build_analysis_table(records)
    findings = analytics.detect_misalignments(records, cqs_by_id, index)

    sampled = analytics.sample_uniform(
        rows, config.sample_fraction, config.sample_seed
    )
    generate.write_manifest(sampled, out / "sample.csv")
    analytics.write_analysis_csv(analysis, out / "analysis.csv")
    analytics.write_misalignments_csv(findings, out / "misalignments.csv")

    report = [
        "# Benchmark report",
        "",
        "## Problem counts",
        "",
        analytics.render_count_markdown(count_table),
        "## Analysis",
        "",
        analytics.render_analysis_markdown(analysis),
        "## Misalignments",
        "",
    ]
    if findings:
        report.append("| cq | status | terms | reason |")
        report.append("|---|---|---|---|")
        for f in findings:
            status = "confirmed" if f.confirmed else "candidate"
            report.append(
                f"| {f.cq_id} | {status} | {f.terms[0]} / {f.terms[1]} | {f.reason} |"
            )
    else:
        report.append("none")
    report.append("")
    report.append(
        f"Sample: {len(sampled)} of {len(rows)} questions"
        f" (fraction {config.sample_fraction}, seed {config.sample_seed});"
        f" see sample.csv."
    )
    (out / "report.md").write_text("\n".join(report) + "\n", encoding="utf-8")
    write_stamp(config, out, [Path(p) for p in config.kif_files])
    print(f"report written to {out / 'report.md'}", file=sys.stderr)
    return 0


def cmd_sample(config: RunConfig) -> int:
    out = _out_dir(config)
    manifest_path = out / "manifest.csv"
    if not manifest_path.exists():
        raise CliError(f"no manifest at {manifest_path}; run generate first")
    rows = generate.read_manifest(manifest_path)
    sampled = analytics.sample_uniform(rows, config.sample_fraction, config.sample_seed)
    generate.write_manifest(sampled, out / "sample.csv")
    write_stamp(config, out, [manifest_path])
    print(f"sampled {len(sampled)} of {len(rows)} questions", file=sys.stderr)
    return 0


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> None:
    overrides = {
        "output_dir": "output_dir",
        "falsity_mode": "falsity_mode",
        "symbol_prefix": "symbol_prefix",
        "workers": "workers",
        "prover_command": "prover_command",
        "time_limit": "time_limit",
        "memory_limit": "memory_limit_mb",
        "fraction": "sample_fraction",
        "seed": "sample_seed",
    }
    for arg_name, cfg_name in overrides.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            setattr(config, cfg_name, value)
    qps = getattr(args, "qp", None)
    if qps:
        config.enabled_qps = list(qps)
    if getattr(args, "transitive_hyponyms", False):
        config.transitive_hyponyms = True


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqbench",
        description="Generate, evaluate and analyse taxonomy competency questions.",
    )
    parser.add_argument(
        "--config",
        help=f"TOML config file (default: ${CONFIG_ENV_VAR})",
        default=None,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="build the problem corpus")
    p_gen.add_argument("--output-dir", dest="output_dir")
    p_gen.add_argument("--falsity-mode", choices=generate.FALSITY_MODES)
    p_gen.add_argument("--symbol-prefix", dest="symbol_prefix")
    p_gen.add_argument(
        "--qp",
        action="append",
        choices=[k.value for k in QpKind],
        help="enable only these question patterns (repeatable)",
    )
    p_gen.add_argument("--transitive-hyponyms", action="store_true", default=False)
    p_gen.add_argument(
        "--compare-reference",
        action="store_true",
        help="add the reference-count deviation table to counts.md",
    )

    p_cls = sub.add_parser("classify", help="run the dual tests")
    p_cls.add_argument("--mode", choices=("oracle", "prover", "both"), default="oracle")
    p_cls.add_argument("--output-dir", dest="output_dir")
    p_cls.add_argument("--falsity-mode", choices=generate.FALSITY_MODES)
    p_cls.add_argument("--workers", type=int)
    p_cls.add_argument("--prover-command", dest="prover_command")
    p_cls.add_argument("--time-limit", dest="time_limit", type=float)
    p_cls.add_argument("--memory-limit", dest="memory_limit", type=int)

    p_rep = sub.add_parser("report", help="build the report tables")
    p_rep.add_argument("--output-dir", dest="output_dir")
    p_rep.add_argument("--annotations", help="annotation CSV to merge")
    p_rep.add_argument("--fraction", type=float)
    p_rep.add_argument("--seed", type=int)

    p_samp = sub.add_parser("sample", help="draw the uniform sample")
    p_samp.add_argument("--output-dir", dest="output_dir")
    p_samp.add_argument("--fraction", type=float)
    p_samp.add_argument("--seed", type=int)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        _apply_overrides(config, args)
        if args.command == "generate":
            return cmd_generate(config, compare_reference=args.compare_reference)
        if args.command == "classify":
            return cmd_classify(config, args.mode)
        if args.command == "report":
            return cmd_report(config, args.annotations)
        return cmd_sample(config)
    except (CliError, OSError, ValueError) as exc:
        print(f"cqbench: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
