"""External prover harness: subprocess runs, SZS verdicts, scheduling.

Each problem runs as one subprocess built from a command template with
``{problem}``, ``{cpu_limit}`` and ``{mem_limit}`` placeholders. The
first ``SZS status <token>`` line decides the verdict; a run killed at
the time limit is Unknown, and a run that produces no SZS line at all
is an Error carrying an output excerpt. Dual tests always both run so
a both-proved pair surfaces as Conflict instead of being masked.

``schedule`` drives a bounded worker pool, returns outcomes in input
order, and checkpoints finished outcomes (JSON lines, atomically
replaced) so an interrupted run resumes without re-proving anything.
"""

from __future__ import annotations

import json
import os
import re
import shlex
import subprocess
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

from .oracle import Classification


class VerdictStatus(Enum):
    PROVED = "proved"
    DISPROVED = "disproved"
    UNKNOWN = "unknown"
    ERROR = "error"


_SZS_MAP = {
    "Theorem": VerdictStatus.PROVED,
    "CounterSatisfiable": VerdictStatus.DISPROVED,
    "Satisfiable": VerdictStatus.DISPROVED,
    "Timeout": VerdictStatus.UNKNOWN,
    "GaveUp": VerdictStatus.UNKNOWN,
    "ResourceOut": VerdictStatus.UNKNOWN,
    "Unknown": VerdictStatus.UNKNOWN,
}

_SZS_LINE = re.compile(r"SZS status (\w+)")


class CheckpointError(Exception):
    pass


@dataclass(frozen=True)
class ProverConfig:
    command: str
    time_limit: float = 60.0
    memory_limit_mb: int = 2048
    workers: int = 1
    grace: float = 5.0

    def __post_init__(self):
        if self.time_limit <= 0:
            raise ValueError("time limit must be positive")
        if self.workers < 1:
            raise ValueError("worker count must be at least 1")


@dataclass(frozen=True)
class ProverVerdict:
    status: VerdictStatus
    szs: Optional[str]
    wall_time: float
    problem: str
    detail: str = ""


@dataclass(frozen=True)
class ProblemPair:
    cq_id: str
    truth_path: str
    falsity_path: str


@dataclass(frozen=True)
class TestOutcome:
    cq_id: str
    truth: ProverVerdict
    falsity: ProverVerdict
    classification: Classification
    note: str = ""


def status_from_szs(token: str) -> VerdictStatus:
    return _SZS_MAP.get(token, VerdictStatus.ERROR)


def _build_command(config: ProverConfig, problem: str) -> list[str]:
    values = {
        "problem": problem,
        "cpu_limit": str(int(config.time_limit)),
        "mem_limit": str(config.memory_limit_mb),
    }
    try:
        return [tok.format(**values) for tok in shlex.split(config.command)]
    except (KeyError, IndexError) as exc:
        raise ValueError(f"bad placeholder in prover command: {exc}") from exc


def run_prover(problem_path: str, config: ProverConfig) -> ProverVerdict:
    """Run one problem and derive the verdict from the first SZS line."""
    cmd = _build_command(config, problem_path)
    start = time.monotonic()
    try:
        proc = subprocess.run(
            cmd,
            capture_output=True,
            text=True,
            timeout=config.time_limit + config.grace,
        )
    except FileNotFoundError:
        return ProverVerdict(
            VerdictStatus.ERROR,
            None,
            time.monotonic() - start,
            problem_path,
            detail=f"prover executable not found: {cmd[0]}",
        )
    except subprocess.TimeoutExpired:
        return ProverVerdict(
            VerdictStatus.UNKNOWN,
            None,
            time.monotonic() - start,
            problem_path,
            detail="killed at time limit",
        )
    wall = time.monotonic() - start
    output = proc.stdout + "\n" + proc.stderr
    match = _SZS_LINE.search(output)
    if match:
        token = match.group(1)
        status = status_from_szs(token)
        detail = "" if status is not VerdictStatus.ERROR else f"unmapped SZS token {token}"
        return ProverVerdict(status, token, wall, problem_path, detail=detail)
    excerpt = " | ".join(output.split("\n"))[:300].strip()
    return ProverVerdict(
        VerdictStatus.ERROR,
        None,
        wall,
        problem_path,
        detail=f"no SZS status line (exit {proc.returncode}): {excerpt}",
    )


def classify_verdicts(
    truth: ProverVerdict, falsity: ProverVerdict
) -> tuple[Classification, str]:
    """Mutually exclusive, exhaustive classification of a dual test."""
    if truth.status is VerdictStatus.ERROR or falsity.status is VerdictStatus.ERROR:
        broken = truth if truth.status is VerdictStatus.ERROR else falsity
        return Classification.UNKNOWN, f"prover error: {broken.detail}"
    truth_proved = truth.status is VerdictStatus.PROVED
    falsity_proved = falsity.status is VerdictStatus.PROVED
    if truth_proved and falsity_proved:
        return Classification.CONFLICT, "both tests proved: vacuous antecedent?"
    if truth_proved:
        return Classification.ENTAILED, ""
    if falsity_proved:
        return Classification.INCOMPATIBLE, ""
    return Classification.UNKNOWN, ""


def evaluate_cq(pair: ProblemPair, config: ProverConfig) -> TestOutcome:
    """Run both dual tests; both always run so conflicts are visible."""
    truth = run_prover(pair.truth_path, config)
    falsity = run_prover(pair.falsity_path, config)
    classification, note = classify_verdicts(truth, falsity)
    return TestOutcome(pair.cq_id, truth, falsity, classification, note)


def _verdict_to_json(v: ProverVerdict) -> dict:
    return {
        "status": v.status.value,
        "szs": v.szs,
        "wall_time": v.wall_time,
        "problem": v.problem,
        "detail": v.detail,
    }


def _verdict_from_json(d: dict) -> ProverVerdict:
    return ProverVerdict(
        VerdictStatus(d["status"]),
        d["szs"],
        d["wall_time"],
        d["problem"],
        d.get("detail", ""),
    )


def outcome_to_json(o: TestOutcome) -> str:
    return json.dumps(
        {
            "cq_id": o.cq_id,
            "truth": _verdict_to_json(o.truth),
            "falsity": _verdict_to_json(o.falsity),
            "classification": o.classification.value,
            "note": o.note,
        },
        sort_keys=True,
    )


def outcome_from_json(line: str) -> TestOutcome:
    d = json.loads(line)
    return TestOutcome(
        d["cq_id"],
        _verdict_from_json(d["truth"]),
        _verdict_from_json(d["falsity"]),
        Classification(d["classification"]),
        d.get("note", ""),
    )


def load_checkpoint(path: Path) -> dict[str, TestOutcome]:
    """Read a JSONL checkpoint; any malformed line is an error."""
    outcomes: dict[str, TestOutcome] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                outcome = outcome_from_json(line)
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise CheckpointError(f"{path}:{lineno}: corrupt checkpoint: {exc}")
            outcomes[outcome.cq_id] = outcome
    return outcomes


def _write_checkpoint(path: Path, outcomes: Sequence[TestOutcome]) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for o in outcomes:
            fh.write(outcome_to_json(o) + "\n")
    os.replace(tmp, path)


def schedule(
    pairs: Sequence[ProblemPair],
    config: ProverConfig,
    checkpoint_path: Optional[Path] = None,
) -> list[TestOutcome]:
    """Evaluate all pairs; output order equals input order.

    Finished outcomes already present in the checkpoint are reused with
    their recorded wall times; only missing ones run. The checkpoint is
    rewritten atomically after every completion.
    """
    done: dict[str, TestOutcome] = {}
    if checkpoint_path is not None and Path(checkpoint_path).exists():
        cached = load_checkpoint(Path(checkpoint_path))
        done = {p.cq_id: cached[p.cq_id] for p in pairs if p.cq_id in cached}

    order = [p.cq_id for p in pairs]
    pending = [p for p in pairs if p.cq_id not in done]

    def persist() -> None:
        if checkpoint_path is not None:
            _write_checkpoint(
                Path(checkpoint_path),
                [done[cq_id] for cq_id in order if cq_id in done],
            )

    persist()
    if pending:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = {pool.submit(evaluate_cq, p, config): p for p in pending}
            remaining = set(futures)
            while remaining:
                finished, remaining = wait(remaining, return_when=FIRST_COMPLETED)
                for fut in finished:
                    outcome = fut.result()
                    done[outcome.cq_id] = outcome
                    persist()
    return [done[cq_id] for cq_id in order]
