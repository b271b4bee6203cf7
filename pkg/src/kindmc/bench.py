"""Benchmark harness: run a directory of tasks, score the verdicts, and
report the per-phase distribution.

Tasks are .c files whose expected verdict is carried by the filename
suffix `_true.c` or `_false.c`; files without a suffix are skipped with a
warning.  Scoring weights follow the usual competition shape (positive for
correct verdicts, strongly negative for wrong ones) and are configurable;
an unknown verdict scores zero.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .driver import FALSE, TRUE, UNKNOWN, Outcome, VerifyOptions, verify
from .frontend import SourceError


@dataclass(frozen=True)
class ScoreConfig:
    correct_true: int = 2
    correct_false: int = 1
    wrong_true: int = -12
    wrong_false: int = -6

    def __post_init__(self):
        if not (self.wrong_true <= 0 <= self.correct_true
                and self.wrong_false <= 0 <= self.correct_false):
            raise ValueError("wrong-verdict weights must be <= 0 <= correct weights")

    @staticmethod
    def parse(spec: str) -> "ScoreConfig":
        parts = [int(p) for p in spec.split(",")]
        if len(parts) != 4:
            raise ValueError("score weights must be four integers a,b,c,d")
        return ScoreConfig(*parts)

    def score(self, expected: str, obtained: str) -> int:
        if obtained == UNKNOWN:
            return 0
        if expected == obtained:
            return self.correct_true if expected == TRUE else self.correct_false
        return self.wrong_true if obtained == TRUE else self.wrong_false


@dataclass
class TaskResult:
    name: str
    expected: str
    outcome: Outcome
    wall_time: float
    score: int

    def row(self) -> dict:
        return {
            "name": self.name,
            "expected": self.expected,
            "verdict": self.outcome.verdict,
            "phase": self.outcome.phase,
            "k": self.outcome.k_final,
            "time": round(self.wall_time, 3),
            "score": self.score,
        }


@dataclass
class BenchReport:
    results: list = field(default_factory=list)
    total_score: int = 0
    phase_distribution: dict = field(default_factory=dict)

    def table(self) -> str:
        header = f"{'task':<40} {'expected':<9} {'verdict':<9} {'phase':<10} {'k':>4} {'time':>8} {'score':>6}"
        lines = [header, "-" * len(header)]
        for res in self.results:
            out = res.outcome
            lines.append(f"{res.name:<40} {res.expected:<9} {out.verdict:<9} "
                         f"{out.phase:<10} {out.k_final:>4} {res.wall_time:>8.2f} {res.score:>6}")
        lines.append("-" * len(header))
        lines.append(f"total score: {self.total_score}")
        lines.append("result distribution by step: " + ", ".join(
            f"{key}={count}" for key, count in sorted(self.phase_distribution.items())))
        return "\n".join(lines)


def expected_verdict(path: Path) -> str | None:
    stem = path.stem
    if stem.endswith("_true"):
        return TRUE
    if stem.endswith("_false"):
        return FALSE
    return None


def run_corpus(directory: str | Path, opts: VerifyOptions | None = None,
               score_config: ScoreConfig | None = None, workers: int = 1,
               task_timeout: float | None = None) -> BenchReport:
    opts = opts or VerifyOptions()
    score_config = score_config or ScoreConfig()
    tasks = sorted(Path(directory).glob("*.c"))
    runnable = []
    for path in tasks:
        expected = expected_verdict(path)
        if expected is None:
            print(f"warning: {path.name} has no _true/_false suffix; skipped",
                  file=sys.stderr)
            continue
        runnable.append((path, expected))

    def run_one(item) -> TaskResult:
        path, expected = item
        task_opts = dataclasses.replace(opts)
        if task_timeout is not None:
            task_opts = dataclasses.replace(opts, timeout=task_timeout)
        start = time.monotonic()
        try:
            outcome = verify(path.read_text(), task_opts)
        except SourceError as exc:
            print(f"warning: {path.name}: {exc.format(path.name)}", file=sys.stderr)
            outcome = Outcome(verdict=UNKNOWN, reason="frontend-error")
        wall = time.monotonic() - start
        return TaskResult(name=path.name, expected=expected, outcome=outcome,
                          wall_time=wall,
                          score=score_config.score(expected, outcome.verdict))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, runnable))
    else:
        results = [run_one(item) for item in runnable]

    report = BenchReport(results=results)
    report.total_score = sum(res.score for res in results)
    dist: dict = {}
    for res in results:
        out = res.outcome
        if out.verdict == UNKNOWN:
            key = "unknown/timeout" if out.reason == "timeout" else "unknown"
        else:
            key = f"{out.verdict}@{out.phase}"
        dist[key] = dist.get(key, 0) + 1
    report.phase_distribution = dist
    return report


def write_json(report: BenchReport, path: str | Path) -> None:
    payload = {
        "tasks": [res.row() for res in report.results],
        "total_score": report.total_score,
        "phase_distribution": report.phase_distribution,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def write_csv(report: BenchReport, path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=[
            "name", "expected", "verdict", "phase", "k", "time", "score"])
        writer.writeheader()
        for res in report.results:
            writer.writerow(res.row())
