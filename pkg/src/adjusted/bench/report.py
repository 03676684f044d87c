"""Benchmark result containers and their serial forms."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

from .stats import mean


@dataclass(frozen=True)
class ThreadSample:
    run: int
    thread: int
    ops: int
    seconds: float

    @property
    def ops_per_sec(self) -> float:
        return self.ops / self.seconds if self.seconds > 0 else 0.0


@dataclass
class BenchReport:
    """Per-thread throughput samples plus per-run aggregates.

    A run's aggregate is the sum of its threads' individual rates; the
    report-level number is the mean aggregate across runs.
    """

    label: str
    config: dict
    samples: list[ThreadSample] = field(default_factory=list)
    mix_counts: dict = field(default_factory=dict)

    def runs(self) -> list[int]:
        return sorted({s.run for s in self.samples})

    def aggregate_by_run(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for s in self.samples:
            out[s.run] = out.get(s.run, 0.0) + s.ops_per_sec
        return out

    @property
    def aggregate_ops_per_sec(self) -> float:
        per_run = self.aggregate_by_run()
        if not per_run:
            return 0.0
        return mean(per_run.values())

    @property
    def total_ops(self) -> int:
        return sum(s.ops for s in self.samples)

    def ratio_to(self, other: "BenchReport") -> float:
        denominator = other.aggregate_ops_per_sec
        if denominator == 0:
            raise ValueError("cannot compare against a zero-throughput report")
        return self.aggregate_ops_per_sec / denominator

    def to_doc(self) -> dict:
        return {
            "schema": "v1",
            "label": self.label,
            "config": self.config,
            "samples": [
                {
                    "run": s.run,
                    "thread": s.thread,
                    "ops": s.ops,
                    "seconds": s.seconds,
                    "ops_per_sec": s.ops_per_sec,
                }
                for s in self.samples
            ],
            "aggregate_by_run": {
                str(r): v for r, v in sorted(self.aggregate_by_run().items())
            },
            "aggregate_ops_per_sec": self.aggregate_ops_per_sec,
            "mix_counts": {str(k): v for k, v in sorted(self.mix_counts.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("run,thread,ops,seconds,ops_per_sec\n")
        for s in sorted(self.samples, key=lambda s: (s.run, s.thread)):
            out.write(
                "%d,%d,%d,%.6f,%.3f\n"
                % (s.run, s.thread, s.ops, s.seconds, s.ops_per_sec)
            )
        return out.getvalue()
