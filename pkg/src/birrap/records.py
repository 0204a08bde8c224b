"""Run records: one seeded run's final repository, per-generation trace,
and configuration echo, persisted as a CSV snapshot plus a JSON sidecar.

The CSV carries one row per repository entry:
index,f_r,f_c,r_s,g_v,g_c,g_w,feasible,n_1..n_k,r_1..r_k
Floats are written with repr (shortest round-trip) so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .model import QUALIFY_MAX_FC, QUALIFY_MIN_FR, Evaluation


@dataclass
class RecordEntry:
    n: tuple[int, ...]
    r: tuple[float, ...]
    evaluation: Evaluation


@dataclass
class RunRecord:
    problem_id: int
    algorithm: str
    seed: int
    config: dict
    entries: list[RecordEntry]
    trace: dict[str, list] = field(default_factory=dict)

    @property
    def n_feasible(self) -> int:
        return sum(1 for e in self.entries if e.evaluation.feasible)

    @property
    def n_infeasible(self) -> int:
        return len(self.entries) - self.n_feasible

    def feasible_objectives(self) -> list[tuple[float, float]]:
        return [(e.evaluation.f_r, e.evaluation.f_c) for e in self.entries if e.evaluation.feasible]


def csv_header(n_sub: int) -> list[str]:
    return (
        ["index", "f_r", "f_c", "r_s", "g_v", "g_c", "g_w", "feasible"]
        + [f"n_{j + 1}" for j in range(n_sub)]
        + [f"r_{j + 1}" for j in range(n_sub)]
    )


def write_record(record: RunRecord, csv_path, json_path) -> None:
    n_sub = len(record.entries[0].n) if record.entries else record.config.get("n_sub", 0)
    csv_path = Path(csv_path)
    json_path = Path(json_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(csv_header(n_sub))
        for idx, e in enumerate(record.entries):
            ev = e.evaluation
            writer.writerow(
                [idx]
                + [repr(v) for v in (ev.f_r, ev.f_c, ev.r_s, ev.g_v, ev.g_c, ev.g_w)]
                + [int(ev.feasible)]
                + [int(v) for v in e.n]
                + [repr(float(v)) for v in e.r]
            )
    sidecar = {
        "problem_id": record.problem_id,
        "algorithm": record.algorithm,
        "seed": record.seed,
        "config": record.config,
        "trace": record.trace,
        "n_entries": len(record.entries),
    }
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_record(csv_path, json_path) -> RunRecord:
    with open(json_path, "r", encoding="utf-8") as fh:
        sidecar = json.load(fh)
    entries: list[RecordEntry] = []
    with open(csv_path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_sub = sum(1 for c in header if c.startswith("n_"))
        for row in reader:
            f_r, f_c, r_s, g_v, g_c, g_w = (float(v) for v in row[1:7])
            feasible = bool(int(row[7]))
            n = tuple(int(v) for v in row[8 : 8 + n_sub])
            r = tuple(float(v) for v in row[8 + n_sub : 8 + 2 * n_sub])
            qualified = f_r >= QUALIFY_MIN_FR and f_c <= QUALIFY_MAX_FC
            entries.append(
                RecordEntry(n, r, Evaluation(r_s, g_v, g_c, g_w, f_r, f_c, feasible, qualified))
            )
    return RunRecord(
        problem_id=sidecar["problem_id"],
        algorithm=sidecar["algorithm"],
        seed=sidecar["seed"],
        config=sidecar.get("config", {}),
        entries=entries,
        trace=sidecar.get("trace", {}),
    )


def entries_from_genes(problem, archive_entries: Sequence) -> list[RecordEntry]:
    """Convert gene-encoded archive entries into record entries."""
    from .model import decode

    out = []
    for e in archive_entries:
        n, r = decode(problem, e.solution)
        out.append(RecordEntry(tuple(n), tuple(r), e.evaluation))
    return out


def entries_from_nr(archive_entries: Sequence) -> list[RecordEntry]:
    """Convert (n, r)-payload archive entries into record entries."""
    out = []
    for e in archive_entries:
        n, r = e.solution
        out.append(RecordEntry(tuple(int(v) for v in n), tuple(float(v) for v in r), e.evaluation))
    return out
