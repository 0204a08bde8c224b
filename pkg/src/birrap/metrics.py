"""Reference-front construction, generational-distance and spacing
indicators, per-algorithm result tables, and the factorial gap analysis."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .mosso import VARIANT_NAMES
from .pareto import nondominated_filter
from .records import RunRecord

MEMBERSHIP_TOL = 1e-12  # exact-tie tolerance for reference-front membership

# Index senses: which direction counts as "better" in the gap analysis.
# Larger spacing is read as better diversity by default; flip via argument.
_HIGHER_IS_BETTER = {"n_lns": True, "n_gns": True, "n_inf": False, "gd": False}


@dataclass
class ReferenceFront:
    """Mutually nondominated (f_r, f_c) points used as the reference."""

    points: np.ndarray
    provenance: str = "simulated"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)

    def __len__(self) -> int:
        return len(self.points)

    def ranges(self) -> np.ndarray:
        return self.points.max(axis=0) - self.points.min(axis=0)


@dataclass
class MetricsRow:
    algorithm: str
    n_lns: int
    n_gns: int
    n_inf: int
    gd: float | None
    sp: float | None


def build_simulated_front(records: Sequence[RunRecord]) -> ReferenceFront:
    """Pool all feasible final-repository entries across records and keep
    the nondominated ones."""
    pool = [pair for rec in records for pair in rec.feasible_objectives()]
    if not pool:
        raise ValueError("no feasible entries in any record; cannot build a reference front")
    pts = np.asarray(pool, dtype=float)
    keep = nondominated_filter(pts)
    return ReferenceFront(pts[keep], provenance="simulated")


def nearest_distances(front, reference: ReferenceFront, normalize: bool = False) -> np.ndarray:
    """d_i: Euclidean distance from each local point to its nearest
    reference point, optionally after min-max scaling by the reference
    ranges (degenerate ranges scale by 1)."""
    local = np.asarray(front, dtype=float).reshape(-1, 2)
    ref = reference.points
    if len(local) == 0 or len(ref) == 0:
        raise ValueError("front and reference must both be nonempty")
    if normalize:
        span = reference.ranges()
        span = np.where(span > 0, span, 1.0)
        local = local / span
        ref = ref / span
    diff = local[:, None, :] - ref[None, :, :]
    return np.sqrt((diff**2).sum(axis=2)).min(axis=1)


def gd(front, reference: ReferenceFront, normalize: bool = False) -> float:
    """Generational distance: sqrt(sum d_i^2) / N; smaller is closer."""
    d = nearest_distances(front, reference, normalize)
    return float(np.sqrt((d**2).sum()) / len(d))


def sp(front, reference: ReferenceFront, normalize: bool = False) -> float:
    """Spacing: sample standard deviation of the d_i; needs >= 2 points."""
    d = nearest_distances(front, reference, normalize)
    return _sp_from_distances(d)


def _gd_from_distances(d: np.ndarray) -> float:
    return float(np.sqrt((d**2).sum()) / len(d))


def _sp_from_distances(d: np.ndarray) -> float:
    if len(d) < 2:
        raise ValueError("spacing needs at least 2 local points")
    dbar = d.mean()
    return float(np.sqrt(((dbar - d) ** 2).sum() / (len(d) - 1)))


def _membership_count(points: np.ndarray, reference: ReferenceFront) -> int:
    if len(points) == 0:
        return 0
    ref = reference.points
    close = np.abs(points[:, None, :] - ref[None, :, :]) <= MEMBERSHIP_TOL
    return int(close.all(axis=2).any(axis=1).sum())


def tabulate(
    records_by_algorithm: Mapping[str, Sequence[RunRecord]],
    reference: ReferenceFront,
    normalize: bool = False,
    per_run: bool = False,
) -> list[MetricsRow]:
    """One summary row per algorithm.

    n_lns/n_inf sum feasible/infeasible final-repository entries over runs;
    n_gns counts feasible entries coinciding with a reference point. GD and
    SP are computed on the pooled feasible entries by default, or averaged
    over per-run values with per_run=True; both are absent when there is
    nothing feasible to measure.
    """
    rows = []
    for algo, records in records_by_algorithm.items():
        n_lns = sum(rec.n_feasible for rec in records)
        n_inf = sum(rec.n_infeasible for rec in records)
        pooled = [pair for rec in records for pair in rec.feasible_objectives()]
        pts = np.asarray(pooled, dtype=float).reshape(-1, 2)
        n_gns = _membership_count(pts, reference)
        gd_val: float | None = None
        sp_val: float | None = None
        if per_run:
            gds, sps = [], []
            for rec in records:
                local = rec.feasible_objectives()
                if not local:
                    continue
                d = nearest_distances(local, reference, normalize)
                gds.append(_gd_from_distances(d))
                if len(d) >= 2:
                    sps.append(_sp_from_distances(d))
            gd_val = float(np.mean(gds)) if gds else None
            sp_val = float(np.mean(sps)) if sps else None
        elif len(pts):
            d = nearest_distances(pts, reference, normalize)
            gd_val = _gd_from_distances(d)
            sp_val = _sp_from_distances(d) if len(d) >= 2 else None
        rows.append(MetricsRow(algo, n_lns, n_gns, n_inf, gd_val, sp_val))
    return rows


def factorial_gap(rows: Sequence[MetricsRow], sp_higher_is_better: bool = True) -> dict:
    """Per-factor, per-index gap table over the eight factorial variants.

    For each factor the four variants at each level are averaged; the gap
    is |better - worse| / better * 100 with "better" set by the index sense
    (higher n_lns/n_gns, lower n_inf/gd, spacing configurable).
    """
    by_name = {row.algorithm: row for row in rows}
    missing = [name for name in VARIANT_NAMES if name not in by_name]
    if missing:
        raise ValueError(f"factorial analysis needs all eight variants; missing {missing}")
    sense = dict(_HIGHER_IS_BETTER, sp=sp_higher_is_better)
    table: dict = {}
    for factor in (1, 2, 3):
        factor_key = f"factor_{factor}"
        table[factor_key] = {}
        for index in ("n_lns", "n_gns", "n_inf", "gd", "sp"):
            means = []
            for level in (0, 1):
                values = [
                    getattr(by_name[name], index)
                    for name in VARIANT_NAMES
                    if name[5 + factor] == str(level)
                ]
                if any(v is None for v in values):
                    means = None
                    break
                means.append(float(np.mean([float(v) for v in values])))
            if means is None:
                table[factor_key][index] = {"level0": None, "level1": None, "better_level": None, "gap_pct": None}
                continue
            m0, m1 = means
            if sense[index]:
                better_level = 0 if m0 >= m1 else 1
            else:
                better_level = 0 if m0 <= m1 else 1
            better, worse = (m0, m1) if better_level == 0 else (m1, m0)
            if better == worse:
                gap = 0.0
            elif better == 0:
                gap = None
            else:
                gap = abs(better - worse) / better * 100.0
            table[factor_key][index] = {
                "level0": m0,
                "level1": m1,
                "better_level": better_level,
                "gap_pct": gap,
            }
    return table


def write_metrics_csv(rows: Sequence[MetricsRow], path) -> None:
    """Summary table with one row per algorithm; absent metrics stay blank."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["algorithm", "n_lns", "n_gns", "n_inf", "gd", "sp"])
        for row in rows:
            writer.writerow(
                [
                    row.algorithm,
                    row.n_lns,
                    row.n_gns,
                    row.n_inf,
                    "" if row.gd is None else repr(row.gd),
                    "" if row.sp is None else repr(row.sp),
                ]
            )


def write_gap_json(table: dict, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(table, fh, indent=2, sort_keys=True)
        fh.write("\n")
