"""Experiment harness: seeded (optionally parallel) batch execution with
manifested artifacts, plot-data emission, and a brute-force lattice oracle.

The oracle enumerates a finite (n, r) grid with an independent vectorized
evaluator and returns the exact nondominated front of the feasible points,
giving solver-independent ground truth for verification.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .baselines import run_mopso, run_nsga2
from .metrics import ReferenceFront
from .model import QUALIFY_MAX_FC, QUALIFY_MIN_FR, R_CLAMP_HI, RrapProblem, benchmark
from .mosso import VARIANT_NAMES, run_mosso
from .pareto import nondominated_filter
from .records import RunRecord, load_record, write_record

ALGORITHM_NAMES = VARIANT_NAMES + ("nsga2", "mopso")
WORKERS_ENV = "BIRRAP_WORKERS"
DEFAULT_LATTICE_CEILING = 10_000_000


@dataclass
class ExperimentConfig:
    problems: tuple[int, ...] = (1,)
    algorithms: tuple[str, ...] = ("MOSSO-001",)
    n_run: int = 50
    n_sol: int = 100
    n_gen: int = 1000
    n_rep: int | None = None  # defaults to n_sol
    r_lb: float = 0.75
    formula_mode: str = "standard_active"
    seed: int = 1
    out_dir: str = "results"

    def __post_init__(self):
        self.problems = tuple(int(p) for p in self.problems)
        self.algorithms = tuple(self.algorithms)
        for p in self.problems:
            if p not in (1, 2, 3, 4):
                raise ValueError(f"unknown problem id {p}")
        for a in self.algorithms:
            if a not in ALGORITHM_NAMES:
                raise ValueError(f"unknown algorithm {a!r}; valid: {', '.join(ALGORITHM_NAMES)}")
        if min(self.n_run, self.n_sol, self.n_gen) < 1:
            raise ValueError("n_run, n_sol and n_gen must all be >= 1")
        if self.n_rep is not None and self.n_rep < 1:
            raise ValueError("n_rep must be >= 1")

    @property
    def repository_size(self) -> int:
        return self.n_sol if self.n_rep is None else self.n_rep

    def to_dict(self) -> dict:
        return {
            "problems": list(self.problems),
            "algorithms": list(self.algorithms),
            "n_run": self.n_run,
            "n_sol": self.n_sol,
            "n_gen": self.n_gen,
            "n_rep": self.repository_size,
            "r_lb": self.r_lb,
            "formula_mode": self.formula_mode,
            "seed": self.seed,
            "out_dir": self.out_dir,
        }


def derive_seed(base_seed: int, problem_id: int, algorithm: str, run_index: int) -> int:
    """Stable per-run seed from the run tuple, independent of execution order."""
    key = f"{base_seed}|{problem_id}|{algorithm}|{run_index}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def run_single(
    problem: RrapProblem,
    algorithm: str,
    *,
    n_sol: int,
    n_gen: int,
    n_rep: int,
    seed: int,
) -> RunRecord:
    """Dispatch one seeded run of any supported algorithm."""
    if algorithm in VARIANT_NAMES:
        return run_mosso(problem, algorithm, n_sol=n_sol, n_gen=n_gen, n_rep=n_rep, seed=seed)
    if algorithm == "nsga2":
        return run_nsga2(problem, n_sol=n_sol, n_gen=n_gen, seed=seed)
    if algorithm == "mopso":
        return run_mopso(problem, n_sol=n_sol, n_gen=n_gen, n_rep=n_rep, seed=seed)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def record_paths(out_dir, problem_id: int, algorithm: str, run_index: int) -> tuple[Path, Path]:
    base = Path(out_dir) / f"problem-{problem_id}" / algorithm
    return base / f"run-{run_index:03d}.csv", base / f"run-{run_index:03d}.json"


def _execute_task(task: tuple) -> tuple[str, str, float]:
    """Worker body: run one (problem, algorithm, run) task and persist it."""
    (out_dir, problem_id, algorithm, run_index, n_sol, n_gen, n_rep, base_seed, r_lb, formula_mode) = task
    problem = benchmark(problem_id, r_lb=r_lb, formula_mode=formula_mode)
    seed = derive_seed(base_seed, problem_id, algorithm, run_index)
    started = time.perf_counter()
    record = run_single(problem, algorithm, n_sol=n_sol, n_gen=n_gen, n_rep=n_rep, seed=seed)
    elapsed = time.perf_counter() - started
    csv_path, json_path = record_paths(out_dir, problem_id, algorithm, run_index)
    write_record(record, csv_path, json_path)
    return str(csv_path), str(json_path), elapsed


def _file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> dict:
    """Execute every (problem, algorithm, run) combination and write a
    manifest of all artifacts with content digests.

    Worker count comes from the argument, the BIRRAP_WORKERS environment
    variable, or 1; outputs are byte-identical regardless.
    """
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers < 1:
        raise ValueError("workers must be >= 1")
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    tasks = [
        (
            str(out_dir),
            problem_id,
            algorithm,
            run_index,
            config.n_sol,
            config.n_gen,
            config.repository_size,
            config.seed,
            config.r_lb,
            config.formula_mode,
        )
        for problem_id in config.problems
        for algorithm in config.algorithms
        for run_index in range(config.n_run)
    ]

    if workers == 1:
        results = [_execute_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_execute_task, tasks))

    files = []
    runtimes = {}
    for task, (csv_path, json_path, elapsed) in zip(tasks, results):
        _, problem_id, algorithm, run_index = task[:4]
        runtimes[f"problem-{problem_id}/{algorithm}/run-{run_index:03d}"] = elapsed
        for path in (csv_path, json_path):
            rel = str(Path(path).relative_to(out_dir))
            files.append({"path": rel, "sha256": _file_digest(path), "bytes": os.path.getsize(path)})
    files.sort(key=lambda f: f["path"])

    manifest = {"config": config.to_dict(), "files": files, "runtime_seconds": runtimes}
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def verify_manifest(out_dir) -> list[str]:
    """Re-hash every manifested file; returns the paths that changed."""
    out_dir = Path(out_dir)
    with open(out_dir / "manifest.json", "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    bad = []
    for entry in manifest["files"]:
        path = out_dir / entry["path"]
        if not path.exists() or _file_digest(path) != entry["sha256"]:
            bad.append(entry["path"])
    return bad


def load_results(out_dir) -> dict[tuple[int, str], list[RunRecord]]:
    """Load every persisted record under an experiment directory, grouped
    by (problem id, algorithm) and ordered by run index."""
    out_dir = Path(out_dir)

    def run_index(path: Path) -> int:
        return int(path.stem.split("-")[-1])

    grouped: dict[tuple[int, str], list[RunRecord]] = {}
    paths = sorted(out_dir.glob("problem-*/*/run-*.json"), key=lambda p: (str(p.parent), run_index(p)))
    for json_path in paths:
        csv_path = json_path.with_suffix(".csv")
        record = load_record(csv_path, json_path)
        grouped.setdefault((record.problem_id, record.algorithm), []).append(record)
    return grouped


# --- brute-force lattice oracle -------------------------------------------


@dataclass
class LatticeSpec:
    """Finite evaluation grid: redundancy choices and reliability choices,
    either shared across subsystems or given per subsystem."""

    n_values: Sequence
    r_values: Sequence

    def per_subsystem(self, n_sub: int) -> tuple[list[list[int]], list[list[float]]]:
        def expand(values, cast):
            if values and isinstance(values[0], (list, tuple, np.ndarray)):
                if len(values) != n_sub:
                    raise ValueError(f"per-subsystem grid needs {n_sub} entries, got {len(values)}")
                return [[cast(v) for v in sub] for sub in values]
            return [[cast(v) for v in values] for _ in range(n_sub)]

        return expand(list(self.n_values), int), expand(list(self.r_values), float)

    def size(self, n_sub: int) -> int:
        ns, rs = self.per_subsystem(n_sub)
        total = 1
        for nv, rv in zip(ns, rs):
            total *= len(nv) * len(rv)
        return total


@dataclass
class OracleResult:
    front: ReferenceFront  # nondominated in penalized (f_r, f_c)
    front_n: np.ndarray
    front_r: np.ndarray
    front_raw: np.ndarray  # (r_s, g_v, g_c, g_w) rows for front members
    raw_front: np.ndarray  # nondominated in raw (r_s, g_c) space
    n_total: int
    n_feasible: int


def lattice_evaluate(problem: RrapProblem, N: np.ndarray, R: np.ndarray) -> dict[str, np.ndarray]:
    """Vectorized evaluation of (n, r) rows; independent of the scalar path.

    Returns arrays r_s, g_v, g_c, g_w, f_r, f_c, feasible, qualified.
    """
    N = np.asarray(N, dtype=float)
    R = np.asarray(R, dtype=float)
    if N.shape != R.shape or N.ndim != 2 or N.shape[1] != problem.n_sub:
        raise ValueError(f"expected matching (m, {problem.n_sub}) arrays")
    if problem.formula_mode == "literal" and problem.id in (2, 3):
        sub = R**N
    else:
        sub = 1.0 - (1.0 - R) ** N
    pid = problem.id
    if pid in (1, 4):
        r_s = sub.prod(axis=1)
    elif pid == 2:
        r_s = 1.0 - (1.0 - sub[:, 0] * sub[:, 1]) * (
            1.0 - (1.0 - (1.0 - sub[:, 2]) * (1.0 - sub[:, 3])) * sub[:, 4]
        )
    else:
        a, b, c, d, e = (sub[:, j] for j in range(5))
        r_s = (
            a * b
            + c * d
            + a * d * e
            + b * c * e
            - a * b * c * d
            - a * b * c * e
            - a * b * d * e
            - a * c * d * e
            - b * c * d * e
            + 2.0 * a * b * c * d * e
        )
    r_s = np.clip(r_s, 0.0, 1.0)

    q = np.array([s.vol_coeff for s in problem.subsystems])
    alpha = np.array([s.alpha for s in problem.subsystems])
    beta = np.array([s.beta for s in problem.subsystems])
    w = np.array([s.weight for s in problem.subsystems])
    Rc = np.minimum(R, R_CLAMP_HI)
    eN = np.exp(N / 4.0)
    g_v = (q * N**2).sum(axis=1)
    g_c = (alpha * (-problem.mission_time / np.log(Rc)) ** beta * (N + eN)).sum(axis=1)
    g_w = (w * N * eN).sum(axis=1)

    m = np.minimum.reduce(
        [r_s / problem.r_lb, problem.v_ub / g_v, problem.w_ub / g_w, problem.c_ub / g_c]
    )
    if problem.cap_penalty_factor:
        m = np.minimum(m, 1.0)
    m3 = m**3
    with np.errstate(divide="ignore"):
        f_r = r_s * m3
        f_c = np.where(m3 > 0, g_c / np.where(m3 > 0, m3, 1.0), np.inf)

    in_bounds = (
        (N >= problem.n_lb).all(axis=1)
        & (N <= problem.n_ub).all(axis=1)
        & (R >= problem.r_lb).all(axis=1)
        & (R <= problem.r_ub).all(axis=1)
    )
    feasible = in_bounds & (g_v <= problem.v_ub) & (g_c <= problem.c_ub) & (g_w <= problem.w_ub)
    qualified = (f_r >= QUALIFY_MIN_FR) & (f_c <= QUALIFY_MAX_FC)
    return {
        "r_s": r_s,
        "g_v": g_v,
        "g_c": g_c,
        "g_w": g_w,
        "f_r": f_r,
        "f_c": f_c,
        "feasible": feasible,
        "qualified": qualified,
    }


def lattice_points(problem: RrapProblem, lattice: LatticeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Materialize the full cartesian grid as (N, R) row matrices."""
    n_lists, r_lists = lattice.per_subsystem(problem.n_sub)
    combos = []
    for nv, rv in zip(n_lists, r_lists):
        combos.append([(n, r) for n in nv for r in rv])
    sizes = [len(c) for c in combos]
    grids = np.indices(sizes).reshape(len(sizes), -1)
    m = grids.shape[1]
    N = np.empty((m, problem.n_sub))
    R = np.empty((m, problem.n_sub))
    for j, combo in enumerate(combos):
        arr = np.array(combo, dtype=float)
        N[:, j] = arr[grids[j], 0]
        R[:, j] = arr[grids[j], 1]
    return N, R


def oracle_front(
    problem: RrapProblem,
    lattice: LatticeSpec,
    ceiling: int = DEFAULT_LATTICE_CEILING,
) -> OracleResult:
    """Enumerate the lattice, evaluate every point, and return the exact
    nondominated front of the feasible points.

    Deterministic and solver-independent; raises when the grid exceeds the
    configured ceiling.
    """
    total = lattice.size(problem.n_sub)
    if total > ceiling:
        raise ValueError(f"lattice has {total} points, above the ceiling of {ceiling}")
    if total == 0:
        raise ValueError("empty lattice")
    N, R = lattice_points(problem, lattice)
    ev = lattice_evaluate(problem, N, R)
    feasible = ev["feasible"]
    n_feasible = int(feasible.sum())
    if n_feasible == 0:
        raise ValueError("no feasible lattice point; cannot build an oracle front")
    pairs = np.column_stack([ev["f_r"][feasible], ev["f_c"][feasible]])
    keep = nondominated_filter(pairs)
    Nf = N[feasible]
    Rf = R[feasible]
    raw_pairs = np.column_stack([ev["r_s"][feasible], ev["g_c"][feasible]])
    raw_keep = nondominated_filter(raw_pairs)
    front_raw = np.column_stack(
        [ev[k][feasible][keep] for k in ("r_s", "g_v", "g_c", "g_w")]
    )
    return OracleResult(
        front=ReferenceFront(pairs[keep], provenance="oracle"),
        front_n=Nf[keep].astype(int),
        front_r=Rf[keep],
        front_raw=front_raw,
        raw_front=raw_pairs[raw_keep],
        n_total=total,
        n_feasible=n_feasible,
    )


def write_oracle(result: OracleResult, out_dir) -> list[Path]:
    """Persist the oracle front (penalized and raw) plus a summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    k = result.front_n.shape[1]
    front_csv = out_dir / "oracle_front.csv"
    with open(front_csv, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["f_r", "f_c", "r_s", "g_v", "g_c", "g_w"]
            + [f"n_{j + 1}" for j in range(k)]
            + [f"r_{j + 1}" for j in range(k)]
        )
        for i in range(len(result.front)):
            writer.writerow(
                [repr(float(v)) for v in result.front.points[i]]
                + [repr(float(v)) for v in result.front_raw[i]]
                + [int(v) for v in result.front_n[i]]
                + [repr(float(v)) for v in result.front_r[i]]
            )
    raw_csv = out_dir / "oracle_raw_front.csv"
    with open(raw_csv, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["r_s", "g_c"])
        for row in result.raw_front:
            writer.writerow([repr(float(v)) for v in row])
    summary = out_dir / "oracle_summary.json"
    with open(summary, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "n_total": result.n_total,
                "n_feasible": result.n_feasible,
                "front_size": len(result.front),
                "raw_front_size": len(result.raw_front),
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    return [front_csv, raw_csv, summary]


def emit_plot_data(
    records_by_algorithm: dict[str, Sequence[RunRecord]],
    reference: ReferenceFront | None,
    out_dir,
) -> list[Path]:
    """One CSV of feasible points per algorithm plus the reference front,
    ready for any external plotter."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for algo, records in records_by_algorithm.items():
        path = out_dir / f"points-{algo}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["f_r", "f_c", "r_s", "g_c", "run_id"])
            for run_id, rec in enumerate(records):
                for e in rec.entries:
                    if not e.evaluation.feasible:
                        continue
                    ev = e.evaluation
                    writer.writerow([repr(ev.f_r), repr(ev.f_c), repr(ev.r_s), repr(ev.g_c), run_id])
        paths.append(path)
    if reference is not None:
        ref_path = out_dir / "reference-front.csv"
        with open(ref_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["f_r", "f_c"])
            for fr, fc in reference.points:
                writer.writerow([repr(float(fr)), repr(float(fc))])
        paths.append(ref_path)
    return paths
