"""NSGA-II and MOPSO baselines on the same evaluation pipeline and archive
primitives as the swarm solver, for head-to-head comparison."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import RrapProblem, evaluate, evaluate_nr, random_gene, random_solution
from .pareto import ArchiveEntry, ParetoArchive, crowding_distance, nondominated_filter
from .records import RunRecord, entries_from_genes, entries_from_nr


@dataclass
class Nsga2Params:
    crossover_rate: float = 0.6
    mutation_rate: float = 0.4

    def __post_init__(self):
        if not (0.0 <= self.crossover_rate <= 1.0 and 0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("rates must lie in [0, 1]")
        if abs(self.crossover_rate + self.mutation_rate - 1.0) > 1e-12:
            raise ValueError("crossover_rate + mutation_rate must equal 1 so offspring count matches the population")

    def offspring_split(self, n_sol: int) -> tuple[int, int]:
        n_cross = round(self.crossover_rate * n_sol)
        return n_cross, n_sol - n_cross


@dataclass
class MopsoParams:
    inertia: float = 0.5
    c1: float = 0.5
    c2: float = 0.5
    v_n_max: float = 0.5
    v_r_max: float = 0.5
    n_min: float = 1.0
    n_max: float = 10.0
    r_min: float = 0.5
    r_max: float = 1.0

    def __post_init__(self):
        if self.v_n_max <= 0 or self.v_r_max <= 0:
            raise ValueError("velocity clamps must be positive")
        if not (self.n_min < self.n_max and self.r_min < self.r_max):
            raise ValueError("position clamps must be ordered min < max")


def one_cut_crossover(a: Sequence[float], b: Sequence[float], cut: int) -> list[float]:
    """Child takes genes [0, cut) from a and [cut, end) from b."""
    if not 1 <= cut <= len(a) - 1:
        raise ValueError(f"cut must lie in [1, {len(a) - 1}]")
    return list(a[:cut]) + list(b[cut:])


def nondominated_sort(pairs) -> list[list[int]]:
    """Partition points into ranks: rank 1 is the nondominated set, rank 2
    the nondominated set of the rest, and so on."""
    pairs = np.asarray(pairs, dtype=float)
    remaining = list(range(len(pairs)))
    ranks: list[list[int]] = []
    while remaining:
        local = nondominated_filter(pairs[remaining])
        front = [remaining[k] for k in local]
        ranks.append(front)
        front_set = set(front)
        remaining = [k for k in remaining if k not in front_set]
    return ranks


def select_population(pairs, n_sol: int) -> list[int]:
    """Elitist rank-then-crowding selection of n_sol points from a pool.

    Whole ranks are taken until one overflows; that boundary rank is cut by
    crowding distance, largest kept, ties broken by higher f_r, lower f_c,
    then pool order.
    """
    pairs = np.asarray(pairs, dtype=float)
    if len(pairs) < n_sol:
        raise ValueError("pool smaller than the population to select")
    selected: list[int] = []
    for rank in nondominated_sort(pairs):
        if len(selected) + len(rank) <= n_sol:
            selected.extend(rank)
            if len(selected) == n_sol:
                break
            continue
        need = n_sol - len(selected)
        d = crowding_distance(pairs[rank])
        ranked = sorted(
            range(len(rank)),
            key=lambda k: (-d[k], -pairs[rank[k], 0], pairs[rank[k], 1], rank[k]),
        )
        selected.extend(rank[k] for k in ranked[:need])
        break
    return selected


def run_nsga2(
    problem: RrapProblem,
    params: Nsga2Params | None = None,
    *,
    n_sol: int,
    n_gen: int,
    seed: int,
) -> RunRecord:
    """Elitist nondominated-sorting GA with one-cut crossover and
    single-gene redraw mutation, parents drawn uniformly with replacement.

    The final record holds the nondominated, qualification-passing subset
    of the last population.
    """
    if params is None:
        params = Nsga2Params()
    if n_sol < 1 or n_gen < 0:
        raise ValueError("need n_sol >= 1 and n_gen >= 0")
    if problem.n_sub < 2:
        raise ValueError("one-cut crossover needs at least 2 genes")
    n_cross, n_mut = params.offspring_split(n_sol)

    rng = np.random.default_rng(seed)
    pop = [random_solution(problem, rng) for _ in range(n_sol)]
    evals = [evaluate(problem, x) for x in pop]

    trace: dict[str, list] = {"rank1_size": []}
    for _ in range(n_gen):
        offspring: list[list[float]] = []
        for _ in range(n_cross):
            a = pop[int(rng.integers(n_sol))]
            b = pop[int(rng.integers(n_sol))]
            cut = int(rng.integers(1, problem.n_sub))
            offspring.append(one_cut_crossover(a, b, cut))
        for _ in range(n_mut):
            child = list(pop[int(rng.integers(n_sol))])
            j = int(rng.integers(problem.n_sub))
            child[j] = random_gene(problem, rng)
            offspring.append(child)
        pool = pop + offspring
        pool_evals = evals + [evaluate(problem, x) for x in offspring]
        pairs = [(ev.f_r, ev.f_c) for ev in pool_evals]
        chosen = select_population(pairs, n_sol)
        pop = [pool[k] for k in chosen]
        evals = [pool_evals[k] for k in chosen]
        new_pairs = [(ev.f_r, ev.f_c) for ev in evals]
        trace["rank1_size"].append(len(nondominated_filter(new_pairs)))

    front_idx = nondominated_filter([(ev.f_r, ev.f_c) for ev in evals])
    final = [ArchiveEntry(pop[k], evals[k]) for k in front_idx if evals[k].qualified]

    config = {
        "algorithm": "nsga2",
        "n_sol": n_sol,
        "n_gen": n_gen,
        "n_sub": problem.n_sub,
        "params": {"crossover_rate": params.crossover_rate, "mutation_rate": params.mutation_rate},
        "problem": problem.to_dict(),
    }
    return RunRecord(
        problem_id=problem.id,
        algorithm="nsga2",
        seed=seed,
        config=config,
        entries=entries_from_genes(problem, final),
        trace=trace,
    )


def velocity_update(
    v: np.ndarray,
    x: np.ndarray,
    p: np.ndarray,
    g: np.ndarray,
    inertia: float,
    c1: float,
    c2: float,
    rho1: float,
    rho2: float,
    v_max: float,
) -> np.ndarray:
    """Clamped PSO velocity update toward personal best p and guide g."""
    v = inertia * v + c1 * rho1 * (p - x) + c2 * rho2 * (g - x)
    return np.clip(v, -v_max, v_max)


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5).astype(int)


def run_mopso(
    problem: RrapProblem,
    params: MopsoParams | None = None,
    *,
    n_sol: int,
    n_gen: int,
    n_rep: int,
    seed: int,
) -> RunRecord:
    """Particle swarm with a nondominated repository as the guide pool.

    Redundancy levels ride a real-valued carrier and are rounded to the
    nearest integer (clamped in-bounds) for evaluation. The repository is
    truncated by crowding distance whenever an insert pushes it over
    capacity. Personal bests follow the classic rule: a particle dominated
    by its pBest changes nothing; a particle dominating its pBest replaces
    it and enters the repository; mutual nondominance flips a fair coin and
    the particle enters the repository only if it won.
    """
    if params is None:
        params = MopsoParams()
    if n_sol < 1 or n_rep < 1 or n_gen < 0:
        raise ValueError("need n_sol >= 1, n_rep >= 1, n_gen >= 0")

    rng = np.random.default_rng(seed)
    k = problem.n_sub
    n_pos = [rng.uniform(params.n_min, params.n_max, size=k) for _ in range(n_sol)]
    r_pos = [rng.uniform(params.r_min, params.r_max, size=k) for _ in range(n_sol)]
    v_n = [np.zeros(k) for _ in range(n_sol)]
    v_r = [np.zeros(k) for _ in range(n_sol)]

    def eval_particle(np_i: np.ndarray, rp_i: np.ndarray):
        n_int = np.clip(_round_half_up(np_i), int(params.n_min), int(params.n_max))
        ev = evaluate_nr(problem, [int(v) for v in n_int], [float(v) for v in rp_i])
        return n_int, ev

    pbest_n = [arr.copy() for arr in n_pos]
    pbest_r = [arr.copy() for arr in r_pos]
    pbest_evals = []
    archive = ParetoArchive(n_rep)
    for i in range(n_sol):
        n_int, ev = eval_particle(n_pos[i], r_pos[i])
        pbest_evals.append(ev)
        archive.insert(ArchiveEntry((n_int, r_pos[i].copy()), ev))
    archive.truncate()

    trace: dict[str, list] = {"archive_size": [], "inserted": []}
    for _ in range(n_gen):
        inserted = 0
        for i in range(n_sol):
            guide = archive.entries[int(rng.integers(len(archive)))].solution
            g_n = np.asarray(guide[0], dtype=float)
            g_r = np.asarray(guide[1], dtype=float)
            rho1 = float(rng.random())
            rho2 = float(rng.random())
            v_n[i] = velocity_update(
                v_n[i], n_pos[i], pbest_n[i], g_n, params.inertia, params.c1, params.c2, rho1, rho2, params.v_n_max
            )
            n_pos[i] = np.clip(n_pos[i] + v_n[i], params.n_min, params.n_max)
            v_r[i] = velocity_update(
                v_r[i], r_pos[i], pbest_r[i], g_r, params.inertia, params.c1, params.c2, rho1, rho2, params.v_r_max
            )
            r_pos[i] = np.clip(r_pos[i] + v_r[i], params.r_min, params.r_max)

            n_int, ev = eval_particle(n_pos[i], r_pos[i])
            pe = pbest_evals[i]
            new_pair = (ev.f_r, ev.f_c)
            old_pair = (pe.f_r, pe.f_c)
            if old_pair[0] >= new_pair[0] and old_pair[1] <= new_pair[1] and old_pair != new_pair:
                continue  # dominated by its own pBest: nothing changes
            if new_pair[0] >= old_pair[0] and new_pair[1] <= old_pair[1] and new_pair != old_pair:
                take = True  # particle dominates its pBest
            else:
                take = bool(rng.random() < 0.5)  # mutually nondominated
            if not take:
                continue
            pbest_n[i] = n_pos[i].copy()
            pbest_r[i] = r_pos[i].copy()
            pbest_evals[i] = ev
            if archive.insert(ArchiveEntry((n_int, r_pos[i].copy()), ev)):
                inserted += 1
                if len(archive) > n_rep:
                    archive.truncate()
        trace["archive_size"].append(len(archive))
        trace["inserted"].append(inserted)

    config = {
        "algorithm": "mopso",
        "n_sol": n_sol,
        "n_gen": n_gen,
        "n_rep": n_rep,
        "n_sub": problem.n_sub,
        "params": {
            "inertia": params.inertia,
            "c1": params.c1,
            "c2": params.c2,
            "v_n_max": params.v_n_max,
            "v_r_max": params.v_r_max,
            "n_min": params.n_min,
            "n_max": params.n_max,
            "r_min": params.r_min,
            "r_max": params.r_max,
        },
        "problem": problem.to_dict(),
    }
    return RunRecord(
        problem_id=problem.id,
        algorithm="mopso",
        seed=seed,
        config=config,
        entries=entries_from_nr(archive.entries),
        trace=trace,
    )
