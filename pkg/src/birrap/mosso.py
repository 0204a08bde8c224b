"""The eight full-factorial variants of the multi-objective stepwise swarm
solver.

Three two-level factors define a variant: replacement policy (compulsory vs
survival-of-the-fittest), update scope (all variables vs one variable per
solution), and personal-best usage (with vs without). Names follow the
"MOSSO-xyz" convention where digit x/y/z is the level of factor 1/2/3.

Each gene update is a stepwise draw: with probability bands [0, t_g) copy
the gene of a repository solution picked uniformly at random, [t_g, t_p)
copy the personal best, [t_p, t_w) keep the gene, and [t_w, 1] redraw it
uniformly in-bounds. The gBest band width t_g is by default self-adaptive:
scale * cbrt(archive_size / capacity), recomputed once per generation from
the archive size at the generation boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import Evaluation, RrapProblem, evaluate, random_gene, random_solution
from .pareto import ArchiveEntry, ParetoArchive
from .records import RunRecord, entries_from_genes

REPLACEMENT_LEVELS = ("compulsory", "survival_of_fittest")
UPDATE_LEVELS = ("all_variable", "one_variable")
PBEST_LEVELS = ("with_pbest", "without_pbest")

VARIANT_NAMES = tuple(f"MOSSO-{x}{y}{z}" for x in "01" for y in "01" for z in "01")


@dataclass(frozen=True)
class VariantFlags:
    """One cell of the 2^3 factorial design."""

    replacement: str = "compulsory"
    update_scope: str = "all_variable"
    pbest: str = "with_pbest"

    def __post_init__(self):
        if self.replacement not in REPLACEMENT_LEVELS:
            raise ValueError(f"replacement must be one of {REPLACEMENT_LEVELS}")
        if self.update_scope not in UPDATE_LEVELS:
            raise ValueError(f"update_scope must be one of {UPDATE_LEVELS}")
        if self.pbest not in PBEST_LEVELS:
            raise ValueError(f"pbest must be one of {PBEST_LEVELS}")

    @property
    def with_pbest(self) -> bool:
        return self.pbest == "with_pbest"

    @property
    def name(self) -> str:
        digits = (
            REPLACEMENT_LEVELS.index(self.replacement),
            UPDATE_LEVELS.index(self.update_scope),
            PBEST_LEVELS.index(self.pbest),
        )
        return "MOSSO-" + "".join(str(d) for d in digits)

    @classmethod
    def from_name(cls, name: str) -> "VariantFlags":
        if not (name.startswith("MOSSO-") and len(name) == 9 and set(name[6:]) <= {"0", "1"}):
            raise ValueError(f"unknown variant name {name!r}; expected MOSSO-000 .. MOSSO-111")
        x, y, z = (int(c) for c in name[6:])
        return cls(REPLACEMENT_LEVELS[x], UPDATE_LEVELS[y], PBEST_LEVELS[z])


@dataclass
class SsoParams:
    """Stepwise-update thresholds.

    adaptive_cg=True replaces the fixed c_g with the self-adaptive band
    width scale * cbrt(archive_size / capacity); c_p and c_w stay fixed.
    fixed_defaults() returns the conventional fixed-threshold presets.
    """

    c_g: float = 0.5
    c_p: float = 0.75
    c_w: float = 0.9
    adaptive_cg: bool = True
    adaptive_scale: float = 0.8

    @classmethod
    def fixed_defaults(cls, with_pbest: bool) -> "SsoParams":
        if with_pbest:
            return cls(c_g=0.5, c_p=0.75, c_w=0.9, adaptive_cg=False)
        return cls(c_g=0.7, c_p=0.7, c_w=0.9, adaptive_cg=False)

    def validate(self, flags: VariantFlags) -> None:
        if flags.with_pbest:
            if not (0.0 <= self.c_g <= self.c_p <= self.c_w <= 1.0):
                raise ValueError("need 0 <= c_g <= c_p <= c_w <= 1 with pBest")
        else:
            if not (0.0 <= self.c_g <= self.c_w <= 1.0):
                raise ValueError("need 0 <= c_g <= c_w <= 1 without pBest")
        if not (0.0 <= self.adaptive_scale <= 1.0):
            raise ValueError("adaptive_scale must lie in [0, 1]")


def adaptive_cg(n_lns_t: int, n_rep: int, scale: float = 0.8) -> float:
    """Self-adaptive gBest band width: scale * cbrt(n_lns_t / n_rep)."""
    if n_rep <= 0:
        raise ValueError("repository capacity must be positive")
    if not 0 <= n_lns_t <= n_rep:
        raise ValueError(f"archive size {n_lns_t} outside [0, {n_rep}]")
    return scale * float(np.cbrt(n_lns_t / n_rep))


def update_gene(
    x: float,
    p: float | None,
    g: float,
    thresholds: tuple[float, float, float],
    rho: float,
    draw: Callable[[], float],
) -> float:
    """Stepwise decision for one gene.

    Bands are evaluated in cascade (gBest, pBest, keep, random), so an
    adaptive t_g that has grown past t_p simply empties the pBest band.
    draw() is invoked only when the random band is hit, keeping the RNG
    consumption order scriptable.
    """
    t_g, t_p, t_w = thresholds
    if rho < t_g:
        return g
    if p is not None and rho < t_p:
        return p
    if rho < t_w:
        return x
    return draw()


@dataclass
class SwarmState:
    """Mutable per-run state: population, personal bests, archive, RNG."""

    problem: RrapProblem
    solutions: list[list[float]]
    evals: list[Evaluation]
    pbests: list[list[float]] | None
    pbest_evals: list[Evaluation] | None
    archive: ParetoArchive
    rng: np.random.Generator
    generation: int = 0
    cg_t: float = 0.0  # gBest band width for the current generation


@dataclass
class AcceptOutcome:
    replaced: bool
    inserted: bool


def update_solution(state: SwarmState, i: int, flags: VariantFlags, params: SsoParams) -> list[float]:
    """Produce the candidate for solution i.

    The guiding solution is drawn uniformly from the archive (or from the
    current population while the archive is still empty), once per call.
    RNG order per gene: one rho, then one fresh-gene draw only if the
    random band was hit.
    """
    rng = state.rng
    if len(state.archive):
        g_genes = state.archive.entries[int(rng.integers(len(state.archive)))].solution
    else:
        g_genes = state.solutions[int(rng.integers(len(state.solutions)))]
    x = state.solutions[i]
    p = state.pbests[i] if flags.with_pbest else None
    thresholds = (state.cg_t, params.c_p, params.c_w)
    draw = lambda: random_gene(state.problem, rng)  # noqa: E731
    if flags.update_scope == "all_variable":
        return [
            update_gene(x[j], p[j] if p is not None else None, g_genes[j], thresholds, float(rng.random()), draw)
            for j in range(len(x))
        ]
    j0 = int(rng.integers(len(x)))
    candidate = list(x)
    candidate[j0] = update_gene(
        x[j0], p[j0] if p is not None else None, g_genes[j0], thresholds, float(rng.random()), draw
    )
    return candidate


def accept_candidate(
    state: SwarmState,
    i: int,
    candidate: list[float],
    cand_eval: Evaluation,
    flags: VariantFlags,
) -> AcceptOutcome:
    """Apply replacement policy, pBest policy, and the archive offer.

    Compulsory replacement always installs the candidate; survival of the
    fittest keeps the old solution only when it strictly dominates the
    candidate. The pBest is replaced unless it strictly dominates the
    candidate. Independently, a candidate passing the qualification
    thresholds is offered to the archive.
    """
    old = state.evals[i]
    pair = (cand_eval.f_r, cand_eval.f_c)
    if flags.replacement == "compulsory":
        replaced = True
    else:
        replaced = not (old.f_r >= pair[0] and old.f_c <= pair[1] and (old.f_r > pair[0] or old.f_c < pair[1]))
    if replaced:
        state.solutions[i] = candidate
        state.evals[i] = cand_eval
    if flags.with_pbest:
        pe = state.pbest_evals[i]
        if not (pe.f_r >= pair[0] and pe.f_c <= pair[1] and (pe.f_r > pair[0] or pe.f_c < pair[1])):
            state.pbests[i] = candidate
            state.pbest_evals[i] = cand_eval
    inserted = False
    if cand_eval.qualified:
        inserted = state.archive.insert(ArchiveEntry(candidate, cand_eval))
    return AcceptOutcome(replaced, inserted)


def run_mosso(
    problem: RrapProblem,
    flags: VariantFlags | str,
    params: SsoParams | None = None,
    *,
    n_sol: int,
    n_gen: int,
    n_rep: int,
    seed: int,
) -> RunRecord:
    """Run one seeded MOSSO search and return its record.

    Per generation, every solution is updated through the stepwise rule,
    evaluated, passed through the pBest policy, gated by the qualification
    thresholds, and offered to the archive; the archive is truncated to
    capacity at each generation boundary. The whole trajectory is a pure
    function of (problem, flags, params, sizes, seed).
    """
    if isinstance(flags, str):
        flags = VariantFlags.from_name(flags)
    if params is None:
        params = SsoParams()
    params.validate(flags)
    if n_sol < 1 or n_rep < 1 or n_gen < 0:
        raise ValueError("need n_sol >= 1, n_rep >= 1, n_gen >= 0")

    rng = np.random.default_rng(seed)
    solutions = [random_solution(problem, rng) for _ in range(n_sol)]
    evals = [evaluate(problem, x) for x in solutions]
    archive = ParetoArchive(n_rep)
    for x, ev in zip(solutions, evals):
        if ev.qualified:
            archive.insert(ArchiveEntry(list(x), ev))
    archive.truncate()

    state = SwarmState(
        problem=problem,
        solutions=solutions,
        evals=evals,
        pbests=[list(x) for x in solutions] if flags.with_pbest else None,
        pbest_evals=list(evals) if flags.with_pbest else None,
        archive=archive,
        rng=rng,
    )

    trace: dict[str, list] = {"archive_size": [], "cg": [], "inserted": []}
    for t in range(n_gen):
        state.generation = t
        size_t = len(archive)
        if params.adaptive_cg:
            state.cg_t = adaptive_cg(size_t, n_rep, params.adaptive_scale)
        else:
            state.cg_t = params.c_g
        inserted = 0
        for i in range(n_sol):
            candidate = update_solution(state, i, flags, params)
            cand_eval = evaluate(problem, candidate)
            outcome = accept_candidate(state, i, candidate, cand_eval, flags)
            if outcome.inserted:
                inserted += 1
        archive.truncate()
        trace["archive_size"].append(size_t)
        trace["cg"].append(state.cg_t)
        trace["inserted"].append(inserted)

    config = {
        "algorithm": flags.name,
        "n_sol": n_sol,
        "n_gen": n_gen,
        "n_rep": n_rep,
        "n_sub": problem.n_sub,
        "params": {
            "c_g": params.c_g,
            "c_p": params.c_p,
            "c_w": params.c_w,
            "adaptive_cg": params.adaptive_cg,
            "adaptive_scale": params.adaptive_scale,
        },
        "problem": problem.to_dict(),
    }
    return RunRecord(
        problem_id=problem.id,
        algorithm=flags.name,
        seed=seed,
        config=config,
        entries=entries_from_genes(problem, archive.entries),
        trace=trace,
    )
