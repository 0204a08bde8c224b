"""Benchmark problems and the evaluation pipeline for the bi-objective
active reliability-redundancy allocation problem.

A candidate design chooses, per subsystem, an integer redundancy level n_i
and a component reliability r_i. Both are packed into one real gene
x_i = n_i + r_i (integer part = redundancy, fractional part = reliability).
The two objectives are the penalized system reliability (maximize) and the
penalized system cost (minimize); volume, cost and weight act as
constraints folded into a multiplicative cubic penalty factor.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

# Component reliability is clamped just below 1 so the -T/ln(r) cost term
# stays finite; cost diverges as r -> 1, so the clamp cannot hide an optimum.
R_CLAMP_HI = 1.0 - 1e-6

# Admission thresholds for nondominated-solution selection: early-generation
# junk with a tiny penalized reliability or an absurd penalized cost is kept
# out of the repository.
QUALIFY_MIN_FR = 0.1
QUALIFY_MAX_FC = 100_000.0

FORMULA_MODES = ("standard_active", "literal")


@dataclass(frozen=True)
class SubsystemParams:
    """Per-subsystem cost/volume/weight parameters.

    alpha is the absolute cost scale (benchmark tables quote alpha * 1e5),
    beta the cost exponent, vol_coeff the volume coefficient multiplying
    n_i^2, and weight the weight coefficient multiplying n_i * e^(n_i/4).
    """

    alpha: float
    beta: float
    vol_coeff: float
    weight: float

    def __post_init__(self):
        for name in ("alpha", "beta", "vol_coeff", "weight"):
            if not getattr(self, name) > 0:
                raise ValueError(f"SubsystemParams.{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class RrapProblem:
    """One benchmark instance: structure id, subsystem parameters, bounds.

    The structure id selects the system-reliability formula: 1 and 4 are
    series of parallel subsystems, 2 is the series-parallel network, 3 is
    the five-unit bridge. formula_mode "standard_active" computes every
    subsystem term as 1-(1-r_i)^n_i (active redundancy); "literal" keeps
    the r_i^n_i terms exactly as the benchmark table prints them for
    structures 2 and 3.
    """

    id: int
    subsystems: tuple[SubsystemParams, ...]
    v_ub: float
    c_ub: float
    w_ub: float
    mission_time: float = 1000.0
    n_lb: int = 1
    n_ub: int = 10
    r_lb: float = 0.75
    r_ub: float = 1.0
    formula_mode: str = "standard_active"
    cap_penalty_factor: bool = False

    def __post_init__(self):
        if self.id not in (1, 2, 3, 4):
            raise ValueError(f"unknown structure id {self.id}; expected 1..4")
        object.__setattr__(self, "subsystems", tuple(self.subsystems))
        if self.id in (2, 3) and len(self.subsystems) != 5:
            raise ValueError(f"structure {self.id} requires exactly 5 subsystems")
        if len(self.subsystems) < 1:
            raise ValueError("at least one subsystem required")
        if not (1 <= self.n_lb <= self.n_ub):
            raise ValueError(f"need 1 <= n_lb <= n_ub, got [{self.n_lb}, {self.n_ub}]")
        if not (0.0 < self.r_lb < self.r_ub <= 1.0):
            raise ValueError(f"need 0 < r_lb < r_ub <= 1, got [{self.r_lb}, {self.r_ub}]")
        if self.formula_mode not in FORMULA_MODES:
            raise ValueError(f"formula_mode must be one of {FORMULA_MODES}")
        for ub, name in ((self.v_ub, "v_ub"), (self.c_ub, "c_ub"), (self.w_ub, "w_ub")):
            if not ub > 0:
                raise ValueError(f"{name} must be > 0")
        if not self.mission_time > 0:
            raise ValueError("mission_time must be > 0")

    @property
    def n_sub(self) -> int:
        return len(self.subsystems)

    @property
    def r_hi(self) -> float:
        """Largest reliability the encoding may carry (clamped below 1)."""
        return min(self.r_ub, R_CLAMP_HI)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "subsystems": [
                {"alpha": s.alpha, "beta": s.beta, "vol_coeff": s.vol_coeff, "weight": s.weight}
                for s in self.subsystems
            ],
            "v_ub": self.v_ub,
            "c_ub": self.c_ub,
            "w_ub": self.w_ub,
            "mission_time": self.mission_time,
            "n_lb": self.n_lb,
            "n_ub": self.n_ub,
            "r_lb": self.r_lb,
            "r_ub": self.r_ub,
            "formula_mode": self.formula_mode,
            "cap_penalty_factor": self.cap_penalty_factor,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RrapProblem":
        data = dict(data)
        subs = tuple(SubsystemParams(**s) for s in data.pop("subsystems"))
        return cls(subsystems=subs, **data)

    @classmethod
    def from_json(cls, path) -> "RrapProblem":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(slots=True)
class Evaluation:
    """Raw objectives/constraints plus the penalized objective pair."""

    r_s: float
    g_v: float
    g_c: float
    g_w: float
    f_r: float
    f_c: float
    feasible: bool
    qualified: bool

    @property
    def objectives(self) -> tuple[float, float]:
        return (self.f_r, self.f_c)


# Benchmark parameter table; alpha is stored as alpha * 1e5 exactly as the
# literature quotes it and scaled at construction time.
_BENCH = {
    1: dict(
        alpha_1e5=(2.330, 1.450, 0.541, 8.050, 1.950),
        beta=(1.5, 1.5, 1.5, 1.5, 1.5),
        vol=(1.0, 2.0, 3.0, 4.0, 2.0),
        weight=(7.0, 8.0, 8.0, 6.0, 9.0),
        v_ub=110.0,
        c_ub=175.0,
        w_ub=200.0,
    ),
    2: dict(
        alpha_1e5=(2.500, 1.450, 0.541, 0.541, 2.100),
        beta=(1.5, 1.5, 1.5, 1.5, 1.5),
        vol=(2.0, 4.0, 5.0, 8.0, 4.0),
        weight=(3.5, 4.0, 4.0, 3.5, 4.5),
        v_ub=180.0,
        c_ub=175.0,
        w_ub=100.0,
    ),
    4: dict(
        alpha_1e5=(1.0, 2.3, 0.3, 2.3),
        beta=(1.5, 1.5, 1.5, 1.5),
        vol=(1.0, 2.0, 3.0, 2.0),
        weight=(6.0, 6.0, 8.0, 7.0),
        v_ub=250.0,
        c_ub=400.0,
        w_ub=500.0,
    ),
}
_BENCH[3] = _BENCH[1]  # bridge shares the series benchmark's parameters


def benchmark(pid: int, **overrides) -> RrapProblem:
    """Return one of the four built-in benchmark problems.

    Keyword overrides (e.g. n_ub=3, r_ub=0.95, formula_mode="literal") are
    applied on top of the published parameters.
    """
    if pid not in _BENCH:
        raise ValueError(f"unknown benchmark id {pid}; expected 1..4")
    t = _BENCH[pid]
    subs = tuple(
        SubsystemParams(alpha=a / 1e5, beta=b, vol_coeff=q, weight=w)
        for a, b, q, w in zip(t["alpha_1e5"], t["beta"], t["vol"], t["weight"])
    )
    base = dict(id=pid, subsystems=subs, v_ub=t["v_ub"], c_ub=t["c_ub"], w_ub=t["w_ub"])
    base.update(overrides)
    return RrapProblem(**base)


def decode(problem: RrapProblem, genes: Sequence[float]) -> tuple[list[int], list[float]]:
    """Split mixed genes into (redundancy levels, component reliabilities).

    n_j = floor(x_j), r_j = x_j - n_j; re-encoding n_j + r_j reproduces the
    gene exactly. Raises ValueError naming the offending index when a gene
    leaves the encoding bounds.
    """
    if len(genes) != problem.n_sub:
        raise ValueError(f"expected {problem.n_sub} genes, got {len(genes)}")
    n_lb, n_ub = problem.n_lb, problem.n_ub
    r_lo, r_hi = problem.r_lb, problem.r_hi
    ns: list[int] = []
    rs: list[float] = []
    for j, x in enumerate(genes):
        x = float(x)
        n = math.floor(x)
        r = x - n
        if not (n_lb <= n <= n_ub):
            raise ValueError(f"gene {j}: redundancy {n} outside [{n_lb}, {n_ub}]")
        if not (r_lo <= r <= r_hi):
            raise ValueError(f"gene {j}: reliability {r!r} outside [{r_lo}, {r_hi}]")
        ns.append(n)
        rs.append(r)
    return ns, rs


def encode(n: Sequence[int], r: Sequence[float]) -> list[float]:
    """Pack (redundancy, reliability) vectors into mixed genes."""
    return [int(ni) + float(ri) for ni, ri in zip(n, r)]


def _subsystem_terms(problem: RrapProblem, n: Sequence[int], r: Sequence[float]) -> list[float]:
    # "literal" keeps the printed r^n terms for structures 2 and 3; the
    # printed formulas for structures 1 and 4 already use the active form.
    if problem.formula_mode == "literal" and problem.id in (2, 3):
        return [float(ri) ** int(ni) for ni, ri in zip(n, r)]
    return [1.0 - (1.0 - float(ri)) ** int(ni) for ni, ri in zip(n, r)]


def system_reliability(problem: RrapProblem, n: Sequence[int], r: Sequence[float]) -> float:
    """System reliability for the problem's structure, in [0, 1]."""
    if len(n) != problem.n_sub or len(r) != problem.n_sub:
        raise ValueError(f"expected vectors of length {problem.n_sub}")
    R = _subsystem_terms(problem, n, r)
    pid = problem.id
    if pid in (1, 4):
        out = 1.0
        for Ri in R:
            out *= Ri
    elif pid == 2:
        out = 1.0 - (1.0 - R[0] * R[1]) * (1.0 - (1.0 - (1.0 - R[2]) * (1.0 - R[3])) * R[4])
    else:  # bridge
        R1, R2, R3, R4, R5 = R
        out = (
            R1 * R2
            + R3 * R4
            + R1 * R4 * R5
            + R2 * R3 * R5
            - R1 * R2 * R3 * R4
            - R1 * R2 * R3 * R5
            - R1 * R2 * R4 * R5
            - R1 * R3 * R4 * R5
            - R2 * R3 * R4 * R5
            + 2.0 * R1 * R2 * R3 * R4 * R5
        )
    # guard against sub-ulp drift from the alternating bridge polynomial
    return min(max(out, 0.0), 1.0)


def constraints(problem: RrapProblem, n: Sequence[int], r: Sequence[float]) -> tuple[float, float, float]:
    """Volume, cost and weight consumption (g_v, g_c, g_w).

    g_v = sum q_i n_i^2
    g_c = sum alpha_i (-T/ln r_i)^beta_i (n_i + e^(n_i/4))
    g_w = sum w_i n_i e^(n_i/4)

    r_i = 1 makes the cost term singular; callers clamp to R_CLAMP_HI first.
    """
    T = problem.mission_time
    g_v = g_c = g_w = 0.0
    for sub, ni, ri in zip(problem.subsystems, n, r):
        ni = int(ni)
        ri = float(ri)
        if not 0.0 < ri < 1.0:
            raise ValueError(f"component reliability {ri!r} makes the cost term singular; clamp into (0, 1)")
        e = math.exp(ni / 4.0)
        g_v += sub.vol_coeff * ni * ni
        g_c += sub.alpha * (-T / math.log(ri)) ** sub.beta * (ni + e)
        g_w += sub.weight * ni * e
    return g_v, g_c, g_w


def penalize(
    problem: RrapProblem,
    r_s: float,
    g_v: float,
    g_c: float,
    g_w: float,
    r_lb_floor: float | None = None,
) -> tuple[float, float]:
    """Cubic multiplicative penalty: (f_r, f_c) from the worst constraint ratio.

    m = min(r_s/floor, v_ub/g_v, w_ub/g_w, c_ub/g_c); f_r = r_s * m^3 and
    f_c = g_c / m^3. m > 1 is applied literally (it inflates f_r) unless the
    problem sets cap_penalty_factor.
    """
    if g_v <= 0 or g_c <= 0 or g_w <= 0:
        raise ValueError("constraint values must be positive to form penalty ratios")
    floor = problem.r_lb if r_lb_floor is None else r_lb_floor
    m = min(r_s / floor, problem.v_ub / g_v, problem.w_ub / g_w, problem.c_ub / g_c)
    if problem.cap_penalty_factor and m > 1.0:
        m = 1.0
    if m <= 0.0:
        return 0.0, math.inf
    m3 = m * m * m
    return r_s * m3, g_c / m3


def evaluate_nr(problem: RrapProblem, n: Sequence[int], r: Sequence[float]) -> Evaluation:
    """Evaluate an explicit (redundancy, reliability) pair.

    Used directly by solvers that carry the two vectors separately; bound
    violations make the point infeasible rather than raising.
    """
    r_s = system_reliability(problem, n, r)
    r_clamped = [min(float(ri), R_CLAMP_HI) for ri in r]
    g_v, g_c, g_w = constraints(problem, n, r_clamped)
    f_r, f_c = penalize(problem, r_s, g_v, g_c, g_w)
    in_bounds = all(problem.n_lb <= int(ni) <= problem.n_ub for ni in n) and all(
        problem.r_lb <= float(ri) <= problem.r_ub for ri in r
    )
    feasible = in_bounds and g_v <= problem.v_ub and g_c <= problem.c_ub and g_w <= problem.w_ub
    qualified = f_r >= QUALIFY_MIN_FR and f_c <= QUALIFY_MAX_FC
    return Evaluation(r_s, g_v, g_c, g_w, f_r, f_c, feasible, qualified)


def evaluate(problem: RrapProblem, genes: Sequence[float]) -> Evaluation:
    """Full pipeline for a mixed-gene solution: decode -> reliability ->
    constraints -> penalties -> feasibility/qualification flags."""
    n, r = decode(problem, genes)
    return evaluate_nr(problem, n, r)


def random_gene(problem: RrapProblem, rng) -> float:
    """One fresh in-bounds gene: integer part uniform on [n_lb, n_ub],
    fractional part uniform on [r_lb, r_hi). The integer is drawn first."""
    n = int(rng.integers(problem.n_lb, problem.n_ub + 1))
    r = float(rng.uniform(problem.r_lb, problem.r_hi))
    return n + r


def random_solution(problem: RrapProblem, rng) -> list[float]:
    """Fresh uniform solution, gene by gene."""
    return [random_gene(problem, rng) for _ in range(problem.n_sub)]
