"""Bi-objective active reliability-redundancy allocation toolkit.

Solvers (eight factorial stepwise-swarm variants, NSGA-II, MOPSO), a shared
Pareto archive, front-quality metrics, and a reproducible experiment
harness with a brute-force lattice oracle.
"""

from .baselines import MopsoParams, Nsga2Params, run_mopso, run_nsga2
from .harness import (
    ExperimentConfig,
    LatticeSpec,
    derive_seed,
    emit_plot_data,
    load_results,
    oracle_front,
    run_experiment,
    run_single,
)
from .metrics import (
    MetricsRow,
    ReferenceFront,
    build_simulated_front,
    factorial_gap,
    gd,
    sp,
    tabulate,
)
from .model import (
    Evaluation,
    RrapProblem,
    SubsystemParams,
    benchmark,
    decode,
    encode,
    evaluate,
    evaluate_nr,
    penalize,
    system_reliability,
)
from .mosso import SsoParams, VariantFlags, VARIANT_NAMES, adaptive_cg, run_mosso
from .pareto import ArchiveEntry, ParetoArchive, crowding_distance, dominates, nondominated_filter
from .records import RecordEntry, RunRecord, load_record, write_record

__version__ = "0.1.0"
