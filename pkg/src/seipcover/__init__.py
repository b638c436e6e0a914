"""Weighted set cover workbench: greedy baselines, evolutionary solvers and ratio analysis."""

from .analysis import (
    ExactResult,
    OracleLimitError,
    PartialReference,
    PathCertificate,
    PathStep,
    approximation_ratio,
    check_path_certificate,
    conditional_partial_ratio,
    exact_solve,
    partial_ratio,
    price_audit,
)
from .core import (
    COVERED_ELEMENTS,
    FEASIBILITY,
    IsolationFunction,
    SetCoverInstance,
    Solution,
    cost,
    covered,
    extend_closure,
    harmonic,
    is_feasible,
    isolation,
)
from .generators import KnownOptimum, ProblemISpec, RandomSpec, gen_known_opt, gen_problem_i, gen_random_k_cover
from .rng import Rng
from .solvers import EaConfig, GawwConfig, gaww_solve, greedy_solve, opo_ea_run, seip_run, semo_run

__version__ = "0.1.0"
