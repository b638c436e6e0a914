from .ea import (
    EaConfig,
    dominate,
    dominates,
    opo_ea_run,
    penalized_fitness,
    replay_population,
    seip_run,
    semo_run,
    superior,
)
from .gaww import GawwBudgetError, GawwConfig, gaww_solve, partial_cover_disjoint
from .greedy import greedy_solve
from .trace import CoverResult, PriceMap, RunResult, TraceRecord, population_digest

__all__ = [
    "CoverResult",
    "EaConfig",
    "GawwBudgetError",
    "GawwConfig",
    "PriceMap",
    "RunResult",
    "TraceRecord",
    "dominate",
    "dominates",
    "gaww_solve",
    "greedy_solve",
    "opo_ea_run",
    "partial_cover_disjoint",
    "penalized_fitness",
    "population_digest",
    "replay_population",
    "seip_run",
    "semo_run",
    "superior",
]
