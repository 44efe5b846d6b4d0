"""Assignment under type-block diversity quotas: data model, solvers,
welfare-ratio analysis, lottery simulation, and instance generators."""

from .model import (
    Assignment,
    BudgetExceededError,
    DegenerateInputError,
    FeasibilityResult,
    InputError,
    Instance,
    PreconditionError,
    QuotamatchError,
    QuotaProfile,
    Violation,
    check_feasible,
    per_type_welfare,
    welfare,
)
from .solvers import (
    SOLVERS,
    SolveResult,
    choose_exact_method,
    is_block_uniform,
    is_type_uniform,
    solve,
    solve_block_uniform,
    solve_brute_force,
    solve_exact,
    solve_greedy,
    solve_milp,
    solve_type_uniform,
    solve_unconstrained,
)
from .bcm import BCMEdge, BCMInstance, reduce_from_bcm, reduce_to_bcm, solve_bcm_brute
from .pod import (
    PodReport,
    bound_thm4,
    bound_thm5,
    compute_pod,
    disparity_beta,
    make_tightness_instance,
)
from .lottery import LotteryRun, LotterySummary, SplitMix64, derive_seed, lottery_monte_carlo, run_lottery
from .generators import ModelConfig, generate
from .geodata import GeoDataset, composition_for, km_distance, load_geodata, scale_blocks

__all__ = [name for name in dir() if not name.startswith("_")]
