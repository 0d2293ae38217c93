"""Policy learning under joint action- and outcome-fairness control.

The toolkit estimates treatment policies that trade off an action
fairness gap, an outcome fairness gap, and expected reward.  The core
fitter sweeps a grid of weighted max scalarizations with slack to
estimate the fairness Pareto set and returns the value maximizer over
it; existence checkers decide when perfectly fair policies exist in
discrete environments, and a replication harness benchmarks the fitter
against value-only, single-metric, and linear-scalarization baselines.
"""

from .data import (
    CsvSchema,
    Dataset,
    DiscreteEnv,
    SimConfig,
    demo_policies,
    generate_simulation,
    insurance_premium,
    insurance_rewards,
    load_csv,
    make_demo_env,
    save_csv,
    threshold_label,
)
from .errors import ConfigError, DataError, FairPolicyError, NumericalError
from .existence import (
    CounterfactualEnv,
    ExistenceReport,
    SolutionMap,
    check_assumption1,
    check_assumption2,
    construct_double_fair,
    existence_cf,
    existence_report,
    multi_action_fair_feasibility,
    outcome_fair_exists,
    outcome_fair_solution_map,
)
from .harness import ExperimentConfig, run_experiment
from .metrics import (
    MetricConfig,
    MetricReport,
    compute_metrics,
    delta1_cf,
    delta1_eo,
    delta2_cf,
    delta2_eo,
    exact_metrics,
    value_hat,
)
from .nuisance import (
    CellMeanModel,
    OutcomeModel,
    ShiftModel,
    counterfactual_x,
    fit_outcome,
    fit_shift,
    predict,
)
from .policies import (
    Policy,
    PolicyClassSpec,
    action_prob,
    budget_usage,
    local_refine,
    sample_pool,
)
from .report import Report, ReportRow, emit_report
from .solver import (
    AdvbResult,
    CandidateSet,
    DFLConfig,
    FitResult,
    MetricEvaluator,
    Nuisances,
    alpha_grid,
    dfl_fit,
    fit_advb,
    fit_optimal,
    fit_single_fair,
    kappa_schedule,
    select_advb,
    select_dfl,
    select_optimal,
    select_single_fair,
    tchebyshev_m,
)

__version__ = "0.1.0"

__all__ = [
    "AdvbResult",
    "CandidateSet",
    "CellMeanModel",
    "ConfigError",
    "CounterfactualEnv",
    "CsvSchema",
    "DFLConfig",
    "DataError",
    "Dataset",
    "DiscreteEnv",
    "ExistenceReport",
    "ExperimentConfig",
    "FairPolicyError",
    "FitResult",
    "MetricConfig",
    "MetricEvaluator",
    "MetricReport",
    "Nuisances",
    "NumericalError",
    "OutcomeModel",
    "Policy",
    "PolicyClassSpec",
    "Report",
    "ReportRow",
    "ShiftModel",
    "SimConfig",
    "SolutionMap",
    "action_prob",
    "alpha_grid",
    "budget_usage",
    "check_assumption1",
    "check_assumption2",
    "compute_metrics",
    "construct_double_fair",
    "counterfactual_x",
    "delta1_cf",
    "delta1_eo",
    "delta2_cf",
    "delta2_eo",
    "demo_policies",
    "dfl_fit",
    "emit_report",
    "exact_metrics",
    "existence_cf",
    "existence_report",
    "fit_advb",
    "fit_optimal",
    "fit_outcome",
    "fit_shift",
    "fit_single_fair",
    "generate_simulation",
    "insurance_premium",
    "insurance_rewards",
    "kappa_schedule",
    "load_csv",
    "local_refine",
    "make_demo_env",
    "multi_action_fair_feasibility",
    "outcome_fair_exists",
    "outcome_fair_solution_map",
    "predict",
    "run_experiment",
    "sample_pool",
    "save_csv",
    "select_advb",
    "select_dfl",
    "select_optimal",
    "select_single_fair",
    "tchebyshev_m",
    "threshold_label",
    "value_hat",
]
