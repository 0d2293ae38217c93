"""Replication studies comparing the sweep against its baselines.

One replication draws (or splits) data, fits nuisance models on the
training part, fits every requested method over one shared candidate
pool, and prices the returned policies on the evaluation part.  The
runner aggregates replications into a Report; everything is a pure
function of the config and master seed, replications may run on worker
threads, and rows are ordered by replication index either way.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .data import (
    DEMO_REFERENCE_TRIPLES,
    SIM_GROUP_SHIFT,
    SIM_OUTCOME_COEF,
    CsvSchema,
    Dataset,
    SimConfig,
    demo_policies,
    generate_simulation,
    load_csv,
    make_demo_env,
)
from .errors import ConfigError, FairPolicyError
from .metrics import exact_metrics
from .nuisance import OutcomeModel, ShiftModel, fit_outcome, fit_shift
from .policies import PolicyClassSpec, linear_probs, sample_pool
from .report import Report, ReportRow
from .rng import child_seed, make_rng
from .solver import (
    CandidateSet,
    DFLConfig,
    MetricEvaluator,
    Nuisances,
    _stage_budgets,
    alpha_grid,
    kappa_schedule,
    select_advb,
    select_dfl,
    select_optimal,
    select_single_fair,
)

__all__ = ["ExperimentConfig", "run_experiment"]

_METHOD_ORDER = ("DFL", "Optimal", "VB1", "VB2", "ADVB")
_SCENARIOS = ("simulation", "b2_demo", "csv")
_EVAL_MODES = ("train", "test", "oracle")


@dataclass
class ExperimentConfig:
    """Full protocol for one study."""

    scenario: str = "simulation"
    methods: tuple = _METHOD_ORDER
    replications: int = 100
    sim: SimConfig = field(default_factory=SimConfig)
    dfl: Optional[DFLConfig] = None
    c0_grid: tuple = ()
    K_grid: tuple = ()
    seed: int = 0
    workers: int = 1
    eval_models: str = "train"
    family: str = "linear-gaussian"
    vb_value_step: bool = False
    csv_path: Optional[str] = None
    csv_schema: CsvSchema = field(default_factory=CsvSchema)
    csv_split: float = 0.0
    keep_fit_results: bool = False
    output_dir: Optional[str] = None

    def __post_init__(self) -> None:
        if self.scenario not in _SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if self.replications < 1:
            raise ConfigError("need at least one replication")
        self.methods = tuple(self.methods)
        if not self.methods:
            raise ConfigError("methods must be nonempty")
        for m in self.methods:
            if m not in _METHOD_ORDER:
                raise ConfigError(f"unknown method {m!r}")
        if self.eval_models not in _EVAL_MODES:
            raise ConfigError(f"unknown evaluation-model mode {self.eval_models!r}")
        if self.eval_models == "oracle" and self.scenario != "simulation":
            raise ConfigError("oracle evaluation models exist only for the simulation scenario")
        if self.scenario == "csv" and self.csv_path is None:
            raise ConfigError("csv scenario needs csv_path")
        if not 0.0 <= self.csv_split < 1.0:
            raise ConfigError("csv_split must lie in [0, 1)")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if self.dfl is None:
            d = 2 if self.scenario == "simulation" else 1
            self.dfl = DFLConfig(class_spec=PolicyClassSpec(n_covariates=d))
        self.c0_grid = tuple(self.c0_grid) or (self.dfl.c0,)
        self.K_grid = tuple(self.K_grid) or (self.dfl.K,)
        for c0 in self.c0_grid:
            if c0 <= 0:
                raise ConfigError("c0 grid entries must be positive")
        for K in self.K_grid:
            if K < 1:
                raise ConfigError("K grid entries must be at least 1")

    def dfl_variants(self) -> list:
        """(label, c0, K) triples; a single variant keeps the bare label."""
        variants = [(c0, self.dfl.K) for c0 in self.c0_grid]
        variants += [(self.dfl.c0, K) for K in self.K_grid if K != self.dfl.K]
        if len(variants) == 1:
            return [("DFL", variants[0][0], variants[0][1])]
        out = []
        for c0, K in variants:
            if K == self.dfl.K:
                out.append((f"DFL[c0={c0:g}]", c0, K))
            else:
                out.append((f"DFL[K={K}]", c0, K))
        return out

    def method_labels(self) -> list:
        labels = []
        for m in _METHOD_ORDER:
            if m not in self.methods:
                continue
            if m == "DFL":
                labels.extend(lbl for lbl, _, _ in self.dfl_variants())
            else:
                labels.append(m)
        return labels


def _config_digest(config: ExperimentConfig) -> str:
    payload = json.dumps(asdict(config), sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _oracle_models(notion: str) -> Nuisances:
    primary = OutcomeModel(family="linear-gaussian", channel="primary", coef=SIM_OUTCOME_COEF.copy())
    fairness = OutcomeModel(family="linear-gaussian", channel="fairness", coef=SIM_OUTCOME_COEF.copy())
    shift = None
    if notion == "counterfactual":
        shift = ShiftModel.from_theta(SIM_GROUP_SHIFT[0], SIM_GROUP_SHIFT[1])
    return Nuisances(primary=primary, fairness=fairness, shift=shift)


def _fit_models(train: Dataset, family: str, notion: str) -> Nuisances:
    primary = fit_outcome(train, family=family, channel="primary")
    fairness = fit_outcome(train, family=family, channel="fairness")
    shift = fit_shift(train) if notion == "counterfactual" else None
    return Nuisances(primary=primary, fairness=fairness, shift=shift)


def _rep_data(config: ExperimentConfig, rep: int):
    rep_seed = child_seed(config.seed, rep)
    if config.scenario == "simulation":
        train, test = generate_simulation(replace(config.sim, seed=rep_seed))
        return train, test
    data = load_csv(config.csv_path, config.csv_schema)
    if config.csv_split == 0.0:
        return data, data
    perm = make_rng(rep_seed, 2).permutation(data.n)
    n_test = max(1, int(round(config.csv_split * data.n)))
    if n_test >= data.n:
        raise ConfigError("csv_split leaves no training rows")
    return data.subset(perm[n_test:]), data.subset(perm[:n_test])


def _evaluate(evaluator: MetricEvaluator, policy) -> tuple:
    d1, d2, v = evaluator.triples(policy.beta[None, :], np.array([policy.tau]))
    return float(d1[0]), float(d2[0]), float(v[0])


def _run_rep(config: ExperimentConfig, rep: int):
    dfl = config.dfl
    train, test = _rep_data(config, rep)
    notion = dfl.metric.notion
    models = _fit_models(train, config.family, notion)
    if config.eval_models == "train":
        eval_models = models
    elif config.eval_models == "test":
        eval_models = _fit_models(test, config.family, notion)
    else:
        eval_models = _oracle_models(notion)
    eval_kw = dict(notion=notion, variant=dfl.metric.variant)
    evaluator = MetricEvaluator(
        test, eval_models.primary, eval_models.fairness, shift=eval_models.shift, **eval_kw
    )
    train_eval = MetricEvaluator(
        train, models.primary, models.fairness, shift=models.shift, **eval_kw
    )
    spec = dfl.class_spec
    reference = train if spec.budget_cap is not None else None
    pool = sample_pool(spec, seed=child_seed(config.seed, rep, 1), reference=reference)
    feasible_fn = None
    if spec.budget_cap is not None:
        z_ref = train_eval.z_obs
        cap = float(spec.budget_cap)

        def feasible_fn(betas, taus):
            return linear_probs(betas, taus, z_ref).sum(axis=0) <= cap

    base = CandidateSet.from_policies(pool, train_eval, feasible_fn=feasible_fn)

    def kappa_for(c0: float) -> float:
        if dfl.kappa_override is not None:
            return float(dfl.kappa_override)
        return kappa_schedule(train.n, c0, dfl.gamma2)

    triples = {}
    fit_records = []
    scalar_budget = max(_stage_budgets(dfl.refine_budget))
    for m in _METHOD_ORDER:
        if m not in config.methods:
            continue
        if m == "DFL":
            for label, c0, K in config.dfl_variants():
                cands = base.copy()
                result = select_dfl(cands, alpha_grid(K), kappa_for(c0), dfl.refine_budget)
                triples[label] = _evaluate(evaluator, result.policy)
                if config.keep_fit_results:
                    fit_records.append(
                        {
                            "rep": rep,
                            "label": label,
                            "result": result,
                            "delta1": cands.delta1,
                            "delta2": cands.delta2,
                            "value": cands.value,
                        }
                    )
        elif m == "Optimal":
            policy, _ = select_optimal(base.copy(), scalar_budget)
            triples[m] = _evaluate(evaluator, policy)
        elif m in ("VB1", "VB2"):
            which = "action" if m == "VB1" else "outcome"
            policy, _ = select_single_fair(
                base.copy(),
                kappa_for(dfl.c0),
                which=which,
                refine_budget=scalar_budget,
                maximize_value=config.vb_value_step,
            )
            triples[m] = _evaluate(evaluator, policy)
        else:
            result = select_advb(
                base.copy(), alpha_grid(dfl.K), kappa_for(dfl.c0), scalar_budget
            )
            triples[m] = _evaluate(evaluator, result.policy)
    return triples, fit_records


def _run_rep_annotated(config: ExperimentConfig, rep: int):
    try:
        return _run_rep(config, rep)
    except FairPolicyError as exc:
        raise type(exc)(f"replication {rep}: {exc}") from exc


def _run_b2_demo(config: ExperimentConfig) -> Report:
    """Frozen three-policy comparison of the two scalarizations.

    Fairness metrics are taken as given reference values; policy values
    come from the exact evaluator on the two-point environment.  The
    sweep recovers all three policies across the grid while the linear
    union misses the middle one.
    """
    env = make_demo_env()
    policies = demo_policies()
    d1 = np.array([t[0] for t in DEMO_REFERENCE_TRIPLES])
    d2 = np.array([t[1] for t in DEMO_REFERENCE_TRIPLES])
    v = np.array([exact_metrics(p, env, variant="absolute").value for p in policies])
    cands = CandidateSet.from_metrics(d1, d2, v, policies=policies)
    kappa = config.dfl.kappa_override if config.dfl.kappa_override is not None else 0.0
    alphas = alpha_grid(config.dfl.K)
    fit = select_dfl(cands, alphas, kappa)
    adv = select_advb(cands, alphas, kappa)
    tcheb = sorted({row.index for row in fit.per_alpha})
    rows = [
        ReportRow("DFL", 0, float(d1[fit.index]), float(d2[fit.index]), float(v[fit.index])),
        ReportRow("ADVB", 0, float(d1[adv.index]), float(d2[adv.index]), float(v[adv.index])),
    ]
    metadata = {
        "scenario": "b2_demo",
        "seed": config.seed,
        "config_hash": _config_digest(config),
        "K": config.dfl.K,
        "kappa": kappa,
        "tchebyshev_recovered": len(tcheb),
        "linear_recovered": len(set(adv.union_indices.tolist())),
    }
    extras = {
        "tchebyshev_selected": tcheb,
        "linear_union": sorted(adv.union_indices.tolist()),
        "fit_result": fit,
        "advb_result": adv,
    }
    return Report(rows=rows, metadata=metadata, extras=extras)


def run_experiment(config: ExperimentConfig) -> Report:
    """Run the study; deterministic given the config and master seed."""
    t0 = time.perf_counter()
    if config.scenario == "b2_demo":
        report = _run_b2_demo(config)
        report.metadata["wall_time_s"] = time.perf_counter() - t0
        return report
    reps = range(config.replications)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda r: _run_rep_annotated(config, r), reps))
    else:
        results = [_run_rep_annotated(config, r) for r in reps]
    labels = config.method_labels()
    rows = []
    fit_records = []
    for rep, (triples, records) in enumerate(results):
        for label in labels:
            d1, d2, v = triples[label]
            rows.append(ReportRow(label, rep, d1, d2, v))
        fit_records.extend(records)
    metadata = {
        "scenario": config.scenario,
        "seed": config.seed,
        "config_hash": _config_digest(config),
        "replications": config.replications,
        "methods": list(labels),
        "notion": config.dfl.metric.notion,
        "variant": config.dfl.metric.variant,
        "eval_models": config.eval_models,
        "vb_value_step": config.vb_value_step,
        "c0_grid": list(config.c0_grid),
        "K_grid": list(config.K_grid),
        "wall_time_s": 0.0,
    }
    if config.scenario == "simulation":
        metadata["n_train"] = config.sim.n_train
        metadata["n_test"] = config.sim.n_test
    else:
        metadata["csv_path"] = config.csv_path
        metadata["csv_eval"] = "in-sample" if config.csv_split == 0.0 else "split"
    report = Report(rows=rows, metadata=metadata)
    if config.keep_fit_results:
        report.extras["dfl_fits"] = fit_records
    report.metadata["wall_time_s"] = time.perf_counter() - t0
    return report
