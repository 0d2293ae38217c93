"""Pareto-set estimation and the policy fitters.

The central routine sweeps a grid of weights alpha in (0, 1).  For each
weight it runs three nested selections over a finite candidate set,
each relaxed by a slack kappa:

1. minimize the weighted max M(pi) = max(alpha * d1, (1-alpha) * d2),
2. among near-minimizers, minimize the metric sum d1 + d2,
3. among policies passing both, maximize the value estimate.

The union over the grid of the doubly-constrained sets estimates the
fairness Pareto set; the returned policy is the value maximizer at the
best grid point, ties breaking toward the smaller index.  Baseline
fitters (value-only, single-metric, linear-scalarization union) reuse
the same candidate machinery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .data import Dataset
from .errors import ConfigError, DataError, NumericalError
from .metrics import MetricConfig
from .nuisance import OutcomeModel, ShiftModel, counterfactual_x, predict
from .policies import Policy, PolicyClassSpec, linear_probs, refine_beta, sample_pool
from .rng import child_seed

__all__ = [
    "kappa_schedule",
    "alpha_grid",
    "tchebyshev_m",
    "Nuisances",
    "DFLConfig",
    "MetricEvaluator",
    "CandidateSet",
    "PerAlpha",
    "FitResult",
    "AdvbResult",
    "select_dfl",
    "select_optimal",
    "select_single_fair",
    "select_advb",
    "dfl_fit",
    "fit_optimal",
    "fit_single_fair",
    "fit_advb",
]


def kappa_schedule(n: int, c0: float, gamma2: float = 1.0) -> float:
    """Slack level c0 * max(n^(-gamma2/2), sqrt(log n / n)).

    gamma2 is the convergence-rate exponent granted to the outcome
    models; the log term keeps the slack above sampling noise.
    """
    if n < 2:
        raise ConfigError(f"slack schedule needs n >= 2, got {n}")
    if c0 < 0 or gamma2 <= 0:
        raise ConfigError("c0 must be non-negative and gamma2 positive")
    return c0 * max(n ** (-gamma2 / 2.0), np.sqrt(np.log(n) / n))


def alpha_grid(n_alpha: int) -> np.ndarray:
    """Midpoints (2k-1)/(2K), k=1..K; covers (0,1) with radius 1/(2K)."""
    if n_alpha < 1:
        raise ConfigError("the weight grid needs at least one point")
    k = np.arange(1, n_alpha + 1)
    return (2.0 * k - 1.0) / (2.0 * n_alpha)


def tchebyshev_m(alpha: float, delta1, delta2):
    """Weighted max scalarization max(alpha * d1, (1-alpha) * d2)."""
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie strictly inside (0, 1), got {alpha}")
    d1 = np.asarray(delta1, dtype=float)
    d2 = np.asarray(delta2, dtype=float)
    if (d1 < 0).any() or (d2 < 0).any():
        raise ConfigError("fairness metrics must be non-negative")
    out = np.maximum(alpha * d1, (1.0 - alpha) * d2)
    return float(out) if out.ndim == 0 else out


@dataclass
class Nuisances:
    """Fitted inputs the policy fitters consume."""

    primary: OutcomeModel
    fairness: Optional[OutcomeModel] = None
    shift: Optional[ShiftModel] = None


class MetricEvaluator:
    """Vectorized (delta1, delta2, value) evaluation for linear policies.

    Design matrices and model predictions are computed once per dataset;
    each call prices a whole block of weight vectors with three matrix
    products.  Rescaling-equivalent weight vectors therefore price
    identically, and the scalar metric functions agree with this path.
    """

    def __init__(
        self,
        data: Dataset,
        r_model,
        f_model=None,
        shift: Optional[ShiftModel] = None,
        notion: str = "equal_opportunity",
        variant: str = "squared",
    ) -> None:
        if notion not in ("equal_opportunity", "counterfactual"):
            raise DataError(f"unknown fairness notion {notion!r}")
        if variant not in ("squared", "absolute"):
            raise DataError(f"unknown gap variant {variant!r}")
        if getattr(r_model, "channel", None) != "primary":
            raise DataError("value estimation needs a primary-channel model")
        if f_model is not None and getattr(f_model, "channel", None) != "fairness":
            raise DataError("outcome fairness needs a fairness-channel model")
        self.notion = notion
        self.variant = variant
        n = data.n
        S = data.sensitive.astype(float)
        X = data.covariates
        ones = np.ones(n)
        zeros = np.zeros(n)
        self.z_obs = np.column_stack([ones, S, X])
        r0 = np.asarray(predict(r_model, S, X, zeros))
        r1 = np.asarray(predict(r_model, S, X, ones))
        self.r_base = float(r0.mean())
        self.dr = r1 - r0
        if notion == "equal_opportunity":
            self.z_a = np.column_stack([ones, ones, X])
            self.z_b = np.column_stack([ones, zeros, X])
            self.obs_is_a = False
            if f_model is not None:
                fa0 = np.asarray(predict(f_model, ones, X, zeros))
                fa1 = np.asarray(predict(f_model, ones, X, ones))
                fb0 = np.asarray(predict(f_model, zeros, X, zeros))
                fb1 = np.asarray(predict(f_model, zeros, X, ones))
        else:
            if shift is None:
                raise DataError("counterfactual metrics need a shift model")
            sp = 1.0 - S
            x_cf = counterfactual_x(shift, S, X, sp)
            self.z_a = self.z_obs
            self.z_b = np.column_stack([ones, sp, x_cf])
            self.obs_is_a = True
            if f_model is not None:
                fa0 = np.asarray(predict(f_model, S, X, zeros))
                fa1 = np.asarray(predict(f_model, S, X, ones))
                fb0 = np.asarray(predict(f_model, sp, x_cf, zeros))
                fb1 = np.asarray(predict(f_model, sp, x_cf, ones))
        if f_model is None:
            self.gap0 = None
        else:
            self.gap0 = (fa0 - fb0)[:, None]
            self.dfa = (fa1 - fa0)[:, None]
            self.dfb = (fb1 - fb0)[:, None]

    def _gap_mean(self, diff: np.ndarray) -> np.ndarray:
        if self.variant == "squared":
            return np.mean(diff * diff, axis=0)
        return np.mean(np.abs(diff), axis=0)

    def triples(self, betas: np.ndarray, taus: np.ndarray):
        """Metric triple of each weight vector in the block."""
        pa = linear_probs(betas, taus, self.z_a)
        pb = linear_probs(betas, taus, self.z_b)
        p_obs = pa if self.obs_is_a else linear_probs(betas, taus, self.z_obs)
        d1 = self._gap_mean(pa - pb)
        if self.gap0 is None:
            d2 = np.zeros(betas.shape[0])
        else:
            d2 = self._gap_mean(self.gap0 + pa * self.dfa - pb * self.dfb)
        v = self.r_base + np.mean(p_obs * self.dr[:, None], axis=0)
        return d1, d2, v


@dataclass
class CandidateSet:
    """Finite policy set with cached metric triples.

    ``evaluator`` enables local search around incumbents; without one
    the set is frozen (as when pricing published metric tables).
    ``feasible_fn`` constrains refined weight vectors to the policy
    class (budget caps); sampled candidates already satisfy it.
    """

    policies: list
    delta1: np.ndarray
    delta2: np.ndarray
    value: np.ndarray
    evaluator: Optional[MetricEvaluator] = None
    feasible_fn: Optional[Callable] = None

    def __post_init__(self) -> None:
        self.delta1 = np.asarray(self.delta1, dtype=float)
        self.delta2 = np.asarray(self.delta2, dtype=float)
        self.value = np.asarray(self.value, dtype=float)
        n = len(self.policies)
        if not (self.delta1.shape == self.delta2.shape == self.value.shape == (n,)):
            raise ConfigError("metric arrays must align with the policy list")
        if n == 0:
            raise ConfigError("candidate set must be nonempty")
        if (self.delta1 < 0).any() or (self.delta2 < 0).any():
            raise ConfigError("fairness metrics must be non-negative")

    @classmethod
    def from_metrics(cls, delta1, delta2, value, policies=None) -> "CandidateSet":
        d1 = np.asarray(delta1, dtype=float)
        if policies is None:
            policies = [f"candidate-{i}" for i in range(d1.shape[0])]
        return cls(policies=list(policies), delta1=d1, delta2=delta2, value=value)

    @classmethod
    def from_policies(cls, policies, evaluator: MetricEvaluator, feasible_fn=None) -> "CandidateSet":
        if not policies:
            raise ConfigError("candidate set must be nonempty")
        if any(p.kind != "linear" for p in policies):
            raise ConfigError("vectorized evaluation covers linear pools")
        betas = np.vstack([p.beta for p in policies])
        taus = np.array([p.tau for p in policies])
        d1, d2, v = evaluator.triples(betas, taus)
        return cls(
            policies=list(policies),
            delta1=d1,
            delta2=d2,
            value=v,
            evaluator=evaluator,
            feasible_fn=feasible_fn,
        )

    def copy(self) -> "CandidateSet":
        return CandidateSet(
            policies=list(self.policies),
            delta1=self.delta1.copy(),
            delta2=self.delta2.copy(),
            value=self.value.copy(),
            evaluator=self.evaluator,
            feasible_fn=self.feasible_fn,
        )

    @property
    def size(self) -> int:
        return len(self.policies)

    def _append(self, policy: Policy, d1: float, d2: float, v: float) -> None:
        self.policies.append(policy)
        self.delta1 = np.append(self.delta1, d1)
        self.delta2 = np.append(self.delta2, d2)
        self.value = np.append(self.value, v)

    def refine(self, idx: int, objective: Callable, budget: int) -> None:
        """Local search from candidate ``idx``; appends any improvement.

        ``objective(d1, d2, v) -> (obj, ok)`` prices a block and marks
        rows violating the active constraints.
        """
        if budget <= 0 or self.evaluator is None:
            return
        start = self.policies[idx]
        if start.kind != "linear":
            return
        tau = start.tau

        def evaluate(block: np.ndarray):
            taus = np.full(block.shape[0], tau)
            d1, d2, v = self.evaluator.triples(block, taus)
            obj, ok = objective(d1, d2, v)
            if self.feasible_fn is not None:
                ok = ok & self.feasible_fn(block, taus)
            return obj, ok

        k = start.beta.shape[0]
        free = np.arange(k) if start.uses_sensitive else np.array([0, *range(2, k)])
        beta, _, _ = refine_beta(start.beta, evaluate, budget, free)
        if np.array_equal(beta, start.beta):
            return
        refined = Policy.linear(beta, tau=tau, uses_sensitive=start.uses_sensitive)
        d1, d2, v = self.evaluator.triples(beta[None, :], np.array([tau]))
        self._append(refined, float(d1[0]), float(d2[0]), float(v[0]))


def _no_constraint(d1, d2, v, transform):
    obj = transform(d1, d2, v)
    return obj, np.ones(obj.shape[0], dtype=bool)


@dataclass
class PerAlpha:
    """One grid point of the sweep: thresholds and the selected policy."""

    alpha: float
    m_star: float
    delta_star: float
    v_star: float
    index: int
    policy: object
    delta1: float
    delta2: float
    value: float
    m_selected: float
    dsum_selected: float


def _policy_json(p):
    return json.loads(p.to_json()) if isinstance(p, Policy) else str(p)


@dataclass
class FitResult:
    """Outcome of the full sweep."""

    policy: Policy
    index: int
    chosen_alpha_index: int
    alphas: np.ndarray
    kappa: float
    per_alpha: list
    pareto_indices: np.ndarray
    pareto_pool: list
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "kappa": self.kappa,
            "alphas": self.alphas.tolist(),
            "chosen_alpha_index": self.chosen_alpha_index,
            "index": self.index,
            "policy": _policy_json(self.policy),
            "per_alpha": [
                {
                    "alpha": row.alpha,
                    "m_star": row.m_star,
                    "delta_star": row.delta_star,
                    "v_star": row.v_star,
                    "index": row.index,
                    "policy": _policy_json(row.policy),
                    "delta1": row.delta1,
                    "delta2": row.delta2,
                    "value": row.value,
                }
                for row in self.per_alpha
            ],
            "pareto_indices": self.pareto_indices.tolist(),
            "diagnostics": self.diagnostics,
        }
        return json.dumps(payload)


@dataclass
class AdvbResult:
    """Linear-scalarization baseline outcome."""

    policy: Policy
    index: int
    union_indices: np.ndarray
    alphas: np.ndarray
    kappa: float


def _sweep(cands: CandidateSet, alphas: np.ndarray, kappa: float):
    d1, d2, v = cands.delta1, cands.delta2, cands.value
    dsum = d1 + d2
    rows = []
    union = np.zeros(cands.size, dtype=bool)
    for alpha in alphas:
        m = np.maximum(alpha * d1, (1.0 - alpha) * d2)
        m_star = float(m.min())
        lam = m <= m_star + kappa
        delta_star = float(np.where(lam, dsum, np.inf).min())
        pool = lam & (dsum <= delta_star + kappa)
        if not pool.any():
            raise NumericalError("empty constrained set in the sweep")
        idx = int(np.argmax(np.where(pool, v, -np.inf)))
        rows.append(
            PerAlpha(
                alpha=float(alpha),
                m_star=m_star,
                delta_star=delta_star,
                v_star=float(v[idx]),
                index=idx,
                policy=cands.policies[idx],
                delta1=float(d1[idx]),
                delta2=float(d2[idx]),
                value=float(v[idx]),
                m_selected=float(m[idx]),
                dsum_selected=float(dsum[idx]),
            )
        )
        union |= pool
    # Ties break toward the smaller grid index.
    k_star = int(np.argmax([row.v_star for row in rows]))
    return rows, k_star, union


def _stage_budgets(refine_budget) -> tuple[int, int, int]:
    """Normalize a scalar or per-stage refinement budget to a 3-tuple."""
    if isinstance(refine_budget, (tuple, list)):
        if len(refine_budget) != 3:
            raise ConfigError("per-stage refine_budget needs three entries")
        budgets = tuple(int(b) for b in refine_budget)
    else:
        budgets = (int(refine_budget),) * 3
    if any(b < 0 for b in budgets):
        raise ConfigError("refine_budget must be non-negative")
    return budgets


def select_dfl(
    cands: CandidateSet,
    alphas: np.ndarray,
    kappa: float,
    refine_budget=0,
) -> FitResult:
    """Run the sweep over a candidate set, optionally with local search.

    Refinement happens in three passes mirroring the selection order
    (scalarization minimizers, then constrained sum minimizers, then
    constrained value maximizers); every refined policy joins the pool
    and the final sweep re-runs on the frozen result, so the reported
    table is internally consistent by construction.  refine_budget may
    be a single integer shared by the passes or a (scalarization, sum,
    value) triple; a zero entry skips that pass.
    """
    if kappa < 0:
        raise ConfigError("kappa must be non-negative")
    b_m, b_d, b_v = _stage_budgets(refine_budget)
    start_size = cands.size
    if cands.evaluator is not None:
        if b_m > 0:
            for alpha in alphas:
                m = np.maximum(alpha * cands.delta1, (1.0 - alpha) * cands.delta2)
                idx = int(np.argmin(m))
                a = alpha
                cands.refine(
                    idx,
                    lambda d1, d2, v, a=a: _no_constraint(d1, d2, v, lambda x, y, _: np.maximum(a * x, (1 - a) * y)),
                    b_m,
                )
        if b_d > 0:
            for alpha in alphas:
                m = np.maximum(alpha * cands.delta1, (1.0 - alpha) * cands.delta2)
                thr = float(m.min()) + kappa
                masked = np.where(m <= thr, cands.delta1 + cands.delta2, np.inf)
                idx = int(np.argmin(masked))
                a = alpha

                def obj(d1, d2, v, a=a, thr=thr):
                    ok = np.maximum(a * d1, (1 - a) * d2) <= thr
                    return d1 + d2, ok

                cands.refine(idx, obj, b_d)
        if b_v > 0:
            for alpha in alphas:
                m = np.maximum(alpha * cands.delta1, (1.0 - alpha) * cands.delta2)
                m_thr = float(m.min()) + kappa
                dsum = cands.delta1 + cands.delta2
                lam = m <= m_thr
                d_thr = float(np.where(lam, dsum, np.inf).min()) + kappa
                pool = lam & (dsum <= d_thr)
                idx = int(np.argmax(np.where(pool, cands.value, -np.inf)))
                a = alpha

                def obj(d1, d2, v, a=a, m_thr=m_thr, d_thr=d_thr):
                    ok = (np.maximum(a * d1, (1 - a) * d2) <= m_thr) & (d1 + d2 <= d_thr)
                    return -v, ok

                cands.refine(idx, obj, b_v)

    rows, k_star, union = _sweep(cands, alphas, kappa)
    chosen = rows[k_star]
    for row in rows:
        if row.m_selected > row.m_star + kappa + 1e-12 or row.dsum_selected > row.delta_star + kappa + 1e-12:
            raise NumericalError("sweep produced an infeasible selection")
    union_idx = np.flatnonzero(union)
    return FitResult(
        policy=cands.policies[chosen.index],
        index=chosen.index,
        chosen_alpha_index=k_star,
        alphas=np.asarray(alphas, dtype=float),
        kappa=float(kappa),
        per_alpha=rows,
        pareto_indices=union_idx,
        pareto_pool=[cands.policies[i] for i in union_idx],
        diagnostics={
            "pool_size": cands.size,
            "refine_budget": refine_budget,
            "refined_added": cands.size - start_size,
        },
    )


def select_optimal(cands: CandidateSet, refine_budget: int = 0):
    """Unconstrained value maximizer over the candidate set."""
    if refine_budget > 0 and cands.evaluator is not None:
        idx = int(np.argmax(cands.value))
        cands.refine(idx, lambda d1, d2, v: _no_constraint(d1, d2, v, lambda x, y, w: -w), refine_budget)
    idx = int(np.argmax(cands.value))
    return cands.policies[idx], idx


def select_single_fair(
    cands: CandidateSet,
    kappa: float,
    which: str = "action",
    refine_budget: int = 0,
    maximize_value: bool = True,
):
    """Single-metric baseline: near-minimal chosen metric, then value.

    With ``maximize_value`` false the bare metric minimizer is returned
    (the slack only widens the reported near-minimal set).
    """
    if which not in ("action", "outcome"):
        raise ConfigError(f"unknown single-fairness target {which!r}")
    if kappa < 0:
        raise ConfigError("kappa must be non-negative")

    def metric(cs: CandidateSet) -> np.ndarray:
        return cs.delta1 if which == "action" else cs.delta2

    pick = 0 if which == "action" else 1
    if refine_budget > 0 and cands.evaluator is not None:
        idx = int(np.argmin(metric(cands)))
        cands.refine(
            idx,
            lambda d1, d2, v: _no_constraint(d1, d2, v, lambda x, y, w: (x, y)[pick]),
            refine_budget,
        )
        if maximize_value:
            thr = float(metric(cands).min()) + kappa
            masked = np.where(metric(cands) <= thr, cands.value, -np.inf)
            idx = int(np.argmax(masked))

            def obj(d1, d2, v, thr=thr):
                return -v, (d1, d2)[pick] <= thr

            cands.refine(idx, obj, refine_budget)
    vals = metric(cands)
    if not maximize_value:
        idx = int(np.argmin(vals))
        return cands.policies[idx], idx
    thr = float(vals.min()) + kappa
    idx = int(np.argmax(np.where(vals <= thr, cands.value, -np.inf)))
    return cands.policies[idx], idx


def select_advb(
    cands: CandidateSet,
    alphas: np.ndarray,
    kappa: float,
    refine_budget: int = 0,
) -> AdvbResult:
    """Value maximizer over the union of linear-scalarization slabs.

    For each grid weight the slab holds policies within kappa of the
    minimal alpha * d1 + (1 - alpha) * d2; the union is this baseline's
    Pareto-set estimate.
    """
    if kappa < 0:
        raise ConfigError("kappa must be non-negative")
    alphas = np.asarray(alphas, dtype=float)
    if refine_budget > 0 and cands.evaluator is not None:
        for alpha in alphas:
            lin = alpha * cands.delta1 + (1.0 - alpha) * cands.delta2
            idx = int(np.argmin(lin))
            a = alpha
            cands.refine(
                idx,
                lambda d1, d2, v, a=a: _no_constraint(d1, d2, v, lambda x, y, _: a * x + (1 - a) * y),
                refine_budget,
            )
        thrs = np.array(
            [float((a * cands.delta1 + (1 - a) * cands.delta2).min()) + kappa for a in alphas]
        )
        lin_all = cands.delta1[:, None] * alphas[None, :] + cands.delta2[:, None] * (1.0 - alphas[None, :])
        union = (lin_all <= thrs[None, :]).any(axis=1)
        idx = int(np.argmax(np.where(union, cands.value, -np.inf)))

        def obj(d1, d2, v):
            lin = d1[:, None] * alphas[None, :] + d2[:, None] * (1.0 - alphas[None, :])
            return -v, (lin <= thrs[None, :]).any(axis=1)

        cands.refine(idx, obj, refine_budget)
    lin_all = cands.delta1[:, None] * alphas[None, :] + cands.delta2[:, None] * (1.0 - alphas[None, :])
    thrs = lin_all.min(axis=0) + kappa
    union = (lin_all <= thrs[None, :]).any(axis=1)
    if not union.any():
        raise NumericalError("empty scalarization union")
    idx = int(np.argmax(np.where(union, cands.value, -np.inf)))
    return AdvbResult(
        policy=cands.policies[idx],
        index=idx,
        union_indices=np.flatnonzero(union),
        alphas=alphas,
        kappa=float(kappa),
    )


@dataclass
class DFLConfig:
    """Knobs of the full fitting pipeline."""

    class_spec: PolicyClassSpec
    K: int = 10
    c0: float = 0.5
    gamma2: float = 1.0
    metric: MetricConfig = field(default_factory=MetricConfig)
    seed: int = 0
    kappa_override: Optional[float] = None
    refine_budget: int | tuple = 200

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ConfigError("the weight grid needs at least one point")
        if self.c0 <= 0:
            raise ConfigError("c0 must be positive")
        if not 0.0 < self.gamma2 <= 1.0:
            raise ConfigError("gamma2 must lie in (0, 1]")
        if self.kappa_override is not None and self.kappa_override < 0:
            raise ConfigError("kappa must be non-negative")
        _stage_budgets(self.refine_budget)

    def kappa_for(self, n: int) -> float:
        if self.kappa_override is not None:
            return float(self.kappa_override)
        return kappa_schedule(n, self.c0, self.gamma2)


def _coerce_models(models) -> Nuisances:
    if isinstance(models, Nuisances):
        return models
    if isinstance(models, (tuple, list)):
        return Nuisances(*models)
    return Nuisances(primary=models)


def build_candidates(data: Dataset, models: Nuisances, config: DFLConfig) -> CandidateSet:
    """Sample the pool and price it on the given dataset."""
    spec = config.class_spec
    reference = data if spec.budget_cap is not None else None
    pool = sample_pool(spec, seed=child_seed(config.seed, 0), reference=reference)
    evaluator = MetricEvaluator(
        data,
        models.primary,
        models.fairness,
        shift=models.shift,
        notion=config.metric.notion,
        variant=config.metric.variant,
    )
    feasible_fn = None
    if spec.budget_cap is not None:
        z_ref = evaluator.z_obs
        cap = float(spec.budget_cap)

        def feasible_fn(betas, taus):
            return linear_probs(betas, taus, z_ref).sum(axis=0) <= cap

    return CandidateSet.from_policies(pool, evaluator, feasible_fn=feasible_fn)


def dfl_fit(data: Dataset, models, config: DFLConfig) -> FitResult:
    """Full pipeline: sample candidates, sweep the weight grid, select."""
    models = _coerce_models(models)
    if models.fairness is None:
        raise DataError("the sweep needs a fairness-channel model")
    cands = build_candidates(data, models, config)
    return select_dfl(
        cands,
        alpha_grid(config.K),
        config.kappa_for(data.n),
        refine_budget=config.refine_budget,
    )


def fit_optimal(
    data: Dataset,
    model: OutcomeModel,
    class_spec: PolicyClassSpec,
    seed: int = 0,
    refine_budget: int = 200,
) -> Policy:
    """Value-only baseline: maximize the plug-in value over the class.

    Identical argmax to maximizing the mean predicted treatment effect
    weighted by the treatment probability; the no-treatment term does
    not depend on the policy.
    """
    config = DFLConfig(class_spec=class_spec, seed=seed, refine_budget=refine_budget)
    cands = build_candidates(data, Nuisances(primary=model), config)
    policy, _ = select_optimal(cands, refine_budget=refine_budget)
    return policy


def fit_single_fair(
    data: Dataset,
    models,
    config: DFLConfig,
    which: str = "action",
    maximize_value: bool = True,
) -> Policy:
    """Single-metric baseline over the same class."""
    models = _coerce_models(models)
    if models.fairness is None and which == "outcome":
        raise DataError("outcome fairness needs a fairness-channel model")
    cands = build_candidates(data, models, config)
    policy, _ = select_single_fair(
        cands,
        config.kappa_for(data.n),
        which=which,
        refine_budget=max(_stage_budgets(config.refine_budget)),
        maximize_value=maximize_value,
    )
    return policy


def fit_advb(data: Dataset, models, config: DFLConfig) -> Policy:
    """Linear-scalarization baseline over the same class."""
    models = _coerce_models(models)
    if models.fairness is None:
        raise DataError("the scalarization union needs a fairness-channel model")
    cands = build_candidates(data, models, config)
    result = select_advb(
        cands,
        alpha_grid(config.K),
        config.kappa_for(data.n),
        refine_budget=max(_stage_budgets(config.refine_budget)),
    )
    return result.policy
