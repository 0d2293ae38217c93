"""Fairness and value metrics.

Action fairness (delta1) measures how much the treatment rule itself
reacts to the sensitive attribute; outcome fairness (delta2) measures
the gap in model-implied mean outcomes under the rule; value is the
plug-in estimate of the mean reward attained.

Two notions are supported.  Equal-opportunity metrics compare the two
sensitive values at every observed covariate point.  Counterfactual
metrics compare each record with its location-shifted counterfactual
twin.  Gaps pass through ``t**2`` by default or ``|t|`` under the
absolute variant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import Dataset, DiscreteEnv
from .errors import DataError
from .nuisance import ShiftModel, counterfactual_x, predict
from .policies import Policy, action_prob

__all__ = [
    "MetricConfig",
    "MetricReport",
    "delta1_eo",
    "delta2_eo",
    "delta1_cf",
    "delta2_cf",
    "value_hat",
    "compute_metrics",
    "exact_metrics",
]

NOTIONS = ("equal_opportunity", "counterfactual")
VARIANTS = ("squared", "absolute")


@dataclass
class MetricConfig:
    notion: str = "equal_opportunity"
    variant: str = "squared"

    def __post_init__(self) -> None:
        if self.notion not in NOTIONS:
            raise DataError(f"unknown fairness notion {self.notion!r}")
        if self.variant not in VARIANTS:
            raise DataError(f"unknown gap variant {self.variant!r}")


@dataclass
class MetricReport:
    delta1: float
    delta2: float
    value: float
    notion: str
    variant: str

    def to_json(self) -> str:
        import json

        return json.dumps(
            {
                "delta1": self.delta1,
                "delta2": self.delta2,
                "value": self.value,
                "notion": self.notion,
                "variant": self.variant,
            }
        )


def _gap(diff: np.ndarray, variant: str) -> np.ndarray:
    if variant == "squared":
        return diff * diff
    if variant == "absolute":
        return np.abs(diff)
    raise DataError(f"unknown gap variant {variant!r}")


def _require_channel(model, channel: str) -> None:
    if getattr(model, "channel", None) != channel:
        raise DataError(
            f"channel mismatch: metric needs a {channel!r} model, got {getattr(model, 'channel', None)!r}"
        )


def delta1_eo(policy: Policy, data: Dataset, variant: str = "squared") -> float:
    """Mean gap between the rule's treatment probabilities at s=1 and s=0."""
    p1 = action_prob(policy, np.ones(data.n), data.covariates)
    p0 = action_prob(policy, np.zeros(data.n), data.covariates)
    return float(np.mean(_gap(p1 - p0, variant)))


def _policy_outcome(model, policy: Policy, s, x) -> np.ndarray:
    p = action_prob(policy, s, x)
    f0 = predict(model, s, x, np.zeros_like(p))
    f1 = predict(model, s, x, np.ones_like(p))
    return f0 + p * (f1 - f0)


def delta2_eo(policy: Policy, data: Dataset, model, variant: str = "squared") -> float:
    """Mean gap between model-implied outcomes under the rule at s=1 vs s=0."""
    _require_channel(model, "fairness")
    ones = np.ones(data.n)
    zeros = np.zeros(data.n)
    g1 = _policy_outcome(model, policy, ones, data.covariates)
    g0 = _policy_outcome(model, policy, zeros, data.covariates)
    return float(np.mean(_gap(g1 - g0, variant)))


def delta1_cf(policy: Policy, data: Dataset, shift: ShiftModel, variant: str = "squared") -> float:
    """Mean gap between each record's rule and its counterfactual twin's."""
    s = data.sensitive
    sp = 1 - s
    x_cf = counterfactual_x(shift, s, data.covariates, sp)
    p_obs = action_prob(policy, s, data.covariates)
    p_cf = action_prob(policy, sp, x_cf)
    return float(np.mean(_gap(p_obs - p_cf, variant)))


def delta2_cf(
    policy: Policy, data: Dataset, model, shift: ShiftModel, variant: str = "squared"
) -> float:
    """Mean outcome gap between each record and its counterfactual twin."""
    _require_channel(model, "fairness")
    s = data.sensitive
    sp = 1 - s
    x_cf = counterfactual_x(shift, s, data.covariates, sp)
    g_obs = _policy_outcome(model, policy, s, data.covariates)
    g_cf = _policy_outcome(model, policy, sp, x_cf)
    return float(np.mean(_gap(g_obs - g_cf, variant)))


def value_hat(policy: Policy, data: Dataset, model) -> float:
    """Plug-in value: mean over records of sum_a r_hat(s, x, a) pi(a | s, x)."""
    _require_channel(model, "primary")
    s = data.sensitive
    p = action_prob(policy, s, data.covariates)
    r0 = predict(model, s, data.covariates, np.zeros(data.n))
    r1 = predict(model, s, data.covariates, np.ones(data.n))
    return float(np.mean(r0 + p * (r1 - r0)))


def compute_metrics(
    policy: Policy,
    data: Dataset,
    r_model,
    f_model,
    config: MetricConfig = MetricConfig(),
    shift: Optional[ShiftModel] = None,
) -> MetricReport:
    """All three metrics of one policy under the chosen notion."""
    if config.notion == "equal_opportunity":
        d1 = delta1_eo(policy, data, config.variant)
        d2 = delta2_eo(policy, data, f_model, config.variant)
    else:
        if shift is None:
            raise DataError("counterfactual metrics need a shift model")
        d1 = delta1_cf(policy, data, shift, config.variant)
        d2 = delta2_cf(policy, data, f_model, shift, config.variant)
    return MetricReport(
        delta1=d1,
        delta2=d2,
        value=value_hat(policy, data, r_model),
        notion=config.notion,
        variant=config.variant,
    )


def exact_metrics(policy: Policy, env: DiscreteEnv, variant: str = "squared") -> MetricReport:
    """Population metrics of a tabular policy by exact summation.

    Fairness gaps weight support points by the marginal covariate
    distribution; the value weights by the joint (s, x) distribution.
    """
    if policy.kind != "tabular":
        raise DataError("exact metrics need a tabular policy")
    if env.n_actions != 2:
        raise DataError("exact metrics are defined for binary-action environments")
    if policy.table.shape[1:] != (env.n_points, env.n_actions):
        raise DataError("policy table does not match the environment's support")
    if not np.array_equal(policy.support, env.x_support):
        raise DataError("policy support does not match the environment's support")
    w = env.marginal_x_probs()
    p1 = policy.table[:, :, 1]
    d1 = float(np.sum(w * _gap(p1[1] - p1[0], variant)))
    f_pi = np.sum(policy.table * env.f_table, axis=2)
    d2 = float(np.sum(w * _gap(f_pi[1] - f_pi[0], variant)))
    r_pi = np.sum(policy.table * env.r_table, axis=2)
    s_w = np.array([1.0 - env.s_prob, env.s_prob])
    value = float(sum(s_w[s] * np.sum(env.probs_for(s) * r_pi[s]) for s in (0, 1)))
    return MetricReport(delta1=d1, delta2=d2, value=value, notion="equal_opportunity", variant=variant)
