"""Existence checkers and constructions for fair policies.

For binary actions, two sufficient-and-necessary routes decide whether
fair policies exist over a discrete environment:

* an outcome-fair policy (possibly group-aware) exists iff, at every
  support point, either the dominance condition holds or all three
  parts of the sign condition hold,
* a doubly fair policy (group-blind and outcome-fair) exists iff part
  (i) of the sign condition holds at every support point, and then a
  closed-form mixing weight constructs one.

For more than two actions, feasibility reduces to a small linear
program solved by the phase-1 simplex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .data import DiscreteEnv
from .errors import DataError
from .policies import Policy
from .simplex import solve_feasible

__all__ = [
    "check_assumption1",
    "check_assumption2",
    "outcome_fair_exists",
    "construct_double_fair",
    "outcome_fair_solution_map",
    "SolutionMap",
    "ExistenceReport",
    "existence_report",
    "CounterfactualEnv",
    "existence_cf",
    "multi_action_fair_feasibility",
]


def _require_binary(f_table: np.ndarray) -> None:
    if f_table.shape[2] != 2:
        raise DataError("existence checks cover binary-action environments only")


def _check_a1(f: np.ndarray, j: int) -> bool:
    for a in (0, 1):
        if min(f[0, j, a], f[1, j, a]) >= max(f[0, j, 1 - a], f[1, j, 1 - a]):
            return True
    return False


def _check_a2(f: np.ndarray, j: int) -> tuple[bool, bool, bool]:
    part1 = (f[1, j, 1] - f[0, j, 1]) * (f[1, j, 0] - f[0, j, 0]) <= 0.0
    part2 = (f[1, j, 1] - f[1, j, 0]) * (f[0, j, 1] - f[0, j, 0]) <= 0.0
    part3 = any(
        f[s, j, a] >= f[s, j, 1 - a] and f[s, j, a] >= f[1 - s, j, a]
        for s in (0, 1)
        for a in (0, 1)
    )
    return bool(part1), bool(part2), bool(part3)


def check_assumption1(env: DiscreteEnv, x_index: int) -> bool:
    """Dominance: some action is at least as good for every group as the other action for any group."""
    _require_binary(env.f_table)
    return _check_a1(env.f_table, x_index)


def check_assumption2(env: DiscreteEnv, x_index: int) -> tuple[bool, bool, bool]:
    """Sign conditions: (i) opposed group gaps across actions, (ii) opposed
    treatment effects across groups, (iii) some (group, action) pair is a
    simultaneous within-group and across-group maximum."""
    _require_binary(env.f_table)
    return _check_a2(env.f_table, x_index)


def _double_fair_prob(f: np.ndarray, j: int) -> Optional[float]:
    num = f[0, j, 0] - f[1, j, 0]
    den = num + f[1, j, 1] - f[0, j, 1]
    if den == 0.0:
        # The outcome gap no longer depends on the mixing weight; it is
        # identically zero exactly when the no-treatment gap vanishes.
        return 0.5 if num == 0.0 else None
    p = num / den
    if 0.0 <= p <= 1.0:
        return p
    return None


def construct_double_fair(env: DiscreteEnv) -> Optional[Policy]:
    """Group-blind treatment probabilities equalizing mean outcomes.

    Returns the tabular policy with p(x) = (f(0,x,0) - f(1,x,0)) /
    (f(0,x,0) - f(1,x,0) + f(1,x,1) - f(0,x,1)) at every support point
    (0/0 maps to 1/2), or None when some point admits no weight in
    [0, 1].
    """
    _require_binary(env.f_table)
    m = env.n_points
    table = np.zeros((2, m, 2))
    for j in range(m):
        p = _double_fair_prob(env.f_table, j)
        if p is None:
            return None
        table[:, j, 1] = p
        table[:, j, 0] = 1.0 - p
    return Policy.tabular(table, env.x_support)


def outcome_fair_exists(env: DiscreteEnv) -> bool:
    """True iff every support point passes dominance or all sign conditions."""
    _require_binary(env.f_table)
    for j in range(env.n_points):
        if not (_check_a1(env.f_table, j) or all(_check_a2(env.f_table, j))):
            return False
    return True


@dataclass
class SolutionMap:
    """Affine relation p1 = alpha * p0 + gamma between group treatment
    probabilities that equalize mean outcomes at one support point.

    ``degenerate`` marks points where the group-1 treatment effect
    vanishes, so p1 drops out and feasibility constrains p0 alone.
    ``p0_interval`` is the closed set of feasible p0 values (None when
    empty).
    """

    x_index: int
    alpha: Optional[float]
    gamma: Optional[float]
    p0_interval: Optional[tuple[float, float]]
    degenerate: bool = False

    def p1_for(self, p0: float) -> float:
        if self.degenerate:
            raise DataError("degenerate point: p1 is unconstrained")
        return self.alpha * p0 + self.gamma

    @property
    def feasible(self) -> bool:
        return self.p0_interval is not None


def outcome_fair_solution_map(env: DiscreteEnv, x_index: int) -> SolutionMap:
    """Solve f(1,x,.) @ pi(1,x) = f(0,x,.) @ pi(0,x) for pi(1,x)."""
    _require_binary(env.f_table)
    f = env.f_table
    j = x_index
    den1 = f[1, j, 1] - f[1, j, 0]
    sigma = f[0, j, 1] - f[0, j, 0]
    if den1 != 0.0:
        alpha = sigma / den1
        gamma = (f[0, j, 0] - f[1, j, 0]) / den1
        if alpha > 0.0:
            lo, hi = -gamma / alpha, (1.0 - gamma) / alpha
        elif alpha < 0.0:
            lo, hi = (1.0 - gamma) / alpha, -gamma / alpha
        else:
            lo, hi = (0.0, 1.0) if 0.0 <= gamma <= 1.0 else (1.0, 0.0)
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        interval = (lo, hi) if lo <= hi else None
        return SolutionMap(x_index=j, alpha=alpha, gamma=gamma, p0_interval=interval)
    # Group 1 outcomes do not react to treatment: the equation pins p0 only.
    target = f[1, j, 0] - f[0, j, 0]
    if sigma != 0.0:
        p0 = target / sigma
        interval = (p0, p0) if 0.0 <= p0 <= 1.0 else None
    else:
        interval = (0.0, 1.0) if target == 0.0 else None
    return SolutionMap(x_index=j, alpha=None, gamma=None, p0_interval=interval, degenerate=True)


@dataclass
class ExistenceReport:
    """Per-point checks plus the overall existence verdicts."""

    assumption1: np.ndarray
    assumption2: np.ndarray
    outcome_fair_exists: bool
    double_fair_exists: bool
    double_fair_policy: Optional[Policy]
    solution_maps: list = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "assumption1": self.assumption1.tolist(),
            "assumption2": self.assumption2.tolist(),
            "outcome_fair_exists": self.outcome_fair_exists,
            "double_fair_exists": self.double_fair_exists,
            "double_fair_policy": None
            if self.double_fair_policy is None
            else json.loads(self.double_fair_policy.to_json()),
            "solution_maps": [
                {
                    "x_index": sm.x_index,
                    "alpha": sm.alpha,
                    "gamma": sm.gamma,
                    "p0_interval": list(sm.p0_interval) if sm.p0_interval else None,
                    "degenerate": sm.degenerate,
                }
                for sm in self.solution_maps
            ],
        }
        return json.dumps(payload)


def existence_report(env: DiscreteEnv) -> ExistenceReport:
    """Run every binary-action existence check over the environment."""
    _require_binary(env.f_table)
    m = env.n_points
    a1 = np.array([_check_a1(env.f_table, j) for j in range(m)])
    a2 = np.array([_check_a2(env.f_table, j) for j in range(m)])
    maps = [outcome_fair_solution_map(env, j) for j in range(m)]
    policy = construct_double_fair(env)
    return ExistenceReport(
        assumption1=a1,
        assumption2=a2,
        outcome_fair_exists=bool(np.all(a1 | np.all(a2, axis=1))),
        double_fair_exists=policy is not None,
        double_fair_policy=policy,
        solution_maps=maps,
    )


@dataclass
class CounterfactualEnv:
    """Environment slice carrying counterfactual covariate pairs.

    ``f_table[s, j, a]`` is the mean outcome evaluated at the point the
    j-th pair takes under sensitive value s, i.e. at ``x_support_s1[j]``
    when s=1 and ``x_support_s0[j]`` when s=0.
    """

    s_prob: float
    x_support_s1: np.ndarray
    x_support_s0: np.ndarray
    x_probs: np.ndarray
    f_table: np.ndarray

    def __post_init__(self) -> None:
        self.x_support_s1 = np.asarray(self.x_support_s1, dtype=float)
        self.x_support_s0 = np.asarray(self.x_support_s0, dtype=float)
        if self.x_support_s1.ndim != 2 or self.x_support_s0.shape != self.x_support_s1.shape:
            raise DataError(
                "counterfactual support missing: both groups need one covariate point per pair"
            )
        self.f_table = np.asarray(self.f_table, dtype=float)
        if self.f_table.ndim != 3 or self.f_table.shape[:2] != (2, self.x_support_s1.shape[0]):
            raise DataError(f"f_table must have shape (2, {self.x_support_s1.shape[0]}, L)")

    @classmethod
    def from_callable(
        cls,
        s_prob: float,
        x_support_s1,
        x_support_s0,
        x_probs,
        f: Callable,
        n_actions: int = 2,
    ) -> "CounterfactualEnv":
        x1 = np.asarray(x_support_s1, dtype=float)
        x0 = np.asarray(x_support_s0, dtype=float)
        if x1.shape != x0.shape:
            raise DataError("counterfactual support missing: group supports disagree in shape")
        m = x1.shape[0]
        table = np.empty((2, m, n_actions))
        for j in range(m):
            for a in range(n_actions):
                table[0, j, a] = f(0, x0[j], a)
                table[1, j, a] = f(1, x1[j], a)
        return cls(s_prob=s_prob, x_support_s1=x1, x_support_s0=x0, x_probs=np.asarray(x_probs, dtype=float), f_table=table)

    def as_env(self) -> DiscreteEnv:
        return DiscreteEnv(
            s_prob=self.s_prob,
            x_support=self.x_support_s1,
            x_probs=self.x_probs,
            f_table=self.f_table,
        )


def existence_cf(cf_env: CounterfactualEnv) -> ExistenceReport:
    """Existence checks under the counterfactual notion.

    Identical logic to the factual report, applied to outcomes evaluated
    at each pair's counterfactual covariate points.  A zero covariate
    shift therefore reproduces the factual report exactly.
    """
    return existence_report(cf_env.as_env())


def multi_action_fair_feasibility(f_s0, f_s1, mode: str = "double_fair"):
    """Feasibility of fair randomized policies over L >= 2 actions.

    ``double_fair`` looks for one shared distribution pi with
    f(0,x) @ pi = f(1,x) @ pi and returns it, or None.  ``outcome_fair``
    allows separate per-group distributions (pi0, pi1) with equal mean
    outcomes and returns the pair, or None.
    """
    f0 = np.asarray(f_s0, dtype=float)
    f1 = np.asarray(f_s1, dtype=float)
    if f0.ndim != 1 or f0.shape != f1.shape or f0.shape[0] < 2:
        raise DataError(f"need per-group outcome vectors of equal length >= 2, got {f0.shape} and {f1.shape}")
    L = f0.shape[0]
    if mode == "double_fair":
        A = np.vstack([np.ones(L), f0 - f1])
        b = np.array([1.0, 0.0])
        return solve_feasible(A, b)
    if mode == "outcome_fair":
        A = np.zeros((3, 2 * L))
        A[0, :L] = 1.0
        A[1, L:] = 1.0
        A[2, :L] = f0
        A[2, L:] = -f1
        b = np.array([1.0, 1.0, 0.0])
        sol = solve_feasible(A, b)
        if sol is None:
            return None
        return sol[:L], sol[L:]
    raise DataError(f"unknown feasibility mode {mode!r}")
