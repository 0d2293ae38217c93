"""Policy representations, the candidate sampler, and local search.

Two policy kinds share one interface:

* ``linear``: treat with probability sigmoid(beta @ [1, s, x] / tau);
  at temperature 0 the rule is deterministic, treating exactly when the
  score is strictly positive (a zero score maps to action 0),
* ``tabular``: an explicit action distribution per (s, support point),
  used with discrete environments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, DataError
from .rng import make_rng

__all__ = [
    "Policy",
    "PolicyClassSpec",
    "action_prob",
    "sample_pool",
    "budget_usage",
    "local_refine",
]


@dataclass
class Policy:
    kind: str
    beta: Optional[np.ndarray] = None
    tau: float = 0.0
    uses_sensitive: bool = True
    table: Optional[np.ndarray] = None
    support: Optional[np.ndarray] = None

    @classmethod
    def linear(cls, beta, tau: float = 0.0, uses_sensitive: bool = True) -> "Policy":
        beta = np.asarray(beta, dtype=float)
        if beta.ndim != 1 or beta.shape[0] < 3:
            raise ConfigError(f"linear policy needs [intercept, s, x...] weights, got shape {beta.shape}")
        if tau < 0:
            raise ConfigError("temperature must be non-negative")
        if not uses_sensitive and beta[1] != 0.0:
            raise ConfigError("uses_sensitive=False requires a zero s-coefficient")
        return cls(kind="linear", beta=beta, tau=float(tau), uses_sensitive=uses_sensitive)

    @classmethod
    def tabular(cls, table, support) -> "Policy":
        table = np.asarray(table, dtype=float)
        support = np.asarray(support, dtype=float)
        if table.ndim != 3 or table.shape[0] != 2 or table.shape[2] < 2:
            raise ConfigError(f"tabular policy table must have shape (2, m, L), got {table.shape}")
        if support.ndim != 2 or support.shape[0] != table.shape[1]:
            raise ConfigError("support must list one covariate point per table row")
        if (table < 0).any():
            raise ConfigError("action probabilities must be non-negative")
        if not np.all(np.abs(table.sum(axis=2) - 1.0) <= 1e-12):
            raise ConfigError("action probabilities must sum to 1 in every cell")
        return cls(kind="tabular", table=table, support=support)

    @property
    def d(self) -> int:
        if self.kind == "linear":
            return int(self.beta.shape[0] - 2)
        return int(self.support.shape[1])

    def to_json(self) -> str:
        if self.kind == "linear":
            payload = {
                "kind": "linear",
                "beta": self.beta.tolist(),
                "tau": self.tau,
                "uses_sensitive": self.uses_sensitive,
            }
        else:
            payload = {
                "kind": "tabular",
                "table": self.table.tolist(),
                "support": self.support.tolist(),
            }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "Policy":
        try:
            payload = json.loads(text)
            kind = payload["kind"]
            if kind == "linear":
                return cls.linear(
                    np.array(payload["beta"], dtype=float),
                    tau=float(payload["tau"]),
                    uses_sensitive=bool(payload["uses_sensitive"]),
                )
            if kind == "tabular":
                return cls.tabular(
                    np.array(payload["table"], dtype=float),
                    np.array(payload["support"], dtype=float),
                )
            raise DataError(f"unknown policy kind {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed policy JSON: {exc}") from exc


def _features(s, x) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1) if s.ndim == 0 else x.reshape(-1, 1)
    if s.ndim == 0:
        s = s.reshape(1)
    n = max(s.shape[0], x.shape[0])
    if s.shape[0] == 1 and n > 1:
        s = np.repeat(s, n)
    if x.shape[0] == 1 and n > 1:
        x = np.repeat(x, n, axis=0)
    if s.shape[0] != x.shape[0]:
        raise DataError(f"got {s.shape[0]} sensitive values for {x.shape[0]} covariate rows")
    return np.column_stack([np.ones(n), s, x])


def linear_probs(betas: np.ndarray, taus: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Treatment probabilities of a batch of linear policies.

    betas (P, k), taus (P,), z (n, k) -> (n, P).  Deterministic rows
    (tau 0) treat exactly when the score is strictly positive.
    """
    scores = z @ betas.T
    out = np.empty_like(scores)
    det = taus == 0.0
    if det.any():
        out[:, det] = scores[:, det] > 0.0
    soft = ~det
    if soft.any():
        scaled = scores[:, soft] / taus[soft]
        np.clip(scaled, -500.0, 500.0, out=scaled)
        out[:, soft] = 1.0 / (1.0 + np.exp(-scaled))
    return out


def _support_indices(support: np.ndarray, x: np.ndarray) -> np.ndarray:
    idx = np.empty(x.shape[0], dtype=np.int64)
    for i, row in enumerate(x):
        hit = np.flatnonzero(np.all(support == row, axis=1))
        if hit.size == 0:
            raise DataError(f"covariate point {row.tolist()} not in the policy's support")
        idx[i] = hit[0]
    return idx


def action_prob(policy: Policy, s, x):
    """P(action 1 | s, x); accepts scalars or aligned arrays."""
    scalar = np.asarray(s).ndim == 0
    if policy.kind == "linear":
        z = _features(s, x)
        if z.shape[1] != policy.beta.shape[0]:
            raise DataError(f"policy expects {policy.beta.shape[0] - 2} covariates, got {z.shape[1] - 2}")
        p = linear_probs(policy.beta[None], np.array([policy.tau]), z)[:, 0]
    else:
        z = _features(s, x)
        sv = z[:, 1].astype(np.int64)
        idx = _support_indices(policy.support, z[:, 2:])
        p = policy.table[sv, idx, 1]
    return float(p[0]) if scalar else p


@dataclass
class PolicyClassSpec:
    """Sampling description of the linear policy class.

    Slope vectors are drawn uniformly on the sphere of radius
    ``weight_bound`` (over the s and x coordinates, or x only when
    ``uses_sensitive`` is false) and intercepts uniformly on
    [-weight_bound, weight_bound].
    """

    n_covariates: int
    kind: str = "linear"
    pool_size: int = 2000
    weight_bound: float = 1.0
    temperature: float = 0.0
    uses_sensitive: bool = True
    budget_cap: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind != "linear":
            raise ConfigError(f"unsupported policy class kind {self.kind!r}")
        if self.n_covariates < 1 or self.pool_size < 1:
            raise ConfigError("n_covariates and pool_size must be positive")
        if self.weight_bound <= 0 or self.temperature < 0:
            raise ConfigError("weight_bound must be positive and temperature non-negative")


def _sample_betas(spec: PolicyClassSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    d = spec.n_covariates
    free = d + 1 if spec.uses_sensitive else d
    raw = rng.standard_normal((count, free))
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    slopes = spec.weight_bound * raw / norms
    intercepts = rng.uniform(-spec.weight_bound, spec.weight_bound, size=count)
    betas = np.zeros((count, d + 2))
    betas[:, 0] = intercepts
    if spec.uses_sensitive:
        betas[:, 1:] = slopes
    else:
        betas[:, 2:] = slopes
    return betas


def budget_usage(policy: Policy, data) -> float:
    """Expected number treated: sum of action probabilities over the dataset."""
    return float(np.sum(action_prob(policy, data.sensitive, data.covariates)))


def sample_pool(spec: PolicyClassSpec, seed: int, reference=None) -> list[Policy]:
    """Draw the candidate pool, resampling budget-cap violators.

    A budget cap needs a reference dataset to price candidates on;
    sampling fails after a bounded number of rounds if the cap rejects
    everything.
    """
    if spec.budget_cap is not None and reference is None:
        raise ConfigError("budget_cap requires a reference dataset")
    rng = make_rng(seed)
    taus = np.full(1, spec.temperature)
    if reference is not None:
        z = _features(reference.sensitive, reference.covariates)
    accepted: list[np.ndarray] = []
    rounds = 0
    while len(accepted) < spec.pool_size:
        if rounds >= 100:
            raise ConfigError(
                f"budget cap {spec.budget_cap} rejected every candidate for {rounds} rounds"
            )
        betas = _sample_betas(spec, rng, spec.pool_size)
        if spec.budget_cap is not None:
            usage = linear_probs(betas, np.repeat(taus, betas.shape[0]), z).sum(axis=0)
            betas = betas[usage <= spec.budget_cap]
        accepted.extend(betas)
        rounds += 1
    return [
        Policy.linear(beta, tau=spec.temperature, uses_sensitive=spec.uses_sensitive)
        for beta in accepted[: spec.pool_size]
    ]


def refine_beta(
    beta0: np.ndarray,
    evaluate: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    budget: int,
    free: np.ndarray,
    step0: Optional[float] = None,
    min_step: float = 1e-4,
) -> tuple[np.ndarray, float, int]:
    """Pattern search minimizing a batch objective over selected coordinates.

    ``evaluate`` maps a (k, p) block of weight vectors to (objective,
    feasible) arrays; each evaluated row counts against ``budget``.  The
    start must be feasible.  Returns (best weights, objective, evals).
    """
    obj0, ok0 = evaluate(beta0[None, :])
    if not ok0[0]:
        raise ConfigError("local search requires a feasible starting policy")
    best = beta0.copy()
    best_obj = float(obj0[0])
    used = 1
    step = step0 if step0 is not None else 0.5 * max(1.0, float(np.max(np.abs(beta0))))
    while used < budget and step >= min_step:
        block = np.repeat(best[None, :], 2 * free.size, axis=0)
        for i, j in enumerate(free):
            block[2 * i, j] += step
            block[2 * i + 1, j] -= step
        take = min(block.shape[0], budget - used)
        obj, ok = evaluate(block[:take])
        used += take
        obj = np.where(ok, obj, np.inf)
        k = int(np.argmin(obj))
        if obj[k] < best_obj:
            best = block[k].copy()
            best_obj = float(obj[k])
        else:
            step *= 0.5
    return best, best_obj, used


def local_refine(
    policy: Policy,
    objective: Callable[[Policy], float],
    feasible: Callable[[Policy], bool],
    budget: int = 200,
    step0: Optional[float] = None,
) -> Policy:
    """Coordinate-wise local search around a linear policy.

    Minimizes ``objective`` subject to ``feasible``, spending at most
    ``budget`` objective evaluations; step sizes halve whenever no
    coordinate move improves.  Tabular policies are returned unchanged.
    The result is never worse than the starting policy.
    """
    if policy.kind != "linear":
        return policy
    if budget < 1:
        return policy

    def evaluate(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        vals = np.empty(block.shape[0])
        ok = np.empty(block.shape[0], dtype=bool)
        for i, beta in enumerate(block):
            cand = Policy.linear(beta, tau=policy.tau, uses_sensitive=policy.uses_sensitive)
            ok[i] = bool(feasible(cand))
            vals[i] = objective(cand) if ok[i] else np.inf
        return vals, ok

    k = policy.beta.shape[0]
    free = np.arange(k) if policy.uses_sensitive else np.array([0, *range(2, k)])
    beta, _, _ = refine_beta(policy.beta, evaluate, budget, free, step0=step0)
    return Policy.linear(beta, tau=policy.tau, uses_sensitive=policy.uses_sensitive)
