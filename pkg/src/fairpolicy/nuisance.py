"""Outcome-mean models and covariate-shift estimation.

Regression models use the interacted feature map

    [1, s, x1..xd, a, a*s, a*x1..a*xd]

so treatment effects are linear in the same coordinates as baselines.
For discrete environments an exact cell-mean model shares the predict
interface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import Dataset, DiscreteEnv
from .errors import DataError
from .policies import _support_indices

__all__ = [
    "OutcomeModel",
    "CellMeanModel",
    "ShiftModel",
    "feature_map",
    "fit_outcome",
    "predict",
    "fit_shift",
    "counterfactual_x",
]

PROB_CLIP = 1e-6
IRLS_MAX_ITER = 100
IRLS_GRAD_TOL = 1e-8
RIDGE = 1e-8


def _align(s, x, a=None):
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    scalar = s.ndim == 0 and x.ndim == 1
    if x.ndim == 1:
        x = x.reshape(1, -1) if s.ndim == 0 else x.reshape(-1, 1)
    s = np.atleast_1d(s)
    n = max(s.shape[0], x.shape[0])
    if s.shape[0] == 1 and n > 1:
        s = np.repeat(s, n)
    if x.shape[0] == 1 and n > 1:
        x = np.repeat(x, n, axis=0)
    if s.shape[0] != x.shape[0]:
        raise DataError(f"got {s.shape[0]} sensitive values for {x.shape[0]} covariate rows")
    if a is None:
        return s, x, None, scalar
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.shape[0] == 1 and n > 1:
        a = np.repeat(a, n)
    if a.shape[0] != s.shape[0]:
        raise DataError(f"got {a.shape[0]} actions for {s.shape[0]} records")
    return s, x, a, scalar


def feature_map(s, x, a) -> np.ndarray:
    """Interacted design rows [1, s, x, a, a*s, a*x]."""
    s, x, a, _ = _align(s, x, a)
    ones = np.ones(s.shape[0])
    return np.column_stack([ones, s, x, a, a * s, a[:, None] * x])


@dataclass
class OutcomeModel:
    """Fitted outcome-mean model on the interacted feature map."""

    family: str
    channel: str
    coef: np.ndarray
    warning: Optional[str] = None

    @property
    def d(self) -> int:
        return int((self.coef.shape[0] - 4) // 2)

    def to_json(self) -> str:
        import json

        return json.dumps(
            {
                "family": self.family,
                "channel": self.channel,
                "coefficients": self.coef.tolist(),
                "warning": self.warning,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "OutcomeModel":
        import json

        try:
            payload = json.loads(text)
            return cls(
                family=str(payload["family"]),
                channel=str(payload["channel"]),
                coef=np.array(payload["coefficients"], dtype=float),
                warning=payload.get("warning"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed model JSON: {exc}") from exc


@dataclass
class CellMeanModel:
    """Exact outcome means of a discrete environment.

    Shares the predict interface with fitted models; covariate rows are
    matched against the environment support exactly.
    """

    env: DiscreteEnv
    channel: str = "primary"

    @property
    def table(self) -> np.ndarray:
        return self.env.r_table if self.channel == "primary" else self.env.f_table


def _expit(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def fit_outcome(data: Dataset, family: str = "linear-gaussian", channel: str = "primary") -> OutcomeModel:
    """Fit the chosen reward channel on the interacted feature map.

    Least squares solves via orthogonal decomposition, falling back to a
    small ridge on rank deficiency.  Logistic fits run iteratively
    reweighted least squares; separation is reported through the model's
    warning field rather than raised.
    """
    if channel not in ("primary", "fairness"):
        raise DataError(f"unknown channel {channel!r}")
    y = data.reward_primary if channel == "primary" else data.reward_fairness
    phi = feature_map(data.sensitive, data.covariates, data.actions)
    n, p = phi.shape
    if n <= p:
        raise DataError(f"need more than {p} records to fit {p} coefficients, got {n}")
    if family == "linear-gaussian":
        coef, _, rank, _ = np.linalg.lstsq(phi, y, rcond=None)
        if rank < p:
            coef = np.linalg.solve(phi.T @ phi + RIDGE * np.eye(p), phi.T @ y)
        return OutcomeModel(family=family, channel=channel, coef=coef)
    if family == "logistic":
        if not np.isin(y, (0.0, 1.0)).all():
            raise DataError("logistic family requires 0/1 outcomes")
        beta = np.zeros(p)
        warning = None
        for _ in range(IRLS_MAX_ITER):
            mu = _expit(phi @ beta)
            grad = phi.T @ (y - mu)
            if np.max(np.abs(grad)) <= IRLS_GRAD_TOL:
                break
            w = mu * (1.0 - mu)
            if np.max(w) < 1e-12:
                warning = "perfect separation: weights vanished before convergence"
                break
            hess = phi.T @ (w[:, None] * phi)
            try:
                step = np.linalg.solve(hess, grad)
            except np.linalg.LinAlgError:
                step = np.linalg.solve(hess + RIDGE * np.eye(p), grad)
            beta = beta + step
        else:
            warning = "IRLS did not converge in 100 iterations; data may be separable"
        if warning is None and np.max(np.abs(beta)) > 1e3:
            warning = "extreme coefficients; data may be separable"
        return OutcomeModel(family=family, channel=channel, coef=beta, warning=warning)
    raise DataError(f"unknown model family {family!r}")


def predict(model, s, x, a):
    """Mean outcome under (s, x, a); accepts scalars or aligned arrays.

    Logistic predictions are clipped to [1e-6, 1 - 1e-6].
    """
    if isinstance(model, CellMeanModel):
        s_arr, x_arr, a_arr, scalar = _align(s, x, a)
        idx = _support_indices(model.env.x_support, x_arr)
        vals = model.table[s_arr.astype(np.int64), idx, a_arr.astype(np.int64)]
        return float(vals[0]) if scalar else vals
    s_arr, x_arr, a_arr, scalar = _align(s, x, a)
    phi = feature_map(s_arr, x_arr, a_arr)
    if phi.shape[1] != model.coef.shape[0]:
        raise DataError(
            f"model expects {model.d} covariates, got {(phi.shape[1] - 4) // 2}"
        )
    vals = phi @ model.coef
    if model.family == "logistic":
        vals = np.clip(_expit(vals), PROB_CLIP, 1.0 - PROB_CLIP)
    return float(vals[0]) if scalar else vals


@dataclass
class ShiftModel:
    """Per-group covariate location estimates; rows indexed by s."""

    theta: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_theta(cls, theta0, theta1) -> "ShiftModel":
        """Oracle shift for simulation diagnostics."""
        theta = np.vstack([np.asarray(theta0, dtype=float), np.asarray(theta1, dtype=float)])
        return cls(theta=theta, counts=np.zeros(2, dtype=np.int64))


def fit_shift(data: Dataset) -> ShiftModel:
    """Per-group covariate means; either group being empty is an error."""
    theta = np.empty((2, data.d))
    counts = np.empty(2, dtype=np.int64)
    for g in (0, 1):
        mask = data.sensitive == g
        counts[g] = int(mask.sum())
        if counts[g] == 0:
            raise DataError(f"cannot estimate the covariate shift: no records with s={g}")
        theta[g] = data.covariates[mask].mean(axis=0)
    return ShiftModel(theta=theta, counts=counts)


def counterfactual_x(shift: ShiftModel, s, x, s_prime):
    """Location-shift counterfactual covariates: x + theta(s') - theta(s)."""
    s_arr, x_arr, sp_arr, scalar = _align(s, x, s_prime)
    if x_arr.shape[1] != shift.theta.shape[1]:
        raise DataError(
            f"shift model covers {shift.theta.shape[1]} covariates, got {x_arr.shape[1]}"
        )
    delta = shift.theta[sp_arr.astype(np.int64)] - shift.theta[s_arr.astype(np.int64)]
    out = x_arr + delta
    return out[0] if scalar else out
