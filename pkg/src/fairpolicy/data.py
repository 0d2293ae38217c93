"""Datasets, discrete environments, and the synthetic data generators.

Conventions used throughout the package:

* the sensitive attribute ``s`` and the action ``a`` are binary (0/1)
  in observational datasets; discrete environments may carry more than
  two actions,
* a dataset always carries two reward channels.  ``reward_primary``
  drives the value objective, ``reward_fairness`` drives the outcome
  fairness metric; the two may alias the same array.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, DataError
from .rng import make_rng

__all__ = [
    "Dataset",
    "DiscreteEnv",
    "SimConfig",
    "CsvSchema",
    "generate_simulation",
    "make_demo_env",
    "demo_policies",
    "DEMO_REFERENCE_TRIPLES",
    "load_csv",
    "save_csv",
    "insurance_premium",
    "insurance_rewards",
    "threshold_label",
    "SIM_OUTCOME_COEF",
    "SIM_GROUP_SHIFT",
    "SIM_OPTIMAL_RULE",
]

# Coefficients of the simulated outcome mean on the interacted feature
# map [1, s, x1, x2, a, a*s, a*x1, a*x2]; used as the consistency target
# for fitted outcome models.
SIM_OUTCOME_COEF = np.array([0.0, 1.5, 0.9, 0.8, 1.0, -0.8, -0.5, -0.5])

# Per-group covariate means of the simulation, rows indexed by s.
SIM_GROUP_SHIFT = np.array([[0.0, 0.0], [0.45, 0.85]])

# Coefficients of the true optimal rule on [1, s, x1, x2]: treat iff the
# score is positive.
SIM_OPTIMAL_RULE = np.array([1.0, -0.8, -0.5, -0.5])


def _as_float_2d(arr, name: str) -> np.ndarray:
    out = np.asarray(arr, dtype=float)
    if out.ndim != 2:
        raise DataError(f"{name} must be 2-dimensional, got shape {out.shape}")
    return out


@dataclass
class Dataset:
    """Observational sample of (s, x, a, r) tuples.

    Attributes
    ----------
    sensitive : (n,) int array with values in {0, 1}
    covariates : (n, d) float array
    actions : (n,) int array with values in {0, 1}
    reward_primary : (n,) float array, the value-channel reward
    reward_fairness : (n,) float array, the fairness-channel reward.
        May be the same array object as ``reward_primary``.
    """

    sensitive: np.ndarray
    covariates: np.ndarray
    actions: np.ndarray
    reward_primary: np.ndarray
    reward_fairness: np.ndarray

    def __post_init__(self) -> None:
        self.sensitive = np.asarray(self.sensitive, dtype=np.int64)
        self.covariates = _as_float_2d(self.covariates, "covariates")
        self.actions = np.asarray(self.actions, dtype=np.int64)
        self.reward_primary = np.asarray(self.reward_primary, dtype=float)
        self.reward_fairness = np.asarray(self.reward_fairness, dtype=float)
        n = self.sensitive.shape[0]
        if n < 1:
            raise DataError("dataset must contain at least one record")
        for name in ("covariates", "actions", "reward_primary", "reward_fairness"):
            if getattr(self, name).shape[0] != n:
                raise DataError(f"{name} has {getattr(self, name).shape[0]} rows, expected {n}")
        if self.covariates.shape[1] < 1:
            raise DataError("dataset needs at least one covariate column")
        for name, arr in (("sensitive", self.sensitive), ("actions", self.actions)):
            bad = ~np.isin(arr, (0, 1))
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise DataError(f"{name} must be binary; found {arr[i]} at row {i + 1}")

    @property
    def n(self) -> int:
        return int(self.sensitive.shape[0])

    @property
    def d(self) -> int:
        return int(self.covariates.shape[1])

    def subset(self, idx) -> "Dataset":
        return Dataset(
            self.sensitive[idx],
            self.covariates[idx],
            self.actions[idx],
            self.reward_primary[idx],
            self.reward_fairness[idx],
        )


@dataclass
class DiscreteEnv:
    """Finite environment with known conditional outcome means.

    ``f_table[s, j, a]`` is the fairness-channel mean outcome at
    sensitive value ``s``, support point ``j`` and action ``a``;
    ``r_table`` is the value channel (often the same array).
    ``x_probs`` is either a shared (m,) vector or a per-group (2, m)
    matrix of support-point probabilities.
    """

    s_prob: float
    x_support: np.ndarray
    x_probs: np.ndarray
    f_table: np.ndarray
    r_table: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.x_support = _as_float_2d(self.x_support, "x_support")
        self.x_probs = np.asarray(self.x_probs, dtype=float)
        self.f_table = np.asarray(self.f_table, dtype=float)
        if self.r_table is None:
            self.r_table = self.f_table
        else:
            self.r_table = np.asarray(self.r_table, dtype=float)
        if not 0.0 <= self.s_prob <= 1.0:
            raise DataError(f"s_prob must lie in [0, 1], got {self.s_prob}")
        m = self.x_support.shape[0]
        if self.x_probs.shape not in ((m,), (2, m)):
            raise DataError(f"x_probs must have shape ({m},) or (2, {m}), got {self.x_probs.shape}")
        if (self.x_probs < 0).any() or (self.x_probs > 1).any():
            raise DataError("x_probs must lie in [0, 1]")
        sums = self.x_probs.sum(axis=-1)
        if not np.all(np.abs(sums - 1.0) <= 1e-12):
            raise DataError(f"x_probs must sum to 1 per group, got sums {sums}")
        for name, tab in (("f_table", self.f_table), ("r_table", self.r_table)):
            if tab.ndim != 3 or tab.shape[0] != 2 or tab.shape[1] != m:
                raise DataError(f"{name} must have shape (2, {m}, L), got {tab.shape}")
            if not np.isfinite(tab).all():
                raise DataError(f"{name} contains non-finite entries")
        if self.f_table.shape[2] < 2 or self.r_table.shape[2] != self.f_table.shape[2]:
            raise DataError("tables must agree on L >= 2 actions")

    @property
    def n_points(self) -> int:
        return int(self.x_support.shape[0])

    @property
    def n_actions(self) -> int:
        return int(self.f_table.shape[2])

    def probs_for(self, s: int) -> np.ndarray:
        return self.x_probs if self.x_probs.ndim == 1 else self.x_probs[s]

    def marginal_x_probs(self) -> np.ndarray:
        if self.x_probs.ndim == 1:
            return self.x_probs
        return (1.0 - self.s_prob) * self.x_probs[0] + self.s_prob * self.x_probs[1]

    def sample(self, n: int, seed: int, noise_sd: float = 0.0) -> Dataset:
        """Draw n i.i.d. records; actions uniform over {0, 1}.

        Only binary-action environments can be flattened into a Dataset.
        """
        if self.n_actions != 2:
            raise DataError("sample requires a binary-action environment")
        rng = make_rng(seed)
        s = (rng.random(n) < self.s_prob).astype(np.int64)
        idx = np.empty(n, dtype=np.int64)
        for g in (0, 1):
            mask = s == g
            idx[mask] = rng.choice(self.n_points, size=int(mask.sum()), p=self.probs_for(g))
        a = rng.integers(0, 2, size=n)
        r = self.r_table[s, idx, a]
        f = self.f_table[s, idx, a]
        if noise_sd > 0:
            r = r + noise_sd * rng.standard_normal(n)
            f = f + noise_sd * rng.standard_normal(n)
        return Dataset(s, self.x_support[idx], a, r, f)

    def to_json(self) -> str:
        payload = {
            "s_prob": self.s_prob,
            "x_support": self.x_support.tolist(),
            "x_probs": self.x_probs.tolist(),
            "f_table": self.f_table.tolist(),
            "r_table": self.r_table.tolist(),
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "DiscreteEnv":
        try:
            payload = json.loads(text)
            return cls(
                s_prob=float(payload["s_prob"]),
                x_support=np.array(payload["x_support"], dtype=float),
                x_probs=np.array(payload["x_probs"], dtype=float),
                f_table=np.array(payload["f_table"], dtype=float),
                r_table=np.array(payload["r_table"], dtype=float),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed environment JSON: {exc}") from exc


@dataclass
class SimConfig:
    """Size and seed of one synthetic draw."""

    n_train: int = 200
    n_test: int = 5000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_train < 1 or self.n_test < 0:
            raise ConfigError("sample sizes must be positive")


def _expit(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _draw_split(rng: np.random.Generator, n: int) -> Dataset:
    s = (rng.random(n) < 0.35).astype(np.int64)
    x1 = 0.45 * s + rng.standard_normal(n)
    x2 = 0.85 * s + rng.standard_normal(n)
    propensity = _expit(-0.5 + s + x1 - x2)
    a = (rng.random(n) < propensity).astype(np.int64)
    noise = rng.standard_normal(n)
    r = 1.5 * s + 0.9 * x1 + 0.8 * x2 + a * (1.0 - 0.8 * s - 0.5 * x1 - 0.5 * x2) + noise
    # Single-outcome setting: the fairness channel aliases the primary.
    return Dataset(s, np.column_stack([x1, x2]), a, r, r)


def generate_simulation(config: SimConfig) -> tuple[Dataset, Dataset]:
    """Draw the benchmark simulation.

    S ~ Bernoulli(0.35); X1 = 0.45 S + e1 and X2 = 0.85 S + e2 with
    standard normal noise; treatment is confounded through
    logit(P(A=1)) = -0.5 + S + X1 - X2; and

        R = 1.5 S + 0.9 X1 + 0.8 X2 + A (1 - 0.8 S - 0.5 X1 - 0.5 X2) + e.

    Returns (train, test), drawn in that order from one stream so a
    fixed seed pins both splits.
    """
    rng = make_rng(config.seed)
    train = _draw_split(rng, config.n_train)
    test = _draw_split(rng, config.n_test) if config.n_test > 0 else train
    return train, test


# Published fairness-metric pairs (delta1, delta2) for the three demo
# rules below, in order; inputs to the scalarization comparison.
DEMO_REFERENCE_TRIPLES = ((0.0, 0.7), (0.4, 0.66), (1.0, 0.5))


def make_demo_env() -> DiscreteEnv:
    """Two-point binary-action environment used by the scalarization demo.

    S ~ Bernoulli(0.5), X in {0, 1} with P(X=1) = 0.6 shared across
    groups, and mean outcome f(s, x, a) = s + x + 0.4 a - 0.5 a s.  On
    this environment a linear scalarization sweep provably recovers only
    part of the fairness Pareto set, while the weighted-max sweep
    recovers all of it.
    """
    x_support = np.array([[0.0], [1.0]])
    x_probs = np.array([0.4, 0.6])
    s_grid = np.array([0.0, 1.0]).reshape(2, 1, 1)
    x_grid = x_support.reshape(1, 2, 1)
    a_grid = np.array([0.0, 1.0]).reshape(1, 1, 2)
    f = s_grid + x_grid + 0.4 * a_grid - 0.5 * a_grid * s_grid
    return DiscreteEnv(s_prob=0.5, x_support=x_support, x_probs=x_probs, f_table=f)


def demo_policies() -> list:
    """The three deterministic rules compared in the demo.

    In order: treat iff x = 1 (group-blind), treat iff s + x > 0, treat
    iff s = 1.
    """
    from .policies import Policy

    env = make_demo_env()
    rules = [
        lambda s, x: float(x > 0),
        lambda s, x: float(s + x > 0),
        lambda s, x: float(s > 0),
    ]
    out = []
    for rule in rules:
        table = np.zeros((2, env.n_points, 2))
        for s in (0, 1):
            for j in range(env.n_points):
                p1 = rule(s, env.x_support[j, 0])
                table[s, j] = (1.0 - p1, p1)
        out.append(Policy.tabular(table, env.x_support))
    return out


@dataclass
class CsvSchema:
    """Column names binding a CSV file to Dataset fields.

    ``reward_fairness=None`` means the fairness channel aliases the
    primary reward column.
    """

    sensitive: str = "s"
    action: str = "a"
    reward_primary: str = "r"
    covariates: Sequence[str] = ("x1", "x2")
    reward_fairness: Optional[str] = None


def load_csv(path, schema: CsvSchema = CsvSchema()) -> Dataset:
    """Parse a CSV file into a Dataset.

    Rows are validated one by one; the first offending row is reported
    by its 1-based data-row index (the header is row 0).
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        col = {name: i for i, name in enumerate(header)}
        needed = [schema.sensitive, schema.action, schema.reward_primary, *schema.covariates]
        if schema.reward_fairness is not None:
            needed.append(schema.reward_fairness)
        for name in needed:
            if name not in col:
                raise DataError(f"{path} is missing column {name!r} (header: {header})")
        width = len(header)
        raw_rows = []
        for i, row in enumerate(reader, start=1):
            if len(row) != width:
                raise DataError(f"row {i}: expected {width} fields, got {len(row)}")
            raw_rows.append(row)
    if not raw_rows:
        raise DataError(f"{path} has a header but no data rows")

    def parse(row, i, name):
        text = row[col[name]].strip()
        try:
            return float(text)
        except ValueError:
            raise DataError(f"row {i}: non-numeric value {text!r} in column {name!r}") from None

    def parse_binary(row, i, name):
        val = parse(row, i, name)
        if val not in (0.0, 1.0):
            raise DataError(f"row {i}: non-binary value {row[col[name]].strip()!r} in column {name!r}")
        return int(val)

    n = len(raw_rows)
    sensitive = np.empty(n, dtype=np.int64)
    actions = np.empty(n, dtype=np.int64)
    reward = np.empty(n)
    covs = np.empty((n, len(schema.covariates)))
    reward2 = np.empty(n) if schema.reward_fairness is not None else None
    for i, row in enumerate(raw_rows, start=1):
        sensitive[i - 1] = parse_binary(row, i, schema.sensitive)
        actions[i - 1] = parse_binary(row, i, schema.action)
        reward[i - 1] = parse(row, i, schema.reward_primary)
        for j, name in enumerate(schema.covariates):
            covs[i - 1, j] = parse(row, i, name)
        if reward2 is not None:
            reward2[i - 1] = parse(row, i, schema.reward_fairness)
    return Dataset(sensitive, covs, actions, reward, reward if reward2 is None else reward2)


def save_csv(data: Dataset, path, schema: CsvSchema = CsvSchema()) -> None:
    """Write a Dataset in the layout load_csv expects.

    The fairness column is written only when the schema names one.
    """
    if len(schema.covariates) != data.d:
        raise DataError(f"schema lists {len(schema.covariates)} covariates, dataset has {data.d}")
    header = [schema.sensitive, schema.action, schema.reward_primary, *schema.covariates]
    if schema.reward_fairness is not None:
        header.append(schema.reward_fairness)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(data.n):
            row = [
                int(data.sensitive[i]),
                int(data.actions[i]),
                repr(float(data.reward_primary[i])),
                *(repr(float(v)) for v in data.covariates[i]),
            ]
            if schema.reward_fairness is not None:
                row.append(repr(float(data.reward_fairness[i])))
            writer.writerow(row)


def insurance_premium(coverage, n_claims, exposure, gender):
    """Annual premium: min(500*coverage + 100*claims/exposure + 20*gender, 5000).

    ``coverage`` must take values in {1, 2, 3}, claims must be
    non-negative, exposure strictly positive, gender binary.  Accepts
    scalars or arrays and broadcasts elementwise.
    """
    coverage = np.asarray(coverage, dtype=float)
    n_claims = np.asarray(n_claims, dtype=float)
    exposure = np.asarray(exposure, dtype=float)
    gender = np.asarray(gender, dtype=float)
    if not np.isin(coverage, (1.0, 2.0, 3.0)).all():
        raise DataError("coverage level must be 1, 2 or 3")
    if (n_claims < 0).any():
        raise DataError("claim counts must be non-negative")
    if (exposure <= 0).any():
        raise DataError("exposure must be strictly positive")
    if not np.isin(gender, (0.0, 1.0)).all():
        raise DataError("gender must be binary")
    raw = 500.0 * coverage + 100.0 * n_claims / exposure + 20.0 * gender
    out = np.minimum(raw, 5000.0)
    return float(out) if out.ndim == 0 else out


def insurance_rewards(premium, claim_amount):
    """Reward channels of the pricing problem: (premium - claims, its negation)."""
    r1 = np.asarray(premium, dtype=float) - np.asarray(claim_amount, dtype=float)
    return r1, -r1


def threshold_label(values, threshold: float = 5.0) -> np.ndarray:
    """Binary label: 1 where value > threshold.

    Preprocessing helper for deriving a risk label from a count-like
    CSV column (default threshold 5).
    """
    return (np.asarray(values, dtype=float) > threshold).astype(np.int64)
