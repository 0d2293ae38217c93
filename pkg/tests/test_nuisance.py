"""Outcome regression and covariate shift estimators."""
import numpy as np
import pytest

from fairpolicy.data import Dataset, SimConfig, generate_simulation
from fairpolicy.data import SIM_GROUP_SHIFT, SIM_OUTCOME_COEF
from fairpolicy.errors import DataError
from fairpolicy.nuisance import (
    OutcomeModel,
    ShiftModel,
    feature_map,
    fit_outcome,
    fit_shift,
)


def _noiseless(n, seed, coef):
    rng = np.random.default_rng(seed)
    s = rng.integers(0, 2, n)
    x = rng.normal(size=(n, 2))
    a = rng.integers(0, 2, n)
    r = feature_map(s, x, a) @ coef
    return Dataset(s, x, a, r, r.copy())


def test_feature_map_layout():
    s = np.array([0, 1])
    x = np.array([[2.0, 3.0], [4.0, 5.0]])
    a = np.array([1, 0])
    phi = feature_map(s, x, a)
    assert phi.shape == (2, 8)
    assert np.array_equal(phi[0], [1, 0, 2, 3, 1, 0, 2, 3])
    assert np.array_equal(phi[1], [1, 1, 4, 5, 0, 0, 0, 0])


def test_fit_outcome_exact_on_noiseless_data():
    coef = np.array([0.3, -1.2, 0.7, 0.4, 1.1, -0.8, -0.5, 0.2])
    data = _noiseless(400, 5, coef)
    model = fit_outcome(data)
    assert model.family == "linear-gaussian"
    assert model.channel == "primary"
    assert np.abs(model.coef - coef).max() < 1e-8


def test_fit_outcome_recovers_simulation_coefficients():
    train, _ = generate_simulation(SimConfig(200_000, 10, seed=12))
    model = fit_outcome(train)
    assert np.abs(model.coef - np.asarray(SIM_OUTCOME_COEF)).max() < 0.02


def test_fit_outcome_residual_orthogonality():
    train, _ = generate_simulation(SimConfig(5000, 10, seed=3))
    model = fit_outcome(train)
    phi = feature_map(train.sensitive, train.covariates, train.actions)
    resid = train.reward_primary - phi @ model.coef
    assert np.abs(phi.T @ resid).max() < 1e-6


def test_fit_outcome_fairness_channel():
    coef = np.array([0.3, -1.2, 0.7, 0.4, 1.1, -0.8, -0.5, 0.2])
    data = _noiseless(400, 6, coef)
    data = Dataset(
        data.sensitive,
        data.covariates,
        data.actions,
        data.reward_primary,
        -data.reward_primary,
    )
    model = fit_outcome(data, channel="fairness")
    assert model.channel == "fairness"
    assert np.abs(model.coef + coef).max() < 1e-8


def test_fit_outcome_logistic_requires_binary_reward():
    train, _ = generate_simulation(SimConfig(500, 10, seed=4))
    with pytest.raises(DataError):
        fit_outcome(train, family="logistic")
    binary = Dataset(
        train.sensitive,
        train.covariates,
        train.actions,
        (train.reward_primary > 2.0).astype(float),
        (train.reward_primary > 2.0).astype(float),
    )
    model = fit_outcome(binary, family="logistic")
    phi = feature_map(binary.sensitive, binary.covariates, binary.actions)
    p = 1.0 / (1.0 + np.exp(-(phi @ model.coef)))
    assert ((p > 0.0) & (p < 1.0)).all()
    # Score equations hold at the fitted point.
    assert np.abs(phi.T @ (binary.reward_primary - p)).max() < 1e-4


def test_fit_outcome_rejects_unknown_family_and_channel():
    train, _ = generate_simulation(SimConfig(200, 10, seed=2))
    with pytest.raises(DataError):
        fit_outcome(train, family="poisson")
    with pytest.raises(DataError):
        fit_outcome(train, channel="secondary")


def test_outcome_model_json_round_trip():
    coef = np.arange(8.0)
    model = OutcomeModel(family="linear-gaussian", channel="primary", coef=coef)
    back = OutcomeModel.from_json(model.to_json())
    assert back.family == model.family
    assert np.array_equal(back.coef, coef)
    assert back.d == 2


def test_fit_shift_group_means_and_counts():
    train, _ = generate_simulation(SimConfig(100_000, 10, seed=8))
    shift = fit_shift(train)
    assert shift.theta.shape == (2, 2)
    assert shift.counts.sum() == train.n
    target = np.asarray(SIM_GROUP_SHIFT)
    assert np.abs(shift.theta - target).max() < 0.02
    for g in (0, 1):
        mask = train.sensitive == g
        assert np.allclose(shift.theta[g], train.covariates[mask].mean(axis=0))


def test_fit_shift_requires_both_groups():
    train, _ = generate_simulation(SimConfig(500, 10, seed=8))
    mask = train.sensitive == 1
    solo = Dataset(
        train.sensitive[mask],
        train.covariates[mask],
        train.actions[mask],
        train.reward_primary[mask],
        train.reward_fairness[mask],
    )
    with pytest.raises(DataError):
        fit_shift(solo)


def test_shift_model_from_theta():
    shift = ShiftModel.from_theta([0.0, 0.0], [0.45, 0.85])
    assert np.array_equal(shift.theta, [[0.0, 0.0], [0.45, 0.85]])
