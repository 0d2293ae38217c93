"""Dataset containers, simulation DGP, discrete environments, CSV IO."""
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairpolicy.data import (
    CsvSchema,
    Dataset,
    DiscreteEnv,
    SIM_GROUP_SHIFT,
    SIM_OUTCOME_COEF,
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
from fairpolicy.errors import ConfigError, DataError


def test_dataset_validates_shapes():
    with pytest.raises(DataError):
        Dataset(np.array([0, 1]), np.zeros((3, 2)), np.array([0, 1]), np.zeros(2), np.zeros(2))
    with pytest.raises(DataError):
        Dataset(np.array([0, 2]), np.zeros((2, 2)), np.array([0, 1]), np.zeros(2), np.zeros(2))


def test_dataset_subset_keeps_alignment():
    train, _ = generate_simulation(SimConfig(50, 10, seed=3))
    sub = train.subset(np.array([4, 7, 9]))
    assert sub.n == 3
    assert np.array_equal(sub.covariates, train.covariates[[4, 7, 9]])
    assert np.array_equal(sub.actions, train.actions[[4, 7, 9]])


def test_simulation_shapes_and_determinism():
    cfg = SimConfig(n_train=120, n_test=80, seed=11)
    tr1, te1 = generate_simulation(cfg)
    tr2, te2 = generate_simulation(SimConfig(120, 80, seed=11))
    assert tr1.n == 120 and te1.n == 80 and tr1.d == 2
    assert np.array_equal(tr1.covariates, tr2.covariates)
    assert np.array_equal(te1.reward_primary, te2.reward_primary)
    tr3, _ = generate_simulation(SimConfig(120, 80, seed=12))
    assert not np.array_equal(tr1.covariates, tr3.covariates)


def test_simulation_matches_dgp_moments():
    train, _ = generate_simulation(SimConfig(200_000, 10, seed=0))
    s, x, a = train.sensitive, train.covariates, train.actions
    assert abs(s.mean() - 0.35) < 0.01
    # X | s has mean shift (0.45, 0.85) and unit noise.
    for j in range(2):
        assert abs(x[s == 1, j].mean() - x[s == 0, j].mean() - SIM_GROUP_SHIFT[1][j]) < 0.02
        assert abs(x[s == 0, j].std() - 1.0) < 0.02
    # Rewards follow the interacted linear model with unit noise.
    z = np.column_stack([np.ones(train.n), s, x, a, a * s, a[:, None] * x])
    resid = train.reward_primary - z @ SIM_OUTCOME_COEF
    assert abs(resid.mean()) < 0.02
    assert abs(resid.std() - 1.0) < 0.02
    assert train.reward_fairness is train.reward_primary
    # Logistic propensity in the stated direction.
    logit = -0.5 + s + x[:, 0] - x[:, 1]
    hi = a[logit > 1].mean()
    lo = a[logit < -1].mean()
    assert hi > 0.7 > 0.3 > lo


def test_demo_env_probabilities_sum():
    env = make_demo_env()
    for s in (0, 1):
        assert np.allclose(env.probs_for(s).sum(), 1.0)
    assert env.n_actions == 2
    assert len(demo_policies()) == 3


def test_discrete_env_json_round_trip():
    env = make_demo_env()
    back = DiscreteEnv.from_json(env.to_json())
    assert np.allclose(back.f_table, env.f_table)
    assert np.allclose(back.x_probs, env.x_probs)
    with pytest.raises(DataError):
        DiscreteEnv.from_json("{not json")


def test_env_sample_draws_from_support():
    env = make_demo_env()
    data = env.sample(500, seed=4)
    assert data.n == 500
    assert set(np.unique(data.sensitive)) <= {0, 1}
    assert set(np.unique(data.actions)) <= {0, 1}


def test_csv_round_trip(tmp_path):
    train, _ = generate_simulation(SimConfig(60, 10, seed=5))
    path = tmp_path / "d.csv"
    save_csv(train, path)
    back = load_csv(path)
    assert np.allclose(back.covariates, train.covariates)
    assert np.array_equal(back.sensitive, train.sensitive)
    assert np.allclose(back.reward_fairness, train.reward_fairness)


def test_csv_schema_renames_columns(tmp_path):
    schema = CsvSchema(
        sensitive="g",
        action="act",
        reward_primary="profit",
        covariates=("age", "bmi"),
        reward_fairness="severity",
    )
    train, _ = generate_simulation(SimConfig(25, 10, seed=6))
    path = tmp_path / "renamed.csv"
    save_csv(train, path, schema)
    header = path.read_text().splitlines()[0]
    assert header.split(",") == ["g", "act", "profit", "age", "bmi", "severity"]
    back = load_csv(path, schema)
    assert np.allclose(back.covariates, train.covariates)
    assert np.allclose(back.reward_fairness, train.reward_fairness)


def test_csv_loader_rejects_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("s,a,r,x1\n0,1,0.5,1.0\n")
    with pytest.raises(DataError):
        load_csv(path)


def test_csv_loader_rejects_non_binary_action(tmp_path):
    path = tmp_path / "bad2.csv"
    path.write_text("s,a,r,x1,x2\n0,3,0.5,1.0,2.0\n")
    with pytest.raises(DataError):
        load_csv(path)


def test_sim_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(n_train=0, n_test=10, seed=0)


@given(
    st.sampled_from((1, 2)),
    st.integers(0, 20),
    st.floats(0.5, 10.0),
    st.integers(0, 1),
)
@settings(max_examples=200, deadline=None)
def test_premium_monotone_and_capped(coverage, claims, exposure, gender):
    base = insurance_premium(coverage, claims, exposure, gender)
    assert 500.0 <= base <= 5000.0
    assert insurance_premium(coverage + 1, claims, exposure, gender) >= base
    assert insurance_premium(coverage, claims + 1, exposure, gender) >= base
    with pytest.raises(DataError):
        insurance_premium(4, claims, exposure, gender)


def test_insurance_rewards_are_negations():
    r1, r2 = insurance_rewards(np.array([100.0, 50.0]), np.array([40.0, 90.0]))
    assert np.allclose(r1, [60.0, -40.0])
    assert np.allclose(r2, -r1)


def test_threshold_label_is_binary():
    lab = threshold_label(np.array([1.0, 7.0, 5.0]), threshold=5.0)
    assert lab.tolist() == [0, 1, 0]
