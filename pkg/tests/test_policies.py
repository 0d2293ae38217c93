"""Linear policy class: sampling, scoring, JSON, local search."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairpolicy.data import SimConfig, generate_simulation
from fairpolicy.errors import ConfigError
from fairpolicy.policies import (
    Policy,
    PolicyClassSpec,
    action_prob,
    budget_usage,
    linear_probs,
    local_refine,
    refine_beta,
    sample_pool,
)


def test_linear_policy_validation():
    with pytest.raises(ConfigError):
        Policy.linear([0.5, 1.0])
    with pytest.raises(ConfigError):
        Policy.linear([0.0, 0.3, 1.0], uses_sensitive=False)
    p = Policy.linear([0.0, 0.0, 1.0], uses_sensitive=False)
    assert p.beta[1] == 0.0


def test_policy_json_round_trip():
    p = Policy.linear([0.2, -0.4, 0.9, 0.1], tau=0.3)
    back = Policy.from_json(p.to_json())
    assert back.kind == "linear"
    assert np.allclose(back.beta, p.beta)
    assert back.tau == p.tau


def test_hard_rule_threshold_is_strict():
    # Zero score maps to action 0.
    p = Policy.linear([0.0, 0.0, 0.0, 0.0])
    probs = action_prob(p, np.array([0, 1]), np.zeros((2, 2)))
    assert np.array_equal(probs, [0.0, 0.0])


def test_linear_probs_soft_matches_sigmoid():
    betas = np.array([[0.1, 0.5, -0.3]])
    taus = np.array([2.0])
    z = np.array([[1.0, 1.0, 0.4]])
    got = linear_probs(betas, taus, z)
    score = z @ betas[0]
    assert np.allclose(got[:, 0], 1.0 / (1.0 + np.exp(-score / 2.0)))


def test_sample_pool_geometry():
    spec = PolicyClassSpec(n_covariates=3, pool_size=500, weight_bound=2.0)
    pool = sample_pool(spec, seed=1)
    assert len(pool) == 500
    betas = np.array([p.beta for p in pool])
    # Slopes sit on the sphere of radius weight_bound, intercepts inside it.
    norms = np.linalg.norm(betas[:, 1:], axis=1)
    assert np.allclose(norms, 2.0)
    assert (np.abs(betas[:, 0]) <= 2.0).all()
    assert betas[:, 0].std() > 0.5


def test_sample_pool_sensitive_free_class():
    spec = PolicyClassSpec(n_covariates=2, pool_size=50, uses_sensitive=False)
    pool = sample_pool(spec, seed=2)
    betas = np.array([p.beta for p in pool])
    assert np.array_equal(betas[:, 1], np.zeros(50))
    assert np.allclose(np.linalg.norm(betas[:, 2:], axis=1), 1.0)


def test_sample_pool_deterministic_in_seed():
    spec = PolicyClassSpec(n_covariates=2, pool_size=20)
    a = np.array([p.beta for p in sample_pool(spec, seed=7)])
    b = np.array([p.beta for p in sample_pool(spec, seed=7)])
    c = np.array([p.beta for p in sample_pool(spec, seed=8)])
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_pool_budget_cap_filters():
    train, _ = generate_simulation(SimConfig(300, 10, seed=9))
    spec = PolicyClassSpec(n_covariates=2, pool_size=40, budget_cap=120.0)
    pool = sample_pool(spec, seed=3, reference=train)
    for p in pool:
        assert budget_usage(p, train) <= 120.0 + 1e-12
    with pytest.raises(ConfigError):
        sample_pool(spec, seed=3)
    tight = PolicyClassSpec(n_covariates=2, pool_size=40, budget_cap=0.0)
    with pytest.raises(ConfigError):
        sample_pool(tight, seed=3, reference=train)


def test_refine_beta_respects_budget_and_start():
    calls = []

    def evaluate(block):
        calls.append(block.shape[0])
        vals = np.square(block).sum(axis=1)
        return vals, np.ones(block.shape[0], dtype=bool)

    start = np.array([1.0, -2.0, 0.5])
    best, val, used = refine_beta(start, evaluate, budget=60, free=np.arange(3))
    assert used <= 60
    assert val <= np.square(start).sum()
    assert sum(calls) == used

    # Budget 0 still prices the start point but takes no steps.
    same, val0, used0 = refine_beta(start, evaluate, budget=0, free=np.arange(3))
    assert np.array_equal(same, start)
    assert used0 == 1
    assert val0 == np.square(start).sum()


def test_refine_beta_stays_feasible():
    # Feasibility cuts off the region the objective prefers.
    def evaluate(block):
        vals = block[:, 0]
        ok = block[:, 0] >= -1.0
        return vals, ok

    start = np.array([0.0, 0.0, 1.0])
    best, _, _ = refine_beta(start, evaluate, budget=300, free=np.arange(3))
    assert best[0] >= -1.0 - 1e-12


def test_local_refine_convex_quadratic_reaches_optimum():
    target = np.array([0.4, -0.2, 0.7, 0.1])

    def objective(p):
        return float(np.square(p.beta - target).sum())

    start = Policy.linear([0.0, 0.0, 0.1, 0.0])
    out = local_refine(start, objective, lambda p: True, budget=4000)
    assert objective(out) <= objective(start)
    assert np.abs(out.beta - target).max() < 1e-3


def test_local_refine_zero_budget_returns_start():
    start = Policy.linear([0.3, 0.1, -0.5])
    out = local_refine(start, lambda p: 1.0, lambda p: True, budget=0)
    assert np.array_equal(out.beta, start.beta)


def test_local_refine_keeps_sensitive_coordinate_frozen():
    start = Policy.linear([0.0, 0.0, 1.0], uses_sensitive=False)

    def objective(p):
        return -float(p.beta[1])

    out = local_refine(start, objective, lambda p: True, budget=200)
    assert out.beta[1] == 0.0


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_pool_probabilities_lie_in_unit_interval(seed):
    spec = PolicyClassSpec(n_covariates=2, pool_size=8, temperature=0.5)
    pool = sample_pool(spec, seed=seed)
    s = np.array([0, 1, 1])
    x = np.array([[0.0, 0.1], [2.0, -1.0], [-3.0, 0.4]])
    for p in pool:
        probs = action_prob(p, s, x)
        assert ((probs >= 0.0) & (probs <= 1.0)).all()
