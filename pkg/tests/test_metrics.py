"""Fairness gap and value estimators, empirical and exact."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairpolicy.data import (
    DEMO_REFERENCE_TRIPLES,
    SimConfig,
    demo_policies,
    generate_simulation,
    make_demo_env,
)
from fairpolicy.errors import DataError
from fairpolicy.metrics import (
    MetricConfig,
    MetricReport,
    compute_metrics,
    exact_metrics,
)
from fairpolicy.nuisance import ShiftModel, fit_outcome, fit_shift
from fairpolicy.policies import Policy
from fairpolicy.solver import MetricEvaluator, Nuisances


@pytest.fixture(scope="module")
def sim():
    train, test = generate_simulation(SimConfig(400, 4000, seed=21))
    r_model = fit_outcome(train)
    f_model = fit_outcome(train, channel="fairness")
    shift = fit_shift(train)
    return train, test, r_model, f_model, shift


def _random_policies(seed, count):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        beta = rng.normal(size=4)
        out.append(Policy.linear(beta, tau=float(rng.uniform(0, 0.5))))
    return out


def test_metric_config_rejects_unknown_names():
    with pytest.raises(DataError):
        MetricConfig(notion="demographic_parity")
    with pytest.raises(DataError):
        MetricConfig(variant="cubed")


def test_gaps_are_nonnegative(sim):
    train, _, r_model, f_model, shift = sim
    for notion in ("equal_opportunity", "counterfactual"):
        for variant in ("squared", "absolute"):
            cfg = MetricConfig(notion=notion, variant=variant)
            for p in _random_policies(3, 5):
                rep = compute_metrics(p, train, r_model, f_model, cfg, shift=shift)
                assert rep.delta1 >= 0.0
                assert rep.delta2 >= 0.0


def test_squared_variant_below_absolute_for_probabilities(sim):
    # Per-unit gaps live in [0, 1], so squaring shrinks them.
    train, _, r_model, f_model, shift = sim
    for p in _random_policies(5, 8):
        sq = compute_metrics(
            p, train, r_model, f_model, MetricConfig(variant="squared"), shift=shift
        )
        ab = compute_metrics(
            p, train, r_model, f_model, MetricConfig(variant="absolute"), shift=shift
        )
        assert sq.delta1 <= ab.delta1 + 1e-12
        assert sq.value == ab.value


def test_sensitive_free_policy_has_zero_action_gap(sim):
    train, _, r_model, f_model, shift = sim
    p = Policy.linear([0.2, 0.0, 0.6, -0.3], uses_sensitive=False)
    eo = compute_metrics(p, train, r_model, f_model, MetricConfig(), shift=shift)
    assert eo.delta1 == 0.0
    # The counterfactual comparison also displaces covariates, so ignoring
    # the sensitive coordinate no longer forces a zero gap.
    cf = compute_metrics(
        p, train, r_model, f_model, MetricConfig(notion="counterfactual"), shift=shift
    )
    assert cf.delta1 > 0.0


def test_counterfactual_needs_shift_model(sim):
    train, _, r_model, f_model, _ = sim
    p = _random_policies(7, 1)[0]
    cfg = MetricConfig(notion="counterfactual")
    with pytest.raises(DataError):
        compute_metrics(p, train, r_model, f_model, cfg, shift=None)


def test_zero_shift_collapses_counterfactual_to_observed(sim):
    # With no group displacement the flipped covariates equal the originals.
    train, _, r_model, f_model, _ = sim
    flat = ShiftModel.from_theta([0.0, 0.0], [0.0, 0.0])
    eo = MetricConfig(notion="equal_opportunity")
    cf = MetricConfig(notion="counterfactual")
    for p in _random_policies(11, 5):
        rep_eo = compute_metrics(p, train, r_model, f_model, eo)
        rep_cf = compute_metrics(p, train, r_model, f_model, cf, shift=flat)
        assert rep_cf.delta1 == pytest.approx(rep_eo.delta1, abs=1e-12)
        assert rep_cf.delta2 == pytest.approx(rep_eo.delta2, abs=1e-12)


def test_evaluator_matches_compute_metrics(sim):
    train, _, r_model, f_model, shift = sim
    pols = _random_policies(13, 12)
    for notion in ("equal_opportunity", "counterfactual"):
        cfg = MetricConfig(notion=notion)
        ev = MetricEvaluator(
            train, r_model, f_model=f_model, shift=shift, notion=notion
        )
        betas = np.array([p.beta for p in pols])
        taus = np.array([p.tau for p in pols])
        d1, d2, v = ev.triples(betas, taus)
        for j, p in enumerate(pols):
            rep = compute_metrics(p, train, r_model, f_model, cfg, shift=shift)
            assert abs(d1[j] - rep.delta1) <= 1e-12
            assert abs(d2[j] - rep.delta2) <= 1e-12
            assert abs(v[j] - rep.value) <= 1e-12


def test_empirical_matches_exact_on_large_sample():
    env = make_demo_env()
    pols = demo_policies()
    train = env.sample(200_000, seed=17)
    r_model = None
    for p in pols:
        rep = exact_metrics(p, env)
        d1_emp = _tabular_gap(p, train)
        assert abs(rep.delta1 - d1_emp) < 0.01


def _tabular_gap(policy, data):
    from fairpolicy.policies import action_prob

    p1 = action_prob(policy, np.ones(data.n, dtype=int), data.covariates)
    p0 = action_prob(policy, np.zeros(data.n, dtype=int), data.covariates)
    return float(np.mean((p1 - p0) ** 2))


def test_exact_demo_metrics_are_stable():
    # Regression pins for the two-point demo environment.
    env = make_demo_env()
    want = ((0.0, 0.55, 1.19), (0.4, 0.474, 1.17), (1.0, 0.81, 1.05))
    for p, (d1, d2, v) in zip(demo_policies(), want):
        rep = exact_metrics(p, env)
        assert rep.delta1 == pytest.approx(d1, abs=1e-9)
        assert rep.delta2 == pytest.approx(d2, abs=1e-9)
        assert rep.value == pytest.approx(v, abs=1e-9)
    assert len(DEMO_REFERENCE_TRIPLES) == 3


def test_metric_report_json():
    rep = MetricReport(
        delta1=0.1, delta2=0.2, value=1.5, notion="equal_opportunity", variant="squared"
    )
    import json

    back = json.loads(rep.to_json())
    assert back["delta1"] == 0.1
    assert back["notion"] == "equal_opportunity"


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=40, deadline=None)
def test_value_is_affine_in_action_probability(b0, b1, b2, b3):
    # V(pi) averages model predictions weighted by the action probability.
    from fairpolicy.nuisance import feature_map
    from fairpolicy.policies import action_prob

    train, _ = generate_simulation(SimConfig(150, 10, seed=31))
    r_model = fit_outcome(train)
    f_model = fit_outcome(train, channel="fairness")
    p = Policy.linear([b0, b1, b2, b3], tau=1.0)
    got = compute_metrics(p, train, r_model, f_model, MetricConfig()).value
    q = action_prob(p, train.sensitive, train.covariates)
    mu0 = feature_map(train.sensitive, train.covariates, np.zeros(train.n)) @ r_model.coef
    mu1 = feature_map(train.sensitive, train.covariates, np.ones(train.n)) @ r_model.coef
    want = float(np.mean(mu0 + q * (mu1 - mu0)))
    assert got == pytest.approx(want, abs=1e-10)
