"""Shared fixtures: the replication studies are expensive, run them once."""
import pytest

from fairpolicy.data import SimConfig
from fairpolicy.harness import ExperimentConfig, run_experiment
from fairpolicy.metrics import MetricConfig
from fairpolicy.policies import PolicyClassSpec
from fairpolicy.solver import DFLConfig

STUDY_REPS = 100
STUDY_C0_GRID = (0.2, 0.5, 1.0, 2.0)
STUDY_K_GRID = (5, 10, 20)


def study_config(notion: str) -> ExperimentConfig:
    return ExperimentConfig(
        scenario="simulation",
        methods=("DFL", "Optimal", "VB1", "VB2"),
        replications=STUDY_REPS,
        sim=SimConfig(n_train=200, n_test=5000, seed=0),
        dfl=DFLConfig(
            class_spec=PolicyClassSpec(n_covariates=2),
            K=10,
            c0=0.5,
            metric=MetricConfig(notion=notion),
            seed=0,
        ),
        c0_grid=STUDY_C0_GRID,
        K_grid=STUDY_K_GRID,
        seed=0,
        workers=4,
        keep_fit_results=True,
    )


@pytest.fixture(scope="session")
def eo_study():
    return run_experiment(study_config("equal_opportunity"))


@pytest.fixture(scope="session")
def cf_study():
    return run_experiment(study_config("counterfactual"))


CRITERION_LINES = []


@pytest.fixture(scope="session")
def criterion_lines():
    return CRITERION_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERION_LINES:
        terminalreporter.write_line(line)
