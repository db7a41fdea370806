import numpy as np
import pytest

from yawpitch.covariates import CovariateSpec, covariate_matrix
from yawpitch.lasso import FitOptions, LassoModel, fit
from yawpitch.simulator import SYSTEM_COEFFICIENTS, SimulatorConfig, simulate_mated_arrays, simulate_nonmated


def preset_model(system="ArcFace", intercept=1.0):
    spec = CovariateSpec(1)
    coef = [SYSTEM_COEFFICIENTS[system][n] for n in spec.term_names]
    return LassoModel(np.array(coef), intercept, 1e-6, spec, spec.term_names)


@pytest.fixture(scope="session")
def arcface_model():
    return preset_model()


@pytest.fixture(scope="session")
def noisy_arcface():
    """ArcFace truth, noise sd 0.05, 1000 identities, seed 42."""
    cfg = SimulatorConfig(mated_noise_sd=0.05, n_identities=1000, seed=42)
    yaw, pitch, scores = simulate_mated_arrays(cfg)
    return cfg, yaw, pitch, scores, np.array(simulate_nonmated(cfg))


@pytest.fixture(scope="session")
def noisy_arcface_fit_n2(noisy_arcface):
    cfg, yaw, pitch, scores, _ = noisy_arcface
    spec = CovariateSpec(2)
    return fit(covariate_matrix(yaw, pitch, 2), scores, FitOptions(), spec)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
