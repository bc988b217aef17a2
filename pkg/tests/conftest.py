import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci", derandomize=True, max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

from stasis.model import PhaseModel, SingularAmplitude  # noqa: E402


def ones(p):
    return np.ones_like(np.asarray(p, dtype=float))


def zeros(p):
    return np.zeros_like(np.asarray(p, dtype=float))


@pytest.fixture(scope="session")
def linear_phase():
    return PhaseModel(0.0, 1.0, 1.0, 1.0,
                      psi=lambda p: np.asarray(p, dtype=float),
                      psi_prime=ones, psi_tilde=ones)


@pytest.fixture(scope="session")
def convex_phase():
    return PhaseModel(0.0, 1.0, 1.0, 1.0,
                      psi=lambda p: np.asarray(p, dtype=float)
                      * (1.0 + np.asarray(p, dtype=float)),
                      psi_prime=lambda p: 1.0 + 2.0 * np.asarray(p, dtype=float),
                      psi_tilde=lambda p: 1.0 + 2.0 * np.asarray(p, dtype=float))


@pytest.fixture(scope="session")
def bessel_amp():
    return SingularAmplitude(0.0, 1.0, 0.5, 0.5, ones, zeros, 1.0, 1.0)


@pytest.fixture(scope="session")
def fresnel_amp():
    return SingularAmplitude(0.0, 1.0, 0.5, 1.0, ones, zeros, 1.0, 1.0)


def intro_amp(mu):
    return SingularAmplitude(
        0.0, 1.0, mu, 1.0,
        u_tilde=lambda p: 1.0 - np.asarray(p, dtype=float),
        u_tilde_prime=lambda p: -ones(p),
        sup_norm_u=1.0, sobolev_norm_u=1.0)


def beta_amp(mu1, mu2):
    return SingularAmplitude(0.0, 1.0, mu1, mu2, ones, zeros, 1.0, 1.0)


@pytest.fixture(scope="session")
def quadratic_left_phase():
    # psi = -(p - 0.5)^2 + 0.25 on [0, 0.5]: rho = (1, 2), psi~ = 2
    p0 = 0.5
    return PhaseModel(0.0, 0.5, 1.0, 2.0,
                      psi=lambda p: -(np.asarray(p, dtype=float) - p0) ** 2 + 0.25,
                      psi_prime=lambda p: 2.0 * (p0 - np.asarray(p, dtype=float)),
                      psi_tilde=lambda p: 2.0 * ones(p))
