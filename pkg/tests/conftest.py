"""Shared fixtures and analytic oracles for the test suite.

Expensive probability maps are computed once per session; every oracle here
is either closed-form (Gaussian integrals, Schmidt number of a correlated
double Gaussian, detection-rate arithmetic) or an independently derived
expected value frozen before the implementation was tuned.
"""

from __future__ import annotations

import numpy as np
import pytest

from heraldlab.experiments import ExperimentConfig, run_experiment

# ---------------------------------------------------------------------------
# Closed-form oracles


def schmidt_number_analytic(ratio: float) -> float:
    """Schmidt number of the correlated double Gaussian with width ratio
    ``r = sigma_sum / sigma_diff`` is exactly ``(r + 1/r) / 2``."""
    return 0.5 * (ratio + 1.0 / ratio)


def position_correlation_analytic(sigma_sum: float, sigma_diff: float) -> float:
    """Pearson correlation of the double-Gaussian position density."""
    return (sigma_sum**2 - sigma_diff**2) / (sigma_sum**2 + sigma_diff**2)


def gaussian_beam_width(w0: float, distance: float, wavelength: float) -> float:
    """Free-space Gaussian beam 1/e^2 radius after ``distance``."""
    rayleigh = np.pi * w0**2 / wavelength
    return w0 * np.sqrt(1.0 + (distance / rayleigh) ** 2)


def heralded_gaussian_overlap(
    sigma_sum: float, sigma_diff: float, waist: float
) -> tuple[float, float]:
    """Closed-form herald statistics for a Gaussian detection mode.

    For the double-Gaussian joint amplitude written as
    ``psi = N exp(-a (x1^2 + x2^2) - 2 b x1 x2)`` with
    ``a = P + M``, ``b = P - M``, ``P = 1/(8 sigma_sum^2)``,
    ``M = 1/(8 sigma_diff^2)``, and a detection mode
    ``g ~ exp(-G x2^2)`` with ``G = 1/waist^2``, Gaussian integration gives

    * conditional shape ``phi(x1) ~ exp(-beta x1^2)`` with
      ``beta = a - b^2 / (a + G)``;
    * click probability
      ``p = [2 sqrt(a^2 - b^2) / (a + G)] * sqrt(pi / (2 beta)) * sqrt(2G/pi)``

    where the last factor normalizes the mode (``|g|^2`` integrates to 1 for
    amplitude ``(2G/pi)^(1/4) exp(-G x^2)``).
    """
    p_coef = 1.0 / (8.0 * sigma_sum**2)
    m_coef = 1.0 / (8.0 * sigma_diff**2)
    a = p_coef + m_coef
    b = p_coef - m_coef
    g = 1.0 / waist**2
    beta = a - b**2 / (a + g)
    norm_joint_sq = 2.0 * np.sqrt(a**2 - b**2) / np.pi
    norm_mode_sq = np.sqrt(2.0 * g / np.pi)
    prob = (
        norm_joint_sq
        * norm_mode_sq
        * (np.pi / (a + g))
        * np.sqrt(np.pi / (2.0 * beta))
    )
    return beta, float(prob)


# ---------------------------------------------------------------------------
# Frozen apparatus-level expectations

FRINGE_PERIOD_THEORY = 710e-6  # wavelength * focal / separation = 710 um
IMAGE_BAND_CENTER = 250e-6  # unit-magnification image of slits at +/-250 um
HERALD_RATE = 32500.0  # 1e5 * 0.5 * 0.65
TRIGGER_RATE = 32600.0  # herald rate + 100/s dark triggers
CAMERA_PIXEL = 8e-3 / 512  # default camera pixel pitch, 15.625 um


# ---------------------------------------------------------------------------
# Session-scoped probability maps (defaults unless stated)


@pytest.fixture(scope="session")
def pmap_heralded_diffraction():
    return run_experiment(ExperimentConfig(mode="heralded_diffraction"))


@pytest.fixture(scope="session")
def pmap_ghost_diffraction():
    return run_experiment(ExperimentConfig(mode="ghost_diffraction"))


@pytest.fixture(scope="session")
def pmap_heralded_image():
    return run_experiment(ExperimentConfig(mode="heralded_image"))


@pytest.fixture(scope="session")
def pmap_ghost_image():
    return run_experiment(ExperimentConfig(mode="ghost_image"))


@pytest.fixture(scope="session")
def pmap_heralded_diffraction_multi():
    return run_experiment(ExperimentConfig(mode="heralded_diffraction", fiber="multi"))


@pytest.fixture(scope="session")
def pmap_heralded_image_multi():
    return run_experiment(ExperimentConfig(mode="heralded_image", fiber="multi"))
