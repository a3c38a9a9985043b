"""
Initial Fourier x Hermite states for Vlasov-Poisson runs.

Every family has the form f0(x, v) = (1 + a cos(kappa x)) g(v) with g normalized
so that int g dv = 1, which keeps the plasma neutral.

    landau       g = e^{-v^2} / sqrt(pi)
    equilibrium  same g, a = 0
    tabulated    g from a (v, g) CSV, projected on the AW basis and renormalized
"""
from __future__ import annotations

import logging

import numpy as np

from src.advection.initial import tabulated_profile
from src.errors import ConfigError
from src.hermite.core import SQRT_PI, CoefficientVector, HermiteBasis, project
from src.models import VPConfig, VPInitial
from src.vlasov.field import CoefficientField

logger = logging.getLogger(__name__)


def _modulated(
    profile: CoefficientVector, cfg: VPConfig, amplitude: float
) -> CoefficientField:
    """(1 + amplitude cos(kappa_mode x)) times a velocity profile."""
    state = CoefficientField.zeros(profile.basis, cfg.Mx, cfg.Lx)
    chat = np.array(state.Chat)
    values = profile.polynomial_values
    chat[cfg.Mx] = values
    chat[cfg.Mx + cfg.mode] += 0.5 * amplitude * values
    chat[cfg.Mx - cfg.mode] += 0.5 * amplitude * values
    return state.with_chat(chat)


def _maxwellian(basis: HermiteBasis) -> CoefficientVector:
    return CoefficientVector(basis, np.eye(basis.size)[0] / SQRT_PI)


def landau_state(cfg: VPConfig, basis: HermiteBasis) -> CoefficientField:
    """Maxwellian with a cosine density perturbation of the configured amplitude."""
    return _modulated(_maxwellian(basis), cfg, cfg.amplitude)


def equilibrium_state(cfg: VPConfig, basis: HermiteBasis) -> CoefficientField:
    return _modulated(_maxwellian(basis), cfg, 0.0)


def tabulated_state(cfg: VPConfig, basis: HermiteBasis) -> CoefficientField:
    profile = project(tabulated_profile(cfg.ic_file), basis)
    density = SQRT_PI * profile.polynomial_values[0]
    if density <= 0:
        raise ConfigError(f"tabulated profile {cfg.ic_file} has non-positive density {density}")
    if abs(density - 1.0) > 1e-8:
        logger.info(f"Rescaling tabulated profile by 1/{density:.6g} to enforce neutrality")
    return _modulated(profile.with_values(profile.values / density), cfg, cfg.amplitude)


_BUILDERS = {
    VPInitial.LANDAU: landau_state,
    VPInitial.EQUILIBRIUM: equilibrium_state,
    VPInitial.TABULATED: tabulated_state,
}


def build_initial_state(cfg: VPConfig, basis: HermiteBasis) -> CoefficientField:
    state = _BUILDERS[cfg.ic](cfg, basis)
    logger.debug(f"Initial state {cfg.ic.value}: C_00={state.mode(0)[0].real:.6g}")
    return state
