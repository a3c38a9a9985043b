"""
Initial coefficient vectors for the advection driver.

A tabulated profile is a two-column CSV (v, f) read with pandas and linearly
interpolated onto the quadrature nodes (zero outside the table).
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import pandas as pd

from src.advection.exact import exact_solution
from src.errors import ConfigError
from src.hermite.core import CoefficientVector, HermiteBasis, project
from src.models import AdvectionConfig, AdvectionInitial

logger = logging.getLogger(__name__)

RANDOM_TAIL_ZEROS = 2


def tabulated_profile(path: str | Path) -> Callable[[np.ndarray], np.ndarray]:
    """Load a (v, f) table and return a callable interpolating it."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Initial-condition table not found: {path}")
    frame = pd.read_csv(path, comment="#")
    if frame.shape[1] < 2:
        raise ConfigError(f"{path} needs two columns (v, f), found {frame.shape[1]}")
    frame = frame.sort_values(frame.columns[0])
    v_tab = frame.iloc[:, 0].to_numpy(dtype=float)
    f_tab = frame.iloc[:, 1].to_numpy(dtype=float)
    logger.info(f"Loaded {len(v_tab)} tabulated samples from {path}")
    return lambda v: np.interp(v, v_tab, f_tab, left=0.0, right=0.0)


def random_coefficients(
    basis: HermiteBasis,
    rng: np.random.Generator,
    tail_zeros: int = RANDOM_TAIL_ZEROS,
) -> CoefficientVector:
    """Standard-normal normalized coefficients with the top modes left empty."""
    values = rng.standard_normal(basis.size)
    if tail_zeros:
        values[max(0, basis.size - tail_zeros):] = 0.0
    return CoefficientVector(basis, values * basis.gammas)


def initial_coefficients(
    cfg: AdvectionConfig,
    basis: HermiteBasis,
    rng: Optional[np.random.Generator] = None,
) -> CoefficientVector:
    """Polynomial-convention C_{n,0} for the configured initial condition."""
    if cfg.ic == AdvectionInitial.MAXWELLIAN:
        values = np.zeros(basis.size)
        values[0] = 1.0
        return CoefficientVector(basis, values)
    if cfg.ic == AdvectionInitial.SHIFTED:
        return project(exact_solution(basis.kind, cfg.shift), basis)
    if cfg.ic == AdvectionInitial.RANDOM:
        return random_coefficients(basis, rng or np.random.default_rng(cfg.seed))
    return project(tabulated_profile(cfg.ic_file), basis)
