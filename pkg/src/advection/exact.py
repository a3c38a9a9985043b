"""
Exact travelling solutions of df/dt = df/dv and their Hermite coefficients.

f(v, t) = f_0(v + t). For the Gaussian profiles of each basis the generating
function e^{2vs - s^2} = sum H_n s^n / n! gives the normalized coefficients
(C_n* = C_n / gamma_n) in closed form:

    SW, f = e^{-(v+t)^2/2}:  C_n* = sqrt(pi) 2^n gamma_n (-t/2)^n e^{-t^2/4}
    AW, f = e^{-(v+t)^2}:    C_n* = sqrt(pi) 2^n gamma~_n (-t)^n

The AW formula carries the dual constant gamma~_n = (2^n n!)^{-1/2}; with it
C_0*(0) = sqrt(pi), which is what projecting e^{-v^2} onto psi_0 returns.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from src.hermite.core import SQRT_PI, aw_dual_gammas, sw_gammas
from src.models import BasisKind


def exact_coeffs_sw(t: float, n: int) -> float:
    """C_n*(t) of e^{-(v+t)^2/2} on the SW basis."""
    if n < 0:
        raise ValueError(f"Hermite index must be non-negative, got {n}")
    gamma = sw_gammas(n)[n]
    # 2^n (-t/2)^n = (-t)^n
    return SQRT_PI * gamma * (-t) ** n * math.exp(-(t**2) / 4.0)


def exact_coeffs_aw(t: float, n: int) -> float:
    """C_n*(t) of e^{-(v+t)^2} on the AW basis."""
    if n < 0:
        raise ValueError(f"Hermite index must be non-negative, got {n}")
    dual = aw_dual_gammas(n)[n]
    return SQRT_PI * 2.0**n * dual * (-t) ** n


def exact_solution(kind: BasisKind, t: float) -> Callable[[np.ndarray], np.ndarray]:
    """The travelling Gaussian f(v, t) whose coefficients the functions above return."""
    if BasisKind(kind) == BasisKind.SW:
        return lambda v: np.exp(-0.5 * (np.asarray(v) + t) ** 2)
    return lambda v: np.exp(-((np.asarray(v) + t) ** 2))


def exact_coefficients(kind: BasisKind, t: float, N: int) -> np.ndarray:  # noqa: N803
    """Vector of normalized exact coefficients for n = 0..N."""
    fn = exact_coeffs_sw if BasisKind(kind) == BasisKind.SW else exact_coeffs_aw
    return np.array([fn(t, n) for n in range(N + 1)])
