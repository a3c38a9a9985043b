"""
Velocity moments and weighted norms of Hermite states.

For the AW basis the moments are linear in the coefficients,

    int v^m f dv = sum_n C_n I(m, n),   I(m, n) = int v^m H_n e^{-v^2} dv,

and the overlaps follow from v H_n = n H_{n-1} + H_{n+1}/2:

    I(0, n) = sqrt(pi) delta_{n0},   I(m+1, n) = n I(m, n-1) + I(m, n+1)/2.

Only the first m+1 Hermite modes contribute to the m-th moment, which is why the
LB operator of order k leaves moments 0..k-1 untouched.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Union

import numpy as np

from src.errors import UnsupportedBasisError
from src.hermite.core import SQRT_PI, CoefficientVector, norm_sq_table, weighted_norm_sq
from src.models import BasisKind
from src.vlasov.field import CoefficientField

State = Union[CoefficientVector, CoefficientField]


@lru_cache(maxsize=32)
def moment_overlaps(m_max: int, N: int) -> np.ndarray:  # noqa: N803
    """I(m, n) for 0 <= m <= m_max, 0 <= n <= N."""
    if m_max < 0 or N < 0:
        raise ValueError(f"orders must be non-negative, got m_max={m_max}, N={N}")
    width = N + m_max + 2
    table = np.zeros((m_max + 1, width))
    table[0, 0] = SQRT_PI
    for m in range(m_max):
        table[m + 1, 1:] += np.arange(1, width) * table[m, :-1]
        table[m + 1, :-1] += 0.5 * table[m, 1:]
    out = table[:, : N + 1].copy()
    out.setflags(write=False)
    return out


def _reduce(terms: np.ndarray, fixed_order: bool) -> float:
    if fixed_order:
        return math.fsum(terms.tolist())
    return float(np.sum(terms))


def moment(state: State, m: int, fixed_order: bool = False) -> float:
    """
    int v^m f dv for a 1-D vector, or int int v^m f dv dx for a Fourier x Hermite field.

    fixed_order switches to an exactly rounded sum so repeated runs agree bitwise.
    """
    if m < 0:
        raise ValueError(f"moment order must be non-negative, got {m}")
    if isinstance(state, CoefficientField):
        overlaps = moment_overlaps(m, state.N)[m]
        return state.Lx * _reduce(np.real(state.mode(0)) * overlaps, fixed_order)
    if state.basis.kind != BasisKind.AW:
        raise UnsupportedBasisError("velocity moments are linear in the coefficients on AW only")
    overlaps = moment_overlaps(m, state.N)[m]
    return _reduce(state.polynomial_values * overlaps, fixed_order)


def hermite_weighted_h(state: State, fixed_order: bool = False) -> float:
    """
    int int h^2 e^{-v^2} dv dx with h = f e^{v^2}, i.e. Lx sum |C^_{m,n}|^2 sqrt(pi) 2^n n!.

    For a 1-D vector this is the weighted L2 norm of the polynomial part.
    """
    if isinstance(state, CoefficientField):
        terms = np.abs(state.Chat) ** 2 * norm_sq_table(state.N)[None, :]
        return state.Lx * _reduce(terms.ravel(), fixed_order)
    return weighted_norm_sq(state)
