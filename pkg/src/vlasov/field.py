"""
Fourier x Hermite state of a 1D-1V plasma and its electrostatic field.

The distribution is

    f(x, v) = sum_{m=-Mx..Mx} sum_{n=0..N} C^_{m,n} e^{i kappa_m x} H_n(v) e^{-v^2},
    kappa_m = 2 pi m / Lx,

stored as a (2Mx+1, N+1) complex matrix whose row i holds mode m = i - Mx.
Coefficients are in the polynomial convention. The electron density is
int f dv = sqrt(pi) C_0(x), and with a unit ion background the field solves

    dE/dx = 1 - sqrt(pi) C_0(x)   =>   E^_m = -sqrt(pi) C^_{m,0} / (i kappa_m),  m != 0.

The m = 0 row is the neutrality condition sqrt(pi) C^_{0,0} = 1; E^_0 = 0 fixes
the gauge. A violated neutrality condition is logged, not raised.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.errors import BasisMismatchError
from src.hermite.core import SQRT_PI, HermiteBasis, hermite_table
from src.models import BasisKind

logger = logging.getLogger(__name__)

NEUTRALITY_TOLERANCE = 1e-8


def wavenumbers(Mx: int, Lx: float) -> np.ndarray:  # noqa: N803
    """kappa_m for m = -Mx..Mx."""
    return 2.0 * math.pi * np.arange(-Mx, Mx + 1) / Lx


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """
    Fourier x Hermite coefficients C^_{m,n}.

    Attributes:
        Chat: Complex matrix, shape (2Mx+1, N+1), row Mx is the m = 0 mode
        Lx: Spatial period
        basis: AW Hermite basis of the velocity expansion
    """

    Chat: np.ndarray
    Lx: float
    basis: HermiteBasis

    def __post_init__(self) -> None:
        chat = np.array(self.Chat, dtype=complex)
        if chat.ndim != 2 or chat.shape[0] % 2 == 0:
            raise BasisMismatchError(f"expected a (2Mx+1, N+1) matrix, got shape {chat.shape}")
        if chat.shape[1] != self.basis.size:
            raise BasisMismatchError(
                f"{chat.shape[1]} Hermite columns do not match basis N={self.basis.N}"
            )
        if self.basis.kind != BasisKind.AW:
            raise BasisMismatchError("the Vlasov-Poisson state uses the AW basis")
        chat.setflags(write=False)
        object.__setattr__(self, "Chat", chat)

    @classmethod
    def zeros(cls, basis: HermiteBasis, Mx: int, Lx: float) -> CoefficientField:  # noqa: N803
        return cls(np.zeros((2 * Mx + 1, basis.size), dtype=complex), Lx, basis)

    @property
    def Mx(self) -> int:  # noqa: N802
        return (self.Chat.shape[0] - 1) // 2

    @property
    def N(self) -> int:  # noqa: N802
        return self.basis.N

    @property
    def kappa(self) -> np.ndarray:
        return wavenumbers(self.Mx, self.Lx)

    def mode(self, m: int) -> np.ndarray:
        """Hermite coefficients of Fourier mode m."""
        return self.Chat[m + self.Mx]

    def with_chat(self, chat: np.ndarray) -> CoefficientField:
        return CoefficientField(chat, self.Lx, self.basis)

    def hermitian_defect(self) -> float:
        """max |C^_{-m,n} - conj(C^_{m,n})|."""
        return float(np.max(np.abs(self.Chat[::-1] - np.conj(self.Chat))))

    def symmetrized(self) -> CoefficientField:
        """Project onto Hermitian-symmetric (real-valued) states."""
        return self.with_chat(0.5 * (self.Chat + np.conj(self.Chat[::-1])))


@dataclass(frozen=True, eq=False)
class ElectricField:
    """
    Fourier coefficients E^_m, m = -Mx..Mx, with E^_0 = 0.

    neutrality_defect records 1 - sqrt(pi) C^_{0,0} of the state it was solved from.
    """

    Ehat: np.ndarray
    Lx: float
    neutrality_defect: float = 0.0

    @classmethod
    def zeros(cls, Mx: int, Lx: float) -> ElectricField:  # noqa: N803
        return cls(np.zeros(2 * Mx + 1, dtype=complex), Lx)

    @property
    def Mx(self) -> int:  # noqa: N802
        return (self.Ehat.size - 1) // 2

    @property
    def kappa(self) -> np.ndarray:
        return wavenumbers(self.Mx, self.Lx)


def poisson_solve(
    chat_row0: np.ndarray, Lx: float, warn: bool = True  # noqa: N803
) -> ElectricField:
    """
    E^ from the density coefficients C^_{m,0} (m = -Mx..Mx).

    Solves i kappa_m E^_m = -sqrt(pi) C^_{m,0} for m != 0 and sets E^_0 = 0.
    A neutrality defect is logged unless warn=False; it is always recorded on
    the returned field.
    """
    chat_row0 = np.asarray(chat_row0, dtype=complex)
    Mx = (chat_row0.size - 1) // 2
    kappa = wavenumbers(Mx, Lx)
    defect = float(abs(1.0 - SQRT_PI * chat_row0[Mx]))
    if warn and defect > NEUTRALITY_TOLERANCE:
        logger.warning(
            f"Neutrality violated: |1 - sqrt(pi) C_00| = {defect:.3e}; "
            "the mean charge is dropped from the Poisson solve"
        )
    ehat = np.zeros_like(chat_row0)
    nonzero = kappa != 0.0
    ehat[nonzero] = -SQRT_PI * chat_row0[nonzero] / (1j * kappa[nonzero])
    return ElectricField(ehat, Lx, neutrality_defect=defect)


def gauss_residual(state: CoefficientField, E: ElectricField) -> float:  # noqa: N803
    """max over m != 0 of |i kappa_m E^_m + sqrt(pi) C^_{m,0}|."""
    kappa = state.kappa
    nonzero = kappa != 0.0
    if not np.any(nonzero):
        return 0.0
    defect = 1j * kappa * E.Ehat + SQRT_PI * state.Chat[:, 0]
    return float(np.max(np.abs(defect[nonzero])))


# =============================================================================
# Physical-space reconstruction
# =============================================================================


def _fourier_phases(Mx: int, Lx: float, x: np.ndarray) -> np.ndarray:  # noqa: N803
    return np.exp(1j * np.outer(np.asarray(x, dtype=float), wavenumbers(Mx, Lx)))


def reconstruct_E(E: ElectricField, x: np.ndarray) -> np.ndarray:  # noqa: N802, N803
    """E(x) as a complex array; the imaginary part measures lost realness."""
    return _fourier_phases(E.Mx, E.Lx, x) @ E.Ehat


def reconstruct_f(state: CoefficientField, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """f(x, v) on the tensor grid, complex, shape (len(x), len(v))."""
    v = np.asarray(v, dtype=float)
    spatial = _fourier_phases(state.Mx, state.Lx, x) @ state.Chat  # C_n(x)
    return (spatial @ hermite_table(state.N, v)) * np.exp(-(v**2))[None, :]


def field_energy(E: ElectricField) -> float:  # noqa: N803
    """1/2 int E^2 dx = Lx/2 sum |E^_m|^2 (Parseval)."""
    return 0.5 * E.Lx * float(np.sum(np.abs(E.Ehat) ** 2))
