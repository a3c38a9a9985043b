"""
Coefficient snapshots of a Vlasov-Poisson state.

Binary layout (little-endian):

    magic  8 bytes  b"HKSNAP01"
    N      int32
    Mx     int32
    Lx     float64
    t      float64
    data   complex128[(2Mx+1) * (N+1)], row-major with row i <-> mode m = i - Mx

Text layout: one header line "# HKSNAP01 N=<N> Mx=<Mx> Lx=<Lx> t=<t>" followed by
a CSV with columns m, n, re, im.
"""
from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from src.errors import SnapshotFormatError
from src.hermite.core import HermiteBasis
from src.models import BasisKind, SnapshotFormat
from src.vlasov.field import CoefficientField

logger = logging.getLogger(__name__)

MAGIC = b"HKSNAP01"
HEADER = np.dtype([("magic", "S8"), ("N", "<i4"), ("Mx", "<i4"), ("Lx", "<f8"), ("t", "<f8")])


def write_snapshot(
    state: CoefficientField,
    t: float,
    path: Path,
    fmt: SnapshotFormat = SnapshotFormat.BINARY,
) -> Path:
    path = Path(path)
    if SnapshotFormat(fmt) == SnapshotFormat.BINARY:
        header = np.array([(MAGIC, state.N, state.Mx, state.Lx, t)], dtype=HEADER)
        path.write_bytes(header.tobytes() + state.Chat.astype("<c16").tobytes())
    else:
        m, n = np.meshgrid(
            np.arange(-state.Mx, state.Mx + 1), np.arange(state.N + 1), indexing="ij"
        )
        frame = pd.DataFrame(
            {
                "m": m.ravel(),
                "n": n.ravel(),
                "re": state.Chat.real.ravel(),
                "im": state.Chat.imag.ravel(),
            }
        )
        with path.open("w") as handle:
            handle.write(
                f"# {MAGIC.decode()} N={state.N} Mx={state.Mx} Lx={state.Lx!r} t={t!r}\n"
            )
            frame.to_csv(handle, index=False, float_format="%.17g")
    logger.debug(f"Snapshot t={t:.6g} -> {path}")
    return path


def _read_binary(raw: bytes, path: Path) -> tuple[CoefficientField, float]:
    if len(raw) < HEADER.itemsize:
        raise SnapshotFormatError(f"{path} is too short to be a snapshot")
    header = np.frombuffer(raw[: HEADER.itemsize], dtype=HEADER)[0]
    N, Mx = int(header["N"]), int(header["Mx"])  # noqa: N806
    data = np.frombuffer(raw[HEADER.itemsize :], dtype="<c16")
    if data.size != (2 * Mx + 1) * (N + 1):
        raise SnapshotFormatError(f"{path}: {data.size} values do not match N={N}, Mx={Mx}")
    basis = HermiteBasis.build(BasisKind.AW, N)
    chat = data.reshape(2 * Mx + 1, N + 1)
    return CoefficientField(chat, float(header["Lx"]), basis), float(header["t"])


def _read_text(path: Path) -> tuple[CoefficientField, float]:
    with path.open() as handle:
        fields = dict(item.split("=", 1) for item in handle.readline().split()[2:])
        frame = pd.read_csv(handle, float_precision="round_trip")
    N, Mx = int(fields["N"]), int(fields["Mx"])  # noqa: N806
    chat = np.zeros((2 * Mx + 1, N + 1), dtype=complex)
    rows = frame["m"].to_numpy() + Mx
    cols = frame["n"].to_numpy()
    chat[rows, cols] = frame["re"].to_numpy() + 1j * frame["im"].to_numpy()
    basis = HermiteBasis.build(BasisKind.AW, N)
    return CoefficientField(chat, float(fields["Lx"]), basis), float(fields["t"])


def read_snapshot(path: Path) -> tuple[CoefficientField, float]:
    """Load a snapshot written by write_snapshot, detecting the format from its first bytes."""
    path = Path(path)
    raw = path.read_bytes()
    if raw.startswith(MAGIC):
        return _read_binary(raw, path)
    if raw.startswith(b"# " + MAGIC):
        return _read_text(path)
    raise SnapshotFormatError(f"{path} is not a coefficient snapshot")
