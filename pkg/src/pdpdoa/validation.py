"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

__all__ = ["check_positions", "check_snapshot", "check_phase_vector", "as_rng"]


def check_positions(positions) -> np.ndarray:
    """Validate antenna positions and return them as a read-only float array.

    Positions must be finite, strictly increasing, start at exactly 0 and
    contain at least two antennas.
    """
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 1:
        raise ValueError(f"positions must be a 1-D sequence, got shape {pos.shape}")
    if pos.size < 2:
        raise ValueError(f"need at least 2 antennas, got {pos.size}")
    if not np.all(np.isfinite(pos)):
        raise ValueError("positions contain non-finite values")
    if pos[0] != 0.0:
        raise ValueError(f"first antenna must sit at 0, got {pos[0]}")
    if np.any(np.diff(pos) <= 0):
        raise ValueError("positions must be strictly increasing (no duplicates)")
    pos = pos.copy()
    pos.setflags(write=False)
    return pos


def check_snapshot(x, n_antennas: int) -> np.ndarray:
    """Validate one or more complex snapshots against the antenna count.

    Accepts a single snapshot of shape ``(n,)`` or a stack ``(k, n)``; returns
    a complex array of the same shape.
    """
    arr = np.asarray(x, dtype=complex)
    if arr.ndim not in (1, 2) or arr.shape[-1] != n_antennas:
        raise ValueError(
            f"snapshot must have {n_antennas} entries per row, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError("snapshot contains non-finite values")
    return arr


def check_phase_vector(psi, m: int) -> np.ndarray:
    """Validate a phase-difference vector of length ``m`` (radians)."""
    arr = np.asarray(psi, dtype=float)
    if arr.shape != (m,):
        raise ValueError(f"phase vector must have shape ({m},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("phase vector contains non-finite values")
    return arr


def as_rng(seed) -> np.random.Generator:
    """Coerce a seed or an existing generator into a numpy Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
