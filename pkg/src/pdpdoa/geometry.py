"""Linear-array layouts and antenna-pair bookkeeping.

Antenna positions live on a line and are stored in half-wavelength units
with the first antenna at the origin, so every derived spacing is
dimensionless. Angles throughout the package are radians unless a name
says otherwise; degrees appear only at the CLI and in config files.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .validation import check_positions

__all__ = [
    "ArrayGeometry",
    "PairSet",
    "make_geometry",
    "make_pairs",
    "geometry_from_meters",
]

SPEED_OF_LIGHT_M_S = 299_792_458.0

PairMode = Union[str, Iterable[Sequence[int]]]


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Antenna positions along a line, normalized to half-wavelength units."""

    positions: np.ndarray

    @property
    def n(self) -> int:
        """Number of antennas."""
        return int(self.positions.size)

    def __repr__(self) -> str:
        return f"ArrayGeometry({self.positions.tolist()})"


@dataclass(frozen=True, eq=False)
class PairSet:
    """Selected antenna pairs and their spacing vector.

    ``d[m]`` is the spacing of ``pairs[m]`` (position of the second antenna
    minus the first). The spacing vector doubles as the normal of the
    projection hyperplane used by the pattern modules, so its ordering is
    fixed at construction and never reshuffled.
    """

    geometry: ArrayGeometry
    pairs: tuple[tuple[int, int], ...]
    d: np.ndarray

    @property
    def m(self) -> int:
        """Number of pairs."""
        return len(self.pairs)

    def antenna_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (u, v) index arrays for vectorized per-pair lookups."""
        u = np.array([p[0] for p in self.pairs], dtype=np.intp)
        v = np.array([p[1] for p in self.pairs], dtype=np.intp)
        return u, v

    def __repr__(self) -> str:
        return f"PairSet(m={self.m}, pairs={list(self.pairs)})"


def make_geometry(positions) -> ArrayGeometry:
    """Build a validated, immutable array geometry.

    Parameters
    ----------
    positions : sequence of float
        Strictly increasing positions in half-wavelength units, first
        element exactly 0, length at least 2.

    Raises
    ------
    ValueError
        For non-monotone or duplicate positions, fewer than two antennas,
        or a nonzero first element.
    """
    return ArrayGeometry(positions=check_positions(positions))


def make_pairs(g: ArrayGeometry, mode: PairMode = "all") -> PairSet:
    """Select antenna pairs and derive their spacing vector.

    Parameters
    ----------
    g : ArrayGeometry
        Validated geometry.
    mode : {"all", "adjacent"} or iterable of (u, v)
        "all" enumerates every pair in lexicographic order (u ascending,
        then v ascending); "adjacent" keeps only neighbours (0,1), (1,2), ...
        An explicit iterable selects arbitrary pairs; indices are 0-based
        and each pair must satisfy u < v.

    Returns
    -------
    PairSet
        Pairs plus the spacing vector d with d[m] = positions[v] - positions[u].
    """
    n = g.n
    if isinstance(mode, str):
        if mode == "all":
            pairs = tuple((u, v) for u in range(n) for v in range(u + 1, n))
        elif mode == "adjacent":
            pairs = tuple((i, i + 1) for i in range(n - 1))
        else:
            raise ValueError(f"unknown pair mode {mode!r}; use 'all', 'adjacent' or a pair list")
    else:
        pairs = []
        for raw in mode:
            pair = tuple(raw)
            if len(pair) != 2:
                raise ValueError(f"pair {raw!r} must have exactly two indices")
            u, v = int(pair[0]), int(pair[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"pair ({u}, {v}) out of range for {n} antennas")
            if u >= v:
                raise ValueError(f"pair ({u}, {v}) must have increasing indices (u < v)")
            pairs.append((u, v))
        if not pairs:
            raise ValueError("explicit pair list is empty")
        if len(set(pairs)) != len(pairs):
            raise ValueError("explicit pair list contains duplicates")
        pairs = tuple(pairs)
    d = np.array([g.positions[v] - g.positions[u] for u, v in pairs], dtype=float)
    d.setflags(write=False)
    return PairSet(geometry=g, pairs=pairs, d=d)


def geometry_from_meters(positions_m, carrier_hz: float) -> ArrayGeometry:
    """Convert metric antenna positions to the half-wavelength convention.

    Positions are shifted so the first antenna sits at the origin, then
    scaled by half the carrier wavelength.
    """
    if carrier_hz <= 0:
        raise ValueError(f"carrier frequency must be positive, got {carrier_hz}")
    pos = np.asarray(positions_m, dtype=float)
    if pos.ndim != 1 or pos.size < 2:
        raise ValueError("need a 1-D sequence of at least two metric positions")
    half_wavelength = SPEED_OF_LIGHT_M_S / carrier_hz / 2.0
    return make_geometry((pos - pos[0]) / half_wavelength)
