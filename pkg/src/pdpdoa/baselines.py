"""Reference estimators, the estimation-variance lower bound and cost models.

The grid-search baselines (beamformer likelihood and single-snapshot MUSIC)
use a coarse-then-fine sweep; both are consistent references for the
grid-less projection estimator. The multiplication-count models cover the
projection method, the grid searches and three published alternatives so
that online costs can be compared without implementing every estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayGeometry
from .pdp import DoaEstimate
from .validation import check_snapshot

__all__ = ["GridSpec", "estimate_mle", "estimate_music", "crlb", "op_count"]


@dataclass(frozen=True)
class GridSpec:
    """Two-stage search grid, all fields in degrees.

    The default matches the published experiment setup: coarse sweep of
    [-70, 70] at 0.2 deg followed by a +-0.1 deg fine window at 0.01 deg
    (701 coarse points, 21 fine points). Config files and the CLI speak
    degrees; conversion to radians happens once inside the estimators.
    """

    coarse_lo_deg: float = -70.0
    coarse_hi_deg: float = 70.0
    coarse_step_deg: float = 0.2
    fine_halfwidth_deg: float = 0.1
    fine_step_deg: float = 0.01

    def __post_init__(self) -> None:
        if self.coarse_step_deg <= 0 or self.fine_step_deg <= 0:
            raise ValueError("grid steps must be positive")
        if self.fine_step_deg > self.coarse_step_deg:
            raise ValueError("fine step must not exceed the coarse step")
        if not -90.0 <= self.coarse_lo_deg < self.coarse_hi_deg <= 90.0:
            raise ValueError("coarse window must be a nonempty subrange of [-90, 90] deg")
        if self.fine_halfwidth_deg < 0:
            raise ValueError("fine halfwidth must be nonnegative")

    @property
    def n_coarse(self) -> int:
        """Number of coarse grid points."""
        span = self.coarse_hi_deg - self.coarse_lo_deg
        return int(math.floor(span / self.coarse_step_deg + 1e-9)) + 1

    @property
    def n_fine(self) -> int:
        """Number of fine grid points."""
        return 2 * int(math.floor(self.fine_halfwidth_deg / self.fine_step_deg + 1e-9)) + 1

    def coarse_angles_rad(self) -> np.ndarray:
        deg = self.coarse_lo_deg + self.coarse_step_deg * np.arange(self.n_coarse)
        return np.deg2rad(deg)

    def fine_angles_rad(self, center_rad: float) -> np.ndarray:
        half = self.n_fine // 2
        deg = math.degrees(center_rad) + self.fine_step_deg * np.arange(-half, half + 1)
        return np.deg2rad(np.clip(deg, -90.0, 90.0))


def _steering_rows(positions: np.ndarray, angles_rad: np.ndarray) -> np.ndarray:
    """Stack of steering vectors, one row per candidate angle."""
    return np.exp(-1j * math.pi * np.outer(np.sin(angles_rad), positions))


def _two_stage_argmax(score, grid: GridSpec) -> float:
    """Coarse sweep, then a fine sweep centered on the coarse winner.

    ``score`` maps an array of angles (radians) to real scores; ties pick
    the lowest index. Returns the winning angle in radians.
    """
    coarse = grid.coarse_angles_rad()
    ic = int(np.argmax(score(coarse)))
    fine = grid.fine_angles_rad(float(coarse[ic]))
    jf = int(np.argmax(score(fine)))
    return float(fine[jf])


def estimate_mle(x, g: ArrayGeometry, grid: GridSpec | None = None) -> DoaEstimate:
    """Maximum-likelihood angle search for a single source, single snapshot.

    With one deterministic source of unknown complex amplitude in white
    noise, the concentrated likelihood is the beamformer power
    |a(theta)^H x|^2; the estimate is its two-stage grid argmax. A fine
    refinement never returns a worse objective value than the coarse stage.
    """
    if grid is None:
        grid = GridSpec()
    x = check_snapshot(x, g.n)
    if x.ndim != 1:
        raise ValueError("grid estimators take a single snapshot")
    positions = g.positions

    def score(angles: np.ndarray) -> np.ndarray:
        return np.abs(_steering_rows(positions, angles).conj() @ x) ** 2

    theta = _two_stage_argmax(score, grid)
    return DoaEstimate(theta=theta, sin_theta=math.sin(theta), clamped=False)


def estimate_music(
    x,
    g: ArrayGeometry,
    grid: GridSpec | None = None,
    num_sources: int = 1,
) -> DoaEstimate:
    """Single-snapshot MUSIC on the rank-one sample covariance.

    Forms R = x x^H, splits off the ``num_sources`` largest eigenvectors
    and scans the noise-subspace null spectrum over the same two-stage grid
    as the likelihood search (implemented as an argmin of the projection
    onto the noise subspace, which avoids dividing by values near zero).
    """
    if grid is None:
        grid = GridSpec()
    x = check_snapshot(x, g.n)
    if x.ndim != 1:
        raise ValueError("grid estimators take a single snapshot")
    if num_sources < 1:
        raise ValueError(f"num_sources must be >= 1, got {num_sources}")
    if num_sources >= g.n:
        raise ValueError(
            f"num_sources={num_sources} leaves no noise subspace for {g.n} antennas"
        )
    cov = np.outer(x, x.conj())
    _, vecs = np.linalg.eigh(cov)
    noise_basis = vecs[:, : g.n - num_sources]
    positions = g.positions

    def score(angles: np.ndarray) -> np.ndarray:
        proj = _steering_rows(positions, angles).conj() @ noise_basis
        return -np.sum(np.abs(proj) ** 2, axis=1)

    theta = _two_stage_argmax(score, grid)
    return DoaEstimate(theta=theta, sin_theta=math.sin(theta), clamped=False)


def crlb(g: ArrayGeometry, snr_linear: float, theta: float, variant: str = "as_published") -> float:
    """Variance lower bound for the arrival angle, in squared radians.

    Evaluates 1 / (2 pi^2 N S U sin(theta)) with U the mean squared
    deviation of the antenna positions from their centroid. The sin(theta)
    factor is kept exactly as published even though the conventional
    single-source bound carries cos^2(theta); pass ``variant="cos2"`` for
    the conventional form when doing sensitivity checks. The published form
    is only meaningful for theta in (0, pi/2].

    Raises
    ------
    ValueError
        If the angle factor of the chosen variant vanishes (the printed
        expression divides by zero there) or if snr_linear <= 0.
    """
    if snr_linear <= 0:
        raise ValueError(f"snr_linear must be positive, got {snr_linear}")
    r = g.positions
    u_spread = float(np.mean((r - r.mean()) ** 2))
    if variant == "as_published":
        angle_factor = math.sin(theta)
        if angle_factor == 0.0:
            raise ValueError("published bound divides by sin(theta); undefined at theta=0")
    elif variant == "cos2":
        if abs(theta) >= math.pi / 2:
            raise ValueError("cos^2 bound degenerates at endfire (|theta| >= pi/2)")
        angle_factor = math.cos(theta) ** 2
    else:
        raise ValueError(f"unknown variant {variant!r}; use 'as_published' or 'cos2'")
    return 1.0 / (2.0 * math.pi**2 * g.n * snr_linear * u_spread * angle_factor)


def op_count(
    method: str,
    *,
    n: int | None = None,
    k: int | None = None,
    k_c: int | None = None,
    k_f: int | None = None,
    k_i: int | None = None,
    n_v: int | None = None,
) -> int:
    """Online multiplication count of an estimator, rounded to an integer.

    Parameters are consumed per method: ``pdp`` needs (n, k) where k is the
    traced line count; ``two-step`` (n, k_c); ``2q-order`` (n);
    ``em-esprit`` (k_i, n_v); ``music`` and ``mle`` (n, k_c, k_f). A missing
    parameter raises ValueError.
    """

    def need(name: str, value):
        if value is None:
            raise ValueError(f"op_count({method!r}) requires parameter {name!r}")
        return value

    key = method.lower()
    if key == "pdp":
        n_, k_ = need("n", n), need("k", k)
        return round((k_ + 6) * n_ * (n_ - 1) / 2)
    if key == "two-step":
        n_, kc = need("n", n), need("k_c", k_c)
        return round((kc + 1) * n_)
    if key == "2q-order":
        return round(need("n", n))
    if key == "em-esprit":
        ki, nv = need("k_i", k_i), need("n_v", n_v)
        return round(ki * (2 * nv**2 + 16 / 5 * nv**3))
    if key == "music":
        n_, kc, kf = need("n", n), need("k_c", k_c), need("k_f", k_f)
        return round(16 / 5 * n_**3 + (kc + kf + n_ / 2) * n_ * (n_ + 1))
    if key == "mle":
        n_, kc, kf = need("n", n), need("k_c", k_c), need("k_f", k_f)
        return round((kc + kf + 0.5) * n_ * (n_ + 1))
    raise ValueError(f"unknown method {method!r}")
