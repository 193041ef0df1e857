"""Estimator-style wrappers around the functional core.

Each class is configured with an array layout, does its one-time setup in
``fit`` (pattern tracing for the projection estimator, steering-grid
caching for the searches) and estimates per-snapshot arrival angles in
``predict``. The classes follow scikit-learn conventions (get_params /
set_params, trailing-underscore fitted attributes, clone-safe __init__),
so they compose with pipelines and model-selection tooling.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .baselines import GridSpec, _steering_rows
from .geometry import make_geometry, make_pairs
from .pdp import DoaEstimate, estimate_pdp
from .signal import measure_wpd
from .validation import check_snapshot
from .wpdp import trace_wpdp

__all__ = [
    "PdpDoaEstimator",
    "MleDoaEstimator",
    "MusicDoaEstimator",
    "PhaseDifferenceTransformer",
]


class _SnapshotEstimatorMixin:
    """predict over rows of single-snapshot estimates."""

    def predict(self, X) -> np.ndarray:
        """Arrival angles (radians) for a stack of snapshots.

        Parameters
        ----------
        X : (n_snapshots, n_antennas) complex array
            One snapshot per row; a single 1-D snapshot is also accepted.

        Returns
        -------
        (n_snapshots,) float array
        """
        self._check_fitted()
        arr = check_snapshot(X, self.geometry_.n)
        rows = arr[np.newaxis, :] if arr.ndim == 1 else arr
        return np.array([self.estimate_snapshot(row).theta for row in rows])

    def _check_fitted(self) -> None:
        if not hasattr(self, "geometry_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet; call fit() first")


class PdpDoaEstimator(_SnapshotEstimatorMixin, BaseEstimator):
    """Grid-less projection estimator.

    ``fit`` traces the wrapped phase-difference pattern for the configured
    layout (the expensive offline part); prediction is then a few dot
    products per snapshot.

    Parameters
    ----------
    positions : sequence of float
        Antenna positions, half-wavelength units, first element 0.
    pairs : {"all", "adjacent"} or explicit pair list
    theta_range_deg : (float, float)
        Angle range the pattern is traced over, degrees.
    """

    def __init__(self, positions=None, pairs="all", theta_range_deg=(-90.0, 90.0)):
        self.positions = positions
        self.pairs = pairs
        self.theta_range_deg = theta_range_deg

    def fit(self, X=None, y=None):
        """Build the pattern model. X and y are ignored (layout comes from params)."""
        if self.positions is None:
            raise ValueError("positions must be set before fitting")
        self.geometry_ = make_geometry(self.positions)
        self.pair_set_ = make_pairs(self.geometry_, self.pairs)
        lo, hi = self.theta_range_deg
        self.model_ = trace_wpdp(self.pair_set_, (math.radians(lo), math.radians(hi)))
        return self

    def estimate_snapshot(self, x) -> DoaEstimate:
        """Full estimate (angle, selected line, residual) for one snapshot."""
        self._check_fitted()
        return estimate_pdp(measure_wpd(x, self.pair_set_), self.model_)

    def estimate_phase(self, psi) -> DoaEstimate:
        """Estimate from an already-measured wrapped phase vector."""
        self._check_fitted()
        return estimate_pdp(psi, self.model_)


class MleDoaEstimator(_SnapshotEstimatorMixin, BaseEstimator):
    """Two-stage grid search of the single-source beamformer likelihood.

    ``fit`` caches the coarse-grid steering matrix so repeated prediction
    only pays one matrix-vector product plus the small fine sweep.
    """

    def __init__(self, positions=None, grid=None):
        self.positions = positions
        self.grid = grid

    def fit(self, X=None, y=None):
        if self.positions is None:
            raise ValueError("positions must be set before fitting")
        self.geometry_ = make_geometry(self.positions)
        self.grid_ = self.grid if self.grid is not None else GridSpec()
        self.coarse_angles_ = self.grid_.coarse_angles_rad()
        self.coarse_steering_ = _steering_rows(self.geometry_.positions, self.coarse_angles_)
        return self

    def estimate_snapshot(self, x) -> DoaEstimate:
        self._check_fitted()
        x = check_snapshot(x, self.geometry_.n)
        if x.ndim != 1:
            raise ValueError("grid estimators take a single snapshot")
        coarse_scores = np.abs(self.coarse_steering_.conj() @ x) ** 2
        ic = int(np.argmax(coarse_scores))
        fine = self.grid_.fine_angles_rad(float(self.coarse_angles_[ic]))
        fine_scores = np.abs(_steering_rows(self.geometry_.positions, fine).conj() @ x) ** 2
        theta = float(fine[int(np.argmax(fine_scores))])
        return DoaEstimate(theta=theta, sin_theta=math.sin(theta), clamped=False)


class MusicDoaEstimator(_SnapshotEstimatorMixin, BaseEstimator):
    """Single-snapshot MUSIC over the same two-stage grid."""

    def __init__(self, positions=None, grid=None, num_sources=1):
        self.positions = positions
        self.grid = grid
        self.num_sources = num_sources

    def fit(self, X=None, y=None):
        if self.positions is None:
            raise ValueError("positions must be set before fitting")
        self.geometry_ = make_geometry(self.positions)
        if not 1 <= self.num_sources < self.geometry_.n:
            raise ValueError(
                f"num_sources={self.num_sources} leaves no noise subspace "
                f"for {self.geometry_.n} antennas"
            )
        self.grid_ = self.grid if self.grid is not None else GridSpec()
        self.coarse_angles_ = self.grid_.coarse_angles_rad()
        self.coarse_steering_ = _steering_rows(self.geometry_.positions, self.coarse_angles_)
        return self

    def estimate_snapshot(self, x) -> DoaEstimate:
        self._check_fitted()
        x = check_snapshot(x, self.geometry_.n)
        if x.ndim != 1:
            raise ValueError("grid estimators take a single snapshot")
        cov = np.outer(x, x.conj())
        _, vecs = np.linalg.eigh(cov)
        noise_basis = vecs[:, : self.geometry_.n - self.num_sources]
        # Null-spectrum argmax == argmin of the noise-subspace projection.
        coarse_scores = -np.sum(np.abs(self.coarse_steering_.conj() @ noise_basis) ** 2, axis=1)
        ic = int(np.argmax(coarse_scores))
        fine = self.grid_.fine_angles_rad(float(self.coarse_angles_[ic]))
        proj = _steering_rows(self.geometry_.positions, fine).conj() @ noise_basis
        fine_scores = -np.sum(np.abs(proj) ** 2, axis=1)
        theta = float(fine[int(np.argmax(fine_scores))])
        return DoaEstimate(theta=theta, sin_theta=math.sin(theta), clamped=False)


class PhaseDifferenceTransformer(BaseEstimator, TransformerMixin):
    """Turn snapshots into wrapped phase-difference feature rows.

    ``transform`` maps an (n_snapshots, n_antennas) complex array to an
    (n_snapshots, n_pairs) real array of wrapped phase differences, one
    column per configured antenna pair.
    """

    def __init__(self, positions=None, pairs="all"):
        self.positions = positions
        self.pairs = pairs

    def fit(self, X=None, y=None):
        if self.positions is None:
            raise ValueError("positions must be set before fitting")
        self.geometry_ = make_geometry(self.positions)
        self.pair_set_ = make_pairs(self.geometry_, self.pairs)
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "pair_set_"):
            raise NotFittedError("PhaseDifferenceTransformer is not fitted yet; call fit() first")
        arr = check_snapshot(X, self.geometry_.n)
        rows = arr[np.newaxis, :] if arr.ndim == 1 else arr
        return np.array([measure_wpd(row, self.pair_set_) for row in rows])
