"""Grid-less arrival-angle estimation from a noisy wrapped phase vector.

The online algorithm is a handful of dot products against the traced
pattern: project the observation onto the hyperplane, snap to the nearest
stored projection point, rebuild the nearest point on that line, unwrap
with the line's correction vector, and read the angle off the unwrapped
phases. No search grid is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import check_phase_vector
from .wpdp import WpdpModel

__all__ = ["DoaEstimate", "nearest_projection_point", "estimate_pdp"]


@dataclass(frozen=True, eq=False)
class DoaEstimate:
    """Arrival-angle estimate plus decision diagnostics.

    ``line_index`` and ``residual`` describe the nearest-line decision
    (0-based segment index, distance between the observed and stored
    projection points); they are None for estimators that do not make one.
    ``clamped`` flags that heavy noise pushed the sine estimate outside
    [-1, 1] before the arcsine.
    """

    theta: float
    sin_theta: float
    clamped: bool
    line_index: int | None = None
    residual: float | None = None
    psi_on_line: np.ndarray | None = None
    phi_unwrapped: np.ndarray | None = None

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)


def nearest_projection_point(p_hat, model: WpdpModel) -> tuple[int, float]:
    """Index of the stored projection point closest to ``p_hat``.

    Returns ``(z, residual)`` with the Euclidean distance as residual.
    Exact ties resolve to the smallest index, so the decision is
    deterministic.
    """
    if model.k == 0:
        raise ValueError("model has no traced segments")
    p_hat = np.asarray(p_hat, dtype=float)
    diff = model.proj_points - p_hat
    dist_sq = np.einsum("km,km->k", diff, diff)
    z = int(np.argmin(dist_sq))
    return z, math.sqrt(max(float(dist_sq[z]), 0.0))


def estimate_pdp(psi_hat, model: WpdpModel) -> DoaEstimate:
    """Estimate the arrival angle from a wrapped phase-difference vector.

    Parameters
    ----------
    psi_hat : (M,) array
        Measured wrapped phase differences, radians, same pair order as
        the model.
    model : WpdpModel
        Traced pattern for the array layout.

    Returns
    -------
    DoaEstimate
        Angle in radians plus the selected line, decision residual and the
        unwrapped phase vector. A wrong nearest-line pick (possible under
        heavy noise) shows up as a large residual, not an exception.
    """
    d = model.d
    psi_hat = check_phase_vector(psi_hat, model.m)
    dd = float(d @ d)
    along = float(d @ psi_hat) / dd
    p_hat = psi_hat - along * d
    z, residual = nearest_projection_point(p_hat, model)
    psi_on_line = model.proj_points[z] + along * d
    phi_unwrapped = psi_on_line + model.unwrap_vecs[z]
    sin_theta = float(d @ phi_unwrapped) / (math.pi * dd)
    clamped = abs(sin_theta) > 1.0
    theta = math.asin(min(1.0, max(-1.0, sin_theta)))
    psi_on_line.setflags(write=False)
    phi_unwrapped.setflags(write=False)
    return DoaEstimate(
        theta=theta,
        sin_theta=sin_theta,
        clamped=clamped,
        line_index=z,
        residual=residual,
        psi_on_line=psi_on_line,
        phi_unwrapped=phi_unwrapped,
    )
