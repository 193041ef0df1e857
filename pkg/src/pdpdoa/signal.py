"""Single-source snapshot synthesis and wrapped phase-difference extraction.

The observation model is a narrowband plane wave hitting a linear array:
one complex sample per antenna, independent circular Gaussian noise per
element. Phase differences across antenna pairs are observable only
modulo 2*pi and are mapped to the half-open interval [-pi, pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayGeometry, PairSet
from .validation import as_rng, check_snapshot

__all__ = [
    "SourceParams",
    "steering_vector",
    "synthesize_snapshot",
    "wrap",
    "wrap_count",
    "measure_wpd",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SourceParams:
    """Source direction, linear amplitude and per-element SNR in dB.

    ``snr_db`` relates the total complex noise variance per element to the
    signal power: sigma^2 = amplitude^2 / 10^(snr_db/10), split evenly
    between the real and imaginary parts. ``snr_db=inf`` means noise-free.
    """

    theta: float
    amplitude: float = 1.0
    snr_db: float = math.inf

    def __post_init__(self) -> None:
        if not -math.pi / 2 <= self.theta <= math.pi / 2:
            raise ValueError(f"theta must lie in [-pi/2, pi/2], got {self.theta}")
        if not self.amplitude > 0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def noise_variance(self) -> float:
        """Total complex noise variance per element."""
        if math.isinf(self.snr_db):
            return 0.0
        return self.amplitude**2 * 10.0 ** (-self.snr_db / 10.0)


def _wrap_parts(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split phases into (wrapped value in [-pi, pi), integer 2*pi count).

    The count is the half-up rounding of phi/(2*pi): exact half-integer
    ratios round toward +inf, which is what keeps the wrapped value inside
    the half-open interval (odd multiples of pi map to -pi). A final fold
    guards against the one-ulp boundary spill that division rounding can
    produce.
    """
    q = np.floor(phi / TWO_PI + 0.5)
    psi = phi - TWO_PI * q
    too_low = psi < -math.pi
    too_high = psi >= math.pi
    if np.any(too_low) or np.any(too_high):
        psi = np.where(too_low, psi + TWO_PI, np.where(too_high, psi - TWO_PI, psi))
        q = q - too_low + too_high
    return psi, q


def wrap(phi):
    """Wrap a phase (radians) into [-pi, pi).

    Equivalent to mod(phi + pi, 2*pi) - pi; the output differs from the
    input by an integer multiple of 2*pi. Scalars in, scalar out.
    """
    arr = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("wrap requires finite input")
    psi, _ = _wrap_parts(arr)
    return float(psi) if np.ndim(phi) == 0 else psi


def wrap_count(d, theta):
    """Integer number of 2*pi turns hidden by wrapping pi*d*sin(theta).

    This is the rounding of d*sin(theta)/2 to the nearest integer, with
    exact .5 ties rounding toward +inf so that
    ``wrap(pi*d*sin(theta)) + 2*pi*wrap_count(d, theta)`` reconstructs the
    unwrapped phase for every input. Spacings no larger than one
    half-wavelength can never wrap.
    """
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= 0):
        raise ValueError("pair spacing must be positive")
    phi = np.asarray(math.pi * d_arr * np.sin(theta), dtype=float)
    _, q = _wrap_parts(phi)
    if np.ndim(d) == 0 and np.ndim(theta) == 0:
        return int(q)
    return q.astype(np.int64)


def steering_vector(g: ArrayGeometry, theta: float) -> np.ndarray:
    """Plane-wave response of the array for a source at ``theta`` radians.

    Entry n is exp(-1j * pi * positions[n] * sin(theta)); the reference
    antenna at position 0 always responds with 1.
    """
    return np.exp(-1j * math.pi * g.positions * math.sin(theta))


def synthesize_snapshot(
    g: ArrayGeometry,
    src: SourceParams,
    rng,
    n_snapshots: int = 1,
) -> np.ndarray:
    """Simulate received samples: steering vector times amplitude plus AWGN.

    Parameters
    ----------
    g : ArrayGeometry
    src : SourceParams
    rng : int, sequence of int, or numpy Generator
        Seed or generator; the same seed always yields the same snapshot.
    n_snapshots : int
        Number of time samples. The default single snapshot returns shape
        ``(n,)``; larger counts return ``(n_snapshots, n)``.

    Notes
    -----
    Noise is circularly-symmetric complex Gaussian, independent per
    element, with total variance ``src.noise_variance`` per element.
    """
    if n_snapshots < 1:
        raise ValueError(f"n_snapshots must be >= 1, got {n_snapshots}")
    gen = as_rng(rng)
    a = steering_vector(g, src.theta) * src.amplitude
    shape = (n_snapshots, g.n)
    x = np.broadcast_to(a, shape).copy()
    sigma2 = src.noise_variance
    if sigma2 > 0.0:
        scale = math.sqrt(sigma2 / 2.0)
        x += scale * (gen.standard_normal(shape) + 1j * gen.standard_normal(shape))
    return x[0] if n_snapshots == 1 else x


def measure_wpd(x, ps: PairSet) -> np.ndarray:
    """Wrapped phase differences across the selected antenna pairs.

    For pair (u, v) the estimate is angle(x_u * conj(x_v)), folded into
    [-pi, pi). A stack of snapshots is combined coherently: the per-pair
    products are summed over time before taking the angle, which averages
    the phase estimates without wrap-boundary artifacts.

    Raises
    ------
    ValueError
        If any array element has zero magnitude (its phase is undefined).
    """
    arr = check_snapshot(x, ps.geometry.n)
    if np.any(arr == 0):
        raise ValueError("snapshot has a zero-magnitude element; phase undefined")
    u, v = ps.antenna_indices()
    if arr.ndim == 1:
        products = arr[u] * np.conj(arr[v])
    else:
        products = np.sum(arr[:, u] * np.conj(arr[:, v]), axis=0)
    psi, _ = _wrap_parts(np.angle(products))
    return psi
