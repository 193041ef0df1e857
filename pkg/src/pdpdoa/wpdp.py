"""Offline construction of the wrapped phase-difference pattern.

As the arrival angle sweeps its range, the vector of wrapped phase
differences moves along a straight line in the direction of the pair
spacing vector and jumps by one full turn in a coordinate whenever that
coordinate hits the wrap boundary. The result is a family of parallel
line segments. Each segment owns a constant unwrapping vector (entries
are whole multiples of 2*pi) and meets the hyperplane through the origin
normal to the spacing vector at a unique projection point. Building the
segment table is a one-time setup cost per array layout; the online
estimator only reads the finished model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .geometry import PairSet, make_geometry, make_pairs

__all__ = [
    "WpdpModel",
    "AmbiguityReport",
    "project",
    "hyperplane_distance",
    "count_lines_formula",
    "trace_wpdp",
    "detect_ambiguity",
    "save_model",
    "load_model",
    "export_segments_csv",
]

TWO_PI = 2.0 * math.pi
MODEL_FORMAT = "wpdp-model/1"


@dataclass(frozen=True, eq=False)
class WpdpModel:
    """Traced pattern for one array layout and angle range.

    Attributes
    ----------
    pair_set : PairSet
        Pairs and spacing vector the pattern was traced for.
    proj_points : (K, M) ndarray
        Row k is the projection point of segment k on the hyperplane.
    unwrap_counts : (K, M) int ndarray
        Row k counts the whole turns hidden by wrapping inside segment k.
    unwrap_vecs : (K, M) ndarray
        unwrap_counts times 2*pi: the additive correction that unwraps any
        phase vector observed inside segment k.
    theta_range : (float, float)
        Traced angle range in radians.
    segment_bounds : (K, 2) ndarray
        sin(theta) at each segment's start and end. Simultaneous wraps
        produce zero-length segments, kept so that segment counts agree
        with the closed-form line count.
    """

    pair_set: PairSet
    proj_points: np.ndarray
    unwrap_counts: np.ndarray
    unwrap_vecs: np.ndarray
    theta_range: tuple[float, float]
    segment_bounds: np.ndarray

    @property
    def d(self) -> np.ndarray:
        return self.pair_set.d

    @property
    def unit_dir(self) -> np.ndarray:
        """Common direction of all pattern lines, d normalized to unit length."""
        return self.pair_set.d / np.linalg.norm(self.pair_set.d)

    @property
    def k(self) -> int:
        """Number of traced line segments."""
        return int(self.proj_points.shape[0])

    @property
    def m(self) -> int:
        return int(self.proj_points.shape[1])

    def __repr__(self) -> str:
        lo, hi = self.theta_range
        return (
            f"WpdpModel(k={self.k}, m={self.m}, "
            f"theta_range_deg=({math.degrees(lo):.6g}, {math.degrees(hi):.6g}))"
        )


@dataclass(frozen=True)
class AmbiguityReport:
    """Result of a projection-point collision scan.

    ``min_distance`` is the smallest pairwise distance between projection
    points; it depends only on the array layout and bounds how much phase
    noise the nearest-point decision can absorb before picking a wrong line.
    """

    collisions: tuple[tuple[int, int], ...]
    min_distance: float
    tol: float


def project(psi, d) -> np.ndarray:
    """Project a phase vector onto the hyperplane through 0 with normal d.

    Returns ``psi - (d.psi / |d|^2) d``; the result is orthogonal to d and
    the map is idempotent.
    """
    psi = np.asarray(psi, dtype=float)
    d = np.asarray(d, dtype=float)
    if psi.shape != d.shape:
        raise ValueError(f"shape mismatch: psi {psi.shape} vs d {d.shape}")
    dd = float(d @ d)
    if dd == 0.0:
        raise ValueError("spacing vector must be nonzero")
    return psi - (float(d @ psi) / dd) * d


def hyperplane_distance(psi, d) -> float:
    """Signed distance from a phase vector to the hyperplane normal to d."""
    psi = np.asarray(psi, dtype=float)
    d = np.asarray(d, dtype=float)
    if psi.shape != d.shape:
        raise ValueError(f"shape mismatch: psi {psi.shape} vs d {d.shape}")
    norm = float(np.linalg.norm(d))
    if norm == 0.0:
        raise ValueError("spacing vector must be nonzero")
    return float(d @ psi) / norm


def count_lines_formula(ps: PairSet) -> int:
    """Closed-form number of pattern lines for the full angle range.

    Counts, per pair, how many times the unwrapped phase pi*d*sin(theta)
    crosses an odd multiple of pi strictly inside sin(theta) in (-1, 1):
    2 * sum(ceil((d - 1) / 2)) + 1. Wrap events landing exactly on the
    range edge do not start a new segment and are excluded, matching
    trace_wpdp's strict end-of-range test.
    """
    return int(2 * np.sum(np.ceil((ps.d - 1.0) / 2.0)) + 1)


def trace_wpdp(ps: PairSet, theta_range: tuple[float, float] = (-math.pi / 2, math.pi / 2)) -> WpdpModel:
    """Trace the pattern lines and record projection points and unwrap vectors.

    Walks the wrapped phase vector upward from theta_range[0]: repeatedly
    finds the coordinate that reaches +pi first, records the segment seen so
    far, folds that coordinate to -pi and credits it one 2*pi turn. Ties
    (several coordinates hitting +pi at the same angle) are wrapped one at a
    time, smallest coordinate index first, each producing a zero-length
    segment; this keeps the traced count equal to the closed-form count.

    Parameters
    ----------
    ps : PairSet
        At least two pairs (one pair leaves the projection hyperplane trivial).
    theta_range : (float, float)
        Radians, within [-pi/2, pi/2], start strictly below end.

    Returns
    -------
    WpdpModel
    """
    if ps.m < 2:
        raise ValueError(f"pattern tracing needs at least 2 pairs, got {ps.m}")
    lo, hi = float(theta_range[0]), float(theta_range[1])
    if not (-math.pi / 2 <= lo < hi <= math.pi / 2):
        raise ValueError(f"theta_range must be a nonempty subrange of [-pi/2, pi/2], got {theta_range}")

    d = np.asarray(ps.d, dtype=float)
    dd = float(d @ d)
    s_min, s_max = math.sin(lo), math.sin(hi)

    # Wall count below the start, from d*s/2 directly: exact when d*s/2 is a
    # half-integer (full-range starts with odd integer spacings), where the
    # equivalent phi/(2*pi) division can misround across the tie.
    q = np.floor(d * s_min / 2.0 + 0.5).astype(np.int64)
    # psi may sit one ulp outside [-pi, pi) here; the walk below only ever
    # measures distance to the +pi wall, so no fold is applied (a 2*pi fold
    # would fabricate or swallow a wrap event).
    psi = math.pi * d * s_min - TWO_PI * q.astype(float)

    rows_p: list[np.ndarray] = []
    rows_q: list[np.ndarray] = []
    bounds: list[tuple[float, float]] = []
    s = s_min
    while s < s_max:
        rows_q.append(q.copy())
        rows_p.append(psi - (float(d @ psi) / dd) * d)
        step = (math.pi - psi) / d
        i = int(np.argmin(step))
        # The wall being crossed is the (q[i]+1)-th odd multiple of pi for
        # coordinate i; anchoring s on that exact ratio avoids drift across
        # hundreds of segments and makes the end-of-range test sharp.
        s_next = (2.0 * q[i] + 1.0) / d[i]
        bounds.append((s, s_next))
        psi = psi + d * step[i]
        psi[i] = -math.pi
        q[i] += 1
        s = s_next

    bounds[-1] = (bounds[-1][0], s_max)
    proj_points = np.array(rows_p, dtype=float)
    unwrap_counts = np.array(rows_q, dtype=np.int64)
    unwrap_vecs = TWO_PI * unwrap_counts.astype(float)
    segment_bounds = np.array(
        [(b0, min(max(b1, b0), s_max)) for b0, b1 in bounds], dtype=float
    )
    for arr in (proj_points, unwrap_counts, unwrap_vecs, segment_bounds):
        arr.setflags(write=False)
    return WpdpModel(
        pair_set=ps,
        proj_points=proj_points,
        unwrap_counts=unwrap_counts,
        unwrap_vecs=unwrap_vecs,
        theta_range=(lo, hi),
        segment_bounds=segment_bounds,
    )


def detect_ambiguity(model: WpdpModel, tol: float) -> AmbiguityReport:
    """Scan for projection points closer together than ``tol``.

    Overlapping pattern lines make the layout ambiguous: no estimator can
    tell the corresponding angles apart. The report also carries the
    minimum pairwise distance as a layout robustness metric.
    """
    p = model.proj_points
    k = p.shape[0]
    if k < 2:
        return AmbiguityReport(collisions=(), min_distance=math.inf, tol=tol)
    sq_norms = np.einsum("km,km->k", p, p)
    d2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (p @ p.T)
    np.maximum(d2, 0.0, out=d2)
    dist = np.sqrt(d2)
    iu = np.triu_indices(k, k=1)
    upper = dist[iu]
    hits = np.nonzero(upper < tol)[0]
    collisions = tuple((int(iu[0][h]), int(iu[1][h])) for h in hits)
    return AmbiguityReport(
        collisions=collisions, min_distance=float(upper.min()), tol=tol
    )


def save_model(model: WpdpModel, path) -> None:
    """Write the model to a versioned JSON file (round-trips exactly)."""
    payload = {
        "format": MODEL_FORMAT,
        "positions": model.pair_set.geometry.positions.tolist(),
        "pairs": [list(p) for p in model.pair_set.pairs],
        "d": model.d.tolist(),
        "theta_range_rad": [model.theta_range[0], model.theta_range[1]],
        "k": model.k,
        "segment_bounds_sin": model.segment_bounds.tolist(),
        "unwrap_counts": model.unwrap_counts.tolist(),
        "proj_points": model.proj_points.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_model(path) -> WpdpModel:
    """Read a model written by :func:`save_model`."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    fmt = payload.get("format")
    if fmt != MODEL_FORMAT:
        raise ValueError(f"unsupported model format {fmt!r} (expected {MODEL_FORMAT!r})")
    g = make_geometry(payload["positions"])
    ps = make_pairs(g, [tuple(p) for p in payload["pairs"]])
    stored_d = np.asarray(payload["d"], dtype=float)
    if stored_d.shape != ps.d.shape or np.any(stored_d != ps.d):
        raise ValueError("model file is inconsistent: stored d does not match pairs")
    unwrap_counts = np.asarray(payload["unwrap_counts"], dtype=np.int64)
    proj_points = np.asarray(payload["proj_points"], dtype=float)
    segment_bounds = np.asarray(payload["segment_bounds_sin"], dtype=float)
    if not (len(proj_points) == len(unwrap_counts) == len(segment_bounds) == payload["k"]):
        raise ValueError("model file is inconsistent: segment table sizes disagree")
    unwrap_vecs = TWO_PI * unwrap_counts.astype(float)
    for arr in (proj_points, unwrap_counts, unwrap_vecs, segment_bounds):
        arr.setflags(write=False)
    lo, hi = payload["theta_range_rad"]
    return WpdpModel(
        pair_set=ps,
        proj_points=proj_points,
        unwrap_counts=unwrap_counts,
        unwrap_vecs=unwrap_vecs,
        theta_range=(float(lo), float(hi)),
        segment_bounds=segment_bounds,
    )


def export_segments_csv(model: WpdpModel, path) -> None:
    """Write one CSV row per segment for plotting.

    Columns: segment_id, sin_theta_start, sin_theta_end, psi_1..psi_M
    (wrapped phases at the segment start), p_1..p_M (projection point).
    """
    m = model.m
    header = (
        ["segment_id", "sin_theta_start", "sin_theta_end"]
        + [f"psi_{j + 1}" for j in range(m)]
        + [f"p_{j + 1}" for j in range(m)]
    )
    d = model.d
    lines = [",".join(header)]
    for k in range(model.k):
        s0, s1 = model.segment_bounds[k]
        psi_start = math.pi * d * s0 - model.unwrap_vecs[k]
        cells = [str(k), str(float(s0)), str(float(s1))]
        cells += [str(float(v)) for v in psi_start]
        cells += [str(float(v)) for v in model.proj_points[k]]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
