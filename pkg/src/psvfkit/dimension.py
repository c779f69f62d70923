"""Box counting dimension of central Cantor sets, and the bridge from a
prescribed dimension to a tent map entropy.

A central Cantor set keeping two end pieces of relative length r per
level has dimension log 2 / log(1/r); choosing r = 2^(-1/s) realizes
any target s in (0, 1].  Counting boxes at the natural scales r^d and
fitting log N against log(1/eps) recovers s, and the tent map of slope
e^s has entropy s, closing the loop dimension = entropy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFitError, DomainError, MismatchError
from .tent import entropy_lap

MAX_CANTOR_DEPTH = 20


@dataclass(frozen=True, eq=False)
class CantorSpec:
    ratio: float
    depth: int
    intervals: np.ndarray       # (2^depth, 2), disjoint, ascending


def cantor_set(ratio: float, depth: int) -> CantorSpec:
    """Level-``depth`` intervals of the central Cantor construction."""
    if not (0.0 < ratio <= 0.5):
        raise DomainError(f"ratio must be in (0, 1/2], got {ratio}")
    if not (0 <= depth <= MAX_CANTOR_DEPTH):
        raise DomainError(f"depth must be in [0, {MAX_CANTOR_DEPTH}], got {depth}")
    iv = np.array([[0.0, 1.0]])
    for _ in range(depth):
        a, b = iv[:, 0], iv[:, 1]
        ln = (b - a) * ratio
        nxt = np.empty((2 * len(iv), 2))
        nxt[0::2, 0] = a
        nxt[0::2, 1] = a + ln
        nxt[1::2, 0] = b - ln
        nxt[1::2, 1] = b
        iv = nxt
    return CantorSpec(float(ratio), int(depth), iv)


def cantor_for_dimension(s: float, depth: int = 14) -> CantorSpec:
    """Central Cantor set whose dimension is the target s."""
    if not (0.0 < s <= 1.0):
        raise DomainError(f"target dimension must be in (0, 1], got {s}")
    return cantor_set(2.0 ** (-1.0 / s), depth)


def box_count(intervals, eps: float) -> int:
    """Number of grid boxes of size eps meeting the union of the intervals."""
    if eps <= 0:
        raise DomainError(f"box size must be positive, got {eps}")
    iv = np.asarray(intervals, dtype=float)
    if iv.ndim != 2 or iv.shape[1] != 2 or len(iv) == 0:
        raise DomainError("need a nonempty (m, 2) array of intervals")
    order = np.argsort(iv[:, 0])
    a, b = iv[order, 0], iv[order, 1]
    # closed intervals: an endpoint sitting exactly on a grid line claims
    # the box it opens, so a degenerate point still counts one box
    lo = np.floor(a / eps).astype(np.int64)
    hi = np.floor(b / eps).astype(np.int64)
    prev = np.concatenate(([lo[0] - 1], np.maximum.accumulate(hi)[:-1]))
    start = np.maximum(lo, prev + 1)
    return int(np.maximum(hi - start + 1, 0).sum())


@dataclass(eq=False)
class DimensionEstimate:
    dimension: float
    r_squared: float
    scales: np.ndarray
    counts: np.ndarray


def box_dimension(obj, scales=None, strict: bool = True) -> DimensionEstimate:
    """Least squares slope of log N(eps) against log(1/eps).

    Accepts a CantorSpec (scales default to its natural powers r^2..r^depth),
    a flat array of points, or an (m, 2) array of intervals; for raw input
    the scales must be supplied.  A fit with r^2 below 0.99 is reported by
    raising, not returned silently, unless strict is off.
    """
    if isinstance(obj, CantorSpec):
        iv = obj.intervals
        if scales is None:
            if obj.depth < 3:
                raise DomainError("need depth >= 3 for the default scales")
            scales = obj.ratio ** np.arange(2, obj.depth + 1)
    else:
        arr = np.asarray(obj, dtype=float)
        if arr.ndim == 1:
            iv = np.column_stack([arr, arr])
        elif arr.ndim == 2 and arr.shape[1] == 2:
            iv = arr
        else:
            raise DomainError("expected points (m,) or intervals (m, 2)")
        if scales is None:
            raise DomainError("scales are required for raw point or interval input")
    scales = np.asarray(scales, dtype=float)
    if scales.ndim != 1 or len(scales) < 2 or np.any(scales <= 0):
        raise DomainError("need at least two positive scales")
    counts = np.array([box_count(iv, float(e)) for e in scales], dtype=float)
    xs = np.log(1.0 / scales)
    ys = np.log(counts)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float((resid ** 2).sum()) / ss_tot
    est = DimensionEstimate(float(slope), r2, scales, counts.astype(np.int64))
    if strict and r2 < 0.99:
        raise DegenerateFitError(
            f"box count fit has r^2 = {r2:.4f}; refusing to report "
            f"dimension {slope:.4f} as reliable")
    return est


@dataclass(eq=False)
class EntropyDimensionMatch:
    s: float
    dimension: float
    r_squared: float
    alpha: float
    entropy: float

    @property
    def dimension_error(self) -> float:
        return abs(self.dimension - self.s)

    @property
    def entropy_error(self) -> float:
        return abs(self.entropy - self.s)


def check_dimension_entropy(s: float, depth: int = 14, strict: bool = True,
                            tol: float = 0.02) -> EntropyDimensionMatch:
    """Run the full chain for one target: build the Cantor set, measure its
    box dimension, then measure the entropy of the tent map of slope e^s,
    both of which should land on s."""
    if not (0.3 < s <= math.log(2.0) + 1e-12):
        raise DomainError(f"target must be in (0.3, log 2], got {s}")
    spec = cantor_for_dimension(s, depth)
    est = box_dimension(spec)
    alpha = min(math.exp(s), 2.0)
    h = entropy_lap(alpha)
    out = EntropyDimensionMatch(float(s), est.dimension, est.r_squared,
                                alpha, float(h))
    if strict and (out.dimension_error > tol or out.entropy_error > tol):
        raise MismatchError(
            f"s={s}: dimension off by {out.dimension_error:.4f}, "
            f"entropy off by {out.entropy_error:.4f} (tol {tol})")
    return out
