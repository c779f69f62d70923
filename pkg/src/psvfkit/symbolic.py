"""Arc partitions, itineraries, transition graphs and symbolic metrics.

The invariant structure of either family splits into finitely many arcs
swept in unit time.  Reading off the occupied arc at each integer time
turns trajectories into one sided symbol sequences; which symbol can
follow which is a finite directed graph, and counting its paths with
exact integers gives word growth rates to compare against spectral
radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .flow import Prescribed, Trajectory, integrate
from .model import Psvf, build_petal_system, build_zk, zk_stations


@dataclass(frozen=True)
class Arc:
    index: int
    branch: str          # "upper", "lower" or "both" for the boundary loops
    x_lo: float
    x_hi: float
    lo_open: bool
    hi_open: bool


@dataclass(frozen=True)
class ArcPartition:
    family: str
    k: int
    arcs: tuple[Arc, ...]

    def locate(self, point, tol: float = 1e-6):
        """Arc index occupied by a point of the invariant set, or None at the
        unlabeled anchor points (chain folds, petal origin)."""
        x, y = float(point[0]), float(point[1])
        if self.family == "petal":
            return _petal_locate(self.k, x, y, tol)
        sts = zk_stations(self.k)
        m = 2 * self.k - 2
        if abs(y) <= tol:
            if abs(x - sts[0]) <= tol:
                return 0
            if abs(x - sts[-1]) <= tol:
                return m - 1
            return None
        if x <= sts[1]:
            return 0
        if x >= sts[self.k - 1]:
            return m - 1
        j = int(np.searchsorted(sts, x)) - 1
        return 2 * j - 1 if y > 0 else 2 * j


def _petal_locate(k: int, x: float, y: float, tol: float):
    if math.hypot(x, y) <= tol:
        return None
    q = build_petal_system(k).curve
    for j in range(k):
        th = 2.0 * math.pi * j / k
        ct, st = math.cos(th), math.sin(th)
        xl = ct * x + st * y
        yl = -st * x + ct * y
        if -tol <= xl <= 2.0 + tol:
            w = float(q(xl))
            if min(abs(yl - w), abs(yl + w)) <= 1e-4:
                return j
    raise DomainError(f"point ({x}, {y}) is not on any petal")


def zk_arcs(k: int) -> ArcPartition:
    """The 2k-2 unit-time arcs of the chain: two boundary loops holding both
    branches, and upper/lower interior arcs between consecutive folds."""
    sts = zk_stations(k)
    m = 2 * k - 2
    arcs = [Arc(0, "both", float(sts[0]), float(sts[1]), False, True)]
    for j in range(1, k - 1):
        lo, hi = float(sts[j]), float(sts[j + 1])
        arcs.append(Arc(2 * j - 1, "upper", lo, hi, True, True))
        arcs.append(Arc(2 * j, "lower", lo, hi, True, True))
    if k >= 3:
        arcs.append(Arc(m - 1, "both", float(sts[k - 1]), float(sts[k]), True, False))
    else:
        arcs = [Arc(0, "both", float(sts[0]), float(sts[1]), False, True),
                Arc(1, "both", float(sts[1]), float(sts[2]), True, False)]
    arcs.sort(key=lambda a: a.index)
    return ArcPartition("zk", k, tuple(arcs))


def petal_arcs(k: int) -> ArcPartition:
    # one symbol per petal; in the petal frame each circuit covers [0, 2]
    arcs = tuple(Arc(j, "both", 0.0, 2.0, True, True) for j in range(k))
    return ArcPartition("petal", k, arcs)


def arc_partition(psvf: Psvf) -> ArcPartition:
    if psvf.family == "zk":
        return zk_arcs(psvf.k)
    if psvf.family == "petal":
        return petal_arcs(psvf.k)
    raise DomainError(f"no arc partition for family {psvf.family!r}")


@dataclass(frozen=True)
class Itinerary:
    """Symbols indexed by integer time, starting at time index ``base``."""

    symbols: tuple[int, ...]
    base: int = 0

    @property
    def end(self) -> int:
        return self.base + len(self.symbols)

    def window(self, start: int, stop: int) -> tuple[int, ...]:
        if start < self.base or stop > self.end or start > stop:
            raise DomainError(
                f"window [{start}, {stop}) not covered by [{self.base}, {self.end})")
        return self.symbols[start - self.base: stop - self.base]


def itinerary(traj: Trajectory, partition: ArcPartition | None = None) -> Itinerary:
    """Arc occupied at each integer time covered by the trajectory.

    A clock anchored to a fold or to the origin samples the anchor itself
    at integer times; the arc being entered is read half a unit later,
    safely inside the arc.
    """
    if partition is None:
        partition = arc_partition(traj.psvf)
    ts = traj.times
    j0 = math.ceil(float(ts[0]) - 1e-9)
    j1 = math.floor(float(ts[-1]) + 1e-9)
    syms = []
    for j in range(j0, j1 + 1):
        idx = partition.locate(traj.position(j))
        if idx is None:
            if j + 0.5 > float(ts[-1]) + 1e-9:
                break
            idx = partition.locate(traj.position(j + 0.5))
            if idx is None:
                raise DomainError(f"cannot resolve the symbol at time {j}")
        syms.append(int(idx))
    if not syms:
        raise DomainError("trajectory covers no integer time with a readable symbol")
    return Itinerary(tuple(syms), j0)


def shift(itin: Itinerary, n: int = 1) -> Itinerary:
    """Drop the first n symbols; index i of the result is index i+n of the input."""
    if n < 0 or n > len(itin.symbols):
        raise DomainError(f"cannot shift by {n}")
    return Itinerary(itin.symbols[n:], itin.base)


@dataclass(frozen=True)
class TransitionGraph:
    labels: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.labels)

    def successors(self, i: int) -> tuple[int, ...]:
        return tuple(j for j, v in enumerate(self.matrix[i]) if v)

    def adjacency(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    def to_dot(self) -> str:
        lines = ["digraph transitions {"]
        for i, lab in enumerate(self.labels):
            lines.append(f'  n{i} [label="{lab}"];')
        for i, row in enumerate(self.matrix):
            for j, v in enumerate(row):
                if v:
                    lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines)


@lru_cache(maxsize=None)
def zk_transition_graph(k: int) -> TransitionGraph:
    """Which arc can follow which after one unit of time.

    Boundary loops may repeat or hand over to their neighbor; an interior
    arc either u-turns onto its partner over the same x span or carries on
    to the next arc in its direction of travel.
    """
    if k < 2:
        raise DomainError(f"chain family needs k >= 2, got {k}")
    m = 2 * k - 2
    A = [[0] * m for _ in range(m)]
    A[0][0] = A[0][1] = 1
    A[m - 1][m - 1] = A[m - 1][m - 2] = 1
    for j in range(1, k - 1):
        up, low = 2 * j - 1, 2 * j
        A[up][low] = 1
        A[up][up + 2] = 1
        A[low][low - 2] = 1
        A[low][up] = 1
    labels = tuple(f"I{i}" for i in range(m))
    return TransitionGraph(labels, tuple(tuple(r) for r in A))


def petal_transition_graph(k: int) -> TransitionGraph:
    # from the origin every petal is reachable, so the shift is full
    labels = tuple(f"P{j}" for j in range(k))
    return TransitionGraph(labels, tuple(tuple(1 for _ in range(k)) for _ in range(k)))


def golden_mean_graph(m: int = 4) -> TransitionGraph:
    """Hub and spokes: state 0 reaches everything, everything returns to 0."""
    if m < 2:
        raise DomainError(f"need at least 2 states, got {m}")
    A = [[0] * m for _ in range(m)]
    for i in range(m):
        A[0][i] = 1
        A[i][0] = 1
    labels = tuple(f"s{i}" for i in range(m))
    return TransitionGraph(labels, tuple(tuple(r) for r in A))


def admissible(graph: TransitionGraph, word) -> bool:
    word = [int(s) for s in word]
    if any(s < 0 or s >= graph.size for s in word):
        return False
    return all(graph.matrix[a][b] for a, b in zip(word, word[1:]))


def admissible_word_count(graph: TransitionGraph, n: int) -> int:
    """Number of admissible words with n symbols, exact integer arithmetic."""
    if n < 1:
        raise DomainError(f"word length must be >= 1, got {n}")
    m = graph.size
    base = [list(row) for row in graph.matrix]
    acc = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    e = n - 1
    while e:
        if e & 1:
            acc = _imatmul(acc, base)
        base = _imatmul(base, base)
        e >>= 1
    return sum(sum(row) for row in acc)


def _imatmul(A, B):
    m = len(A)
    return [[sum(A[i][t] * B[t][j] for t in range(m)) for j in range(m)]
            for i in range(m)]


def random_admissible_word(graph: TransitionGraph, n: int, rng) -> tuple[int, ...]:
    state = int(rng.integers(graph.size))
    word = [state]
    for _ in range(n - 1):
        nxt = graph.successors(state)
        if not nxt:
            raise DomainError(f"state {state} has no successor")
        state = nxt[int(rng.integers(len(nxt)))]
        word.append(state)
    return tuple(word)


def realize_word(psvf: Psvf, word, dt: float = 2e-3) -> Trajectory:
    """Trajectory whose itinerary is exactly the given admissible word.

    The start is anchored at a fold (or the origin) compatible with the
    first symbol and the whole word is fed to the integrator as
    prescribed branch choices.
    """
    word = tuple(int(s) for s in word)
    n = len(word)
    if n < 2:
        raise DomainError("need at least two symbols to realize")
    T = n - 0.4
    if psvf.family == "zk":
        g = zk_transition_graph(psvf.k)
        if not admissible(g, word):
            raise DomainError("word is not admissible for this chain")
        j = word[0] // 2 + 1
        x0 = (float(zk_stations(psvf.k)[j]), 0.0)
    elif psvf.family == "petal":
        if any(s < 0 or s >= psvf.k for s in word):
            raise DomainError("petal symbols out of range")
        x0 = (0.0, 0.0)
    else:
        raise DomainError(f"cannot realize words for family {psvf.family!r}")
    return integrate(psvf, x0, T, dt=dt, policy=Prescribed(word))


def seq_distance(a: Itinerary, b: Itinerary, window: int | None = None) -> float:
    """Weighted symbol disagreement, weight 1/2^|i| at time index i.

    Summation runs over the indices both sequences define, optionally
    clipped to |i| <= window.  The tail beyond index N contributes less
    than 2^(1-N) times the largest symbol difference, so finite windows
    approximate the full metric geometrically well.
    """
    lo = max(a.base, b.base)
    hi = min(a.end, b.end)
    if window is not None:
        lo = max(lo, -window)
        hi = min(hi, window + 1)
    if lo >= hi:
        raise DomainError("sequences share no time indices in the window")
    total = 0.0
    for i in range(lo, hi):
        da = a.symbols[i - a.base]
        db = b.symbols[i - b.base]
        total += abs(da - db) / 2.0 ** abs(i)
    return total


def _anchored(traj: Trajectory) -> bool:
    x, y = traj.position(0.0)
    if traj.psvf.family == "petal":
        return math.hypot(x, y) <= 1e-6
    folds = zk_stations(traj.psvf.k)[1:-1]
    return abs(y) <= 1e-6 and (len(folds) > 0 and np.min(np.abs(folds - x)) <= 1e-6)


def _unit_segment(traj: Trajectory, i: int) -> np.ndarray:
    ts = traj.times
    a = int(np.searchsorted(ts, i, side="left"))
    b = int(np.searchsorted(ts, i + 1, side="right"))
    head = np.array([traj.position(float(i))])
    tail = np.array([traj.position(float(i + 1))])
    return np.vstack([head, traj.points[a:b], tail])


def _hausdorff(A: np.ndarray, B: np.ndarray) -> float:
    d2 = ((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2)
    return float(max(np.sqrt(d2.min(axis=1)).max(), np.sqrt(d2.min(axis=0)).max()))


def traj_distance(t1: Trajectory, t2: Trajectory, window: int) -> float:
    """Weighted Hausdorff gap between unit time segments of two anchored
    trajectories, weight 1/2^i on segment [i, i+1]."""
    if window < 1:
        raise DomainError("window must be >= 1")
    for tr in (t1, t2):
        if not _anchored(tr):
            raise DomainError("trajectory distance requires clocks anchored "
                              "at a fold or at the origin")
        if tr.times[0] > 1e-9 or tr.times[-1] < window - 1e-9:
            raise DomainError(f"trajectory does not cover [0, {window}]")
    total = 0.0
    for i in range(window):
        total += _hausdorff(_unit_segment(t1, i), _unit_segment(t2, i)) / 2.0 ** i
    return total
