"""Weighted transition matrices, spectral radii and pressure curves.

Raising the branch weights of a stochastic itinerary policy to a power
beta and arranging them along the admissible transitions gives a
nonnegative matrix whose spectral radius logarithm is the pressure at
beta.  At beta = 0 the matrix degenerates to the 0/1 adjacency (the
convention 0^0 = 0 keeps forbidden transitions forbidden), so pressure
at 0 is the topological entropy; at beta = 1 the matrix is row
stochastic and the pressure vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, MismatchError
from .model import Psvf, zk_stations
from .symbolic import TransitionGraph

_SHIFT_AFTER = 5000


def _pow0(v: np.ndarray, beta: float) -> np.ndarray:
    # 0^0 = 0 by convention: a zero weight marks a forbidden transition
    # and must stay forbidden at every beta
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise DomainError("weights must be nonnegative")
    out = np.zeros_like(v)
    pos = v > 0
    out[pos] = v[pos] ** beta
    return out


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    entries: np.ndarray
    beta: float
    kind: str


def petal_matrix(weights, beta: float) -> TransferMatrix:
    """Circulant weighted matrix of the petal jump policy."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or len(w) < 2:
        raise DomainError("need at least two jump weights")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise DomainError("jump weights must be nonnegative and sum to 1")
    m = len(w)
    wb = _pow0(w, beta)
    entries = np.empty((m, m))
    for i in range(m):
        entries[i] = np.roll(wb, i)
    return TransferMatrix(entries, beta, "petal")


def zk_matrix(k: int, p1: float, p2, beta: float) -> TransferMatrix:
    """Weighted transition matrix of the chain policy (p1, p2).

    Boundary loops re-enter themselves with weight p1 and hand over with
    1-p1; interior arcs u-turn with weight p2 and carry on with 1-p2.
    For k = 2 there are no interior arcs and p2 is ignored.
    """
    if k < 2:
        raise DomainError(f"chain family needs k >= 2, got {k}")
    if not (0.0 <= p1 <= 1.0):
        raise DomainError(f"p1 must be in [0, 1], got {p1}")
    if k >= 3 and (p2 is None or not (0.0 <= p2 <= 1.0)):
        raise DomainError(f"p2 must be in [0, 1], got {p2}")
    m = 2 * k - 2
    A = np.zeros((m, m))
    pw = lambda v: 0.0 if v == 0.0 else float(v) ** beta
    A[0, 0] = pw(p1)
    A[0, 1] = pw(1.0 - p1)
    A[m - 1, m - 1] = pw(p1)
    A[m - 1, m - 2] = pw(1.0 - p1)
    for j in range(1, k - 1):
        up, low = 2 * j - 1, 2 * j
        A[up, low] = pw(p2)
        A[up, up + 2] = pw(1.0 - p2)
        A[low, low - 2] = pw(1.0 - p2)
        A[low, up] = pw(p2)
    return TransferMatrix(A, beta, "zk")


def graph_matrix(graph: TransitionGraph, beta: float = 0.0) -> TransferMatrix:
    # 0/1 entries are fixed points of powering, any beta gives the adjacency
    return TransferMatrix(graph.adjacency(), beta, "adjacency")


@dataclass(frozen=True, eq=False)
class SpectralResult:
    radius: float
    right: np.ndarray
    left: np.ndarray
    iterations: int
    residual: float
    shifted: bool


def _power_iteration(A: np.ndarray, tol: float, max_iter: int):
    m = A.shape[0]
    v = np.ones(m)
    B = A
    shifted = False
    for it in range(1, max_iter + 1):
        w = B @ v
        top = float(w.max())
        if top <= 0.0:
            # v fell into the kernel; nothing remains along this direction
            return 0.0, v, it, float(np.abs(A @ v).max()), shifted
        v = w / top
        av = A @ v
        lam = float(v @ av) / float(v @ v)
        res = float(np.abs(av - lam * v).max())
        if res <= tol * max(1.0, abs(lam)):
            return lam, v, it, res, shifted
        if it == _SHIFT_AFTER and not shifted:
            # half-identity shift breaks cyclic classes without moving the
            # leading eigenvector; convergence is still measured against A
            B = (A + np.eye(m)) / 2.0
            shifted = True
    raise ConvergenceError(
        f"power iteration did not reach tol={tol} in {max_iter} steps "
        f"(size {m}, last residual {res:.3e})")


def spectral_radius(A, tol: float = 1e-12, max_iter: int = 1_000_000) -> SpectralResult:
    """Largest eigenvalue of a nonnegative square matrix by power iteration.

    Returns the radius with max-norm-1 right and left eigenvectors and the
    final relative residual.  Periodic or reducible inputs that stall the
    plain iteration trigger a half-identity shift automatically.
    """
    if isinstance(A, TransferMatrix):
        A = A.entries
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"need a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix entries must be finite")
    if np.any(A < 0):
        raise DomainError("matrix entries must be nonnegative")
    m = A.shape[0]
    if not A.any():
        z = np.zeros(m)
        return SpectralResult(0.0, z, z, 0, 0.0, False)
    lam, v, it1, res1, sh1 = _power_iteration(A, tol, max_iter)
    lam_l, w, it2, res2, sh2 = _power_iteration(A.T, tol, max_iter)
    if abs(lam - lam_l) > 1e-6 * max(1.0, abs(lam)):
        raise MismatchError(
            f"left/right radius disagreement: {lam} vs {lam_l}")
    return SpectralResult(lam, v, w, it1 + it2, max(res1, res2), sh1 or sh2)


def pressure(matrix) -> float:
    """log of the spectral radius; -inf for a spectrally trivial matrix."""
    r = spectral_radius(matrix).radius
    return math.log(r) if r > 0 else -math.inf


def graph_entropy(graph: TransitionGraph) -> float:
    return pressure(graph.adjacency())


@dataclass(eq=False)
class PressureCurve:
    betas: np.ndarray
    radii: np.ndarray
    pressures: np.ndarray
    kind: str


def pressure_curve(builder, betas, kind: str = "") -> PressureCurve:
    """Evaluate beta -> log spectral radius over a grid.

    ``builder`` maps a float beta to a TransferMatrix or plain array.
    """
    betas = np.asarray(betas, dtype=float)
    if betas.ndim != 1 or len(betas) == 0:
        raise DomainError("need a nonempty 1d grid of beta values")
    radii = np.empty(len(betas))
    for i, b in enumerate(betas):
        radii[i] = spectral_radius(builder(float(b))).radius
    with np.errstate(divide="ignore"):
        pressures = np.where(radii > 0, np.log(np.maximum(radii, 1e-300)), -np.inf)
    return PressureCurve(betas, radii, pressures, kind)


def save_pressure_csv(curve: PressureCurve, path) -> None:
    with open(path, "w") as fh:
        fh.write("beta,radius,pressure\n")
        for b, r, p in zip(curve.betas, curve.radii, curve.pressures):
            fh.write(f"{b:.12g},{r:.12g},{p:.12g}\n")


def is_irreducible(A) -> bool:
    if isinstance(A, TransferMatrix):
        A = A.entries
    B = (np.asarray(A) > 0).astype(np.int64)
    m = B.shape[0]
    R = B | np.eye(m, dtype=np.int64)
    for _ in range(max(1, int(math.ceil(math.log2(m + 1))))):
        R = ((R @ R) > 0).astype(np.int64) | R
    return bool(R.all())


def _zk_phase_state(k: int, arc: int, u: np.ndarray):
    """Map arc phases (time since arc entry) to horizontal position and
    direction of travel."""
    sts = zk_stations(k)
    m = 2 * k - 2
    x = np.empty_like(u)
    d = np.empty_like(u)
    if arc == 0:
        low = u < 0.5
        x[low] = sts[1] - u[low]
        d[low] = -1.0
        x[~low] = sts[0] + (u[~low] - 0.5)
        d[~low] = 1.0
    elif arc == m - 1:
        low = u < 0.5
        x[low] = sts[k - 1] + u[low]
        d[low] = 1.0
        x[~low] = sts[k] - (u[~low] - 0.5)
        d[~low] = -1.0
    elif arc % 2 == 1:
        j = (arc + 1) // 2
        x[:] = sts[j] + u
        d[:] = 1.0
    else:
        j = arc // 2 + 1
        x[:] = sts[j] - u
        d[:] = -1.0
    return x, d


def _arc_speed(psvf: Psvf, arc: int, u: np.ndarray) -> np.ndarray:
    if psvf.family == "zk":
        x, _ = _zk_phase_state(psvf.k, arc, u)
        g = psvf.plus.vy(x)
    else:
        x = np.where(u < 0.5, 4.0 * u, 4.0 * (1.0 - u))
        g = psvf.plus.vy(x)
    vx = abs(psvf.plus.vx)
    return np.sqrt(vx * vx + np.asarray(g) ** 2)


def _sample_phases(psvf: Psvf, arc: int, n: int, rng) -> np.ndarray:
    """Phases distributed by arc length: rejection against the speed profile."""
    grid = np.linspace(0.0, 1.0, 513)
    smax = float(_arc_speed(psvf, arc, grid).max()) * (1.0 + 1e-9)
    out = np.empty(n)
    have = 0
    while have < n:
        cand = rng.random(2 * (n - have) + 16)
        acc = rng.random(len(cand)) * smax <= _arc_speed(psvf, arc, cand)
        got = cand[acc][: n - have]
        out[have: have + len(got)] = got
        have += len(got)
    return out


def _zk_march_unit(k: int, arc: int, u: np.ndarray, p1: float, p2: float, rng):
    """Advance every phase sample by exactly one time unit through the
    station events, drawing a branch at each fold passage."""
    sts = zk_stations(k)
    m = 2 * k - 2
    n = len(u)
    x, d = _zk_phase_state(k, arc, u)
    arcs = np.full(n, arc, dtype=np.int64)
    t_rem = np.full(n, 1.0)
    # probability of departing westward at the next fold, by current arc
    pw = np.empty(m)
    pw[0] = p1
    pw[m - 1] = 1.0 - p1
    for a in range(1, m - 1):
        pw[a] = p2 if a % 2 == 1 else 1.0 - p2
    alive = t_rem > 1e-12
    while alive.any():
        xi = x[alive]
        di = d[alive]
        ti = t_rem[alive]
        ai = arcs[alive]
        idx = np.where(di > 0,
                       np.searchsorted(sts, xi, side="right"),
                       np.searchsorted(sts, xi, side="left") - 1)
        tgt = sts[idx]
        hop = (tgt - xi) * di
        reach = hop <= ti - 1e-12
        xi = np.where(reach, tgt, xi + di * ti)
        ti = np.where(reach, ti - hop, 0.0)
        cross = reach & ((idx == 0) | (idx == k))
        di = np.where(cross, -di, di)
        fold = reach & ~cross
        if fold.any():
            r = rng.random(int(fold.sum()))
            west = r < pw[ai[fold]]
            j = idx[fold]
            ai[fold] = np.where(west, 2 * j - 2, 2 * j - 1)
            di[fold] = np.where(west, -1.0, 1.0)
        x[alive] = xi
        d[alive] = di
        t_rem[alive] = ti
        arcs[alive] = ai
        alive = t_rem > 1e-12
    return arcs


def empirical_matrix(psvf: Psvf, beta: float, n_samples: int = 100_000,
                     seed=None, p1=None, p2=None, weights=None) -> TransferMatrix:
    """Transition frequencies of the unit time map under a random policy,
    raised entrywise to beta.

    Each row starts n_samples points spread along one arc by arc length
    and advances them through one unit of time, drawing branches with the
    given weights; the landing arc frequencies estimate the policy's
    transition matrix.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be positive")
    if seed is None:
        raise DomainError("an empirical matrix needs a seed")
    rng = np.random.default_rng(seed)
    if psvf.family == "zk":
        if p1 is None or not (0.0 <= p1 <= 1.0):
            raise DomainError("chain family needs p1 in [0, 1]")
        if psvf.k >= 3 and (p2 is None or not (0.0 <= p2 <= 1.0)):
            raise DomainError("chain family with k >= 3 needs p2 in [0, 1]")
        m = 2 * psvf.k - 2
        freq = np.zeros((m, m))
        for a in range(m):
            u = _sample_phases(psvf, a, n_samples, rng)
            land = _zk_march_unit(psvf.k, a, u, float(p1),
                                  float(p2 if p2 is not None else 0.0), rng)
            freq[a] = np.bincount(land, minlength=m) / n_samples
        return TransferMatrix(_pow0(freq, beta), beta, "empirical-zk")
    if psvf.family == "petal":
        w = np.asarray(weights, dtype=float) if weights is not None else None
        if w is None or len(w) != psvf.k or np.any(w < 0) or abs(w.sum() - 1) > 1e-9:
            raise DomainError(f"petal family needs {psvf.k} weights summing to 1")
        k = psvf.k
        freq = np.zeros((k, k))
        for a in range(k):
            # every unit window contains exactly one origin passage, whatever
            # the phase, so the jump drawn there decides the landing petal
            off = rng.choice(k, p=w, size=n_samples)
            freq[a] = np.bincount((a + off) % k, minlength=k) / n_samples
        return TransferMatrix(_pow0(freq, beta), beta, "empirical-petal")
    raise DomainError(f"cannot sample family {psvf.family!r}")
