"""Planar piecewise smooth vector fields glued along a switching line.

Two concrete families are built here.  The chain family pairs the
constant-horizontal fields (+1, Q'(x)) and (-1, Q'(x)) across y = 0,
where Q is an even nonnegative polynomial whose graph and mirror image
bound a chain of loops; every arc of the chain is traversed in unit
time.  The petal family arranges k rotated copies of one slim loop
around the origin, one copy per double sector, each circuit again
taking unit time.  Both families are refractive: the two fields agree
in their component normal to the switching set, so orbits cross
without sliding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .errors import DegenerateTangencyError, DomainError


@dataclass(frozen=True, init=False)
class Polynomial:
    """Dense univariate polynomial with exact rational coefficients.

    Coefficients are stored ascending (constant term first) and trailing
    zeros are stripped, so equality of tuples is equality of polynomials.
    Evaluation at floats goes through a cached float copy of the
    coefficients; exact evaluation at Fractions is available separately.
    """

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs):
        cs = [Fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        object.__setattr__(self, "coeffs", tuple(cs))

    @cached_property
    def _float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        c = self._float_coeffs
        y = np.full_like(np.asarray(x, dtype=float), c[-1])
        for a in c[-2::-1]:
            y = y * x + a
        return float(y) if np.ndim(x) == 0 else y

    def eval_exact(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial([0])
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Polynomial([
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
            for i in range(n)
        ])

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Polynomial(out)


@dataclass(frozen=True)
class PlanarField:
    """Smooth field (vx, vy(x)): constant horizontal speed, x-dependent vertical."""

    vx: float
    vy: Polynomial

    def at(self, point) -> tuple[float, float]:
        return (self.vx, float(self.vy(point[0])))


class BoundaryClass(Enum):
    CROSSING = "crossing"
    FOLD_VISIBLE_VISIBLE = "visible-visible"
    FOLD_VISIBLE_INVISIBLE = "visible-invisible"
    FOLD_INVISIBLE_INVISIBLE = "invisible-invisible"
    BOUNDARY_EQUILIBRIUM = "boundary-equilibrium"


@dataclass(frozen=True)
class Psvf:
    """A pair of planar fields split along y = 0, plus family metadata.

    ``curve`` is the local profile polynomial: the upper invariant branch
    is its graph and the lower branch the mirror image.  For the petal
    family the profile lives in the frame of a single petal; the global
    picture is produced by rotation.
    """

    family: str
    k: int
    plus: PlanarField
    minus: PlanarField
    curve: Polynomial


def divergence(field: PlanarField, point=None) -> float:
    # vx is constant and vy depends on x alone, so both partials vanish
    return 0.0


def lie_derivative(field: PlanarField, point, order: int = 1) -> float:
    """First or second derivative of y along the field at a point of y = 0."""
    x = float(point[0])
    if order == 1:
        return float(field.vy(x))
    if order == 2:
        return field.vx * float(field.vy.derivative()(x))
    raise DomainError(f"order must be 1 or 2, got {order}")


def zk_polynomial(k: int) -> Polynomial:
    """Profile polynomial of the k-loop chain, exact coefficients.

    Negative leading term, simple zeros at +-(k-1)/2 and double zeros at
    the k-1 half-integer points in between, nonnegative on the span.
    """
    if k < 2:
        raise DomainError(f"chain family needs k >= 2, got {k}")
    h = Fraction(k - 1, 2)
    p = -(Polynomial([h, 1]) * Polynomial([-h, 1]))
    for i in range(1, k):
        m = Fraction(2 * i - k, 2)
        root = Polynomial([-m, 1])
        p = p * root * root
    return p


def zk_stations(k: int) -> np.ndarray:
    """All zeros of the profile on the switching line, ascending: the west
    end, the k-1 interior folds, the east end."""
    if k < 2:
        raise DomainError(f"chain family needs k >= 2, got {k}")
    ends = (k - 1) / 2.0
    return np.array([-ends] + [(2 * i - k) / 2.0 for i in range(1, k)] + [ends])


def zk_folds(k: int) -> np.ndarray:
    return zk_stations(k)[1:-1]


@lru_cache(maxsize=None)
def build_zk(k: int) -> Psvf:
    """Chain system with k loops: fields (+-1, Q'(x)) across y = 0."""
    q = zk_polynomial(k)
    dq = q.derivative()
    return Psvf("zk", k, PlanarField(1.0, dq), PlanarField(-1.0, dq), q)


def petal_slimness(k: int) -> float:
    # steepest ray of the profile leaves the origin with slope c; keeping
    # c at half of tan(pi/k) leaves margin inside the double sector, and
    # the half-plane sectors of k = 2 tolerate slope 1
    if k < 2:
        raise DomainError(f"petal family needs k >= 2, got {k}")
    if k == 2:
        return 1.0
    return math.tan(math.pi / k) / 2.0


@lru_cache(maxsize=None)
def build_petal_system(k: int) -> Psvf:
    """Petal system with k loops around the origin, one circuit per unit time.

    The base petal lives over [0, 2] in its own frame with profile
    c * (x - x^2 / 2); horizontal speed 4 makes the out-and-back circuit
    take exactly one time unit.  Sector copies are rotations of the base.
    """
    c = petal_slimness(k)
    vy = Polynomial([Fraction(4 * c), Fraction(-4 * c)])
    curve = Polynomial([0, Fraction(c), Fraction(-c / 2)])
    return Psvf("petal", k, PlanarField(4.0, vy), PlanarField(-4.0, vy), curve)


def petal_axes(k: int) -> np.ndarray:
    """Axis angle of each petal."""
    return np.array([2.0 * math.pi * j / k for j in range(k)])


def sector_field(psvf: Psvf, m: int, point) -> tuple[float, float]:
    """Field acting on sector m, evaluated at a global point.

    Sectors are numbered counterclockwise from the positive x axis, 2k of
    them; sector 2j and sector 2j-1 are the upper and lower halves of
    petal j.  The result is expressed in global coordinates.
    """
    if psvf.family != "petal":
        raise DomainError("sector fields are defined for the petal family only")
    k = psvf.k
    m = m % (2 * k)
    if m % 2 == 0:
        j, base = m // 2, psvf.plus
    else:
        j, base = ((m + 1) // 2) % k, psvf.minus
    th = 2.0 * math.pi * j / k
    ct, st = math.cos(th), math.sin(th)
    xl = ct * point[0] + st * point[1]
    wx, wy = base.vx, float(base.vy(xl))
    return (ct * wx - st * wy, st * wx + ct * wy)


def classify_boundary_point(psvf: Psvf, x: float, tol: float = 1e-9) -> BoundaryClass:
    """Classify the point (x, 0) of the switching line of the local model.

    Crossing and two-fold types are decided from the first and second
    derivatives of y along each field.  Sliding (opposite first
    derivatives) is rejected: refractive systems do not slide, so meeting
    it means the input is outside the families handled here.
    """
    pt = (x, 0.0)
    lp = lie_derivative(psvf.plus, pt, 1)
    lm = lie_derivative(psvf.minus, pt, 1)
    if (abs(psvf.plus.vx) <= tol and abs(lp) <= tol) or (
        abs(psvf.minus.vx) <= tol and abs(lm) <= tol
    ):
        return BoundaryClass.BOUNDARY_EQUILIBRIUM
    if abs(lp) <= tol and abs(lm) <= tol:
        sp = lie_derivative(psvf.plus, pt, 2)
        sm = lie_derivative(psvf.minus, pt, 2)
        if abs(sp) <= tol or abs(sm) <= tol:
            raise DegenerateTangencyError(
                f"second derivative vanishes at x={x}; fold type undefined"
            )
        vis_plus = sp > 0
        vis_minus = sm < 0
        if vis_plus and vis_minus:
            return BoundaryClass.FOLD_VISIBLE_VISIBLE
        if vis_plus or vis_minus:
            return BoundaryClass.FOLD_VISIBLE_INVISIBLE
        return BoundaryClass.FOLD_INVISIBLE_INVISIBLE
    if abs(lp) <= tol or abs(lm) <= tol:
        raise DegenerateTangencyError(
            f"one sided tangency at x={x}; not a two-fold of a refractive pair"
        )
    if lp * lm > 0:
        return BoundaryClass.CROSSING
    raise DomainError(
        f"opposite normal components at x={x}: sliding point, outside scope"
    )


def check_refractive(psvf: Psvf, samples=None, tol: float = 1e-9) -> bool:
    """True when the two fields share their normal component on the switching set.

    For the chain family the switching set is the x axis between the end
    stations.  For the petal family it is the union of the 2k sector rays,
    and the fields compared on each ray belong to the sectors on either
    side of it.
    """
    if psvf.family == "petal":
        k = psvf.k
        radii = np.linspace(0.05, 1.9, 25) if samples is None else np.asarray(samples)
        for m in range(2 * k):
            phi = m * math.pi / k
            nx, ny = -math.sin(phi), math.cos(phi)
            for r in radii:
                pt = (r * math.cos(phi), r * math.sin(phi))
                ax, ay = sector_field(psvf, m, pt)
                bx, by = sector_field(psvf, m - 1, pt)
                da = ax * nx + ay * ny
                db = bx * nx + by * ny
                if abs(da - db) > tol * max(1.0, abs(da), abs(db)):
                    return False
        return True
    if samples is None:
        lo, hi = float(zk_stations(psvf.k)[0]), float(zk_stations(psvf.k)[-1])
        samples = np.linspace(lo, hi, 101)
    xs = np.asarray(samples, dtype=float)
    gap = np.max(np.abs(psvf.plus.vy(xs) - psvf.minus.vy(xs)))
    return bool(gap <= tol)


def psvf_to_json(psvf: Psvf) -> str:
    if psvf.family not in ("zk", "petal"):
        raise DomainError(f"family {psvf.family!r} has no serial form")
    return json.dumps({"family": psvf.family, "k": psvf.k})


def psvf_from_json(text: str) -> Psvf:
    data = json.loads(text)
    family, k = data["family"], int(data["k"])
    if family == "zk":
        return build_zk(k)
    if family == "petal":
        return build_petal_system(k)
    raise DomainError(f"unknown family {family!r}")
