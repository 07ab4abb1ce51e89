"""Infinitesimal generators in Berkson-Porta form and boundary classification.

A generator is G(z) = (tau - z)(1 - conj(tau) z) p(z) with Re p >= 0 and tau
in the closed disk.  ``p`` is any object with a ``pair(points)`` method that
returns ``(p, p')`` on a :class:`PointSet`; the concrete evaluators below cover
constants, sums of Herglotz kernels, measure-backed functions and reciprocals.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .herglotz import HerglotzMeasure, measure_from_json
from .unitdisc import (BoundaryPoint, DiskPoint, PointSet, RadialLimitEstimate,
                       extrapolate_radial_limit, radial_grid, wrap_angle)

__all__ = [
    "ConstantP", "AtomicP", "MeasureP", "ReciprocalP", "RotatedP", "Generator",
    "BoundaryClassification", "classify_boundary", "cowen_pommerenke_L",
    "pole_budget_check", "PoleBudget", "koebe_generator", "two_slit_generator",
    "half_plane_generator", "linear_generator", "generator_from_json",
]

# Null points are read off G(z)/(z - x); an error of one ulp in the location
# of a zero of p is amplified by 1/eps, so that stage stops at eps = 2^-22.
NULL_POINT_K_MAX = 22

REGULAR_POLE = "RegularPole"
REGULAR_NULL_POINT = "RegularNullPoint"
OTHER = "Other"
INCONCLUSIVE = "Inconclusive"


# --- Herglotz-function evaluators -------------------------------------------

@dataclass(frozen=True)
class ConstantP:
    c: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        if self.c.real < 0:
            raise ValueError("constant p needs Re c >= 0")

    closed_form = True

    def pair(self, pts: PointSet):
        shape = pts.z.shape
        return np.full(shape, self.c), np.zeros(shape, dtype=complex)

    def rotated(self, alpha):
        return self


@dataclass(frozen=True)
class AtomicP:
    """p(z) = const + sum_j w_j (e^{i a_j} + z) / (e^{i a_j} - z)."""

    angles: tuple
    weights: tuple
    const: complex = 0.0

    def __post_init__(self):
        angles = tuple(wrap_angle(a) for a in self.angles)
        weights = tuple(float(w) for w in self.weights)
        if len(angles) != len(weights):
            raise ValueError("angles and weights differ in length")
        if any(not w > 0 for w in weights):
            raise ValueError("kernel weights must be positive")
        const = complex(self.const)
        if const.real < 0:
            raise ValueError("constant term needs nonnegative real part")
        if not weights and const == 0:
            raise ValueError("p must not vanish identically")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "const", const)

    closed_form = True

    def pair(self, pts: PointSet):
        val = np.full(pts.z.shape, self.const)
        der = np.zeros(pts.z.shape, dtype=complex)
        for a, w in zip(self.angles, self.weights):
            g = pts.gap(a)
            e = cmath.exp(1j * a)
            val = val + w * (2.0 * e - g) / g
            der = der + w * 2.0 * e / (g * g)
        return val, der

    def rotated(self, alpha):
        return AtomicP(tuple(a - alpha for a in self.angles), self.weights, self.const)


@dataclass(frozen=True)
class MeasureP:
    """p = Herglotz transform of a measure."""

    mu: HerglotzMeasure

    @property
    def closed_form(self):
        return self.mu.density is None

    def pair(self, pts: PointSet):
        return self.mu.transform_pair(pts)

    def rotated(self, alpha):
        return RotatedP(self, alpha)


@dataclass(frozen=True)
class ReciprocalP:
    inner: object

    # the inner sum cancels near its zeros, which are the poles of interest
    closed_form = False

    def pair(self, pts: PointSet):
        q, dq = self.inner.pair(pts)
        return 1.0 / q, -dq / (q * q)

    def rotated(self, alpha):
        return reciprocal(self.inner.rotated(alpha))


@dataclass(frozen=True)
class RotatedP:
    """z -> p(e^{i alpha} z)."""

    inner: object
    alpha: float

    @property
    def closed_form(self):
        return self.inner.closed_form

    def pair(self, pts: PointSet):
        rot = cmath.exp(1j * self.alpha)
        if pts.anchored:
            moved = PointSet(theta=pts.theta + self.alpha, delta=pts.delta * rot)
        else:
            moved = PointSet(z=pts.z * rot)
        q, dq = self.inner.pair(moved)
        return q, dq * rot

    def rotated(self, alpha):
        return RotatedP(self.inner, self.alpha + alpha)


def reciprocal(p):
    """1/p, unwrapping a double reciprocal."""
    if isinstance(p, ReciprocalP):
        return p.inner
    if isinstance(p, ConstantP):
        return ConstantP(1.0 / p.c)
    return ReciprocalP(p)


# --- generators --------------------------------------------------------------

def _coerce_tau(tau):
    if isinstance(tau, (DiskPoint, BoundaryPoint)):
        return tau
    tau = complex(tau)
    if abs(tau) >= 1.0 - 1e-15:
        if abs(abs(tau) - 1.0) > 1e-12:
            raise ValueError(f"tau={tau} lies outside the closed disk")
        return BoundaryPoint(math.atan2(tau.imag, tau.real))
    return DiskPoint.of(tau)


def _atoms(atoms):
    angles, weights = [], []
    for a in atoms:
        if isinstance(a, dict):
            angles.append(float(a["angle"]))
            weights.append(float(a.get("mass", a.get("weight"))))
        else:
            angles.append(float(a[0]))
            weights.append(float(a[1]))
    return tuple(angles), tuple(weights)


@dataclass(frozen=True)
class Generator:
    """G(z) = (tau - z)(1 - conj(tau) z) p(z)."""

    tau: object
    p: object
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tau", _coerce_tau(self.tau))

    # constructors
    @classmethod
    def from_measure(cls, tau, mu: HerglotzMeasure, label="measure"):
        """p = 1 / (Herglotz transform of mu)."""
        if not isinstance(mu, HerglotzMeasure):
            raise TypeError("mu must be a HerglotzMeasure")
        return cls(tau, ReciprocalP(MeasureP(mu)), label)

    @classmethod
    def from_atoms_p(cls, tau, atoms, const=0.0, label="atoms_p"):
        """p(z) = const + sum w (e^{ia} + z)/(e^{ia} - z) over atoms (a, w)."""
        angles, weights = _atoms(atoms)
        return cls(tau, AtomicP(angles, weights, const), label)

    @classmethod
    def from_atoms_reciprocal_p(cls, tau, atoms, const=0.0, label="atoms_reciprocal_p"):
        """p = 1 / (const + sum w (e^{ia} + z)/(e^{ia} - z))."""
        angles, weights = _atoms(atoms)
        return cls(tau, ReciprocalP(AtomicP(angles, weights, const)), label)

    # geometry
    @property
    def boundary_tau(self) -> bool:
        return isinstance(self.tau, BoundaryPoint)

    @property
    def tau_value(self) -> complex:
        return self.tau.x if self.boundary_tau else self.tau.z

    def _factor(self, pts: PointSet):
        """(tau - z)(1 - conj(tau) z) and its derivative."""
        t = self.tau_value
        if self.boundary_tau:
            d = pts.minus(t)
            return np.conj(t) * d * d, -2.0 * np.conj(t) * d
        z = pts.z
        return (t - z) * (1.0 - np.conj(t) * z), -(1.0 - np.conj(t) * z) - np.conj(t) * (t - z)

    def pair(self, z):
        """Return (G(z), G'(z)) as arrays."""
        pts = PointSet.coerce(z)
        f, df = self._factor(pts)
        p, dp = self.p.pair(pts)
        return f * p, df * p + f * dp

    def __call__(self, z):
        g, _ = self.pair(z)
        return complex(g) if np.ndim(g) == 0 else g

    evaluate = __call__

    def derivative(self, z):
        _, dg = self.pair(z)
        return complex(dg) if np.ndim(dg) == 0 else dg

    evaluate_derivative = derivative

    def p_value(self, z):
        v, _ = self.p.pair(PointSet.coerce(z))
        return complex(v) if np.ndim(v) == 0 else v

    def derivative_at_tau(self) -> complex:
        """G'(tau) = -(1 - |tau|^2) p(tau); only for interior tau."""
        if self.boundary_tau:
            raise ValueError("G'(tau) is a boundary limit for boundary tau")
        t = self.tau.z
        return -(1.0 - abs(t) ** 2) * self.p_value(t)

    def dual(self) -> "Generator":
        """Same tau, p replaced by 1/p."""
        return Generator(self.tau, reciprocal(self.p), f"dual({self.label})")

    def rotated(self, alpha: float) -> "Generator":
        """The conjugate e^{-i alpha} G(e^{i alpha} z)."""
        if self.boundary_tau:
            tau = BoundaryPoint(self.tau.angle - alpha)
        else:
            tau = DiskPoint.of(self.tau.z * cmath.exp(-1j * alpha))
        return Generator(tau, self.p.rotated(alpha), f"rot({self.label})")

    @property
    def closed_form(self) -> bool:
        return bool(self.p.closed_form)

    def default_k_max(self) -> int:
        return 40 if self.closed_form else 24


def linear_generator() -> Generator:
    """G(z) = -z."""
    return Generator(DiskPoint(0.0, 0.0), ConstantP(1.0), "linear")


def koebe_generator() -> Generator:
    """G(z) = -z (1 - z) / (1 + z); Koenigs function z / (1 - z)^2."""
    return Generator.from_atoms_p(0.0, [(math.pi, 1.0)], label="koebe")


def two_slit_generator(tau=0.0) -> Generator:
    """p(z) = (1 + z^2) / (1 - z^2): poles at +1 and -1."""
    return Generator.from_atoms_p(tau, [(0.0, 0.5), (math.pi, 0.5)], label="two_slit")


def half_plane_generator() -> Generator:
    """tau = 1, p = 1, so G(z) = (1 - z)^2."""
    return Generator(BoundaryPoint(0.0), ConstantP(1.0), "half_plane")


def _parse_tau(spec):
    if not isinstance(spec, dict):
        raise ValueError("tau: expected an object with re/im or angle")
    if "angle" in spec:
        return BoundaryPoint(float(spec["angle"]))
    try:
        z = complex(float(spec.get("re", 0.0)), float(spec.get("im", 0.0)))
    except (TypeError, ValueError):
        raise ValueError("tau: re/im must be numbers") from None
    if abs(z) >= 1.0:
        raise ValueError("tau: interior point must satisfy |tau| < 1 (use 'angle' for boundary)")
    return DiskPoint.of(z)


def generator_from_json(spec: dict) -> Generator:
    """Build a generator from {"tau": ..., "source": ...}."""
    if not isinstance(spec, dict):
        raise ValueError("generator spec must be an object")
    tau = _parse_tau(spec.get("tau", {"re": 0.0, "im": 0.0}))
    src = spec.get("source")
    if not isinstance(src, dict):
        raise ValueError("source: missing or not an object")
    const = src.get("constant_p", 0.0)
    if isinstance(const, dict):
        const = complex(float(const.get("re", 0.0)), float(const.get("im", 0.0)))
    label = spec.get("label", "")
    try:
        if "measure" in src:
            return Generator.from_measure(tau, measure_from_json(src["measure"]), label or "measure")
        if "atoms_p" in src:
            return Generator.from_atoms_p(tau, src["atoms_p"], const, label or "atoms_p")
        if "atoms_reciprocal_p" in src:
            return Generator.from_atoms_reciprocal_p(tau, src["atoms_reciprocal_p"], const,
                                                     label or "atoms_reciprocal_p")
        if "constant_p" in src:
            return Generator(tau, ConstantP(const), label or "constant_p")
    except (KeyError, TypeError) as exc:
        raise ValueError(f"source: malformed atom list ({exc})") from None
    raise ValueError("source: expected one of measure, atoms_p, atoms_reciprocal_p, constant_p")


# --- boundary classification -------------------------------------------------

@dataclass(frozen=True)
class BoundaryClassification:
    tag: str
    a: complex = 0j
    mass: float = 0.0
    dilation: float = math.nan
    dilation_imag: float = 0.0
    diagnostics: tuple = field(default=(), repr=False)
    note: str = ""

    @property
    def is_pole(self) -> bool:
        return self.tag == REGULAR_POLE

    @property
    def is_null_point(self) -> bool:
        return self.tag == REGULAR_NULL_POINT


def _radial_values(G: Generator, theta: float, k_min: int, k_max: int):
    eps = radial_grid(k_min, k_max)
    g = G(PointSet.radial(theta, eps))
    return eps, np.asarray(g)


def classify_boundary(G: Generator, x, *, tol_pole: float = 1e-4, k_min: int = 3,
                      k_max: int | None = None, rtol: float = 1e-6) -> BoundaryClassification:
    """Decide whether x is a regular pole, a regular null point, or neither.

    Stage 1 looks for a nonzero limit of G(z)(x - z); stage 2 for a finite
    limit of G(z)/(z - x); stage 3 reports whether G itself has a limit.
    """
    xb = BoundaryPoint.of(x)
    if G.boundary_tau and abs(cmath.exp(1j * (xb.angle - G.tau.angle)) - 1.0) < 1e-12:
        return BoundaryClassification(OTHER, note="denjoy_wolff")
    k_max = G.default_k_max() if k_max is None else k_max
    eps, g = _radial_values(G, xb.angle, k_min, k_max)
    x = xb.x
    a_est = extrapolate_radial_limit(eps=eps, values=g * eps * x, rtol=rtol)
    if a_est.converged and abs(a_est.value) > tol_pole:
        return BoundaryClassification(REGULAR_POLE, a=a_est.value, mass=abs(a_est.value),
                                      diagnostics=(a_est,))
    cut = min(eps.size, NULL_POINT_K_MAX - k_min + 1)
    l_est = extrapolate_radial_limit(eps=eps[:cut], values=-g[:cut] / (eps[:cut] * x), rtol=rtol)
    if l_est.finite:
        ell = l_est.value
        if abs(ell.imag) > 1e-6 * (1.0 + abs(ell)):
            return BoundaryClassification(INCONCLUSIVE, a=a_est.value, dilation=ell.real,
                                          dilation_imag=ell.imag, diagnostics=(a_est, l_est),
                                          note="complex dilation")
        return BoundaryClassification(REGULAR_NULL_POINT, a=a_est.value, dilation=ell.real,
                                      dilation_imag=ell.imag, diagnostics=(a_est, l_est))
    g_est = extrapolate_radial_limit(eps=eps, values=g, rtol=rtol)
    if g_est.finite:
        return BoundaryClassification(OTHER, a=a_est.value, diagnostics=(a_est, l_est, g_est),
                                      note=f"G -> {g_est.value:.6g}")
    return BoundaryClassification(INCONCLUSIVE, a=a_est.value, diagnostics=(a_est, l_est, g_est))


def cowen_pommerenke_L(G: Generator, x, *, k_min: int = 3, k_max: int | None = None) -> RadialLimitEstimate:
    """Radial limit of p(z)(1 - conj(x) z)/2, which is real and nonnegative."""
    xb = BoundaryPoint.of(x)
    k_max = G.default_k_max() if k_max is None else k_max
    eps = radial_grid(k_min, k_max)
    p, _ = G.p.pair(PointSet.radial(xb.angle, eps))
    return extrapolate_radial_limit(eps=eps, values=0.5 * p * eps)


@dataclass(frozen=True)
class PoleBudget:
    lhs: float
    rhs: float
    holds: bool


def pole_budget_check(G: Generator, poles) -> PoleBudget:
    """Compare sum A_j / (2 |x_j - tau|^2) with Re p(0)."""
    t = G.tau_value
    lhs = 0.0
    for x, mass in poles:
        xb = BoundaryPoint.of(x)
        lhs += float(mass) / (2.0 * abs(xb.x - t) ** 2)
    rhs = float(G.p_value(0.0).real)
    return PoleBudget(lhs, rhs, lhs <= rhs + 1e-8)
