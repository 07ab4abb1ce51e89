"""Points of the unit disk, boundary angles and radial limits.

Near the unit circle the distance ``1 - |z|`` is the quantity that matters and
it is destroyed by cancellation if ``z`` is stored as a plain complex number.
Disk points close to the circle are therefore kept *anchored*: a boundary angle
``theta`` together with the offset ``delta = e^{i theta} - z``.  Radial samples
are the special case ``delta = eps * e^{i theta}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Reduce an angle to [0, 2pi)."""
    t = math.fmod(float(theta), TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


def chord(alpha, theta):
    """``e^{i alpha} - e^{i theta}`` without cancellation for close angles."""
    alpha = np.asarray(alpha, dtype=float)
    theta = np.asarray(theta, dtype=float)
    half = 0.5 * (alpha - theta)
    return 2j * np.sin(half) * np.exp(0.5j * (alpha + theta))


@dataclass(frozen=True)
class DiskPoint:
    re: float
    im: float

    def __post_init__(self):
        if not (self.re * self.re + self.im * self.im < 1.0):
            raise ValueError(f"point {complex(self.re, self.im)} is not in the open unit disk")

    @classmethod
    def of(cls, z) -> "DiskPoint":
        if isinstance(z, DiskPoint):
            return z
        z = complex(z)
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the unit circle, stored by its angle in [0, 2pi)."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", wrap_angle(self.angle))

    @classmethod
    def of(cls, x) -> "BoundaryPoint":
        if isinstance(x, BoundaryPoint):
            return x
        return cls(float(x))

    @property
    def x(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))


@dataclass(frozen=True)
class RadialSample:
    eps: float
    value: complex

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise ValueError("eps must lie in (0, 1)")

    def point(self, x: BoundaryPoint) -> complex:
        return (1.0 - self.eps) * x.x


@dataclass(frozen=True)
class RadialLimitEstimate:
    value: complex
    residual: float
    converged: bool
    divergence_exponent: float = 0.0
    estimates: tuple = field(default=(), repr=False)

    @property
    def finite(self) -> bool:
        return self.converged and bool(np.isfinite(self.value))


class PointSet:
    """A vector of disk points, optionally anchored at one boundary angle.

    With an anchor, ``z = e^{i theta} - delta`` and all differences to boundary
    points and ``1 - |z|^2`` are formed from ``delta`` directly.  ``theta`` is
    either one angle shared by all points or an array of per-point anchors.
    """

    __slots__ = ("z", "theta", "delta")

    def __init__(self, z=None, theta=None, delta=None):
        if theta is None:
            self.z = np.asarray(z, dtype=complex)
            self.theta = None
            self.delta = None
        else:
            self.theta = np.asarray(theta, dtype=float)
            if self.theta.ndim == 0:
                self.theta = float(self.theta)
            self.delta = np.asarray(delta, dtype=complex)
            self.z = np.exp(1j * self.theta) - self.delta

    @classmethod
    def radial(cls, theta, eps) -> "PointSet":
        eps = np.asarray(eps, dtype=float)
        return cls(theta=theta, delta=eps * np.exp(1j * float(theta)))

    @classmethod
    def coerce(cls, z) -> "PointSet":
        if isinstance(z, PointSet):
            return z
        if isinstance(z, DiskPoint):
            z = z.z
        return cls(z=z)

    @property
    def anchored(self) -> bool:
        return self.theta is not None

    def gap(self, alpha):
        """``e^{i alpha} - z`` for boundary angle(s) alpha."""
        alpha = np.asarray(alpha, dtype=float)
        if self.theta is None:
            return np.exp(1j * alpha) - self.z
        return chord(alpha, self.theta) + self.delta

    def minus(self, w: complex):
        """``w - z`` for an arbitrary complex w (anchored when |w| = 1)."""
        if self.theta is not None and abs(abs(w) - 1.0) < 1e-15:
            return self.gap(math.atan2(w.imag, w.real))
        return w - self.z

    def one_minus_abs2(self):
        if self.theta is None:
            return 1.0 - (self.z.real ** 2 + self.z.imag ** 2)
        x = np.exp(1j * self.theta)
        d = self.delta
        return 2.0 * (np.conj(x) * d).real - (d.real ** 2 + d.imag ** 2)

    def one_minus_abs(self):
        s = self.one_minus_abs2()
        return s / (1.0 + np.sqrt(np.maximum(1.0 - s, 0.0)))

    def __len__(self):
        return self.z.size

    def take(self, mask) -> "PointSet":
        if self.theta is None:
            return PointSet(z=self.z[mask])
        theta = self.theta if np.ndim(self.theta) == 0 else self.theta[mask]
        return PointSet(theta=theta, delta=self.delta[mask])


def radial_grid(k_min: int = 3, k_max: int = 40) -> np.ndarray:
    """Return eps_k = 2^-k for k = k_min..k_max (strictly decreasing)."""
    if not (isinstance(k_min, (int, np.integer)) and isinstance(k_max, (int, np.integer))):
        raise TypeError("grid bounds must be integers")
    if not (3 <= k_min < k_max <= 48):
        raise ValueError(f"need 3 <= k_min < k_max <= 48, got ({k_min}, {k_max})")
    return np.ldexp(1.0, -np.arange(k_min, k_max + 1))


def _check_samples(eps, values):
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=complex)
    if eps.ndim != 1 or eps.shape != values.shape:
        raise ValueError("eps and values must be 1-d arrays of equal length")
    if eps.size < 4:
        raise ValueError("at least 4 samples are needed")
    if np.any(np.diff(eps) >= 0):
        raise ValueError("eps must be strictly decreasing")
    return eps, values


def _growth_exponent(eps, values) -> float:
    mags = np.abs(values[-3:])
    if np.any(mags == 0) or not np.all(np.isfinite(mags)):
        return 0.0
    slope = np.polyfit(np.log(eps[-3:]), np.log(mags), 1)[0]
    return float(-slope)


def extrapolate_radial_limit(samples=None, *, eps=None, values=None, rtol: float = 1e-6,
                             atol: float = 1e-12) -> RadialLimitEstimate:
    """Extrapolate ``lim_{eps -> 0} f(eps)`` from samples on a decreasing grid.

    Each consecutive triple is fitted by ``L + c eps^q`` (Aitken's delta-squared
    on a geometric grid).  The residual is the spread of the last two triple
    estimates relative to ``max(|L|, atol/rtol)``.  Accepts either a sequence of
    ``(eps, value)`` pairs / RadialSample objects or the ``eps=``/``values=``
    arrays.
    """
    if samples is not None:
        pairs = [(s.eps, s.value) if isinstance(s, RadialSample) else tuple(s) for s in samples]
        eps = [p[0] for p in pairs]
        values = [p[1] for p in pairs]
    eps, f = _check_samples(eps, values)

    finite = np.isfinite(f)
    if not finite[-3:].all():
        return RadialLimitEstimate(complex(f[-1]), math.inf, False, math.inf)

    scale = float(np.max(np.abs(f[-4:])))
    noise = max(1e3 * np.finfo(float).eps * scale, atol)
    est = np.full(f.size - 2, np.nan + 0j)
    for k in range(f.size - 2):
        d1 = f[k + 1] - f[k]
        d2 = f[k + 2] - f[k + 1]
        if abs(d2) <= noise:
            est[k] = f[k + 2]
        elif abs(d1) <= noise or abs(d2) >= abs(d1):
            continue
        else:
            est[k] = f[k + 2] - d2 * d2 / (d2 - d1)

    last, prev = est[-1], est[-2]
    if np.isfinite(last) and np.isfinite(prev):
        residual = float(abs(last - prev) / max(abs(last), atol / rtol))
        if residual <= rtol:
            return RadialLimitEstimate(complex(last), residual, True, 0.0, tuple(est))
    else:
        residual = math.inf
    return RadialLimitEstimate(complex(f[-1]), residual, False, _growth_exponent(eps, f), tuple(est))


def extrapolate_log_limit(*, eps, values, rtol: float = 1e-6, atol: float = 1e-12) -> RadialLimitEstimate:
    """Extrapolate a limit approached like ``L + c / log(eps)``.

    Quotients of logarithms converge at this rate; the two-point elimination in
    ``u = 1/log(1/eps)`` is exact for that model.
    """
    eps, f = _check_samples(eps, values)
    u = 1.0 / np.log(1.0 / eps)
    est = (f[1:] * u[:-1] - f[:-1] * u[1:]) / (u[:-1] - u[1:])
    last, prev = est[-1], est[-2]
    residual = float(abs(last - prev) / max(abs(last), atol / rtol))
    converged = bool(np.isfinite(last) and residual <= rtol)
    value = complex(last) if converged else complex(f[-1])
    return RadialLimitEstimate(value, residual, converged, 0.0, tuple(est))


@dataclass(frozen=True)
class Moebius:
    """The disk automorphism z -> (z - tau) / (1 - conj(tau) z)."""

    tau: complex

    def __call__(self, z):
        t = self.tau
        return (z - t) / (1.0 - np.conj(t) * z)

    def inverse(self, w):
        t = self.tau
        return (w + t) / (1.0 + np.conj(t) * w)

    def derivative(self, z):
        t = self.tau
        return (1.0 - abs(t) ** 2) / (1.0 - np.conj(t) * z) ** 2


def moebius_to_origin(tau):
    """Return ``(forward, inverse)`` with forward(tau) = 0 and inverse(0) = tau."""
    tau = DiskPoint.of(tau).z
    m = Moebius(tau)
    return m, m.inverse
