"""Positive measures on the circle and their Herglotz transforms.

A measure is a finite list of atoms plus at most one density: uniform,
piecewise constant, or a symmetric power cusp.  The transform is

    T(z) = (1/2pi) * integral (e^{it} + z) / (e^{it} - z) dmu(t),

which has nonnegative real part.  Piecewise-constant densities are integrated
in closed form; power cusps go through adaptive Gauss-Kronrod quadrature after
the substitution s = |t - t0|^alpha, which turns the cusp density into a
constant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import QuadratureError, gauss_kronrod
from .unitdisc import (TWO_PI, BoundaryPoint, PointSet, RadialLimitEstimate, chord,
                       extrapolate_radial_limit, radial_grid, wrap_angle)

__all__ = [
    "UniformDensity", "StepDensity", "PowerCusp", "HerglotzMeasure",
    "herglotz_transform", "herglotz_transform_derivative", "pole_criterion",
    "fatou_l2_test", "upsilon", "measure_from_json", "QuadratureError",
]


def _wrap_pm(phi):
    """Reduce to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), TWO_PI)


def _relative_pieces(a, b, theta):
    """Split [a, b] (in t) into pieces of phi = t - theta inside [-pi, pi]."""
    out = []
    lo = float(_wrap_pm(a - theta))
    length = b - a
    while length > 0:
        step = min(length, math.pi - lo)
        if step > 0:
            out.append((lo, lo + step))
        length -= step
        lo = -math.pi
        if step <= 0 and length > 0:
            continue
    return out


@dataclass(frozen=True)
class StepDensity:
    """Piecewise-constant density: pieces of ((a, b), c), 0 <= a < b <= 2pi."""

    pieces: tuple

    def __post_init__(self):
        clean = []
        for (a, b), c in self.pieces:
            a, b, c = float(a), float(b), float(c)
            if not (0.0 <= a < b <= TWO_PI + 1e-12):
                raise ValueError(f"bad step interval ({a}, {b})")
            if c < 0:
                raise ValueError("density must be nonnegative")
            clean.append(((a, min(b, TWO_PI)), c))
        object.__setattr__(self, "pieces", tuple(clean))

    @property
    def mass(self) -> float:
        return sum((b - a) * c for (a, b), c in self.pieces)

    def breakpoints(self):
        return sorted({p for (ab, _) in self.pieces for p in ab})

    def cumulative(self, t: float) -> float:
        return sum(c * max(0.0, min(b, t) - a) for (a, b), c in self.pieces)

    def value(self, t: float) -> float:
        return sum(c for (a, b), c in self.pieces if a <= t < b)

    # closed forms -----------------------------------------------------
    def transform(self, pts: PointSet):
        total = 0j
        deriv = 0j
        for (a, b), c in self.pieces:
            if c == 0.0:
                continue
            ga, gb = pts.gap(a), pts.gap(b)
            la = np.log(np.exp(-1j * a) * ga)
            lb = np.log(np.exp(-1j * b) * gb)
            total = total + c * ((b - a) - 2j * (lb - la))
            deriv = deriv + c * 2j * (1.0 / gb - 1.0 / ga)
        return total, deriv

    def radial_integrals(self, theta, eps):
        """Return (energy, sine) integrals at z = (1 - eps) e^{i theta}."""
        r = 1.0 - eps
        k = (1.0 + r) / eps
        energy = 0.0
        sine = 0.0
        for (a, b), c in self.pieces:
            if c == 0.0:
                continue
            for pa, pb in _relative_pieces(a, b, theta):
                fa, sa = _arctan_pair(k, 0.5 * pa)
                fb, sb = _arctan_pair(k, 0.5 * pb)
                energy += c * (2.0 / (eps * (1.0 + r))) * ((fb - fa) + (sb - sa))
                da = eps * eps + 4.0 * r * math.sin(0.5 * pa) ** 2
                db = eps * eps + 4.0 * r * math.sin(0.5 * pb) ** 2
                sine += c * (math.log(db) - math.log(da)) / (2.0 * r)
        return energy, sine

    def fatou_truncated(self, theta, delta):
        total = 0.0
        for (a, b), c in self.pieces:
            if c == 0.0:
                continue
            for pa, pb in _relative_pieces(a, b, theta):
                for lo, hi in ((pa, min(pb, -delta)), (max(pa, delta), pb)):
                    if hi > lo:
                        total += c * 0.5 * (_cot_half(lo) - _cot_half(hi))
        return total


def _cot_half(phi):
    if abs(abs(phi) - math.pi) < 1e-300:
        return 0.0
    return math.cos(0.5 * phi) / math.sin(0.5 * phi)


def _arctan_pair(k, u):
    """arctan(k tan u) on [-pi/2, pi/2] as (base, small) with small accurate."""
    tu = math.tan(u) if abs(u) < 0.5 * math.pi else math.copysign(math.inf, u)
    y = k * tu
    if abs(y) <= 1.0:
        return 0.0, math.atan(y)
    return math.copysign(0.5 * math.pi, y), -math.atan(1.0 / y)


def UniformDensity(c: float = 1.0) -> StepDensity:
    """Constant density c on the whole circle (mass 2 pi c)."""
    return StepDensity((((0.0, TWO_PI), c),))


def _integrate_noisy(f, breakpoints, rtol):
    """Adaptive quadrature that falls back to an absolute tolerance.

    A sharp peak whose contributions largely cancel leaves a result far
    below the integral of |f|; roundoff then caps the attainable relative
    accuracy (and the error estimate), so the fallback asks for 1e-10 of
    the integral of |f|.
    """
    try:
        return gauss_kronrod(f, breakpoints, rtol=rtol, atol=1e-300)
    except QuadratureError:
        l1, _ = gauss_kronrod(lambda x: np.abs(f(x)), breakpoints, rtol=1e-3, atol=1e-300)
        return gauss_kronrod(f, breakpoints, rtol=rtol, atol=1e-10 * l1)


@dataclass(frozen=True)
class PowerCusp:
    """Density alpha * scale * |t - t0|^(alpha - 1) on [0, 2pi].

    Its distribution function is scale * sign(t - t0) |t - t0|^alpha, shifted
    to vanish at t = 0; the default scale is pi^(1 - alpha).
    """

    center: float = math.pi
    exponent: float = 2.0
    scale: float | None = None

    def __post_init__(self):
        if not self.exponent > 0:
            raise ValueError("cusp exponent must be positive")
        if not (0.0 < self.center < TWO_PI):
            raise ValueError("cusp center must lie in (0, 2pi)")
        if self.scale is None:
            object.__setattr__(self, "scale", math.pi ** (1.0 - self.exponent))
        if self.scale <= 0:
            raise ValueError("cusp scale must be positive")

    @property
    def mass(self) -> float:
        a, t0 = self.exponent, self.center
        return self.scale * (t0 ** a + (TWO_PI - t0) ** a)

    def breakpoints(self):
        return [0.0, self.center, TWO_PI]

    def cumulative(self, t: float) -> float:
        a, t0 = self.exponent, self.center
        return self.scale * (math.copysign(abs(t - t0) ** a, t - t0) + t0 ** a)

    def value(self, t: float) -> float:
        a = self.exponent
        return a * self.scale * abs(t - self.center) ** (a - 1.0)

    def integrate(self, g, theta=None, eps=None, exclude=None, rtol=1e-11):
        """integral of g(t, phi) dmu(t) with phi = t - theta (mod 2pi).

        ``g`` acts on arrays and must be 2pi-periodic in ``phi``.  Near the
        cusp the variable is s = u^alpha (u = |t - t0|), which removes the
        power singularity; near a peak at theta the variable is u itself and
        phi is the exact difference u - u_theta.  ``eps`` grades breakpoints
        around theta; ``exclude`` drops the window |phi| < exclude.
        """
        a, t0, sc = self.exponent, self.center, self.scale
        th = t0 if theta is None else float(theta)
        width = eps if eps else 1e-8
        total = 0j
        err = 0.0
        for sgn, length in ((-1.0, t0), (1.0, TWO_PI - t0)):
            u_pts = [length * 2.0 ** -k for k in range(0, 48)] + [0.0, length]
            peak = None
            if theta is not None:
                for n in (-1, 0, 1):
                    uc = sgn * (th + n * TWO_PI - t0)
                    if -1.0 < uc < length + 1.0:
                        off = width * 2.0 ** np.arange(0, 60)
                        off = off[off < 2 * length]
                        u_pts.extend(uc + off)
                        u_pts.extend(uc - off)
                        u_pts.append(uc)
                        if exclude is not None:
                            u_pts.extend([uc - exclude, uc + exclude])
                        if 0.0 <= uc <= length:
                            peak = uc
            u_pts = np.unique(np.clip(np.asarray(u_pts), 0.0, length))
            # switch from s to u halfway between the cusp and a distant peak
            split = 0.5 * peak if peak is not None and peak > 16.0 * width else length

            def phase(u, sgn=sgn, peak=peak):
                if peak is None:
                    return (t0 - th) + sgn * u
                return sgn * (u - peak)

            def values(u, sgn=sgn):
                phi = phase(u)
                vals = np.asarray(g(t0 + sgn * u, phi), dtype=complex)
                if exclude is not None:
                    vals = np.where(np.abs(_wrap_pm(phi)) < exclude, 0.0, vals)
                return vals

            def in_s(s):
                return values(s ** (1.0 / a))

            def in_u(u):
                return a * u ** (a - 1.0) * values(u)

            inner = np.append(u_pts[u_pts < split], split)
            v, e = _integrate_noisy(in_s, inner ** a, rtol)
            total += v
            err += e
            if split < length:
                outer = np.insert(u_pts[u_pts > split], 0, split)
                v, e = _integrate_noisy(in_u, outer, rtol)
                total += v
                err += e
        return sc * total, sc * err

    def transform(self, pts: PointSet):
        out = np.empty(pts.z.shape, dtype=complex)
        dout = np.empty(pts.z.shape, dtype=complex)
        flat_z = pts.z.ravel()
        eps_all = np.ravel(pts.one_minus_abs())
        for i in range(flat_z.size):
            z = flat_z[i]
            if pts.anchored:
                th = float(np.broadcast_to(pts.theta, pts.z.shape).flat[i])
                d = np.ravel(pts.delta)[i]
            else:
                th = math.atan2(z.imag, z.real)
                d = np.exp(1j * th) - z

            def gap(t, phi, th=th, d=d):
                return 2j * np.sin(0.5 * phi) * np.exp(1j * (th + 0.5 * phi)) + d

            def kern(t, phi):
                gp = gap(t, phi)
                return (2.0 * np.exp(1j * t) - gp) / gp

            def dkern(t, phi):
                gp = gap(t, phi)
                return 2.0 * np.exp(1j * t) / (gp * gp)

            ep = float(eps_all[i])
            out.flat[i], _ = self.integrate(kern, th, ep)
            dout.flat[i], _ = self.integrate(dkern, th, ep)
        return out, dout

    def radial_integrals(self, theta, eps):
        r = 1.0 - eps

        def den(phi):
            return eps * eps + 4.0 * r * np.sin(0.5 * phi) ** 2

        e, _ = self.integrate(lambda t, phi: 1.0 / den(phi), theta, eps)
        s, _ = self.integrate(lambda t, phi: np.sin(phi) / den(phi), theta, eps)
        return float(e.real), float(s.real)

    def fatou_truncated(self, theta, delta):
        v, _ = self.integrate(lambda t, phi: 1.0 / (4.0 * np.sin(0.5 * phi) ** 2),
                              theta, delta, exclude=delta)
        return float(v.real)


@dataclass(frozen=True)
class HerglotzMeasure:
    """Atoms ``(angle, mass)`` plus an optional density."""

    atoms: tuple = ()
    density: object = None
    _angles: np.ndarray = field(init=False, repr=False, compare=False)
    _masses: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        atoms = tuple((wrap_angle(t), float(m)) for t, m in self.atoms)
        for _, m in atoms:
            if not m > 0:
                raise ValueError("atom masses must be positive")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_angles", np.array([t for t, _ in atoms], dtype=float))
        object.__setattr__(self, "_masses", np.array([m for _, m in atoms], dtype=float))
        if not self.total_mass > 0:
            raise ValueError("measure has zero total mass")

    @property
    def total_mass(self) -> float:
        dm = self.density.mass if self.density is not None else 0.0
        return float(self._masses.sum()) + dm

    @property
    def closed_form(self) -> bool:
        return self.density is None or isinstance(self.density, StepDensity)

    def reflected(self) -> "HerglotzMeasure":
        """Image under t -> 2pi - t (only for atoms and step densities)."""
        dens = self.density
        if isinstance(dens, StepDensity):
            dens = StepDensity(tuple(((TWO_PI - b, TWO_PI - a), c) for (a, b), c in dens.pieces))
        elif isinstance(dens, PowerCusp):
            dens = PowerCusp(TWO_PI - dens.center, dens.exponent, dens.scale)
        return HerglotzMeasure(tuple((-t, m) for t, m in self.atoms), dens)

    def transform_pair(self, z):
        """Return (T(z), T'(z)) as arrays."""
        pts = PointSet.coerce(z)
        val = np.zeros(pts.z.shape, dtype=complex)
        der = np.zeros(pts.z.shape, dtype=complex)
        for t, m in self.atoms:
            g = pts.gap(t)
            w = np.exp(1j * t)
            val = val + m * (2.0 * w - g) / g
            der = der + m * 2.0 * w / (g * g)
        if self.density is not None:
            v, d = self.density.transform(pts)
            val = val + v
            der = der + d
        return val / TWO_PI, der / TWO_PI

    def radial_integrals(self, theta, eps):
        """(integral dmu/|e^{it}-z|^2, integral sin(t-theta) dmu/|e^{it}-z|^2) at z=(1-eps)e^{i theta}."""
        r = 1.0 - eps
        phi = _wrap_pm(self._angles - theta)
        den = eps * eps + 4.0 * r * np.sin(0.5 * phi) ** 2
        energy = float(np.sum(self._masses / den))
        sine = float(np.sum(self._masses * np.sin(phi) / den))
        if self.density is not None:
            e, s = self.density.radial_integrals(theta, eps)
            energy += e
            sine += s
        return energy, sine


def herglotz_transform(mu: HerglotzMeasure, z):
    """(1/2pi) integral (e^{it}+z)/(e^{it}-z) dmu(t); scalar in, scalar out."""
    v, _ = mu.transform_pair(z)
    return complex(v) if v.ndim == 0 else v


def herglotz_transform_derivative(mu: HerglotzMeasure, z):
    """(1/2pi) integral 2 e^{it} / (e^{it} - z)^2 dmu(t)."""
    _, d = mu.transform_pair(z)
    return complex(d) if d.ndim == 0 else d


@dataclass(frozen=True)
class PoleCriterion:
    is_pole: bool
    energy: RadialLimitEstimate
    sine_term: RadialLimitEstimate
    eps: tuple
    energy_samples: tuple


def pole_criterion(mu: HerglotzMeasure, theta, *, k_min=3, k_max=24, tol_sine=1e-4,
                   rtol=1e-6) -> PoleCriterion:
    """Test whether e^{i theta} is a regular pole via the measure.

    Both limits (energy and sine term over 1 - r) must exist, and the sine term
    must vanish, for the point to be a regular pole.
    """
    theta = BoundaryPoint.of(theta).angle
    eps = radial_grid(k_min, k_max)
    pairs = [mu.radial_integrals(theta, e) for e in eps]
    energy = np.array([p[0] for p in pairs])
    sine = np.array([p[1] for p in pairs]) / eps
    e_est = extrapolate_radial_limit(eps=eps, values=energy, rtol=rtol)
    s_est = extrapolate_radial_limit(eps=eps, values=sine, rtol=rtol, atol=1e-8)
    ok = e_est.converged and s_est.converged and abs(s_est.value) <= tol_sine
    return PoleCriterion(bool(ok), e_est, s_est, tuple(eps), tuple(energy))


@dataclass(frozen=True)
class FatouTest:
    finite: bool
    value_or_lower_bounds: tuple


def fatou_l2_test(mu: HerglotzMeasure, theta, *, k_min=3, k_max=30) -> FatouTest:
    """Is t -> 1/|e^{it} - e^{i theta}| square integrable against mu?

    finite=False certifies that the point is not a regular pole.  The integral
    is evaluated with the window |t - theta| < delta removed, for shrinking
    delta; divergence of these truncations gives the lower bounds.
    """
    theta = BoundaryPoint.of(theta).angle
    if mu.atoms:
        d = np.abs(_wrap_pm(mu._angles - theta))
        if np.any(d < 1e-14):
            return FatouTest(False, (math.inf,))
    deltas = radial_grid(k_min, k_max)
    vals = []
    for dl in deltas:
        phi = _wrap_pm(mu._angles - theta)
        keep = np.abs(phi) >= dl
        v = float(np.sum(mu._masses[keep] / (4.0 * np.sin(0.5 * phi[keep]) ** 2)))
        if mu.density is not None:
            v += mu.density.fatou_truncated(theta, dl)
        vals.append(v)
    est = extrapolate_radial_limit(eps=deltas, values=vals, rtol=1e-6)
    if est.converged:
        return FatouTest(True, (est.value.real,))
    return FatouTest(False, tuple(vals))


def upsilon(mu: HerglotzMeasure, t: float) -> float:
    """mu((0, t]) for t in [0, 2pi]; an atom at angle 0 is counted at 2pi."""
    t = float(t)
    if not (-1e-12 <= t <= TWO_PI + 1e-12):
        raise ValueError("t must lie in [0, 2pi]")
    total = 0.0
    for a, m in mu.atoms:
        pos = a if a > 0.0 else TWO_PI
        if pos <= t:
            total += m
    if mu.density is not None:
        total += mu.density.cumulative(min(max(t, 0.0), TWO_PI))
    return total


def measure_from_json(spec: dict) -> HerglotzMeasure:
    """Build a measure from {"atoms": [...], "density": {...}}."""
    if not isinstance(spec, dict):
        raise ValueError("measure spec must be an object")
    atoms = []
    for i, a in enumerate(spec.get("atoms", [])):
        try:
            atoms.append((float(a["angle"]), float(a["mass"])))
        except (KeyError, TypeError, ValueError):
            raise ValueError(f"measure.atoms[{i}] needs numeric 'angle' and 'mass'") from None
    dens = spec.get("density")
    density = None
    if dens is not None:
        kind = dens.get("type")
        if kind == "uniform":
            density = UniformDensity(float(dens.get("c", dens.get("value", 1.0))))
        elif kind == "step":
            try:
                pieces = tuple(((float(p["interval"][0]), float(p["interval"][1])), float(p["slope"]))
                               for p in dens["pieces"])
            except (KeyError, TypeError, IndexError, ValueError):
                raise ValueError("measure.density.pieces needs 'interval' and 'slope'") from None
            density = StepDensity(pieces)
        elif kind == "power_cusp":
            density = PowerCusp(float(dens.get("center", math.pi)), float(dens["exponent"]),
                                dens.get("scale"))
        else:
            raise ValueError(f"measure.density.type: unknown density type {kind!r}")
    return HerglotzMeasure(tuple(atoms), density)
