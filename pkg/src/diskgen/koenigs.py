"""The Koenigs function of a semigroup and its boundary behavior.

For an interior Denjoy-Wolff point tau the Koenigs function is

    h(z) = (z - tau) exp( integral_tau^z [G'(tau)/G(w) - 1/(w - tau)] dw ),

so that h(tau) = 0, h'(tau) = 1 and h' G = G'(tau) h.  For a boundary
Denjoy-Wolff point h(z) = integral_0^z dw / G(w), so that h' G = 1.  The path
integrals use Gauss-Legendre panels: a straight segment from the base point,
and near the circle geometric panels along the radius in the distance to the
circle, with the integrand evaluated at anchored points.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .generator import Generator, classify_boundary
from .quadrature import gauss_legendre
from .unitdisc import (BoundaryPoint, PointSet, RadialLimitEstimate, extrapolate_log_limit,
                       extrapolate_radial_limit, radial_grid)

__all__ = [
    "KoenigsMap", "koenigs", "HBetaReport", "h_beta_point", "h_beta_scan", "beta_number",
    "NullPointAsymptotics", "null_point_asymptotics", "boundary_argument", "boundary_csv",
    "max_identity_residual",
]

INTERIOR = "interior"
BOUNDARY = "boundary"

_SEG_PANELS = 12
_SEG_NODES = 20
_RAD_NODES = 24
_E_REF = 0.125


@dataclass(frozen=True)
class KoenigsMap:
    G: Generator
    regime: str
    g_prime_tau: complex = 0j

    @property
    def base(self) -> complex:
        return self.G.tau.z if self.regime == INTERIOR else 0j

    # integrand of the path integral, on a PointSet
    def _integrand(self, pts: PointSet):
        g = self.G(pts)
        if self.regime == INTERIOR:
            return self.g_prime_tau / g - 1.0 / (pts.z - self.base)
        return 1.0 / g

    def _segment(self, start, end):
        """integral from start to end (arrays, broadcast) along straight segments."""
        x, w = gauss_legendre(_SEG_NODES)
        start, end = np.broadcast_arrays(np.asarray(start, complex), np.asarray(end, complex))
        u0 = np.arange(_SEG_PANELS) / _SEG_PANELS
        u = (u0[:, None] + (x[None, :] + 1.0) / (2 * _SEG_PANELS)).ravel()
        wt = np.tile(w, _SEG_PANELS) / (2 * _SEG_PANELS)
        d = end - start
        zeta = start[..., None] + d[..., None] * u
        f = np.asarray(self._integrand(PointSet(z=zeta)))
        return d * (f @ wt)

    def _graded_nodes(self, z):
        """Quadrature nodes (as fractions of the path) and weights from the base to z."""
        length = abs(z - self.base)
        room = 1.0 - abs(z)
        # breakpoints accumulate at z on the scale of its distance to the circle
        tail = []
        r = room / length
        while r < 0.5:
            tail.append(1.0 - r)
            r *= 2.0
        u = np.unique(np.concatenate([np.linspace(0.0, 1.0, 9), tail, [1.0]]))
        x, w = gauss_legendre(_SEG_NODES)
        a, c = u[:-1], u[1:]
        nodes = (0.5 * (a + c))[:, None] + (0.5 * (c - a))[:, None] * x[None, :]
        wts = (0.5 * (c - a))[:, None] * w[None, :]
        return nodes.ravel(), wts.ravel()

    def log_part(self, z):
        """The path integral I(z) (so h = (z - tau) e^I or h = I)."""
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        b = self.base
        out = np.zeros(flat.shape, dtype=complex)
        live = np.nonzero(flat != b)[0]
        if live.size:
            parts = [self._graded_nodes(flat[i]) for i in live]
            counts = np.array([p[0].size for p in parts])
            nodes = np.concatenate([p[0] for p in parts])
            wts = np.concatenate([p[1] for p in parts])
            ends = np.repeat(flat[live], counts)
            # one integrand call for every path at once
            f = np.asarray(self._integrand(PointSet(z=b + (ends - b) * nodes)))
            starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
            out[live] = (flat[live] - b) * np.add.reduceat(f * wts, starts)
        return out.reshape(z.shape)

    def _assemble(self, z, integral):
        if self.regime == INTERIOR:
            return (z - self.base) * np.exp(integral)
        return integral

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        h = self._assemble(z, self.log_part(z))
        return complex(h) if h.ndim == 0 else h

    def derivative(self, z, h=None):
        """h' from the defining identity."""
        z = np.asarray(z, dtype=complex)
        if h is None:
            h = self(z)
        g = self.G(z)
        if self.regime == INTERIOR:
            out = self.g_prime_tau * np.asarray(h) / g
        else:
            out = 1.0 / np.asarray(g)
        return complex(out) if np.ndim(out) == 0 else out

    def cauchy_derivative(self, z, n: int = 24):
        """h'(z) from a Cauchy integral on a small circle (independent of G)."""
        z = np.asarray(z, dtype=complex)
        r = 0.25 * (1.0 - np.abs(z))
        ang = 2.0 * np.pi * np.arange(n) / n
        ring = z[..., None] + r[..., None] * np.exp(1j * ang)
        vals = np.asarray(self(ring))
        out = np.mean(vals * np.exp(-1j * ang), axis=-1) / r
        return complex(out) if out.ndim == 0 else out

    def identity_residual(self, z):
        """|h'G - G'(tau) h| (interior) or |h'G - 1| (boundary), with h' from
        the Cauchy integral."""
        z = np.asarray(z, dtype=complex)
        dh = self.cauchy_derivative(z)
        g = self.G(z)
        if self.regime == INTERIOR:
            out = np.abs(dh * g - self.g_prime_tau * np.asarray(self(z)))
        else:
            out = np.abs(dh * g - 1.0)
        return float(out) if out.ndim == 0 else out

    def radial(self, theta, eps):
        """h and h' at (1 - eps) e^{i theta} for arrays theta (n,) and eps (m,).

        eps must be a decreasing grid of powers of two below 1/8.  Returns
        ``(h, dh, integral)`` of shape (n, m).
        """
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        eps = np.atleast_1d(np.asarray(eps, dtype=float))
        if np.any(eps > _E_REF) or np.any(np.diff(eps) >= 0):
            raise ValueError("eps must decrease and stay below 1/8")
        x = np.exp(1j * theta)
        z_ref = (1.0 - _E_REF) * x
        seg = self._segment(self.base, z_ref)                        # (n,)
        # geometric panels in e = 1 - |z|, from E_REF down to min(eps)
        kmax = int(round(-math.log2(eps[-1])))
        edges = np.ldexp(1.0, -np.arange(3, kmax + 1))                 # 1/8 ... eps_min
        edges = np.unique(np.concatenate([edges, eps]))[::-1]
        gx, gw = gauss_legendre(_RAD_NODES)
        hi, lo = edges[:-1], edges[1:]
        e_nodes = (0.5 * (hi + lo))[:, None] + (0.5 * (hi - lo))[:, None] * gx[None, :]
        e_w = (0.5 * (hi - lo))[:, None] * gw[None, :]
        e_flat = e_nodes.ravel()
        pts = PointSet(theta=np.repeat(theta, e_flat.size),
                       delta=(np.tile(e_flat, theta.size) * np.repeat(x, e_flat.size)))
        f = np.asarray(self._integrand(pts)).reshape(theta.size, hi.size, _RAD_NODES)
        # dz = -x de, integrating from e = hi down to lo gives + x * sum f w
        panel = x[:, None] * np.einsum("npk,pk->np", f, e_w)
        cum = np.cumsum(panel, axis=1)
        pos = np.searchsorted(-lo, -eps)
        integral = seg[:, None] + cum[:, pos]
        z = (1.0 - eps)[None, :] * x[:, None]
        if self.regime == INTERIOR:
            h = (z - self.base) * np.exp(integral)
        else:
            h = integral
        delta = eps[None, :] * x[:, None]
        g = self.G(PointSet(theta=np.repeat(theta, eps.size), delta=delta.ravel())).reshape(h.shape)
        if self.regime == INTERIOR:
            dh = self.g_prime_tau * h / g
        else:
            dh = 1.0 / g
        return h, dh, integral


def koenigs(G: Generator) -> KoenigsMap:
    """The Koenigs function of the semigroup generated by G."""
    if G.boundary_tau:
        return KoenigsMap(G, BOUNDARY)
    gp = G.derivative_at_tau()
    if gp == 0:
        raise ValueError("G'(tau) = 0: the generator vanishes identically")
    return KoenigsMap(G, INTERIOR, complex(gp))


def _radial_k_max(K: KoenigsMap, k_max):
    # reciprocal and density-backed p lose digits near their zeros; stop earlier
    if k_max is not None:
        return k_max
    return 30 if K.G.closed_form else 24


@dataclass(frozen=True)
class HBetaReport:
    is_beta_point: bool
    h_at_x: complex
    beta_mass: RadialLimitEstimate
    second_derivative: RadialLimitEstimate
    A: complex
    prediction: complex
    mismatch: float
    beta_number: float = math.nan


def h_beta_scan(K: KoenigsMap, thetas, *, k_min: int = 3, k_max: int | None = None, A=None) -> list:
    """h beta-point reports for many boundary angles at once."""
    k_max = _radial_k_max(K, k_max)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    eps = radial_grid(k_min, k_max)
    h, dh, _ = K.radial(thetas, eps)
    if A is None:
        A = np.full(thetas.size, np.nan + 0j)
    A = np.asarray(A, dtype=complex)
    out = []
    for i, th in enumerate(thetas):
        x = complex(math.cos(th), math.sin(th))
        hx = extrapolate_radial_limit(eps=eps, values=h[i])
        beta = extrapolate_radial_limit(eps=eps, values=np.abs(dh[i]) / eps)
        sec = extrapolate_radial_limit(eps=eps, values=-dh[i] / (eps * x))
        ok = hx.finite and beta.finite and sec.finite
        pred = complex("nan")
        mism = math.nan
        bn = math.nan
        if ok and np.isfinite(A[i]) and abs(A[i]) > 0:
            if K.regime == INTERIOR:
                pred = hx.value * K.g_prime_tau / A[i]
            else:
                pred = 1.0 / A[i]
            mism = float(abs(sec.value - pred) / max(abs(pred), 1e-300))
            if K.regime == INTERIOR and K.base == 0:
                bn = 2.0 * abs(hx.value) * abs(A[i])
        out.append(HBetaReport(bool(ok), complex(hx.value), beta, sec, complex(A[i]), pred, mism, bn))
    return out


def h_beta_point(K: KoenigsMap, x, **kw) -> HBetaReport:
    """Is x a beta-point of h, and does h'' approach the predicted value?"""
    xb = BoundaryPoint.of(x)
    cls = classify_boundary(K.G, xb)
    A = -cls.a if cls.is_pole else complex("nan")
    return h_beta_scan(K, [xb.angle], A=[A], **kw)[0]


def beta_number(K: KoenigsMap, x) -> float:
    """2 |h(x)| A for a star-like map (tau = 0) at a beta-point x."""
    if K.regime != INTERIOR or K.base != 0:
        raise ValueError("the beta-number formula needs an interior Denjoy-Wolff point at 0")
    rep = h_beta_point(K, x)
    if not rep.is_beta_point:
        raise ValueError("x is not a beta-point of h")
    return rep.beta_number


@dataclass(frozen=True)
class NullPointAsymptotics:
    rho: RadialLimitEstimate
    a_limit: RadialLimitEstimate
    expected_a: complex
    ell: float
    ell_check: float
    divergence_exponent: float


def null_point_asymptotics(K: KoenigsMap, x, ell: float | None = None, *, k_min: int = 3,
                           k_max: int = 40) -> NullPointAsymptotics:
    """Logarithmic growth of h at a regular null point x with dilation ell.

    rho is the limit of log|h| / (Re G'(tau) log eps) (interior) or of
    Re h / log eps (boundary) and should equal 1/ell.  The companion limit
    h'(z)(z - x)/h(z) -> G'(tau)/ell (interior) or h'(z)(z - x) -> 1/ell.
    """
    xb = BoundaryPoint.of(x)
    if ell is None:
        cls = classify_boundary(K.G, xb)
        if not cls.is_null_point:
            raise ValueError(f"x is not a regular null point ({cls.tag})")
        ell = cls.dilation
    if not ell > 0:
        raise ValueError("dilation must be positive")
    eps = radial_grid(k_min, k_max)
    h, dh, integral = K.radial([xb.angle], eps)
    h, dh, integral = h[0], dh[0], integral[0]
    z_minus_x = -eps * xb.x
    if K.regime == INTERIOR:
        log_abs_h = np.log(np.abs((1.0 - eps) * xb.x - K.base)) + integral.real
        quotient = log_abs_h / (K.g_prime_tau.real * np.log(eps))
        a_vals = dh * z_minus_x / h
        expected = K.g_prime_tau / ell
    else:
        quotient = h.real / np.log(eps)
        a_vals = dh * z_minus_x
        expected = 1.0 / ell
    cut = min(eps.size, 22 - k_min + 1)
    rho = extrapolate_log_limit(eps=eps, values=quotient, rtol=1e-4)
    a_est = extrapolate_radial_limit(eps=eps[:cut], values=a_vals[:cut])
    grow = extrapolate_radial_limit(eps=eps, values=np.abs(h))
    ell_check = 1.0 / rho.value.real if rho.value.real != 0 else math.inf
    return NullPointAsymptotics(rho, a_est, complex(expected), float(ell), ell_check,
                                grow.divergence_exponent if not grow.converged else 0.0)


def boundary_argument(K: KoenigsMap, t, *, k_min: int = 3, k_max: int | None = None):
    """Radial limit of arg h((1 - eps) e^{it}), continuous along the radius.

    Needs the star-like normalization tau = 0.  Accepts a scalar or an array
    of angles and returns one estimate per angle.
    """
    if K.regime != INTERIOR or K.base != 0:
        raise ValueError("boundary argument needs an interior Denjoy-Wolff point at 0")
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    eps = radial_grid(k_min, _radial_k_max(K, k_max))
    _, _, integral = K.radial(ts, eps)
    # arg z is exactly t on the radius, and the integral is continuous
    args = ts[:, None] + integral.imag
    est = [extrapolate_radial_limit(eps=eps, values=a) for a in args]
    return est[0] if np.ndim(t) == 0 else est


def max_identity_residual(K: KoenigsMap, n_radii: int = 30, n_angles: int = 16, r_max: float = 0.9) -> float:
    """Largest defining-identity residual on a polar grid."""
    r = np.linspace(r_max / n_radii, r_max, n_radii)
    a = 2 * np.pi * np.arange(n_angles) / n_angles
    z = (r[:, None] * np.exp(1j * a)[None, :]).ravel()
    if K.regime == INTERIOR:
        z = z[np.abs(z - K.base) >= 1e-3]
    res = K.identity_residual(z)
    h = np.abs(K(z)) if K.regime == INTERIOR else 0.0
    return float(np.max(res / (1.0 + h)))


def boundary_csv(K: KoenigsMap, thetas, residual: float | None = None) -> str:
    """CSV rows theta,upsilon,abs_h plus a footer with the identity residual."""
    thetas = np.asarray(thetas, dtype=float)
    # the boundary argument is only meaningful for the star-like case tau = 0
    star = K.regime == INTERIOR and K.base == 0
    ups = [u.value.real for u in boundary_argument(K, thetas)] if star else [math.nan] * thetas.size
    eps = radial_grid(3, _radial_k_max(K, None))
    h, _, _ = K.radial(thetas, eps)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "upsilon", "abs_h"])
    for th, u, hrow in zip(thetas, ups, h):
        est = extrapolate_radial_limit(eps=eps, values=hrow)
        w.writerow([repr(float(th)), repr(float(u)), repr(float(abs(est.value)))])
    if residual is None:
        residual = max_identity_residual(K)
    buf.write(f"# max_identity_residual={residual:.3e}\n")
    return buf.getvalue()
