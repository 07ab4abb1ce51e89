"""Semigroup flows dz/dt = G(z), the spatial derivative of the flow, and
boundary behavior of the flow maps.

The integrator is an embedded Dormand-Prince 5(4) pair with PI step control,
vectorized so that many trajectories advance together, each with its own
step size.  Two coordinate systems are used:

* plain coordinates ``(z, log v)`` for ordinary trajectories;
* log-polar coordinates ``(s, psi, log v)`` with ``z = e^{-s + i psi}`` for
  orbits started next to the circle.  There ``1 - |z| = -expm1(-s)`` keeps
  full relative accuracy and an orbit sliding along the circle is a straight
  line, so no step is wasted on following its curvature.

Here ``v = d phi_t / dz`` obeys ``d(log v)/dt = G'(z)``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .generator import Generator, classify_boundary
from .unitdisc import (BoundaryPoint, DiskPoint, PointSet, RadialLimitEstimate,
                       extrapolate_radial_limit, radial_grid)

__all__ = [
    "FlowError", "Trajectory", "flow", "flow_many", "flow_from_boundary", "FlowMap",
    "check_semigroup_property", "check_diffeq_identity", "PhiBetaReport",
    "phi_beta_point", "phi_beta_scan", "dilatation_coefficient", "trajectory_csv",
]

LOCAL_TOL = 1e-10

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array(_A[6] + [0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class FlowError(ArithmeticError):
    """Integration failed; ``partial`` holds what was computed."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass
class _Result:
    states: np.ndarray          # (len(times), ncomp, n)
    failed: np.ndarray          # (n,) bool
    steps: np.ndarray
    rejected: np.ndarray
    max_error: float
    history: list = field(default_factory=list)


def _integrate(rhs, y0, times, tol_scale, timescale, *, record=False, max_steps=200_000):
    """Advance all columns of ``y0`` through the checkpoint ``times``.

    ``rhs(y)`` returns dy/dt with NaN marking states outside the disk.
    ``tol_scale(y_old, y_new)`` gives the per-component tolerance and
    ``timescale(y, dy)`` the local time scale used for the underflow test.
    """
    times = np.asarray(times, dtype=float)
    ncomp, n = y0.shape
    out = np.full((times.size, ncomp, n), np.nan + 0j)
    y = y0.astype(complex).copy()
    t = np.zeros(n)
    nxt = np.zeros(n, dtype=int)
    done = times[0] <= 0.0
    while done and nxt[0] < times.size and times[nxt[0]] <= 0.0:
        out[nxt[0]] = y
        nxt[:] += 1
        done = nxt[0] < times.size and times[nxt[0]] <= 0.0
    active = nxt < times.size
    failed = np.zeros(n, dtype=bool)
    steps = np.zeros(n, dtype=int)
    rejected = np.zeros(n, dtype=int)
    k1 = rhs(y)
    bad0 = ~np.all(np.isfinite(k1), axis=0)
    failed |= bad0 & active
    active &= ~bad0
    ts0 = timescale(y, k1)
    h = np.minimum(0.1 * ts0, times[-1])
    h = np.where(np.isfinite(h) & (h > 0), h, 1e-3)
    err_prev = np.ones(n)
    max_err = 0.0
    history = [(0.0, y[:, 0].copy())] if record else []

    while active.any():
        idx = np.nonzero(active)[0]
        yi = y[:, idx]
        target = times[nxt[idx]]
        hi = np.minimum(h[idx], target - t[idx])
        ks = [k1[:, idx]]
        for s in range(1, 7):
            acc = yi.copy()
            for j, a in enumerate(_A[s]):
                if a != 0.0:
                    acc = acc + (hi * a) * ks[j]
            if s == 6:
                y5 = acc
            ks.append(rhs(acc))
        errv = hi * sum(e * k for e, k in zip(_E, ks) if e != 0.0)
        sc = tol_scale(yi, y5)
        ratio = np.abs(errv) / sc
        err = np.max(ratio, axis=0)
        finite = np.all(np.isfinite(y5), axis=0) & np.all(np.isfinite(ks[6]), axis=0)
        err = np.where(finite, err, np.inf)
        ok = err <= 1.0

        # step-size update (PI controller)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            fac = 0.9 * np.power(np.maximum(err, 1e-10), -0.7 / 5) * np.power(err_prev[idx], 0.4 / 5)
        fac = np.where(np.isfinite(fac), np.clip(fac, 0.2, 5.0), 0.25)
        fac = np.where(ok, fac, np.minimum(fac, 0.9))
        fac = np.where(np.isfinite(err), fac, 0.25)

        acc_idx = idx[ok]
        if acc_idx.size:
            y[:, acc_idx] = y5[:, ok]
            k1[:, acc_idx] = ks[6][:, ok]
            t[acc_idx] += hi[ok]
            steps[acc_idx] += 1
            err_prev[acc_idx] = np.maximum(err[ok], 1e-4)
            max_err = max(max_err, float(np.max(err[ok])))
            hit = acc_idx[t[acc_idx] >= times[nxt[acc_idx]] * (1.0 - 1e-15)]
            for i in hit:
                t[i] = times[nxt[i]]
                out[nxt[i], :, i] = y[:, i]
                nxt[i] += 1
            if record and ok[0] and idx[0] == 0:
                history.append((float(t[0]), y[:, 0].copy()))
        rej_idx = idx[~ok]
        rejected[rej_idx] += 1
        h_old = h[idx]
        # a checkpoint may have shortened an accepted step; do not let that stick
        h[idx] = np.where(ok & (hi < h_old), np.maximum(hi * fac, h_old), hi * fac)

        # underflow relative to the local time scale, and runaway step counts
        tsc = timescale(y[:, idx], k1[:, idx])
        under = (~ok) & (h[idx] < 1e-12 * tsc)
        runaway = steps[idx] + rejected[idx] > max_steps
        dead = idx[under | runaway]
        failed[dead] = True
        active[dead] = False
        active[idx] &= nxt[idx] < times.size
    return _Result(out, failed, steps, rejected, max_err, history)


# --- plain coordinates ---------------------------------------------------------

def _plain_system(G: Generator):
    def rhs(y):
        z = y[0]
        inside = np.abs(z) < 1.0 - 1e-15
        g, dg = G.pair(PointSet(z=np.where(inside, z, 0.0)))
        g = np.where(inside, g, np.nan)
        dg = np.where(inside, dg, np.nan)
        return np.vstack([g, dg])

    def tol_scale(y0, y1):
        mag = np.maximum(np.abs(y0), np.abs(y1))
        return LOCAL_TOL * (1.0 + mag)

    def timescale(y, dy):
        room = np.maximum(1.0 - np.abs(y[0]), 1e-16)
        with np.errstate(divide="ignore"):
            return room / np.maximum(np.abs(dy[0]), 1e-300)

    return rhs, tol_scale, timescale


@dataclass(frozen=True)
class Trajectory:
    """Accepted steps of one orbit; v approximates the derivative of the flow."""

    z0: DiskPoint
    t: np.ndarray
    z: np.ndarray
    v: np.ndarray
    steps: int
    rejected: int
    max_local_error: float

    @property
    def samples(self):
        return [(float(t), DiskPoint.of(z), complex(v)) for t, z, v in zip(self.t, self.z, self.v)]

    @property
    def final(self):
        return complex(self.z[-1]), complex(self.v[-1])


def flow(G: Generator, z0, t_end: float, with_variational: bool = True) -> Trajectory:
    """Integrate one orbit from z0 up to t_end, keeping every accepted step."""
    z0 = DiskPoint.of(z0)
    t_end = float(t_end)
    if not t_end >= 0:
        raise ValueError("t_end must be nonnegative")
    rhs, tol, tsc = _plain_system(G)
    y0 = np.array([[z0.z], [0.0]], dtype=complex)
    if t_end == 0.0:
        return Trajectory(z0, np.array([0.0]), np.array([z0.z]), np.array([1.0 + 0j]), 0, 0, 0.0)
    res = _integrate(rhs, y0, [t_end], tol, tsc, record=True)
    ts = np.array([h[0] for h in res.history])
    zs = np.array([h[1][0] for h in res.history])
    vs = np.exp(np.array([h[1][1] for h in res.history]))
    if not with_variational:
        vs = np.full(zs.shape, np.nan + 0j)
    traj = Trajectory(z0, ts, zs, vs, int(res.steps[0]), int(res.rejected[0]), res.max_error)
    if res.failed[0]:
        raise FlowError(f"step underflow at t={ts[-1]:.6g}", traj)
    return traj


def flow_many(G: Generator, z0, times):
    """phi_t(z0) and its derivative for arrays of z0 at checkpoint times.

    Returns ``(z, v)`` with shape ``(len(times),) + shape(z0)``; failed orbits
    are NaN.
    """
    z0 = np.asarray(z0, dtype=complex)
    if np.any(np.abs(z0) >= 1.0):
        raise ValueError("initial points must lie in the open disk")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0) or np.any(np.diff(times) <= 0):
        raise ValueError("times must be nonnegative and increasing")
    rhs, tol, tsc = _plain_system(G)
    flat = z0.ravel()
    y0 = np.vstack([flat, np.zeros_like(flat)])
    res = _integrate(rhs, y0, times, tol, tsc)
    z = res.states[:, 0, :].reshape(times.shape + z0.shape)
    v = np.exp(res.states[:, 1, :]).reshape(times.shape + z0.shape)
    return z, v


# --- log-polar coordinates -----------------------------------------------------

def _polar_points(s, psi):
    room = -np.expm1(-s.real)
    return PointSet(theta=psi.real, delta=room * np.exp(1j * psi.real))


def _polar_system(G: Generator, s_floor, tol=LOCAL_TOL):
    def rhs(y):
        s = y[0].real
        inside = s > s_floor
        s_safe = np.where(inside, s, 1.0)
        pts = _polar_points(s_safe, y[1])
        g, dg = G.pair(pts)
        q = g / pts.z
        out = np.vstack([-q.real + 0j, q.imag + 0j, dg])
        out[:, ~inside] = np.nan
        return out

    def tol_scale(y0, y1):
        sc = np.empty(y0.shape)
        sc[0] = tol * np.minimum(np.abs(y0[0]), np.abs(y1[0])) + 1e-300
        sc[1] = tol
        sc[2] = tol * (1.0 + np.maximum(np.abs(y0[2]), np.abs(y1[2])))
        return sc

    def timescale(y, dy):
        with np.errstate(divide="ignore", invalid="ignore"):
            ts = np.abs(y[0]) / np.abs(dy[0])
            ts = np.minimum(ts, 1.0 / np.maximum(np.abs(dy[1]), 1e-300))
        return np.where(np.isfinite(ts), ts, 1.0)

    return rhs, tol_scale, timescale


@dataclass(frozen=True)
class BoundaryFlow:
    """Flow images of radial starting points, stored in log-polar form."""

    s: np.ndarray       # -log|phi_t|, shape (len(times), n)
    psi: np.ndarray     # arg phi_t
    v: np.ndarray       # phi_t'
    failed: np.ndarray

    @property
    def z(self):
        return np.exp(-self.s + 1j * self.psi)

    @property
    def one_minus_abs(self):
        return -np.expm1(-self.s)


def flow_from_boundary(G: Generator, theta, eps, times, *, tol: float = LOCAL_TOL) -> BoundaryFlow:
    """Flow the points (1 - eps) e^{i theta} (arrays, broadcast) to each time."""
    theta, eps = np.broadcast_arrays(np.asarray(theta, float), np.asarray(eps, float))
    theta, eps = theta.ravel(), eps.ravel()
    if np.any(eps <= 0) or np.any(eps >= 1):
        raise ValueError("eps must lie in (0, 1)")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    s0 = -np.log1p(-eps)
    floor = min(1e-15, 0.5 * float(s0.min()))
    rhs, scale, tsc = _polar_system(G, floor, tol)
    y0 = np.vstack([s0 + 0j, theta + 0j, np.zeros(theta.size, dtype=complex)])
    res = _integrate(rhs, y0, times, scale, tsc)
    st = res.states
    return BoundaryFlow(st[:, 0].real, st[:, 1].real, np.exp(st[:, 2]), res.failed)


class FlowMap:
    """The map z -> phi_t(z), evaluated accurately on radial point sets."""

    def __init__(self, G: Generator, t: float):
        self.G = G
        self.t = float(t)

    def __call__(self, pts):
        if isinstance(pts, PointSet) and pts.anchored:
            theta = np.broadcast_to(pts.theta, pts.z.shape)
            eps = pts.one_minus_abs()
            bf = flow_from_boundary(self.G, theta, eps, [self.t])
            room = bf.one_minus_abs[0]
            return PointSet(theta=bf.psi[0], delta=room * np.exp(1j * bf.psi[0]))
        z, _ = flow_many(self.G, PointSet.coerce(pts).z, [self.t])
        return z[0]


def check_semigroup_property(G: Generator, z0, t: float, s: float) -> float:
    """|phi_{t+s}(z0) - phi_t(phi_s(z0))|."""
    if t < 0 or s < 0:
        raise ValueError("t and s must be nonnegative")
    a = flow(G, z0, t + s).final[0]
    mid = flow(G, z0, s).final[0]
    b = flow(G, mid, t).final[0]
    return abs(a - b)


def check_diffeq_identity(G: Generator, z0, t: float) -> float:
    """|phi_t'(z0) G(z0) - G(phi_t(z0))|."""
    z0 = DiskPoint.of(z0)
    z, v = flow(G, z0, t).final
    return abs(v * G(z0.z) - G(z))


# --- boundary behavior of the flow maps --------------------------------------------

@dataclass(frozen=True)
class PhiBetaReport:
    t: float
    is_beta_point: bool
    sigma_t: complex
    beta_mass: RadialLimitEstimate
    second_derivative: RadialLimitEstimate
    A: complex
    prediction: complex
    mismatch: float
    note: str = ""


def _screen(G, thetas, ts):
    """Cheap pass: True where |phi_t'|/eps might still converge.

    Away from beta-points phi_t' has a nonzero radial limit, so |v|/eps
    doubles with each halving of eps; such angles are settled here.
    """
    eps = radial_grid(6, 9)
    th_grid, eps_grid = np.meshgrid(thetas, eps, indexing="ij")
    bf = flow_from_boundary(G, th_grid, eps_grid, np.sort(ts), tol=1e-7)
    q = (np.abs(bf.v) / eps_grid.ravel()).reshape(ts.size, thetas.size, eps.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        growth = q[:, :, -1] / q[:, :, -2]
    failed = bf.failed.reshape(thetas.size, eps.size).any(axis=1)
    return failed | ~np.all(growth > 1.5, axis=0)


def phi_beta_scan(G: Generator, thetas, ts, *, k_min: int = 6, k_max: int = 20,
                  A=None, screen: bool = True) -> list:
    """phi_t beta-point reports for every angle in ``thetas`` and t in ``ts``.

    Orbits for all angles and radii are integrated together and the
    checkpoint times share one integration.  With ``screen`` a coarse pass
    first settles the angles where |phi_t'|/eps visibly blows up; those get
    a report with is_beta_point False and note "screened".  ``A`` (per angle,
    the limit of G(z)(z - x)) feeds the prediction G(sigma_t)/A.
    Returns ``reports[i][j]`` for angle i and time j.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts <= 0):
        raise ValueError("t must be positive")
    if A is None:
        A = np.full(thetas.size, np.nan + 0j)
    A = np.asarray(A, dtype=complex)
    keep = _screen(G, thetas, ts) if screen else np.ones(thetas.size, dtype=bool)
    nan_est = RadialLimitEstimate(complex("nan"), math.inf, False, 1.0)
    reports = [[PhiBetaReport(float(t), False, complex("nan"), nan_est, nan_est, complex(A[i]),
                              complex("nan"), math.nan, "screened") for t in ts]
               for i in range(thetas.size)]
    cand = np.nonzero(keep)[0]
    if cand.size == 0:
        return reports
    order = np.argsort(ts)
    eps = radial_grid(k_min, k_max)
    th_grid, eps_grid = np.meshgrid(thetas[cand], eps, indexing="ij")
    bf = flow_from_boundary(G, th_grid, eps_grid, ts[order])
    ne = eps.size
    for c, i in enumerate(cand):
        th = thetas[i]
        x = complex(math.cos(th), math.sin(th))
        cols = slice(c * ne, (c + 1) * ne)
        failed = bool(bf.failed[cols].any())
        for jj, j in enumerate(order):
            z = bf.z[jj, cols]
            v = bf.v[jj, cols]
            sig = extrapolate_radial_limit(eps=eps, values=z)
            beta = extrapolate_radial_limit(eps=eps, values=np.abs(v) / eps)
            sec = extrapolate_radial_limit(eps=eps, values=-v / (eps * x))
            ok = (not failed) and sig.converged and beta.finite and sec.finite \
                and abs(sig.value) < 1.0
            pred = complex("nan")
            mism = math.nan
            if ok and np.isfinite(A[i]) and abs(A[i]) > 0:
                pred = complex(G(sig.value)) / A[i]
                mism = float(abs(sec.value - pred) / max(abs(pred), 1e-300))
            reports[i][j] = PhiBetaReport(float(ts[j]), bool(ok), complex(sig.value), beta, sec,
                                          complex(A[i]), pred, mism,
                                          "flow failed" if failed else "")
    return reports


def phi_beta_point(G: Generator, x, t: float, *, k_min: int = 6, k_max: int = 20) -> PhiBetaReport:
    """Is x a beta-point of phi_t, and does phi_t'' obey the predicted limit?

    The flow verdict is computed on its own; the generator classification is
    used only for the constant A in the prediction.
    """
    xb = BoundaryPoint.of(x)
    cls = classify_boundary(G, xb)
    A = -cls.a if cls.is_pole else complex("nan")
    return phi_beta_scan(G, [xb.angle], [t], k_min=k_min, k_max=k_max, A=[A])[0][0]


def dilatation_coefficient(f, x, *, k_min: int = 3, k_max: int = 20) -> RadialLimitEstimate:
    """Radial limit of (1 - |f(z)|)/(1 - |z|) at x.

    ``f`` takes a radial :class:`PointSet` and returns either a PointSet
    (preferred: keeps 1 - |f| accurate) or an array of values.
    """
    xb = BoundaryPoint.of(x)
    eps = radial_grid(k_min, k_max)
    out = f(PointSet.radial(xb.angle, eps))
    if isinstance(out, PointSet):
        room = out.one_minus_abs()
    else:
        room = 1.0 - np.abs(np.asarray(out))
    return extrapolate_radial_limit(eps=eps, values=np.asarray(room) / eps)


def trajectory_csv(traj: Trajectory) -> str:
    """CSV text with header t,re,im,v_re,v_im and one row per accepted step."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "re", "im", "v_re", "v_im"])
    for t, z, v in zip(traj.t, traj.z, traj.v):
        w.writerow([repr(float(t)), repr(float(z.real)), repr(float(z.imag)), repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()
