"""Radial multi-slit semigroups.

With tau = 0 and

    p(z) = sum_j mu_j (a_j + z) / (a_j - z),   sum mu_j = 1,

the Koenigs image is the plane minus m radial slits.  p has exactly one zero
b_j on each arc between consecutive poles, and 1/p has the same form with
weights sigma_j at the b_j.  G = -z p has regular poles of mass 2 mu_j at the
a_j and regular null points of dilation 1/(2 sigma_j) at the b_j.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .flow import FlowMap, dilatation_coefficient
from .generator import AtomicP, Generator, classify_boundary
from .unitdisc import TWO_PI, PointSet, chord, radial_grid, wrap_angle

__all__ = [
    "SlitSystem", "from_pole_atoms", "from_tips", "TipGaps", "find_zeros", "dual_atoms",
    "SlitCheck", "verify_slit_classification", "TruncationStudy", "TruncationRow",
    "example_no_tip", "slit_report",
]


@dataclass(frozen=True)
class SlitSystem:
    a: tuple            # pole angles, increasing in [0, 2pi)
    mu: tuple
    b: tuple = ()       # zero angles, b[j] on the arc (a[j], a[j+1])
    sigma: tuple = ()
    tips: tuple = ()

    @property
    def m(self) -> int:
        return len(self.a)

    def p(self) -> AtomicP:
        return AtomicP(self.a, self.mu)

    def reciprocal_p(self) -> AtomicP:
        return AtomicP(self.b, self.sigma)

    def generator(self) -> Generator:
        return Generator(0.0, self.p(), f"slits(m={self.m})")


def _im_p_on_arc(angles, weights, start, u):
    """Im p(e^{i(start + u)}) = sum w cot((start + u - a)/2), accurate near start."""
    total = np.zeros_like(u)
    for a, w in zip(angles, weights):
        off = math.remainder(start - a, TWO_PI)
        total = total + w / np.tan(0.5 * (u + off))
    return total


def find_zeros(angles, weights) -> tuple:
    """Zeros of sum w (e^{ia} + z)/(e^{ia} - z) on the circle, one per arc.

    On the circle the sum is i * sum w cot((theta - a)/2), which falls from
    +inf to -inf across each arc between consecutive poles; bisection in the
    offset from the arc start brackets exactly one root per arc.
    """
    order = np.argsort(np.mod(angles, TWO_PI))
    a = [wrap_angle(angles[i]) for i in order]
    w = [float(weights[i]) for i in order]
    m = len(a)
    roots = []
    for j in range(m):
        start = a[j]
        length = (a[(j + 1) % m] - start) % TWO_PI if m > 1 else TWO_PI
        lo, hi = 0.0, length
        f_lo = _im_p_on_arc(a, w, start, np.array([length * 1e-12]))[0]
        f_hi = _im_p_on_arc(a, w, start, np.array([length * (1 - 1e-12)]))[0]
        if not (f_lo > 0 > f_hi):
            raise RuntimeError(f"zero not bracketed on arc {j}: f={f_lo:.3g}, {f_hi:.3g}")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _im_p_on_arc(a, w, start, np.array([mid]))[0] > 0:
                lo = mid
            else:
                hi = mid
        roots.append(wrap_angle(start + 0.5 * (lo + hi)))
    return tuple(roots)


def dual_atoms(S: SlitSystem) -> tuple:
    """(b_j, sigma_j) with sigma_j = -1/(2 b_j p'(b_j)), the residue weights of 1/p."""
    b = S.b if S.b else find_zeros(S.a, S.mu)
    out = []
    for bj in b:
        xb = complex(math.cos(bj), math.sin(bj))
        dp = 0j
        for a, w in zip(S.a, S.mu):
            ea = complex(math.cos(a), math.sin(a))
            d = complex(chord(a, bj))
            dp += w * 2.0 * ea / (d * d)
        s = -1.0 / (2.0 * xb * dp)
        if abs(s.imag) > 1e-8 * max(1.0, abs(s)):
            raise RuntimeError(f"complex residue weight {s} at angle {bj}")
        out.append((bj, s.real))
    return tuple(out)


def from_pole_atoms(atoms, *, normalize: bool = False):
    """Slit system and generator G = -z p from pole atoms (angle, mass)."""
    atoms = [(float(a["angle"]), float(a["mass"])) if isinstance(a, dict) else (float(a[0]), float(a[1]))
             for a in atoms]
    if not atoms:
        raise ValueError("need at least one pole atom")
    atoms.sort(key=lambda t: wrap_angle(t[0]))
    angles = [wrap_angle(t[0]) for t in atoms]
    masses = np.array([t[1] for t in atoms])
    if np.any(masses <= 0):
        raise ValueError("pole masses must be positive")
    for j in range(len(angles)):
        gap = (angles[(j + 1) % len(angles)] - angles[j]) % TWO_PI
        if len(angles) > 1 and (gap < 1e-12 or gap > TWO_PI - 1e-12):
            raise ValueError("coincident pole angles")
    total = masses.sum()
    if abs(total - 1.0) > 1e-12:
        if not normalize:
            raise ValueError(f"pole masses sum to {total}, not 1 (use normalize)")
        masses = masses / total
    S = SlitSystem(tuple(angles), tuple(masses))
    duals = dual_atoms(S)
    S = SlitSystem(S.a, S.mu, tuple(d[0] for d in duals), tuple(d[1] for d in duals))
    return S, S.generator()


@dataclass(frozen=True)
class TipGaps:
    tips: tuple         # starting with the tip closest to angle pi, then clockwise
    sigma: tuple


def from_tips(tip_angles) -> TipGaps:
    """Gap fractions between consecutive slit tips, taken clockwise.

    The first tip is the one closest to the negative real axis; each sigma_j
    is the angle from tip j to tip j+1 (clockwise) over 2pi.
    """
    tips = [wrap_angle(t) for t in tip_angles]
    if not tips:
        raise ValueError("need at least one tip")
    for i in range(len(tips)):
        for j in range(i):
            if abs(math.remainder(tips[i] - tips[j], TWO_PI)) < 1e-12:
                raise ValueError("duplicate tip angles")
    if len(tips) == 1:
        return TipGaps(tuple(tips), (1.0,))
    first = min(tips, key=lambda t: (math.cos(t), -math.sin(t)))
    # clockwise = decreasing angle measured from the first tip
    ordered = sorted(tips, key=lambda t: (first - t) % TWO_PI)
    gaps = [((ordered[j] - ordered[(j + 1) % len(ordered)]) % TWO_PI) / TWO_PI
            for j in range(len(ordered))]
    gaps[-1] = 1.0 - sum(gaps[:-1])
    return TipGaps(tuple(ordered), tuple(gaps))


@dataclass(frozen=True)
class SlitCheck:
    masses: tuple
    expected_masses: tuple
    dilation_direct: tuple
    dilation_residue: tuple
    dilation_flow: tuple
    expected_dilations: tuple
    tags_a: tuple
    tags_b: tuple
    max_mass_error: float
    max_dilation_error: float
    passed: bool


def verify_slit_classification(S: SlitSystem, G: Generator | None = None, *, t: float = 1.0,
                               tol: float = 1e-6) -> SlitCheck:
    """Masses 2 mu_j at the poles and dilations 1/(2 sigma_j) at the zeros.

    Dilations are computed three ways: the classifier's limit of G(z)/(z - b),
    the residue value -b p'(b), and log(dilatation of phi_t at b)/t, with t
    shortened to 1/(2 ell) for strongly repelling points.
    """
    G = S.generator() if G is None else G
    ca = [classify_boundary(G, a) for a in S.a]
    cb = [classify_boundary(G, b) for b in S.b]
    masses = tuple(c.mass for c in ca)
    exp_m = tuple(2.0 * m for m in S.mu)
    direct = tuple(c.dilation for c in cb)
    residue = tuple(1.0 / (2.0 * s) for s in S.sigma)
    # -b p'(b) equals 1/(2 sigma) by the residue formula; recompute from p
    res_vals = []
    for bj in S.b:
        xb = complex(math.cos(bj), math.sin(bj))
        dp = sum(w * 2.0 * complex(math.cos(a), math.sin(a)) / complex(chord(a, bj)) ** 2
                 for a, w in zip(S.a, S.mu))
        res_vals.append((-xb * dp).real)
    flows = []
    for bj, rv in zip(S.b, res_vals):
        # keep e^{ell t} moderate so the radial samples stay in the asymptotic regime
        tj = min(t, 0.5 / rv) if rv > 0 else t
        est = dilatation_coefficient(FlowMap(G, tj), bj, k_min=6, k_max=20)
        flows.append(math.log(est.value.real) / tj if est.converged and est.value.real > 0 else math.nan)
    exp_d = residue
    m_err = max(abs(m - e) / e for m, e in zip(masses, exp_m))
    d_err = 0.0
    for route in (direct, tuple(res_vals), tuple(flows)):
        for v, e in zip(route, exp_d):
            d_err = max(d_err, abs(v - e) / e if math.isfinite(v) else math.inf)
    ok = (all(c.is_pole for c in ca) and all(c.is_null_point for c in cb)
          and m_err <= tol and d_err <= tol)
    return SlitCheck(masses, exp_m, direct, tuple(res_vals), tuple(flows), exp_d,
                     tuple(c.tag for c in ca), tuple(c.tag for c in cb), m_err, d_err, ok)


def slit_report(S: SlitSystem, check: SlitCheck | None = None) -> dict:
    """JSON-ready report with arrays a, mu, b, sigma, masses, dilations."""
    out = {"a": list(S.a), "mu": list(S.mu), "b": list(S.b), "sigma": list(S.sigma),
           "sum_mu": float(sum(S.mu)), "sum_sigma": float(sum(S.sigma))}
    if check is not None:
        out.update({
            "masses": list(check.masses),
            "dilations": list(check.dilation_direct),
            "dilations_residue": list(check.dilation_residue),
            "dilations_flow": list(check.dilation_flow),
            "expected_masses": list(check.expected_masses),
            "expected_dilations": list(check.expected_dilations),
            "max_mass_error": float(check.max_mass_error),
            "max_dilation_error": float(check.max_dilation_error),
            "passed": bool(check.passed),
        })
    return out


# --- truncated systems with a shrinking gap at angle 0 --------------------------------

@dataclass(frozen=True)
class TruncationRow:
    m: int
    b: tuple
    sigma: tuple
    fatou_sum: float
    D: tuple
    mass: float
    mass_formula: float
    tag: str


@dataclass(frozen=True)
class TruncationStudy:
    theta: tuple
    m_values: tuple
    probe_eps: tuple
    rows: tuple = field(default=())

    @property
    def fatou_sums(self):
        return tuple(r.fatou_sum for r in self.rows)

    @property
    def masses(self):
        return tuple(r.mass for r in self.rows)


def _truncated_duals(theta, m):
    """Zeros and weights of 1/p_m: an atom at -1 plus conjugate pairs."""
    b = [math.pi]
    s = [1.0 - 2.0 * theta[0]]
    for j in range(m):
        if j < m - 1:
            ang, w = math.pi * (theta[j] + theta[j + 1]), theta[j] - theta[j + 1]
        else:
            ang, w = math.pi * theta[j], theta[j]
        b += [ang, -ang]
        s += [w, w]
    return b, s


def example_no_tip(theta_rule=None, m_values=(8, 16, 32, 64), probe_eps=(1e-2, 1e-3, 1e-4)):
    """Truncations G_m = -z p_m with 1/p_m = sum sigma (b + z)/(b - z).

    The zeros cluster at angle 0 as theta_j -> 0.  Reports the Fatou sums
    S_m = sum sigma (1/|1 - b|^2 + 1/|1 - conj b|^2) over the pairs, the
    indicator D_m(eps) = 1/(p_m(1 - eps) eps), and the classifier's mass at
    angle 0 next to its closed form 1/(2 (S_m + sigma_0/4)).
    """
    if theta_rule is None:
        def theta_rule(j):
            return 1.0 / (j + 2)
    m_values = tuple(int(m) for m in m_values)
    if not m_values or min(m_values) < 1:
        raise ValueError("m values must be positive integers")
    n = max(m_values) + 1
    theta = tuple(float(theta_rule(j)) for j in range(1, n + 1))
    if not all(0.0 < t < 0.5 for t in theta) or any(b >= a for a, b in zip(theta, theta[1:])):
        raise ValueError("theta_j must lie in (0, 1/2) and decrease strictly")
    rows = []
    for m in m_values:
        b, s = _truncated_duals(theta, m)
        pair_b, pair_s = b[1:], s[1:]
        fatou = 0.0
        for ang, w in zip(pair_b, pair_s):
            fatou += w / abs(complex(chord(0.0, ang))) ** 2
        G = Generator.from_atoms_reciprocal_p(0.0, list(zip(b, s)), label=f"no_tip(m={m})")
        q = AtomicP(tuple(b), tuple(s))
        eps = np.asarray(probe_eps, dtype=float)
        qv, _ = q.pair(PointSet.radial(0.0, eps))
        D = tuple(float(v.real) for v in qv / eps)
        cls = classify_boundary(G, 0.0)
        formula = 1.0 / (2.0 * (fatou + s[0] / 4.0))
        rows.append(TruncationRow(m, tuple(b), tuple(s), fatou, D, cls.mass, formula, cls.tag))
    return TruncationStudy(theta, m_values, tuple(probe_eps), tuple(rows))
