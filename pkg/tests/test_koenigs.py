import math

import numpy as np
import pytest

from diskgen.flow import flow_many
from diskgen.generator import (Generator, classify_boundary, half_plane_generator, koebe_generator,
                               linear_generator, two_slit_generator)
from diskgen.koenigs import (beta_number, boundary_argument, boundary_csv, h_beta_point, h_beta_scan, koenigs,
                             max_identity_residual, null_point_asymptotics)
from diskgen.scenarios import probe_angles, seeded_generator

TWO_PI = 2 * math.pi
GRID = np.array([r * np.exp(1j * a) for r in (0.0, 0.3, 0.6, 0.8)
                 for a in np.linspace(0, TWO_PI, 8, endpoint=False)])


def test_closed_forms():
    z = GRID
    assert np.max(np.abs(koenigs(linear_generator())(z) - z)) < 1e-14
    K = koenigs(koebe_generator())
    assert abs(K(0.5) - 2) <= 1e-9
    assert np.max(np.abs(K(z) - z / (1 - z) ** 2)) < 1e-10
    H = koenigs(half_plane_generator())
    assert abs(H(0.5) - 1) <= 1e-9
    assert np.max(np.abs(H(z) - z / (1 - z))) < 1e-10
    T = koenigs(two_slit_generator())
    assert np.max(np.abs(T(z) - z / (1 + z * z))) < 1e-10


GENERATORS = [linear_generator, koebe_generator, half_plane_generator, two_slit_generator,
              lambda: two_slit_generator(0.2 + 0.3j)] + \
    [lambda s=s: seeded_generator(s).generator for s in range(12)]


@pytest.mark.parametrize("g", range(len(GENERATORS)))
def test_defining_identity(g):
    K = koenigs(GENERATORS[g]())
    assert max_identity_residual(K) <= 1e-9


@pytest.mark.parametrize("g", range(len(GENERATORS)))
def test_linearization(g):
    G = GENERATORS[g]()
    K = koenigs(G)
    ts = np.array([0.25, 1.0, 2.0])
    z, _ = flow_many(G, GRID, ts)
    h0 = K(GRID)
    for i, t in enumerate(ts):
        if G.boundary_tau:
            ref = h0 + t
        else:
            ref = np.exp(G.derivative_at_tau() * t) * h0
        assert np.max(np.abs(K(z[i]) - ref)) <= 1e-7


def test_koebe_beta_point():
    K = koenigs(koebe_generator())
    rep = h_beta_point(K, math.pi)
    assert rep.is_beta_point
    assert abs(rep.h_at_x + 0.25) < 1e-10
    assert abs(rep.second_derivative.value - 0.125) <= 1e-5
    assert rep.mismatch <= 1e-5
    assert abs(rep.beta_number - 1) <= 1e-4
    assert abs(beta_number(K, math.pi) - 1) <= 1e-4


def test_two_slit_beta_numbers():
    K = koenigs(two_slit_generator())
    for x in (0.0, math.pi):
        rep = h_beta_point(K, x)
        assert rep.is_beta_point
        assert abs(abs(rep.h_at_x) - 0.5) < 1e-10
        assert abs(beta_number(K, x) - 1) <= 1e-4


def test_not_beta_points():
    assert not h_beta_point(koenigs(linear_generator()), 0.7).is_beta_point
    rep = h_beta_point(koenigs(half_plane_generator()), math.pi)
    assert not rep.is_beta_point
    assert not classify_boundary(half_plane_generator(), math.pi).is_pole


@pytest.mark.parametrize("seed", [0, 1, 5, 6])
def test_h_verdicts_agree_with_classifier(seed):
    G = seeded_generator(seed).generator
    th = probe_angles(720)
    cls = [classify_boundary(G, a) for a in th]
    pole = np.array([c.is_pole for c in cls])
    A = np.array([-c.a if c.is_pole else np.nan for c in cls])
    reps = h_beta_scan(koenigs(G), th, A=A)
    assert np.array_equal([r.is_beta_point for r in reps], pole)
    assert max((r.mismatch for r in reps if r.is_beta_point), default=0.0) <= 1e-5


def test_null_point_asymptotics_koebe():
    res = null_point_asymptotics(koenigs(koebe_generator()), 0.0)
    assert abs(res.rho.value.real * 0.5 - 1) <= 1e-3
    assert abs(res.a_limit.value - res.expected_a) <= 1e-5
    assert abs(res.expected_a + 2) < 1e-9


def test_null_point_asymptotics_two_slit():
    res = null_point_asymptotics(koenigs(two_slit_generator()), math.pi / 2)
    assert abs(res.rho.value.real - 1) <= 1e-3
    assert abs(res.a_limit.value + 1) <= 1e-5


def test_null_point_asymptotics_boundary_tau():
    G = Generator.from_atoms_p(half_plane_generator().tau, [(math.pi / 2, 0.5), (1.5 * math.pi, 0.5)])
    c = classify_boundary(G, math.pi)
    assert c.is_null_point
    res = null_point_asymptotics(koenigs(G), math.pi)
    assert abs(res.rho.value.real * c.dilation - 1) <= 1e-3
    assert abs(res.a_limit.value - res.expected_a) <= 1e-5 * abs(res.expected_a)


def test_null_point_asymptotics_rejects_non_null_points():
    with pytest.raises(ValueError):
        null_point_asymptotics(koenigs(koebe_generator()), math.pi / 2)


def test_boundary_argument_linear():
    t = np.array([0.5, 2.0, 4.0])
    vals = [e.value.real for e in boundary_argument(koenigs(linear_generator()), t)]
    assert np.allclose(vals, t, atol=1e-9)


def test_boundary_argument_plateaus():
    t = np.array([0.3, 1.5, 3.0, 4.5, 6.0])
    vals = np.array([e.value.real for e in boundary_argument(koenigs(koebe_generator()), t)])
    assert np.allclose(vals, math.pi, atol=1e-6)
    t = np.array([0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    vals = np.array([e.value.real for e in boundary_argument(koenigs(two_slit_generator()), t)])
    assert np.allclose(vals, [0, 0, math.pi, math.pi, math.pi, TWO_PI, TWO_PI], atol=1e-6)


def test_boundary_argument_needs_star_like_normalization():
    with pytest.raises(ValueError):
        boundary_argument(koenigs(half_plane_generator()), 1.0)


def test_boundary_csv_layout():
    text = boundary_csv(koenigs(linear_generator()), np.array([0.0, 1.0, 2.0]))
    lines = text.strip().split("\n")
    assert lines[0] == "theta,upsilon,abs_h"
    assert lines[-1].startswith("# max_identity_residual=")
    assert abs(float(lines[2].split(",")[1]) - 1.0) < 1e-9
