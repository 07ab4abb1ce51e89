import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diskgen.generator import (Generator, classify_boundary, cowen_pommerenke_L, generator_from_json,
                               half_plane_generator, koebe_generator, linear_generator, pole_budget_check,
                               two_slit_generator)
from diskgen.herglotz import HerglotzMeasure, UniformDensity
from diskgen.scenarios import PROBES, probe_angles, seeded_generator

TWO_PI = 2 * math.pi
GRID = np.array([r * np.exp(1j * a) for r in (0.0, 0.2, 0.5, 0.8, 0.95)
                 for a in np.linspace(0, TWO_PI, 12, endpoint=False)])


def test_from_measure_examples():
    uni = HerglotzMeasure((), UniformDensity(1.0))
    G = Generator.from_measure(0.0, uni)
    assert np.max(np.abs(G(GRID) + GRID)) < 1e-14
    K = Generator.from_measure(0.0, HerglotzMeasure(((0.0, TWO_PI),)))
    z = GRID[GRID != 0]
    assert np.max(np.abs(K(z) + z * (1 - z) / (1 + z))) < 1e-14
    H = Generator.from_measure(0.0, uni)
    assert H(0.5) == pytest.approx(-0.5)
    B = Generator.from_measure(generator_from_json({"tau": {"angle": 0.0}, "source": {"constant_p": 1}}).tau, uni)
    assert np.max(np.abs(B(GRID) - (1 - GRID) ** 2)) < 1e-14


def test_evaluation_examples():
    K = koebe_generator()
    assert K(0.0) == 0 and abs(K.derivative(0.0) + 1) < 1e-15
    assert linear_generator().derivative(0.3 + 0.2j) == -1
    H = half_plane_generator()
    assert abs(H(0.0) - 1) < 1e-15 and abs(H.derivative(0.0) + 2) < 1e-15


def test_derivative_matches_difference_quotient():
    for G in (koebe_generator(), two_slit_generator(0.3 + 0.1j), seeded_generator(1).generator):
        z, h = 0.2 - 0.4j, 1e-6
        num = (G(z + h) - G(z - h)) / (2 * h)
        assert abs(num - G.derivative(z)) < 1e-7


def test_dual_examples():
    L = linear_generator()
    assert np.max(np.abs(L.dual()(GRID) + GRID)) < 1e-15
    K = koebe_generator().dual()
    z = GRID[np.abs(GRID - 1) > 0.1]
    assert np.max(np.abs(K(z) + z * (1 + z) / (1 - z))) < 1e-13
    assert abs(koebe_generator()(0.5) * K(0.5) - 0.25) < 1e-15


def all_generators():
    out = [linear_generator(), koebe_generator(), half_plane_generator(), two_slit_generator(),
           two_slit_generator(0.4 - 0.2j),
           Generator.from_atoms_reciprocal_p(0.0, [(0.5, 0.3), (2.0, 0.7)])]
    out += [seeded_generator(s).generator for s in range(12)]
    return out


@pytest.mark.parametrize("k", range(18))
def test_product_with_dual(k):
    G = all_generators()[k]
    t = G.tau_value
    z = GRID[np.abs(GRID) < 0.95]
    ref = (t - z) ** 2 * (1 - np.conj(t) * z) ** 2
    assert np.all(np.abs(G(z) * G.dual()(z) - ref) <= 1e-10 * (1 + np.abs(z) ** 4))


@pytest.mark.parametrize("k", range(18))
def test_dual_is_an_involution(k):
    G = all_generators()[k]
    z = GRID[np.abs(GRID) < 0.95]
    assert np.max(np.abs(G.dual().dual()(z) - G(z))) <= 1e-12


def test_classify_examples():
    K = koebe_generator()
    c = classify_boundary(K, math.pi)
    assert c.is_pole and abs(c.mass - 2) < 1e-12
    c = classify_boundary(K, 0.0)
    assert c.is_null_point and abs(c.dilation - 0.5) < 1e-6
    c = classify_boundary(K, math.pi / 2)
    assert c.tag == "Other"


def test_two_slit_null_points():
    G = two_slit_generator()
    for b in (math.pi / 2, 1.5 * math.pi):
        c = classify_boundary(G, b)
        assert c.is_null_point and abs(c.dilation - 1) < 1e-6
    G = two_slit_generator(0.0)
    H = Generator.from_atoms_p(generator_from_json({"tau": {"angle": 0.0}, "source": {"constant_p": 1}}).tau,
                               [(math.pi / 2, 0.5), (1.5 * math.pi, 0.5)])
    c = classify_boundary(H, math.pi)
    assert c.is_null_point


def test_boundary_tau_reported_as_other():
    c = classify_boundary(half_plane_generator(), 0.0)
    assert c.tag == "Other" and c.note == "denjoy_wolff"


def test_cowen_pommerenke_examples():
    # the limit of p(z)(1 - conj(x) z)/2 at -1 is (1 + r)/2 -> 1, so mass 2 = 2 |x - tau|^2 L
    assert abs(cowen_pommerenke_L(koebe_generator(), math.pi).value - 1.0) < 1e-10
    assert abs(cowen_pommerenke_L(linear_generator(), 1.0).value) < 1e-12
    assert abs(cowen_pommerenke_L(half_plane_generator(), math.pi).value) < 1e-12


@pytest.mark.parametrize("seed", [0, 1, 2, 5])
def test_cowen_pommerenke_mass_relation(seed):
    case = seeded_generator(seed)
    G = case.generator
    for i, m in zip(case.pole_index, case.pole_masses):
        th = probe_angles()[i]
        x = complex(math.cos(th), math.sin(th))
        L = cowen_pommerenke_L(G, th).value.real
        assert abs(2 * abs(x - G.tau_value) ** 2 * L - m) <= 1e-6 * m


def test_pole_budget_examples():
    b = pole_budget_check(koebe_generator(), [(math.pi, 2.0)])
    assert b.holds and abs(b.lhs - 1) < 1e-15 and abs(b.rhs - 1) < 1e-15
    b = pole_budget_check(two_slit_generator(), [(0.0, 1.0), (math.pi, 1.0)])
    assert b.holds and abs(b.lhs - b.rhs) < 1e-15
    b = pole_budget_check(linear_generator(), [])
    assert b.holds and b.lhs == 0 and b.rhs == 1


@pytest.mark.parametrize("seed", range(12))
def test_seeded_generators_have_exactly_their_poles(seed):
    case = seeded_generator(seed)
    G = case.generator
    found = []
    for i, th in enumerate(probe_angles(PROBES)):
        c = classify_boundary(G, th)
        assert c.tag != "Inconclusive", (i, c)
        if c.is_pole:
            found.append((i, c.mass))
    assert [i for i, _ in found] == list(case.pole_index)
    for (_, m), want in zip(found, case.pole_masses):
        assert abs(m - want) <= 1e-6 * want
    assert pole_budget_check(G, [(probe_angles()[i], m) for i, m in found]).holds


@pytest.mark.parametrize("seed", range(12))
def test_null_points_and_dual_masses(seed):
    case = seeded_generator(seed)
    G = case.generator
    D = G.dual()
    t = G.tau_value
    for b, ell in zip(case.null_angles, case.null_dilations):
        c = classify_boundary(G, b)
        assert c.is_null_point and abs(c.dilation - ell) <= 1e-5 * ell
        x = complex(math.cos(b), math.sin(b))
        # masses |tau - x|^4 / ell get small when x is close to a boundary tau
        d = classify_boundary(D, b, tol_pole=1e-8)
        assert d.is_pole and abs(d.mass - abs(t - x) ** 4 / c.dilation) <= 1e-5 * d.mass
    for i, m in zip(case.pole_index, case.pole_masses):
        th = probe_angles()[i]
        x = complex(math.cos(th), math.sin(th))
        d = classify_boundary(D, th)
        assert d.is_null_point and abs(d.dilation - abs(t - x) ** 4 / m) <= 1e-5 * d.dilation


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 11), st.floats(0.0, TWO_PI), st.integers(0, 15))
def test_rotation_invariance(seed, alpha, j):
    G = seeded_generator(seed).generator
    x = j * TWO_PI / 16
    c1 = classify_boundary(G, x)
    c2 = classify_boundary(G.rotated(alpha), x - alpha)
    assert c1.tag == c2.tag
    if c1.is_pole:
        assert abs(c1.mass - c2.mass) <= 1e-10 * c1.mass
    if c1.is_null_point:
        assert abs(c1.dilation - c2.dilation) <= 1e-10 * (1 + c1.dilation)


def test_rotated_generator_formula():
    G = seeded_generator(4).generator
    a = 0.7
    R = G.rotated(a)
    z = GRID[np.abs(GRID) < 0.9]
    assert np.max(np.abs(R(z) - np.exp(-1j * a) * G(np.exp(1j * a) * z))) < 1e-12


def test_generator_json_errors():
    with pytest.raises(ValueError):
        generator_from_json({"tau": {"re": 0, "im": 0}})
    with pytest.raises(ValueError):
        generator_from_json({"tau": {"re": 2, "im": 0}, "source": {"constant_p": 1}})
    with pytest.raises(ValueError):
        generator_from_json({"tau": {"re": 0, "im": 0}, "source": {"atoms_p": [{"weight": 1}]}})
    G = generator_from_json({"tau": {"angle": math.pi}, "source": {"atoms_p": [{"angle": 0.0, "weight": 1}]}})
    assert G.boundary_tau
