import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diskgen.generator import koebe_generator
from diskgen.unitdisc import (BoundaryPoint, DiskPoint, PointSet, extrapolate_log_limit,
                              extrapolate_radial_limit, moebius_to_origin, radial_grid, wrap_angle)


def test_radial_grid_powers_of_two():
    assert list(radial_grid(3, 5)) == [0.125, 0.0625, 0.03125]
    g = radial_grid(3, 40)
    assert g.size == 38 and g[-1] == 2.0 ** -40


def test_radial_grid_rejects_bad_range():
    with pytest.raises(ValueError):
        radial_grid(5, 3)


def test_anchored_points_keep_their_distance():
    eps = radial_grid(3, 48)
    for theta in (0.0, 1.0, math.pi, 5.5):
        pts = PointSet.radial(theta, eps)
        assert np.array_equal(np.abs(pts.gap(theta)), eps)
        assert np.allclose(pts.one_minus_abs(), eps, rtol=1e-15, atol=0)


def test_extrapolation_affine_is_exact():
    eps = radial_grid(3, 20)
    est = extrapolate_radial_limit(eps=eps, values=2.0 + eps)
    assert est.converged and abs(est.value - 2.0) < 1e-12 and est.residual < 1e-12


def test_extrapolation_reports_divergence():
    eps = radial_grid(3, 20)
    est = extrapolate_radial_limit(eps=eps, values=1.0 / eps)
    assert not est.converged
    assert abs(est.divergence_exponent - 1.0) < 1e-6


def test_extrapolation_on_koebe_pole():
    G = koebe_generator()
    eps = radial_grid(3, 40)
    vals = np.abs(G(PointSet.radial(math.pi, eps))) * eps
    est = extrapolate_radial_limit(eps=eps, values=vals)
    assert est.converged and abs(est.value - 2.0) < 1e-12


def test_extrapolation_accepts_pairs():
    eps = radial_grid(3, 10)
    est = extrapolate_radial_limit([(e, 1.0 + 3 * e * e) for e in eps])
    assert est.converged and abs(est.value - 1.0) < 1e-10


def test_extrapolation_argument_checks():
    with pytest.raises(ValueError):
        extrapolate_radial_limit(eps=[0.5, 0.25, 0.125], values=[1, 1, 1])
    with pytest.raises(ValueError):
        extrapolate_radial_limit(eps=[0.1, 0.2, 0.3, 0.4], values=[1, 1, 1, 1])


def test_log_limit_model_exact():
    eps = radial_grid(3, 30)
    est = extrapolate_log_limit(eps=eps, values=2.0 + 5.0 / np.log(eps))
    assert est.converged and abs(est.value - 2.0) < 1e-12


def test_moebius_examples():
    f, g = moebius_to_origin(0.0)
    assert f(0.3 + 0.1j) == 0.3 + 0.1j
    f, g = moebius_to_origin(0.5)
    assert f(0.5) == 0
    assert f(0.0) == -0.5
    assert g(0.0) == 0.5


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 0.95), st.floats(0, 2 * math.pi), st.floats(0, 0.99), st.floats(0, 2 * math.pi))
def test_moebius_round_trip(rt, at, rz, az):
    tau = rt * complex(math.cos(at), math.sin(at))
    z = rz * complex(math.cos(az), math.sin(az))
    f, g = moebius_to_origin(tau)
    assert abs(g(f(z)) - z) <= 1e-14 * max(1.0, 1.0 / (1 - rt))
    assert abs(f(g(z)) - z) <= 1e-14 * max(1.0, 1.0 / (1 - rt))


def test_moebius_round_trip_random_points():
    rng = np.random.default_rng(7)
    z = np.sqrt(rng.uniform(0, 0.99, 100)) * np.exp(2j * np.pi * rng.uniform(size=100))
    f, g = moebius_to_origin(0.3 - 0.4j)
    assert np.max(np.abs(g(f(z)) - z)) <= 1e-14


def test_points_validate_domain():
    with pytest.raises(ValueError):
        DiskPoint(1.0, 0.0)
    assert BoundaryPoint.of(-math.pi).angle == pytest.approx(math.pi)
    assert abs(BoundaryPoint(math.pi / 2).x - 1j) < 1e-15
    assert wrap_angle(-0.5) == pytest.approx(2 * math.pi - 0.5)
