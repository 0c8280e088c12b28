import math

import numpy as np
import pytest
from scipy import integrate

from geomtomo import measures as ms
from oracles import gaussian_ball_mass, radial_power_ball_mass, sphere_area

MEASURES = [
    ms.lebesgue(3),
    ms.radial_power(3, 2.0),
    ms.cone_power([1.0, 0.5, 0.0], 1.5),
    ms.gaussian(3, 1.2),
    ms.gaussian(3, 1.0, 2.0),
]


@pytest.mark.parametrize("m", MEASURES, ids=lambda m: m.kind)
@pytest.mark.parametrize("k", [0, 1, 2])
def test_radial_integral_closed_form_matches_scipy(m, k):
    u = np.array([0.6, 0.8, 0.0])
    for rho in (0.3, 1.0, 2.7):
        ref = integrate.quad(lambda r: ms.density(m, r * u) * r**k, 0, rho, epsabs=0, epsrel=1e-12, limit=200)[0]
        assert float(ms.radial_integral(m, u, rho, k)) == pytest.approx(ref, rel=1e-9, abs=1e-14)


@pytest.mark.parametrize("m", MEASURES[:4], ids=lambda m: m.kind)
def test_ray_integral_quadrature_agrees(m):
    y = np.array([[0.3, 0.4, 1.0], [1.0, 0.2, -0.5]])
    a = ms.ray_integral(m, y)
    b = ms.ray_integral(m, y, method="quadrature")
    assert np.allclose(a, b, rtol=1e-6)


def test_density_values():
    x = np.array([[1.0, 2.0, 2.0], [-1.0, 0.0, 0.0]])
    assert np.allclose(ms.density(ms.radial_power(3, 2), x), [9.0, 1.0])
    assert np.allclose(ms.density(ms.cone_power([1, 0, 0], 2.0), x), [1.0, 0.0])
    assert np.allclose(ms.density(ms.gaussian(3, 1.0, 2.0), x), [0.0, math.exp(-0.5)])


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_ball_mass_closed_forms(R):
    assert ms.ball_mass(ms.gaussian(3, 1.3), R) == pytest.approx(gaussian_ball_mass(3, R, 1.3), rel=1e-12)
    assert ms.ball_mass(ms.radial_power(4, 1.5), R) == pytest.approx(radial_power_ball_mass(4, R, 1.5), rel=1e-12)
    m = ms.cone_power([0.0, 0.0, 1.0], 1.0)
    # half-space density x_3 on RB: |S^{n-2}|-weighted; direct scipy in spherical coordinates
    ref = integrate.dblquad(lambda r, t: (r * math.cos(t)) * r**2 * math.sin(t) * 2 * math.pi, 0, math.pi / 2,
                            0, R)[0]
    assert ms.ball_mass(m, R) == pytest.approx(ref, rel=1e-9)


def test_truncated_gaussian_mass_saturates():
    m = ms.gaussian(3, 1.0, 2.0)
    assert ms.ball_mass(m, 5.0) == pytest.approx(ms.ball_mass(m, 2.0), rel=1e-14)


def test_sphere_density_integral_matches_rule():
    m = ms.cone_power([1.0, 1.0, 0.0], 1.5)
    from geomtomo.quadrature import integrate as qint, sphere_rule
    rule = sphere_rule(3, 4)
    assert ms.sphere_density_integral(m) == pytest.approx(qint(rule, ms.density(m, rule.nodes))[0], rel=1e-5)
    assert ms.sphere_density_integral(ms.lebesgue(4)) == pytest.approx(sphere_area(4))


def test_concavity_classes_and_q():
    assert ms.q_exponent(ms.lebesgue(3)) == pytest.approx(1 / 3)
    assert ms.q_exponent(ms.cone_power([1, 0, 0], 1.0)) == pytest.approx(1 / 4)
    assert ms.q_exponent(ms.gaussian(3, 1.0, 2.0)) == pytest.approx(1 / 7)
    assert ms.q_exponent(ms.gaussian(3)) is None
    assert ms.q_exponent(ms.radial_power(3, 1.0)) is None
    assert ms.gaussian(3).log_concave and not ms.radial_power(3, 1).log_concave


def test_sup_norm():
    assert ms.sup_norm(ms.gaussian(3)) == 1.0
    assert math.isinf(ms.sup_norm(ms.radial_power(3, 2)))
    assert ms.sup_norm(ms.radial_power(3, 2), 2.0) == pytest.approx(4.0)


def test_invalid_measures():
    with pytest.raises(ValueError):
        ms.radial_power(3, -1.0)
    with pytest.raises(ValueError):
        ms.cone_power([0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        ms.gaussian(3, 0.0)
    with pytest.raises(ValueError):
        ms.MeasureSpec("poisson", 3)


@pytest.mark.parametrize("m", MEASURES, ids=lambda m: m.kind)
def test_json_round_trip(m):
    assert ms.MeasureSpec.from_json(m.to_json()) == m


def test_homogeneity_degree_scaling():
    # mu(tB) = t^{n + deg} mu(B) for homogeneous densities
    for m in (ms.lebesgue(3), ms.radial_power(3, 2.0), ms.cone_power([1, 0, 0], 0.5)):
        d = 3 + m.degree
        assert ms.ball_mass(m, 1.7) == pytest.approx(1.7**d * ms.ball_mass(m, 1.0), rel=1e-12)
