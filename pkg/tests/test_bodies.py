import math

import numpy as np
import pytest

from geomtomo import bodies as bd
from geomtomo.quadrature import sphere_rule
from oracles import sphere_area

CATALOG = [
    bd.ball(3, 1.3),
    bd.ellipsoid([1.0, 0.6, 1.5]),
    bd.lp_ball(3, 3.0, 1.1),
    bd.box([1.0, 0.5, 0.8]),
    bd.cross_polytope(3, 1.2),
    bd.h_polytope([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1], [1, 1, 1], [-1, -1, -1]],
                  [1, 1, 1, 1, 1, 1, 1.5, 1.5]),
]


def _units(n, count=200, seed=0):
    u = np.random.default_rng(seed).standard_normal((count, n))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


@pytest.mark.parametrize("K", CATALOG, ids=repr)
def test_radial_point_lies_on_boundary(K):
    u = _units(K.dim)
    rho = bd.radial(K, u)
    assert np.allclose(bd.gauge(K, rho[:, None] * u), 1.0, atol=1e-10)
    assert np.allclose(rho, 1 / bd.gauge(K, u), rtol=1e-12)


@pytest.mark.parametrize("K", CATALOG, ids=repr)
def test_support_is_max_over_boundary(K):
    u = _units(K.dim, 50, 1)
    h = bd.support(K, u)
    pts = bd.radial(K, _units(K.dim, 20000, 2))[:, None] * _units(K.dim, 20000, 2)
    brute = (u @ pts.T).max(axis=1)
    assert np.all(brute <= h + 1e-9)
    assert np.all(h - brute < 0.05 * h)
    x = bd.support_point(K, u)
    assert np.allclose(np.einsum("ij,ij->i", x, u), h, rtol=1e-9)


@pytest.mark.parametrize("K", CATALOG, ids=repr)
def test_radii_bracket_radial_function(K):
    r, R = bd.radii(K)
    u = sphere_rule(3, 3).nodes
    if K.is_polytope:
        v = bd.vertices(K)
        u = np.concatenate([u, v / np.linalg.norm(v, axis=1, keepdims=True)])
    rho = bd.radial(K, u)
    assert r <= rho.min() + 1e-12
    assert rho.max() <= R + 1e-12
    assert rho.min() < r * (1 + 1e-2)
    assert rho.max() > R * (1 - 1e-2)


def test_radii_numeric_agrees_with_closed_form():
    K = bd.ellipsoid([1.0, 0.6, 1.5])
    assert np.allclose(bd.radii_numeric(K), bd.radii(K), rtol=1e-6)


@pytest.mark.parametrize("K", CATALOG, ids=repr)
def test_dilation_scales_gauge(K):
    x = _units(K.dim, 30)
    assert np.allclose(bd.gauge(bd.dilate(K, 2.5), x), bd.gauge(K, x) / 2.5)


def test_lp_endpoints_are_canonical_polytopes():
    u = _units(3)
    assert np.allclose(bd.radial(bd.lp_ball(3, 1.0, 2.0), u), bd.radial(bd.cross_polytope(3, 2.0), u))
    assert np.allclose(bd.radial(bd.lp_ball(3, math.inf, 2.0), u), bd.radial(bd.box([2.0] * 3), u))


def test_invalid_specs_raise():
    with pytest.raises(ValueError):
        bd.ball(3, -1.0)
    with pytest.raises(ValueError):
        bd.lp_ball(3, 0.5)
    with pytest.raises(ValueError):
        bd.h_polytope([[1, 0], [-1, 0], [0, 1]], [1, -1, 1])
    with pytest.raises(ValueError):
        bd.radial(bd.ball(3), [1.0, 1.0, 0.0])


def test_ridge_detection_and_perturbation():
    K = bd.box([1.0, 1.0, 1.0])
    u = np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
    with pytest.raises(bd.RidgeError):
        bd.boundary_element(K, u[None, :])
    p, nu, jac = bd.boundary_element(K, u[None, :], perturb=True)
    assert np.isclose(bd.gauge(K, p)[0], 1.0)
    assert np.isclose(np.linalg.norm(nu), 1.0)


@pytest.mark.parametrize("K", CATALOG, ids=repr)
def test_json_round_trip(K):
    again = bd.BodySpec.from_json(K.dumps())
    assert again == K
    assert again.dumps() == K.dumps()


def test_infinite_p_serialises_as_string():
    K = bd.lp_ball(2, math.inf)
    assert K.to_json()["params"]["p"] == "inf"
    assert bd.BodySpec.from_json(K.to_json()) == K


def test_symmetry_flag():
    assert all(K.symmetric for K in CATALOG)
    tri = bd.h_polytope([[1, 0], [0, 1], [-1, -1]], [1, 1, 1])
    assert not tri.symmetric


@pytest.mark.parametrize("K", CATALOG, ids=repr)
def test_boundary_rule_surface_and_divergence(K):
    rule = bd.boundary_rule(K, 3)
    # divergence theorem: (1/n) int <x, nu> dH = |K|
    vol = np.sum(rule.weights * np.einsum("ij,ij->i", rule.points, rule.normals)) / K.dim
    rho = bd.radial(K, sphere_rule(3, 4).nodes)
    ref = np.sum(sphere_rule(3, 4).weights * rho**3) / 3
    assert vol == pytest.approx(ref, rel=2e-3)
    # closed surfaces: int nu dH = 0
    assert np.allclose(rule.weights @ rule.normals, 0.0, atol=1e-8 * rule.weights.sum())


def test_box_facets_and_vertices():
    K = bd.box([1.0, 2.0, 3.0])
    assert len(bd.vertices(K)) == 8
    normals, areas = bd.facet_table(K)
    assert len(normals) == 6
    assert sorted(np.round(areas, 10)) == sorted([24.0, 24.0, 12.0, 12.0, 8.0, 8.0])


def test_hpolytope_vertices_contained():
    K = CATALOG[-1]
    v = bd.vertices(K)
    assert np.all(bd.gauge(K, v) <= 1 + 1e-9)
    assert np.any(np.isclose(v.sum(axis=1), 1.5))


def test_john_position():
    assert bd.john_normalize(bd.box([1.0, 2.0, 3.0])) == bd.box([1.0, 1.0, 1.0])
    C = bd.john_normalize(bd.cross_polytope(3, 2.0))
    assert bd.radii(C)[0] == pytest.approx(1.0)
    with pytest.raises(bd.UnsupportedBody):
        bd.john_normalize(CATALOG[-1])


@pytest.mark.parametrize("K", [bd.ball(3, 1.0), bd.box([1.0, 0.5, 0.8]), bd.ellipsoid([1.0, 0.6, 1.5]),
                               bd.cross_polytope(3, 1.0), CATALOG[-1]], ids=repr)
def test_nearest_point_map(K):
    x = 3 * _units(3, 40, 5)
    y = bd.project(K, x)
    assert np.allclose(bd.gauge(K, y), 1.0, atol=1e-8)
    # no sampled boundary point is closer
    pts = bd.radial(K, _units(3, 5000, 6))[:, None] * _units(3, 5000, 6)
    d = np.linalg.norm(x[:, None, :] - pts[None], axis=2).min(axis=1)
    assert np.all(bd.distance(K, x) <= d + 1e-9)


def test_minkowski_combination():
    assert bd.minkowski_combination(bd.ball(3, 1.0), bd.ball(3, 3.0), 0.25) == bd.ball(3, 2.5)
    E = bd.ellipsoid([1.0, 2.0, 3.0])
    assert bd.minkowski_combination(E, bd.dilate(E, 3.0), 0.5) == bd.dilate(E, 2.0)
    with pytest.raises(bd.UnsupportedBody):
        bd.minkowski_combination(E, bd.ball(3, 1.0), 0.5)


def test_sphere_area_via_ball_boundary():
    rule = bd.boundary_rule(bd.ball(4, 1.0), 3)
    assert rule.weights.sum() == pytest.approx(sphere_area(4), rel=1e-9)
