"""Measures of bodies, sections, projections, mu-projections and mixed measures.

Most functionals are evaluated twice, at the requested quadrature level and
one level coarser; the difference is reported as ``error_estimate``.
Vectorized ``*_many`` variants take a stack of unit directions and return
``(values, errors)`` arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import hashlib
import json
import math

import numpy as np
from scipy.spatial import ConvexHull

from . import bodies as bd
from .bodies import BodySpec, UnsupportedBody
from .measures import MeasureSpec, ball_mass, density, radial_integral, ray_integral
from .quadrature import (
    Frame,
    ball_volume,
    frames_from_normals,
    integrate,
    radial_rule,
    sphere_area,
    sphere_rule,
    subspace_rule,
)

__all__ = [
    "FunctionalValue",
    "Segment",
    "SELF",
    "body_measure",
    "polar_measure",
    "homogeneous_polar_measure",
    "section_measure",
    "section_measures_many",
    "kdim_section_volume",
    "projection_area",
    "projection_areas_many",
    "kdim_projection_volume",
    "mu_projection",
    "mu_projections_many",
    "mixed_measure",
    "surface_area",
    "cauchy_formula_gap",
    "mean_width",
    "isotropic_constant",
    "parallel_section_profile",
]

METHODS = (
    "analytic",
    "polar_quadrature",
    "boundary_integral",
    "finite_difference",
    "facet_sum",
    "monte_carlo_hull",
    "covariance_mc",
)


def digest(*parts) -> str:
    """Short stable hash of JSON-able parts (bodies, measures, frames, rule ids)."""
    def enc(x):
        if hasattr(x, "to_json"):
            return x.to_json()
        if isinstance(x, np.ndarray):
            return np.round(x, 15).tolist()
        return x

    blob = json.dumps([enc(p) for p in parts], sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class FunctionalValue:
    value: float
    error_estimate: float
    method: str
    inputs_digest: str
    name: str = ""

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        err = 0.0 if self.method == "analytic" else abs(float(self.error_estimate))
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "error_estimate", err)

    def __float__(self) -> float:
        return self.value

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "error_estimate": self.error_estimate,
            "method": self.method,
            "inputs_digest": self.inputs_digest,
        }


@dataclass(frozen=True)
class Segment:
    """The segment ``[-theta, theta]`` used as second argument of a mixed measure."""

    theta: tuple

    def __init__(self, theta):
        t = np.asarray(theta, dtype=float)
        object.__setattr__(self, "theta", tuple(t / np.linalg.norm(t)))

    @property
    def vector(self):
        return np.asarray(self.theta)

    def to_json(self):
        return {"kind": "segment", "theta": list(self.theta)}


SELF = "self"


def _levels(level: int):
    return level, (level - 1 if level > 1 else level + 1)


def _as_normals(theta, n: int):
    """Unit direction(s) from a Frame, vector, or stack; returns (array, single)."""
    if isinstance(theta, Frame):
        if theta.normal is None:
            raise ValueError("a hyperplane frame (k = n - 1) is required")
        return theta.normal[None, :], True
    t = np.asarray(theta, dtype=float)
    single = t.ndim == 1
    t = np.atleast_2d(t)
    if t.shape[1] != n:
        raise ValueError(f"directions must lie in R^{n}")
    norms = np.linalg.norm(t, axis=1)
    if np.any(np.abs(norms - 1) > 1e-9):
        raise ValueError("directions must be unit vectors")
    return t / norms[:, None], single


def _check_dims(m: MeasureSpec | None, K: BodySpec):
    if m is not None and m.dim != K.dim:
        raise ValueError(f"measure lives in R^{m.dim} but body in R^{K.dim}")


def _stochastic(K: BodySpec) -> bool:
    return K.smooth and K.dim >= 5


def _noise_factor(stochastic: bool) -> float:
    # randomized rules: the level difference is one draw of the error, widen it to ~3 SE
    return 3.0 if stochastic else 1.0


def _sphere_noise_factor(K: BodySpec) -> float:
    # plain sphere rules on polytopes see kinks in rho and h; convergence is not monotone
    return 3.0 if (K.is_polytope or K.dim >= 5) else 1.0


# ---------------------------------------------------------------------------
# measures of bodies


def _analytic_volume(K: BodySpec):
    b = bd._canonical(K)
    n = b.dim
    if b.kind == "ball":
        return ball_volume(n) * b.param("radius") ** n
    if b.kind == "ellipsoid":
        return ball_volume(n) * float(np.prod(b.arr("axes")))
    if b.kind == "box":
        return float(np.prod(2 * b.arr("widths")))
    if b.kind == "cross_polytope":
        return (2 * b.param("scale")) ** n / math.factorial(n)
    if b.kind == "lp_ball":
        p, s = b.param("p"), b.param("scale")
        return (2 * s) ** n * math.exp(n * math.lgamma(1 + 1 / p) - math.lgamma(1 + n / p))
    return None


def _cone_measure(m: MeasureSpec, K: BodySpec, level: int, seed=None):
    rule = bd.boundary_rule(K, level, seed)
    y = rule.points
    r = np.linalg.norm(y, axis=1)
    cone = np.einsum("ij,ij->i", y, rule.normals) * rule.weights / r**K.dim
    vals = radial_integral(m, y / r[:, None], r, K.dim - 1)
    return float(np.sum(cone * vals))


def body_measure(m: MeasureSpec, K: BodySpec, level: int = 3, seed: int | None = None) -> FunctionalValue:
    """``mu(K)`` by the polar formula ``int_S int_0^rho g(r u) r^{n-1} dr du``.

    The outer integral runs over the boundary rule of ``K`` (cone-volume form),
    which is the sphere rule for smooth bodies and exact facet quadrature for
    polytopes.  Ball masses and Lebesgue volumes of catalog kinds are analytic.
    """
    _check_dims(m, K)
    dg = digest("body_measure", m, K, level, seed)
    if K.kind == "ball" and m.cone is None:
        return FunctionalValue(ball_mass(m, K.param("radius")), 0.0, "analytic", dg, "body_measure")
    if m.kind == "lebesgue" and m.cone is None:
        v = _analytic_volume(K)
        if v is not None:
            return FunctionalValue(v, 0.0, "analytic", dg, "body_measure")
    hi, lo = _levels(level)
    a = _cone_measure(m, K, hi, seed)
    b = _cone_measure(m, K, lo, seed)
    return FunctionalValue(a, abs(a - b) * _noise_factor(_stochastic(K)), "polar_quadrature", dg, "body_measure")


def polar_measure(m: MeasureSpec, K: BodySpec, level: int = 3, seed: int | None = None) -> FunctionalValue:
    """``mu(K)`` by plain sphere quadrature of the radial integral (no analytic shortcuts)."""
    _check_dims(m, K)
    vals = []
    for lv in _levels(level):
        rule = sphere_rule(K.dim, lv, seed)
        rho = bd.radial(K, rule.nodes, check=False)
        vals.append(float(integrate(rule, radial_integral(m, rule.nodes, rho, K.dim - 1))[0]))
    return FunctionalValue(vals[0], abs(vals[0] - vals[1]) * _sphere_noise_factor(K), "polar_quadrature",
                           digest("polar_measure", m, K, level, seed), "polar_measure")


def homogeneous_polar_measure(m: MeasureSpec, K: BodySpec, level: int = 3, seed: int | None = None) -> FunctionalValue:
    """``q int_S rho_K^{1/q} g(u) du`` for a homogeneous density (``1/q = n + degree``)."""
    _check_dims(m, K)
    if not m.homogeneous:
        raise ValueError("the radial-power identity needs a homogeneous density")
    inv_q = K.dim + m.degree
    vals = []
    for lv in _levels(level):
        rule = sphere_rule(K.dim, lv, seed)
        rho = bd.radial(K, rule.nodes, check=False)
        vals.append(float(integrate(rule, rho**inv_q * density(m, rule.nodes))[0]) / inv_q)
    return FunctionalValue(vals[0], abs(vals[0] - vals[1]) * _sphere_noise_factor(K), "polar_quadrature",
                           digest("homogeneous_polar_measure", m, K, level, seed), "homogeneous_polar_measure")


# ---------------------------------------------------------------------------
# sections


def _section_values(m, K, thetas, level, seed, chunk=64):
    n = K.dim
    base = sphere_rule(n - 1, level, seed)
    out = np.empty(len(thetas))
    for start in range(0, len(thetas), chunk):
        th = thetas[start:start + chunk]
        bases = frames_from_normals(th)
        u = np.einsum("mij,kj->mki", bases, base.nodes)
        rho = bd.radial(K, u, check=False)
        vals = radial_integral(m, u, rho, n - 2)
        out[start:start + chunk] = integrate(base, vals)[0]
    return out


def section_measures_many(m: MeasureSpec, K: BodySpec, thetas, level: int = 3, seed: int | None = None):
    """``mu_{n-1}(K cap theta^perp)`` for a stack of unit normals."""
    _check_dims(m, K)
    thetas, _ = _as_normals(thetas, K.dim)
    hi, lo = _levels(level)
    a = _section_values(m, K, thetas, hi, seed)
    b = _section_values(m, K, thetas, lo, seed)
    return a, np.abs(a - b) * _noise_factor(K.dim - 1 >= 5)


def section_measure(m: MeasureSpec, K: BodySpec, theta, level: int = 3, seed: int | None = None) -> FunctionalValue:
    """Weighted central section ``int_{K cap theta^perp} g dx`` by sub-sphere polar quadrature."""
    t, _ = _as_normals(theta, K.dim)
    v, e = section_measures_many(m, K, t, level, seed)
    return FunctionalValue(v[0], e[0], "polar_quadrature", digest("section", m, K, t, level, seed), "section_measure")


def kdim_section_volume(K: BodySpec, frame: Frame, level: int = 3, seed: int | None = None) -> FunctionalValue:
    """``|K cap H|_k`` by k-dimensional polar quadrature."""
    if frame.dim != K.dim:
        raise ValueError("frame and body dimensions differ")
    k = frame.k
    dg = digest("kdim_section", K, frame, level, seed)
    if K.kind == "ball":
        return FunctionalValue(ball_volume(k) * K.param("radius") ** k, 0.0, "analytic", dg, "kdim_section_volume")
    vals = []
    for lv in _levels(level):
        rule = subspace_rule(frame, lv, seed)
        rho = bd.radial(K, rule.nodes, check=False)
        vals.append(float(integrate(rule, rho**k)[0]) / k)
    return FunctionalValue(vals[0], abs(vals[0] - vals[1]), "polar_quadrature", dg, "kdim_section_volume")


# ---------------------------------------------------------------------------
# projections


def projection_areas_many(K: BodySpec, thetas, level: int = 3, seed: int | None = None):
    """``|K | theta^perp|`` for a stack of unit normals; returns (values, errors, method)."""
    thetas, _ = _as_normals(thetas, K.dim)
    n = K.dim
    b = bd._canonical(K)
    if b.kind == "ball":
        v = np.full(len(thetas), ball_volume(n - 1) * b.param("radius") ** (n - 1))
        return v, np.zeros_like(v), "analytic"
    if b.kind == "ellipsoid":
        a = b.arr("axes")
        v = ball_volume(n - 1) * np.prod(a) * np.linalg.norm(thetas / a, axis=1)
        return v, np.zeros_like(v), "analytic"
    if b.kind in ("box", "cross_polytope", "h_polytope"):
        normals, areas = bd.facet_table(b)
        v = 0.5 * np.abs(thetas @ normals.T) @ areas
        return v, np.zeros_like(v), "facet_sum"
    vals = []
    for lv in _levels(level):
        rule = bd.boundary_rule(b, lv, seed)
        vals.append(0.5 * np.abs(thetas @ rule.normals.T) @ rule.weights)
    return vals[0], np.abs(vals[0] - vals[1]) * _noise_factor(_stochastic(b)), "boundary_integral"


def projection_area(K: BodySpec, theta, level: int = 3, seed: int | None = None) -> FunctionalValue:
    """Hyperplane shadow ``|K | theta^perp|`` (Cauchy's projection formula)."""
    t, _ = _as_normals(theta, K.dim)
    v, e, method = projection_areas_many(K, t, level, seed)
    return FunctionalValue(v[0], e[0], method, digest("projection", K, t, level, seed), "projection_area")


def kdim_projection_volume(K: BodySpec, frame: Frame, level: int | None = None, seed: int | None = None) -> FunctionalValue:
    """``|K | H|_k`` for ``k <= 3``.

    Analytic for balls and ellipsoids, exact vertex hull for polytopes and the
    hull of at least 1e4 projected boundary points for smooth l_p balls.  The
    hull of samples underestimates; its ``error_estimate`` is the change
    against the next coarser sample set (a bias bound, not a standard error).
    """
    if frame.dim != K.dim:
        raise ValueError("frame and body dimensions differ")
    k, n = frame.k, K.dim
    U = frame.basis
    dg = digest("kdim_projection", K, frame, level, seed)
    b = bd._canonical(K)
    if b.kind == "ball":
        return FunctionalValue(ball_volume(k) * b.param("radius") ** k, 0.0, "analytic", dg, "kdim_projection_volume")
    if b.kind == "ellipsoid":
        M = U.T * b.arr("axes")
        v = ball_volume(k) * math.sqrt(np.linalg.det(M @ M.T))
        return FunctionalValue(v, 0.0, "analytic", dg, "kdim_projection_volume")
    if k > 3:
        raise UnsupportedBody("projection volumes are limited to k <= 3 for non-ellipsoidal bodies")
    if b.kind in ("box", "cross_polytope", "h_polytope"):
        return FunctionalValue(_hull_volume(bd.vertices(b) @ U), 0.0, "analytic", dg, "kdim_projection_volume")
    if level is None:
        level = {2: 5, 3: 4}.get(n, 3)
    vals = []
    for lv in _levels(level):
        pts = bd.boundary_rule(b, lv, seed).points
        vals.append(_hull_volume(pts @ U))
    return FunctionalValue(vals[0], abs(vals[0] - vals[1]), "monte_carlo_hull", dg, "kdim_projection_volume")


def _hull_volume(pts: np.ndarray) -> float:
    if pts.shape[1] == 1:
        return float(pts.max() - pts.min())
    return float(ConvexHull(pts).volume)


# ---------------------------------------------------------------------------
# mu-projections


@lru_cache(maxsize=64)
def _ray_weights(m: MeasureSpec, K: BodySpec, level: int, radial: str, seed):
    """``c_j = w_j int_0^1 g(t y_j) t^{n-1} dt`` on the boundary rule of K."""
    rule = bd.boundary_rule(K, level, seed)
    if radial == "auto":
        c = ray_integral(m, rule.points)
    else:
        rr = radial_rule(level)
        n = K.dim
        c = np.zeros(rule.size)
        for t, wt in zip(rr.nodes, rr.weights):
            c += wt * t ** (n - 1) * density(m, t * rule.points)
    c = c * rule.weights
    c.setflags(write=False)
    return rule.normals, c


def _mu_projection_values(m, K, thetas, level, radial, seed, chunk=512):
    normals, c = _ray_weights(m, K, level, radial, seed)
    out = np.empty(len(thetas))
    for s in range(0, len(thetas), chunk):
        out[s:s + chunk] = 0.5 * K.dim * (np.abs(thetas[s:s + chunk] @ normals.T) @ c)
    return out


def mu_projections_many(m: MeasureSpec, K: BodySpec, thetas, level: int = 3, radial: str = "auto",
                        seed: int | None = None):
    """``P_{mu,K}(theta)`` for a stack of unit normals.

    ``P = (n/2) int_0^1 int_{d(tK)} |<theta, nu>| g dH dt``; by the scaling of
    ``d(tK)`` this is ``(n/2) sum_j |<theta, nu_j>| w_j int_0^1 g(t y_j) t^{n-1} dt``
    over the boundary rule of K.  ``radial="auto"`` uses the closed-form ray
    integral; ``"quadrature"`` uses the Gauss rule on [0, 1].
    """
    _check_dims(m, K)
    if radial not in ("auto", "quadrature"):
        raise ValueError("radial must be 'auto' or 'quadrature'")
    thetas, _ = _as_normals(thetas, K.dim)
    hi, lo = _levels(level)
    a = _mu_projection_values(m, K, thetas, hi, radial, seed)
    b = _mu_projection_values(m, K, thetas, lo, radial, seed)
    return a, np.abs(a - b) * _noise_factor(_stochastic(K))


def mu_projection(m: MeasureSpec, K: BodySpec, theta, level: int = 3, radial: str = "auto",
                  seed: int | None = None) -> FunctionalValue:
    """The mu-projection ``P_{mu,K}(theta)``, a weighted average of boundary shadows of ``tK``."""
    t, _ = _as_normals(theta, K.dim)
    v, e = mu_projections_many(m, K, t, level, radial, seed)
    return FunctionalValue(v[0], e[0], "boundary_integral", digest("mu_projection", m, K, t, level, radial, seed),
                           "mu_projection")


# ---------------------------------------------------------------------------
# mixed measures


def _support_of(B, A: BodySpec, rule):
    """``h_B(nu_j)`` on the boundary rule of A."""
    if isinstance(B, str) and B == SELF:
        return np.einsum("ij,ij->i", rule.points, rule.normals)
    if isinstance(B, Segment):
        return np.abs(rule.normals @ B.vector)
    if isinstance(B, BodySpec):
        if B.dim != A.dim:
            raise ValueError("mixed measure arguments live in different dimensions")
        return bd.support(B, rule.normals, check=False)
    raise ValueError(f"unsupported second argument for a mixed measure: {B!r}")


def _mixed_boundary(m, A, B, level, seed):
    rule = bd.boundary_rule(A, level, seed)
    return float(np.sum(_support_of(B, A, rule) * density(m, rule.points) * rule.weights))


def _outer_radius(B, A: BodySpec):
    if isinstance(B, str):
        return bd.radii(A)[1]
    if isinstance(B, Segment):
        return 1.0
    return bd.radii(B)[1]


def _sum_member(A: BodySpec, B, eps: float):
    """Membership test for ``A + eps B``."""
    if isinstance(B, Segment):
        theta = B.vector

        def member(x):
            # the gauge of A along x - s theta is convex in s: golden-section search
            lo = np.full(x.shape[:-1], -eps)
            hi = np.full(x.shape[:-1], eps)
            g = (math.sqrt(5) - 1) / 2
            for _ in range(48):
                a = hi - g * (hi - lo)
                b = lo + g * (hi - lo)
                fa = bd.gauge(A, x - a[..., None] * theta)
                fb = bd.gauge(A, x - b[..., None] * theta)
                left = fa <= fb
                hi = np.where(left, b, hi)
                lo = np.where(left, lo, a)
            s = 0.5 * (lo + hi)
            ends = np.minimum(bd.gauge(A, x - eps * theta), bd.gauge(A, x + eps * theta))
            return np.minimum(bd.gauge(A, x - s[..., None] * theta), ends) <= 1.0
        return member
    if isinstance(B, BodySpec) and B.kind == "ball":
        rad = B.param("radius") * eps
        return lambda x: bd.distance(A, x) <= rad
    raise UnsupportedBody("finite differences need B = ball, segment or A itself")


def _radial_of_sum(A: BodySpec, B, eps: float, u: np.ndarray, iters: int = 52):
    rho_a = bd.radial(A, u, check=False)
    member = _sum_member(A, B, eps)
    lo = rho_a.copy()
    hi = rho_a * (1 + eps * _outer_radius(B, A) / bd.radii(A)[0]) * (1 + 1e-12)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        inside = member(mid[:, None] * u)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


def _mixed_fd(m, A, B, level, seed, epsilons=(1e-2, 5e-3, 2.5e-3)):
    # directions through the boundary rule of A: for polytopes these are the
    # facet cones, so the kinks of rho_A sit on panel edges
    rule = bd.boundary_rule(A, level, seed)
    r = np.linalg.norm(rule.points, axis=1)
    u = rule.points / r[:, None]
    cone = np.einsum("ij,ij->i", rule.points, rule.normals) * rule.weights / r**A.dim
    n = A.dim

    def mu_of(rho):
        return float(np.sum(cone * radial_integral(m, u, rho, n - 1)))

    rho_a = bd.radial(A, u, check=False)
    base = mu_of(rho_a)
    quotients = []
    for eps in epsilons:
        if isinstance(B, str) and B == SELF:
            rho = (1 + eps) * rho_a
        else:
            rho = _radial_of_sum(A, B, eps, u)
        quotients.append((mu_of(rho) - base) / eps)
    d = np.array(quotients)
    # Richardson for halving steps: first order then second order
    r1 = 2 * d[1:] - d[:-1]
    r2 = (4 * r1[1] - r1[0]) / 3
    return float(r2), float(abs(r2 - r1[1]))


def mixed_measure(m: MeasureSpec, A: BodySpec, B, method: str = "boundary_integral", level: int = 3,
                  seed: int | None = None) -> FunctionalValue:
    """Mixed measure ``mu_1(A, B) = lim (mu(A + eps B) - mu(A)) / eps``.

    ``B`` is a :class:`BodySpec` (any catalog body for the boundary path,
    a ball for finite differences), a :class:`Segment`, or ``SELF`` for A.
    ``method="boundary_integral"`` evaluates ``int h_B(nu) g dH`` over the
    boundary of A; ``"finite_difference"`` uses one-sided quotients at
    eps in {1e-2, 5e-3, 2.5e-3} with Richardson extrapolation, the
    extrapolation residual being the error estimate.
    """
    _check_dims(m, A)
    dg = digest("mixed_measure", m, A, B, method, level, seed)
    if method == "boundary_integral":
        _support_of(B, A, bd.boundary_rule(A, 1, seed))  # validates B early
        hi, lo = _levels(level)
        a = _mixed_boundary(m, A, B, hi, seed)
        b = _mixed_boundary(m, A, B, lo, seed)
        return FunctionalValue(a, abs(a - b) * _noise_factor(_stochastic(A)), "boundary_integral", dg,
                               "mixed_measure")
    if method == "finite_difference":
        v, e = _mixed_fd(m, A, B, level, seed)
        return FunctionalValue(v, e, "finite_difference", dg, "mixed_measure")
    raise ValueError(f"unknown mixed-measure method {method!r}")


# ---------------------------------------------------------------------------
# surface area, mean width, isotropic constant


def surface_area(K: BodySpec, level: int = 3, seed: int | None = None) -> FunctionalValue:
    """``|dK| = mu_1(K, B)`` for Lebesgue measure (sum of boundary weights)."""
    dg = digest("surface_area", K, level, seed)
    if K.kind == "ball":
        n = K.dim
        return FunctionalValue(sphere_area(n) * K.param("radius") ** (n - 1), 0.0, "analytic", dg, "surface_area")
    hi, lo = _levels(level)
    a = float(bd.boundary_rule(K, hi, seed).weights.sum())
    b = float(bd.boundary_rule(K, lo, seed).weights.sum())
    method = "boundary_integral" if K.smooth else "facet_sum"
    return FunctionalValue(a, abs(a - b), method, dg, "surface_area")


def cauchy_formula_gap(K: BodySpec, level: int = 3, seed: int | None = None) -> float:
    """Relative gap between ``|dK|`` and ``(1/omega_{n-1}) int_S |K | u^perp| du``."""
    n = K.dim
    rule = sphere_rule(n, level, seed)
    proj, _, _ = projection_areas_many(K, rule.nodes, level, seed)
    cauchy = float(integrate(rule, proj)[0]) / ball_volume(n - 1)
    s = surface_area(K, level, seed).value
    return abs(s - cauchy) / s


def mean_width(L: BodySpec, level: int = 3, seed: int | None = None) -> FunctionalValue:
    """``w(L) = int_S h_L d sigma`` (normalized sphere measure)."""
    dg = digest("mean_width", L, level, seed)
    if L.kind == "ball":
        return FunctionalValue(L.param("radius"), 0.0, "analytic", dg, "mean_width")
    vals = []
    for lv in _levels(level):
        rule = sphere_rule(L.dim, lv, seed)
        vals.append(float(integrate(rule, bd.support(L, rule.nodes, check=False))[0]) / sphere_area(L.dim))
    return FunctionalValue(vals[0], abs(vals[0] - vals[1]) * _sphere_noise_factor(L), "polar_quadrature", dg,
                           "mean_width")


def isotropic_constant(K: BodySpec, samples: int = 200_000, seed: int = 0, convention: str = "diagonal",
                       batches: int = 16) -> FunctionalValue:
    """Isotropic constant from the covariance of uniform samples of K.

    With covariance ``C`` of the uniform distribution on K, the volume-one
    isotropic image has covariance ``L delta_ij`` with
    ``L = det(C)^{1/n} / |K|^{2/n}``.  ``convention="diagonal"`` returns this
    diagonal value; ``"standard"`` returns its square root.  The error
    estimate is the batch-means standard error.
    """
    if convention not in ("diagonal", "standard"):
        raise ValueError("convention must be 'diagonal' or 'standard'")
    if not K.symmetric:
        raise ValueError("isotropic constant is implemented for origin-symmetric bodies")
    n = K.dim
    rng = np.random.default_rng(seed)
    R = bd.radii(K)[1]
    kept = []
    count = 0
    while count < samples:
        x = rng.uniform(-R, R, size=(max(4096, 2 * (samples - count)), n))
        x = x[bd.contains(K, x)]
        kept.append(x)
        count += len(x)
    pts = np.concatenate(kept)[:samples]
    vol = body_measure(MeasureSpec("lebesgue", n), K).value

    def constant(p):
        # symmetric body: the mean is zero
        c = p.T @ p / len(p)
        val = np.linalg.det(c) ** (1.0 / n) / vol ** (2.0 / n)
        return math.sqrt(val) if convention == "standard" else val

    value = constant(pts)
    per = [constant(chunk) for chunk in np.array_split(pts, batches)]
    se = float(np.std(per, ddof=1) / math.sqrt(batches))
    return FunctionalValue(value, se, "covariance_mc", digest("isotropic", K, samples, seed, convention),
                           "isotropic_constant")


# ---------------------------------------------------------------------------
# parallel sections


def _slice_radial(K: BodySpec, center: np.ndarray, u: np.ndarray, tol: float = 1e-10):
    """Largest s with center + s u in K, by bisection on the gauge."""
    hi = np.full(len(u), 2 * bd.radii(K)[1])
    lo = np.zeros(len(u))
    while np.any(hi - lo > tol):
        mid = 0.5 * (lo + hi)
        inside = bd.gauge(K, center + mid[:, None] * u) <= 1.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


def parallel_section_profile(K: BodySpec, theta, grid=None, level: int = 3, seed: int | None = None):
    """``[(t, A_{K,theta}(t))]`` with ``A(t) = |K cap (theta^perp + t theta)|``.

    The default grid is 19 points on ``[-0.9, 0.9] * rho_K(theta)`` so every
    slice contains its base point ``t theta``.
    """
    t, _ = _as_normals(theta, K.dim)
    th = t[0]
    n = K.dim
    if grid is None:
        h = float(bd.radial(K, th, check=False))
        grid = h * np.linspace(-0.9, 0.9, 19)
    basis = frames_from_normals(th[None, :])[0]
    base = sphere_rule(n - 1, level, seed)
    u = base.nodes @ basis.T
    out = []
    for tt in np.asarray(grid, dtype=float):
        center = tt * th
        if bd.gauge(K, center) >= 1.0:
            out.append((float(tt), 0.0))
            continue
        s = _slice_radial(K, center, u)
        out.append((float(tt), float(integrate(base, s ** (n - 1))[0]) / (n - 1)))
    return out
