"""Convex bodies given by analytic radial/support oracles or facet lists.

Every function accepts a single point of shape ``(n,)`` or a stack of points
of shape ``(m, n)`` and returns values of matching leading shape.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
import itertools
import json
import math

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import Delaunay

from .quadrature import composite_gauss, frame_from_normal, sphere_rule

__all__ = [
    "BodySpec",
    "BoundaryRule",
    "RidgeError",
    "UnsupportedBody",
    "ball",
    "ellipsoid",
    "lp_ball",
    "box",
    "cross_polytope",
    "h_polytope",
    "gauge",
    "gauge_gradient",
    "radial",
    "support",
    "support_point",
    "boundary_element",
    "spherical_gradient",
    "radii",
    "radii_numeric",
    "john_normalize",
    "dilate",
    "vertices",
    "boundary_rule",
    "project",
    "distance",
    "contains",
    "facets",
    "facet_table",
    "minkowski_combination",
]

KINDS = ("ball", "ellipsoid", "lp_ball", "box", "cross_polytope", "h_polytope")
UNIT_TOL = 1e-9
RIDGE_TOL = 1e-12
MAX_VERTEX_DIM = 4


class RidgeError(ValueError):
    """The direction hits a lower-dimensional face where the normal is not unique."""


class UnsupportedBody(NotImplementedError):
    """The requested operation is not available for this kind of body."""


def _freeze(value):
    if isinstance(value, (list, tuple, np.ndarray)):
        return tuple(_freeze(v) for v in value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


@dataclass(frozen=True)
class BodySpec:
    """An origin-containing convex body from the catalog.

    ``params`` is a tuple of ``(name, value)`` pairs; use :meth:`param` to
    read them.  Instances are immutable and hashable.
    """

    kind: str
    dim: int
    params: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown body kind {self.kind!r}")
        if self.dim < 2:
            raise ValueError("bodies need dimension n >= 2")
        object.__setattr__(self, "params", tuple(sorted((k, _freeze(v)) for k, v in self.params)))
        p = dict(self.params)
        n = self.dim
        if self.kind == "ball":
            _positive(p["radius"], "radius")
        elif self.kind == "ellipsoid":
            _positive_vector(p["axes"], n, "axes")
        elif self.kind == "lp_ball":
            if not p["p"] >= 1:
                raise ValueError("l_p ball needs p in [1, inf]")
            _positive(p["scale"], "scale")
        elif self.kind == "box":
            _positive_vector(p["widths"], n, "widths")
        elif self.kind == "cross_polytope":
            _positive(p["scale"], "scale")
        elif self.kind == "h_polytope":
            normals = np.asarray(p["normals"], dtype=float)
            offsets = np.asarray(p["offsets"], dtype=float)
            if normals.ndim != 2 or normals.shape[1] != n or len(offsets) != len(normals):
                raise ValueError("h_polytope needs normals of shape (m, n) and m offsets")
            if np.any(offsets <= 0):
                raise ValueError("h_polytope offsets must be positive (origin in the interior)")
            if np.any(np.linalg.norm(normals, axis=1) == 0):
                raise ValueError("h_polytope normals must be nonzero")

    def param(self, name: str):
        return dict(self.params)[name]

    @cached_property
    def _arrays(self) -> dict:
        return {k: (np.asarray(v, dtype=float) if isinstance(v, tuple) else v) for k, v in self.params}

    def arr(self, name: str):
        return self._arrays[name]

    @property
    def symmetric(self) -> bool:
        if self.kind != "h_polytope":
            return True
        a = self.arr("normals") / self.arr("offsets")[:, None]
        for row in a:
            if not np.any(np.all(np.abs(a + row) <= 1e-12 * np.abs(row).max(), axis=1)):
                return False
        return True

    @property
    def smooth(self) -> bool:
        if self.kind in ("ball", "ellipsoid"):
            return True
        if self.kind == "lp_ball":
            return 1 < self.param("p") < math.inf
        return False

    @property
    def is_polytope(self) -> bool:
        return not self.smooth

    def to_json(self) -> dict:
        params = {}
        for k, v in self.params:
            params[k] = _json_number(v) if not isinstance(v, tuple) else _json_number_list(v)
        return {"kind": self.kind, "dim": self.dim, "params": params}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data) -> "BodySpec":
        if isinstance(data, str):
            data = json.loads(data)
        params = {k: _from_json_number(v) for k, v in data.get("params", {}).items()}
        return cls(data["kind"], int(data["dim"]), tuple(params.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.kind}[n={self.dim}]({inner})"


def _positive(x, name):
    if not (x > 0 and math.isfinite(x)):
        raise ValueError(f"{name} must be a positive finite number")


def _positive_vector(v, n, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (n,) or np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be {n} positive finite numbers")


def _json_number(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def _json_number_list(v):
    return [_json_number_list(x) if isinstance(x, tuple) else _json_number(x) for x in v]


def _from_json_number(v):
    if isinstance(v, list):
        return [_from_json_number(x) for x in v]
    if isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return math.inf
    return v


# ---------------------------------------------------------------------------
# constructors


def ball(n: int, radius: float = 1.0) -> BodySpec:
    return BodySpec("ball", n, (("radius", float(radius)),))


def ellipsoid(axes) -> BodySpec:
    axes = [float(a) for a in axes]
    return BodySpec("ellipsoid", len(axes), (("axes", axes),))


def lp_ball(n: int, p: float, scale: float = 1.0) -> BodySpec:
    return BodySpec("lp_ball", n, (("p", float(p)), ("scale", float(scale))))


def box(widths) -> BodySpec:
    """Box ``prod [-w_i, w_i]`` given the half-widths."""
    widths = [float(w) for w in widths]
    return BodySpec("box", len(widths), (("widths", widths),))


def cross_polytope(n: int, scale: float = 1.0) -> BodySpec:
    """``{x : sum |x_i| <= scale}``."""
    return BodySpec("cross_polytope", n, (("scale", float(scale)),))


def h_polytope(normals, offsets) -> BodySpec:
    """``{x : <a_i, x> <= b_i}`` with all ``b_i > 0``."""
    normals = np.asarray(normals, dtype=float)
    return BodySpec("h_polytope", normals.shape[1],
                    (("normals", normals.tolist()), ("offsets", [float(b) for b in offsets])))


def _canonical(body: BodySpec) -> BodySpec:
    # l_1 and l_inf balls share geometry with the polytope kinds
    if body.kind == "lp_ball":
        p, s = body.param("p"), body.param("scale")
        if p == 1:
            return cross_polytope(body.dim, s)
        if math.isinf(p):
            return box([s] * body.dim)
    return body


# ---------------------------------------------------------------------------
# pointwise oracles


def _points(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise ValueError(f"expected points in R^{n}, got shape {x.shape}")
    return x


def _check_unit(u):
    norms = np.linalg.norm(u, axis=-1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise ValueError("direction must be a unit vector")


def gauge(body: BodySpec, x) -> np.ndarray:
    """Minkowski functional ``||x||_K = min{a >= 0 : x in aK}``."""
    body = _canonical(body)
    x = _points(x, body.dim)
    k = body.kind
    if k == "ball":
        return np.linalg.norm(x, axis=-1) / body.param("radius")
    if k == "ellipsoid":
        return np.linalg.norm(x / body.arr("axes"), axis=-1)
    if k == "lp_ball":
        return np.linalg.norm(x, ord=body.param("p"), axis=-1) / body.param("scale")
    if k == "box":
        return np.max(np.abs(x) / body.arr("widths"), axis=-1)
    if k == "cross_polytope":
        return np.sum(np.abs(x), axis=-1) / body.param("scale")
    a = body.arr("normals") / body.arr("offsets")[:, None]
    return np.maximum(np.max(x @ a.T, axis=-1), 0.0)


def contains(body: BodySpec, x, tol: float = 0.0) -> np.ndarray:
    return gauge(body, x) <= 1.0 + tol


def _argmax_with_tie(vals):
    order = np.argsort(vals, axis=-1)
    top = np.take_along_axis(vals, order[..., -1:], axis=-1)[..., 0]
    second = np.take_along_axis(vals, order[..., -2:-1], axis=-1)[..., 0]
    tie = top - second <= RIDGE_TOL * np.maximum(np.abs(top), 1e-300)
    return order[..., -1], tie


def gauge_gradient(body: BodySpec, x, ridge_check: bool = False) -> np.ndarray:
    """Gradient of the gauge at ``x != 0``; for polytopes the active facet's.

    With ``ridge_check`` a :class:`RidgeError` is raised when ``x`` lies on a
    face of codimension >= 2 (the gradient is not unique there).
    """
    body = _canonical(body)
    x = _points(x, body.dim)
    k = body.kind
    if k == "ball":
        return x / (body.param("radius") * np.linalg.norm(x, axis=-1, keepdims=True))
    if k == "ellipsoid":
        a2 = body.arr("axes") ** 2
        return (x / a2) / gauge(body, x)[..., None]
    if k == "lp_ball":
        p, s = body.param("p"), body.param("scale")
        nrm = np.linalg.norm(x, ord=p, axis=-1, keepdims=True)
        return np.sign(x) * (np.abs(x) / nrm) ** (p - 1) / s
    if k == "box":
        w = body.arr("widths")
        j, tie = _argmax_with_tie(np.abs(x) / w)
        if ridge_check and np.any(tie):
            raise RidgeError("point lies on a ridge of the box")
        g = np.zeros_like(x)
        xj = np.take_along_axis(x, j[..., None], axis=-1)
        np.put_along_axis(g, j[..., None], np.sign(xj) / w[j][..., None], axis=-1)
        return g
    if k == "cross_polytope":
        if ridge_check and np.any(np.abs(x) <= RIDGE_TOL * np.abs(x).max(axis=-1, keepdims=True)):
            raise RidgeError("point lies on a ridge of the cross-polytope")
        return np.sign(x) / body.param("scale")
    a = body.arr("normals") / body.arr("offsets")[:, None]
    j, tie = _argmax_with_tie(x @ a.T)
    if ridge_check and np.any(tie):
        raise RidgeError("point lies on a ridge of the polytope")
    return a[j]


def radial(body: BodySpec, u, check: bool = True) -> np.ndarray:
    """Radial function ``rho_K(u) = max{t > 0 : t u in K}`` for unit ``u``."""
    u = _points(u, body.dim)
    if check:
        _check_unit(u)
    g = gauge(body, u)
    if np.any(g <= 0):
        raise ValueError("origin is not an interior point of the body")
    return 1.0 / g


def support(body: BodySpec, u, check: bool = True) -> np.ndarray:
    """Support function ``h_K(u) = max_{x in K} <u, x>``."""
    body = _canonical(body)
    u = _points(u, body.dim)
    if check:
        _check_unit(u)
    k = body.kind
    if k == "ball":
        return body.param("radius") * np.linalg.norm(u, axis=-1)
    if k == "ellipsoid":
        return np.linalg.norm(u * body.arr("axes"), axis=-1)
    if k == "lp_ball":
        p = body.param("p")
        return body.param("scale") * np.linalg.norm(u, ord=p / (p - 1), axis=-1)
    if k == "box":
        return np.sum(body.arr("widths") * np.abs(u), axis=-1)
    if k == "cross_polytope":
        return body.param("scale") * np.max(np.abs(u), axis=-1)
    return np.max(u @ vertices(body).T, axis=-1)


def support_point(body: BodySpec, u) -> np.ndarray:
    """A maximizer of ``<u, x>`` over the body (gradient of ``h_K``)."""
    body = _canonical(body)
    u = _points(u, body.dim)
    k = body.kind
    if k == "ball":
        return body.param("radius") * u / np.linalg.norm(u, axis=-1, keepdims=True)
    if k == "ellipsoid":
        a2 = body.arr("axes") ** 2
        return a2 * u / support(body, u, check=False)[..., None]
    if k == "lp_ball":
        p, s = body.param("p"), body.param("scale")
        q = p / (p - 1)
        nrm = np.linalg.norm(u, ord=q, axis=-1, keepdims=True)
        return s * np.sign(u) * (np.abs(u) / nrm) ** (q - 1)
    if k == "box":
        return body.arr("widths") * np.sign(u)
    if k == "cross_polytope":
        j = np.argmax(np.abs(u), axis=-1)
        out = np.zeros_like(u)
        uj = np.take_along_axis(u, j[..., None], axis=-1)
        np.put_along_axis(out, j[..., None], body.param("scale") * np.sign(uj), axis=-1)
        return out
    v = vertices(body)
    return v[np.argmax(u @ v.T, axis=-1)]


def _normalize(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _tangent_basis(u):
    """Orthonormal basis of u^perp for a single unit vector, shape (n, n-1)."""
    return frame_from_normal(u).basis


def spherical_gradient(body: BodySpec, u, method: str = "analytic", step: float = 1e-5) -> np.ndarray:
    """Gradient of ``rho_K`` along the sphere at unit ``u``.

    ``method="fd"`` uses central differences of step ``step`` in a
    tangent-plane chart, retracted to the sphere by normalization.
    """
    u = _points(u, body.dim)
    _check_unit(u)
    if method == "analytic":
        g = gauge(body, u)[..., None]
        dg = gauge_gradient(body, u)
        return -(dg - np.sum(dg * u, axis=-1, keepdims=True) * u) / g**2
    if method != "fd":
        raise ValueError(f"unknown gradient method {method!r}")
    single = u.ndim == 1
    us = np.atleast_2d(u)
    out = np.empty_like(us)
    for i, ui in enumerate(us):
        t = _tangent_basis(ui)
        plus = _normalize(ui[None, :] + step * t.T)
        minus = _normalize(ui[None, :] - step * t.T)
        d = (radial(body, plus, check=False) - radial(body, minus, check=False)) / (2 * step)
        out[i] = t @ d
    return out[0] if single else out


def boundary_element(body: BodySpec, u, perturb: bool = False):
    """Boundary point, outer unit normal and area Jacobian in direction ``u``.

    The Jacobian satisfies ``int_{dK} f dH = int_{S^{n-1}} f(rho(u)u) J(u) du``
    with ``J = rho^{n-2} sqrt(rho^2 + |grad_S rho|^2) = rho^{n-1} / <u, nu>``.
    On a polytope ridge a :class:`RidgeError` is raised unless ``perturb`` is
    set, in which case ``u`` is moved by 1e-9 along a fixed tangent.
    """
    u = _points(u, body.dim)
    _check_unit(u)
    try:
        grad = gauge_gradient(body, u, ridge_check=True)
    except RidgeError:
        if not perturb:
            raise
        u = _perturb(u)
        grad = gauge_gradient(body, u)
    rho = radial(body, u, check=False)
    nu = _normalize(grad)
    jac = rho ** (body.dim - 1) / np.sum(u * nu, axis=-1)
    return rho[..., None] * u, nu, jac


def _perturb(u):
    # deterministic tangent: e_1 projected off u (e_2 if u ~ e_1)
    n = u.shape[-1]
    e = np.zeros(n)
    e[0] = 1.0
    t = e - (u @ e)[..., None] * u
    small = np.linalg.norm(t, axis=-1) < 1e-6
    if np.any(small):
        e2 = np.zeros(n)
        e2[1] = 1.0
        t = np.where(small[..., None], e2 - (u @ e2)[..., None] * u, t)
    return _normalize(u + 1e-9 * _normalize(t))


# ---------------------------------------------------------------------------
# radii, positions


def radii(body: BodySpec) -> tuple[float, float]:
    """Centered inradius and circumradius ``(min rho, max rho)``."""
    b = _canonical(body)
    n = b.dim
    k = b.kind
    if k == "ball":
        r = b.param("radius")
        return r, r
    if k == "ellipsoid":
        a = b.arr("axes")
        return float(a.min()), float(a.max())
    if k == "box":
        w = b.arr("widths")
        return float(w.min()), float(np.linalg.norm(w))
    if k == "cross_polytope":
        s = b.param("scale")
        return s / math.sqrt(n), s
    if k == "lp_ball":
        p, s = b.param("p"), b.param("scale")
        extreme = n ** (1.0 / p - 0.5)
        lo, hi = min(1.0, extreme), max(1.0, extreme)
        return s / hi, s / lo
    a, off = b.arr("normals"), b.arr("offsets")
    return float(np.min(off / np.linalg.norm(a, axis=1))), float(np.max(np.linalg.norm(vertices(b), axis=1)))


def radii_numeric(body: BodySpec, level: int = 2, starts: int = 8, seed: int = 0) -> tuple[float, float]:
    """Radii by a sphere-grid scan plus multi-start local refinement.

    Generic fallback for bodies without closed forms; catalog kinds use
    :func:`radii`.
    """
    n = body.dim
    grid = sphere_rule(n, level, seed=seed).nodes
    rho = radial(body, grid, check=False)

    def refine(sign):
        order = np.argsort(sign * rho)[:starts]
        best = sign * rho[order[0]]
        for x0 in grid[order]:
            res = minimize(lambda z: sign * radial(body, _normalize(z), check=False),
                           x0, method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
            best = min(best, res.fun)
        return sign * best

    return float(refine(1.0)), float(refine(-1.0))


def dilate(body: BodySpec, t: float) -> BodySpec:
    """The body ``tK`` for ``t > 0``."""
    if not t > 0:
        raise ValueError("dilation factor must be positive")
    k = body.kind
    if k == "ball":
        return ball(body.dim, t * body.param("radius"))
    if k == "ellipsoid":
        return ellipsoid(t * body.arr("axes"))
    if k == "lp_ball":
        return lp_ball(body.dim, body.param("p"), t * body.param("scale"))
    if k == "box":
        return box(t * body.arr("widths"))
    if k == "cross_polytope":
        return cross_polytope(body.dim, t * body.param("scale"))
    return h_polytope(body.arr("normals"), t * body.arr("offsets"))


def john_normalize(body: BodySpec) -> BodySpec:
    """Affine image whose maximal inscribed ellipsoid is the unit ball.

    Available for the coordinate-symmetric catalog kinds, whose John
    ellipsoid is the coordinate ellipsoid (box, ellipsoid) or the inscribed
    ball (ball, l_p ball, cross-polytope).
    """
    k = body.kind
    n = body.dim
    if k == "ball":
        return ball(n, 1.0)
    if k == "ellipsoid":
        return ball(n, 1.0)
    if k == "box":
        return box([1.0] * n)
    if k in ("cross_polytope", "lp_ball"):
        r, _ = radii(body)
        return dilate(body, 1.0 / r)
    raise UnsupportedBody("John position is only available for the symmetric catalog kinds")


# ---------------------------------------------------------------------------
# polytope combinatorics


@lru_cache(maxsize=256)
def _vertices_cached(body: BodySpec) -> np.ndarray:
    b = body
    n = b.dim
    if b.kind == "box":
        w = b.arr("widths")
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
        return signs * w
    if b.kind == "cross_polytope":
        eye = np.eye(n) * b.param("scale")
        return np.concatenate([eye, -eye])
    if b.kind != "h_polytope":
        raise UnsupportedBody(f"{b.kind} has no vertex list")
    if n > MAX_VERTEX_DIM:
        raise UnsupportedBody(f"vertex enumeration is limited to n <= {MAX_VERTEX_DIM}")
    a, off = b.arr("normals"), b.arr("offsets")
    scale = np.abs(off).max()
    found = []
    for idx in itertools.combinations(range(len(a)), n):
        sub = a[list(idx)]
        if abs(np.linalg.det(sub)) < 1e-12 * np.prod(np.linalg.norm(sub, axis=1)):
            continue
        v = np.linalg.solve(sub, off[list(idx)])
        if np.all(a @ v <= off + 1e-9 * scale):
            found.append(v)
    if not found:
        raise ValueError("polytope has no vertices (unbounded or empty)")
    verts = np.array(found)
    keep = []
    for v in verts:
        if not any(np.linalg.norm(v - w) <= 1e-9 * scale for w in keep):
            keep.append(v)
    out = np.array(keep)
    if np.linalg.matrix_rank(out - out.mean(axis=0), tol=1e-9 * scale) < n:
        raise ValueError("polytope is not full-dimensional or is unbounded")
    return out


def vertices(body: BodySpec) -> np.ndarray:
    """Vertex array of a polytope body (box, cross-polytope, h_polytope n <= 4)."""
    v = _vertices_cached(_canonical(body))
    v.setflags(write=False)
    return v


def facets(body: BodySpec):
    """List of ``(unit_normal, offset, facet_vertices)`` for a polytope."""
    b = _canonical(body)
    if b.kind == "box":
        w = b.arr("widths")
        a = np.concatenate([np.eye(b.dim), -np.eye(b.dim)])
        off = np.concatenate([w, w])
    elif b.kind == "cross_polytope":
        a = np.array(list(itertools.product((-1.0, 1.0), repeat=b.dim)))
        off = np.full(len(a), b.param("scale"))
    elif b.kind == "h_polytope":
        a, off = b.arr("normals"), b.arr("offsets")
    else:
        raise UnsupportedBody(f"{b.kind} is not a polytope")
    v = vertices(b)
    scale = np.abs(v).max()
    out = []
    for ai, bi in zip(a, off):
        nrm = np.linalg.norm(ai)
        on = np.abs(v @ ai - bi) <= 1e-9 * max(bi, scale * nrm)
        if on.sum() >= b.dim:
            fv = v[on]
            if np.linalg.matrix_rank(fv - fv.mean(axis=0), tol=1e-9 * scale) == b.dim - 1:
                out.append((ai / nrm, bi / nrm, fv))
    return out


# ---------------------------------------------------------------------------
# boundary quadrature


@dataclass(frozen=True, eq=False)
class BoundaryRule:
    """Quadrature for ``int_{dK} f(x, nu(x)) dH_{n-1}(x)``.

    ``points`` lie on the boundary, ``normals`` are the outer unit normals
    there and ``weights`` are positive surface weights.
    """

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    method: str
    level: int

    @property
    def size(self) -> int:
        return len(self.weights)

    def scaled(self, t: float) -> "BoundaryRule":
        """The rule for the dilate ``tK``."""
        n = self.points.shape[1]
        return BoundaryRule(t * self.points, self.normals, t ** (n - 1) * self.weights, self.method, self.level)


@lru_cache(maxsize=None)
def _reference_simplex(d: int, m: int):
    """Collapsed-coordinate Gauss rule on {x >= 0, sum x <= 1} in R^d."""
    if d == 0:
        return np.zeros((1, 0)), np.ones(1)
    x, w = np.polynomial.legendre.leggauss(m)
    x, w = 0.5 * (x + 1), 0.5 * w
    grids = np.meshgrid(*([x] * d), indexing="ij")
    wgrids = np.meshgrid(*([w] * d), indexing="ij")
    u = np.stack([g.ravel() for g in grids], axis=1)
    wt = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    pts = np.empty_like(u)
    rem = np.ones(len(u))
    for i in range(d):
        # x_i = u_i * prod_{j<i} (1 - u_j); the jacobian is triangular
        pts[:, i] = u[:, i] * rem
        wt = wt * rem
        rem = rem * (1 - u[:, i])
    return pts, wt


def _simplex_rule(verts: np.ndarray, m: int):
    d = len(verts) - 1
    ref, w = _reference_simplex(d, m)
    edges = verts[1:] - verts[0]
    pts = verts[0] + ref @ edges
    vol_factor = math.sqrt(max(np.linalg.det(edges @ edges.T), 0.0))
    return pts, w * vol_factor


def _facet_nodes(n: int, level: int) -> int:
    return max(2, 2 ** (level + 3 - n))


def _box_boundary(b: BodySpec, level: int):
    n = b.dim
    w = b.arr("widths")
    m = _facet_nodes(n, level)
    pts, nrm, wts = [], [], []
    for j in range(n):
        axes = [i for i in range(n) if i != j]
        rules = [composite_gauss(-w[i], w[i], 2, m) for i in axes]
        grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
        wgrid = np.meshgrid(*[r[1] for r in rules], indexing="ij")
        coords = np.stack([g.ravel() for g in grids], axis=1)
        ww = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
        for sgn in (1.0, -1.0):
            p = np.empty((len(coords), n))
            p[:, axes] = coords
            p[:, j] = sgn * w[j]
            nu = np.zeros((len(coords), n))
            nu[:, j] = sgn
            pts.append(p)
            nrm.append(nu)
            wts.append(ww)
    return np.concatenate(pts), np.concatenate(nrm), np.concatenate(wts)


def _cross_boundary(b: BodySpec, level: int):
    n = b.dim
    s = b.param("scale")
    m = _facet_nodes(n, level)
    pts, nrm, wts = [], [], []
    for sig in itertools.product((-1.0, 1.0), repeat=n):
        sig = np.array(sig)
        verts = s * np.diag(sig)
        p, w = _simplex_rule(verts, m)
        pts.append(p)
        nrm.append(np.tile(sig / math.sqrt(n), (len(p), 1)))
        wts.append(w)
    return np.concatenate(pts), np.concatenate(nrm), np.concatenate(wts)


def _hpoly_boundary(b: BodySpec, level: int):
    n = b.dim
    m = _facet_nodes(n, level)
    pts, nrm, wts = [], [], []
    for nu, _, fv in facets(b):
        if n == 2:
            simplices = [fv[np.argsort(fv @ np.array([-nu[1], nu[0]]))]]
        else:
            basis = frame_from_normal(nu).basis
            local = (fv - fv.mean(axis=0)) @ basis
            tri = Delaunay(local)
            simplices = [fv[s] for s in tri.simplices]
        for sv in simplices:
            p, w = _simplex_rule(sv, m)
            pts.append(p)
            nrm.append(np.tile(nu, (len(p), 1)))
            wts.append(w)
    return np.concatenate(pts), np.concatenate(nrm), np.concatenate(wts)


def _sphere_boundary(b: BodySpec, level: int, seed: int | None):
    rule = sphere_rule(b.dim, level, seed=seed)
    point, nu, jac = boundary_element(b, rule.nodes, perturb=True)
    return point, nu, rule.weights * jac


@lru_cache(maxsize=128)
def boundary_rule(body: BodySpec, level: int = 3, seed: int | None = None, method: str = "auto") -> BoundaryRule:
    """Surface quadrature of ``dK``.

    ``method="facets"`` integrates facet by facet (exact geometry, tensor or
    collapsed Gauss on each facet); ``method="sphere"`` pulls a sphere rule
    back through the radial map with the Jacobian of :func:`boundary_element`.
    ``"auto"`` picks facets for polytopes and the sphere map otherwise.
    """
    b = _canonical(body)
    if method == "auto":
        method = "facets" if b.kind in ("box", "cross_polytope", "h_polytope") else "sphere"
    if method == "facets":
        if b.kind == "box":
            p, nu, w = _box_boundary(b, level)
        elif b.kind == "cross_polytope":
            p, nu, w = _cross_boundary(b, level)
        elif b.kind == "h_polytope":
            p, nu, w = _hpoly_boundary(b, level)
        else:
            raise UnsupportedBody(f"{b.kind} has no facets")
    elif method == "sphere":
        p, nu, w = _sphere_boundary(b, level, seed)
    else:
        raise ValueError(f"unknown boundary method {method!r}")
    for a in (p, nu, w):
        a.setflags(write=False)
    return BoundaryRule(p, nu, w, method, level)


# ---------------------------------------------------------------------------
# nearest-point maps (used by Minkowski-sum membership tests)


def _project_ellipsoid(a, x):
    # y_i = x_i a_i^2 / (a_i^2 + lam), lam >= 0 with sum (y_i/a_i)^2 = 1
    a2 = a * a
    outside = np.sum((x / a) ** 2, axis=-1) > 1
    lo = np.zeros(x.shape[:-1])
    hi = np.linalg.norm(x, axis=-1) * a.max() + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        y = x * a2 / (a2 + mid[..., None])
        big = np.sum((y / a) ** 2, axis=-1) > 1
        lo = np.where(big, mid, lo)
        hi = np.where(big, hi, mid)
        if np.all(hi - lo <= 1e-15 * np.maximum(hi, 1.0)):
            break
    y = x * a2 / (a2 + hi[..., None])
    return np.where(outside[..., None], y, x)


def _project_l1(s, x):
    # Euclidean projection onto {sum |y_i| <= s} by soft thresholding
    ax = np.abs(x)
    outside = ax.sum(axis=-1) > s
    srt = -np.sort(-ax, axis=-1)
    css = np.cumsum(srt, axis=-1) - s
    k = np.arange(1, x.shape[-1] + 1)
    cond = srt - css / k > 0
    rho = np.max(np.where(cond, k, 0), axis=-1)
    tau = np.take_along_axis(css, (rho - 1)[..., None], axis=-1)[..., 0] / rho
    y = np.sign(x) * np.maximum(ax - tau[..., None], 0.0)
    return np.where(outside[..., None], y, x)


def _project_hpoly(b, x):
    a, off = b.arr("normals"), b.arr("offsets")
    n = b.dim
    x2 = np.atleast_2d(x)
    best = np.where(contains(b, x2)[:, None], x2, np.nan)
    bestd = np.where(contains(b, x2), 0.0, np.inf)
    for size in range(1, n + 1):
        for idx in itertools.combinations(range(len(a)), size):
            sub = a[list(idx)]
            gram = sub @ sub.T
            if abs(np.linalg.det(gram)) < 1e-12:
                continue
            lam = np.linalg.solve(gram, (x2 @ sub.T - off[list(idx)]).T).T
            y = x2 - lam @ sub
            ok = np.all(y @ a.T <= off + 1e-10 * off.max(), axis=1)
            d = np.linalg.norm(y - x2, axis=1)
            better = ok & (d < bestd)
            best = np.where(better[:, None], y, best)
            bestd = np.where(better, d, bestd)
    return best.reshape(np.shape(x))


def project(body: BodySpec, x) -> np.ndarray:
    """Euclidean nearest point of the body to ``x``."""
    b = _canonical(body)
    x = _points(x, b.dim)
    k = b.kind
    if k == "ball":
        r = b.param("radius")
        nrm = np.linalg.norm(x, axis=-1, keepdims=True)
        return np.where(nrm > r, x * r / np.maximum(nrm, 1e-300), x)
    if k == "box":
        w = b.arr("widths")
        return np.clip(x, -w, w)
    if k == "ellipsoid":
        return _project_ellipsoid(b.arr("axes"), x)
    if k == "cross_polytope":
        return _project_l1(b.param("scale"), x)
    if k == "h_polytope":
        return _project_hpoly(b, x)
    raise UnsupportedBody("nearest-point map is not available for smooth l_p balls")


def distance(body: BodySpec, x) -> np.ndarray:
    """Euclidean distance from ``x`` to the body (zero inside)."""
    x = _points(x, body.dim)
    return np.linalg.norm(x - project(body, x), axis=-1)


def facet_table(body: BodySpec, level: int = 1):
    """Unit facet normals and facet areas ``(normals, areas)`` of a polytope."""
    rule = boundary_rule(body, level, method="facets")
    normals, inverse = np.unique(rule.normals, axis=0, return_inverse=True)
    areas = np.bincount(inverse.ravel(), weights=rule.weights, minlength=len(normals))
    return normals, areas


def minkowski_combination(e: BodySpec, f: BodySpec, lam: float) -> BodySpec:
    """``lam E + (1 - lam) F`` when the support-function sum stays in the catalog.

    Supported: two balls, two boxes, and homothetic pairs of any one kind
    (ellipsoids, l_p balls, cross-polytopes, H-polytopes).
    """
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    if e.dim != f.dim:
        raise ValueError("bodies live in different dimensions")
    if e.kind == f.kind == "ball":
        return ball(e.dim, lam * e.param("radius") + (1 - lam) * f.param("radius"))
    if e.kind == f.kind == "box":
        return box(lam * e.arr("widths") + (1 - lam) * f.arr("widths"))
    t = _homothety(e, f)
    if t is None:
        raise UnsupportedBody("Minkowski combination leaves the catalog for this pair")
    return dilate(e, lam + (1 - lam) * t)


def _homothety(e: BodySpec, f: BodySpec):
    # returns t with F = tE, or None
    if e.kind != f.kind:
        return None
    if e.kind == "ellipsoid":
        ratio = f.arr("axes") / e.arr("axes")
    elif e.kind in ("lp_ball", "cross_polytope"):
        if e.kind == "lp_ball" and e.param("p") != f.param("p"):
            return None
        ratio = np.array([f.param("scale") / e.param("scale")])
    elif e.kind == "h_polytope":
        if e.arr("normals").shape != f.arr("normals").shape or np.any(e.arr("normals") != f.arr("normals")):
            return None
        ratio = f.arr("offsets") / e.arr("offsets")
    else:
        return None
    if np.ptp(ratio) > 1e-12 * ratio.max():
        return None
    return float(ratio.mean())
