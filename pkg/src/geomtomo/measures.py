"""Densities on R^n together with the metadata the inequality checks rely on."""
from __future__ import annotations

from dataclasses import dataclass
import json
import math

import numpy as np
from scipy.special import beta, gammainc, gammaln

from .bodies import _freeze, _from_json_number, _json_number
from .quadrature import ball_volume, integrate, sphere_area, sphere_rule

__all__ = [
    "MeasureSpec",
    "lebesgue",
    "radial_power",
    "cone_power",
    "gaussian",
    "density",
    "radial_integral",
    "ray_integral",
    "q_exponent",
    "ball_mass",
    "sphere_density_integral",
    "sup_norm",
]

MEASURE_KINDS = ("lebesgue", "radial_power", "cone_power", "gaussian")
RADIAL_GAUSS_NODES = 32


@dataclass(frozen=True)
class MeasureSpec:
    """A nonnegative density ``g`` on R^n.

    Optional parameter ``cone`` (a list of vectors ``c_i``) multiplies the
    density by the indicator of the convex cone ``{x : <x, c_i> >= 0}``.
    """

    kind: str
    dim: int
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in MEASURE_KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(self, "params", tuple(sorted((k, _freeze(v)) for k, v in self.params)))
        p = dict(self.params)
        if self.kind == "radial_power" and not p.get("p", 0) > 0:
            raise ValueError("radial_power needs p > 0")
        if self.kind == "cone_power":
            w = np.asarray(p.get("direction", ()), dtype=float)
            if w.shape != (self.dim,) or not np.linalg.norm(w) > 0:
                raise ValueError(f"cone_power needs a nonzero direction in R^{self.dim}")
            if not p.get("exponent", 0) > 0:
                raise ValueError("cone_power needs exponent 1/p > 0")
        if self.kind == "gaussian":
            if not p.get("scale", 0) > 0:
                raise ValueError("gaussian needs scale s > 0")
            t = p.get("truncation")
            if t is not None and not t > 0:
                raise ValueError("gaussian truncation radius must be positive")
        if "cone" in p:
            c = np.asarray(p["cone"], dtype=float)
            if c.ndim != 2 or c.shape[1] != self.dim:
                raise ValueError("cone normals must have shape (m, n)")

    def param(self, name, default=None):
        return dict(self.params).get(name, default)

    @property
    def cone(self):
        c = self.param("cone")
        return None if c is None else np.asarray(c, dtype=float)

    @property
    def degree(self) -> float | None:
        """Homogeneity degree of the density, or None."""
        if self.kind == "lebesgue":
            return 0.0
        if self.kind == "radial_power":
            return float(self.param("p"))
        if self.kind == "cone_power":
            return float(self.param("exponent"))
        return None

    @property
    def homogeneous(self) -> bool:
        return self.degree is not None

    @property
    def concavity(self) -> tuple[str, float | None]:
        """``(class, parameter)`` with class in p_concave, q_concave_measure, log_concave, none."""
        if self.kind == "lebesgue":
            return "q_concave_measure", 1.0 / self.dim
        if self.kind == "cone_power":
            return "p_concave", 1.0 / self.param("exponent")
        if self.kind == "gaussian":
            t = self.param("truncation")
            if t is not None:
                # exp(-p|x|^2/2s^2) is concave on |x|^2 <= s^2/p
                return "p_concave", (self.param("scale") / t) ** 2
            return "log_concave", None
        return "none", None

    @property
    def log_concave(self) -> bool:
        return self.kind in ("lebesgue", "gaussian", "cone_power")

    @property
    def ray_decreasing(self) -> bool:
        return self.kind in ("lebesgue", "gaussian")

    @property
    def support_cone(self):
        """Normals of the convex cone carrying the density (None for all of R^n)."""
        normals = []
        if self.kind == "cone_power":
            w = np.asarray(self.param("direction"), dtype=float)
            normals.append(w / np.linalg.norm(w))
        if self.cone is not None:
            normals.extend(self.cone)
        return np.array(normals) if normals else None

    def to_json(self) -> dict:
        params = {}
        for k, v in self.params:
            params[k] = [list(r) if isinstance(r, tuple) else r for r in v] if isinstance(v, tuple) else _json_number(v)
        return {"kind": self.kind, "dim": self.dim, "params": params}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data) -> "MeasureSpec":
        if isinstance(data, str):
            data = json.loads(data)
        params = {k: _from_json_number(v) for k, v in data.get("params", {}).items()}
        return cls(data["kind"], int(data["dim"]), tuple(params.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.kind}[n={self.dim}]({inner})"


# ---------------------------------------------------------------------------
# constructors


def lebesgue(n: int) -> MeasureSpec:
    return MeasureSpec("lebesgue", n)


def radial_power(n: int, p: float) -> MeasureSpec:
    """Density ``|x|^p``."""
    return MeasureSpec("radial_power", n, (("p", float(p)),))


def cone_power(direction, exponent: float = 1.0) -> MeasureSpec:
    """Density ``1_{<x,w> > 0} <x,w>^a`` with ``a = 1/p``."""
    w = [float(v) for v in direction]
    return MeasureSpec("cone_power", len(w), (("direction", w), ("exponent", float(exponent))))


def gaussian(n: int, scale: float = 1.0, truncation: float | None = None) -> MeasureSpec:
    """Density ``exp(-|x|^2 / 2 s^2)``, optionally restricted to ``|x| <= T``."""
    params = [("scale", float(scale))]
    if truncation is not None:
        params.append(("truncation", float(truncation)))
    return MeasureSpec("gaussian", n, tuple(params))


# ---------------------------------------------------------------------------
# pointwise


def _in_cone(m: MeasureSpec, x):
    c = m.cone
    if c is None:
        return np.ones(x.shape[:-1], dtype=bool)
    return np.all(x @ c.T >= 0, axis=-1)


def density(m: MeasureSpec, x) -> np.ndarray:
    """Pointwise density ``g(x)``; zero outside the support."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != m.dim:
        raise ValueError(f"expected points in R^{m.dim}")
    k = m.kind
    if k == "lebesgue":
        g = np.ones(x.shape[:-1])
    elif k == "radial_power":
        g = np.linalg.norm(x, axis=-1) ** m.param("p")
    elif k == "cone_power":
        t = x @ np.asarray(m.param("direction"), dtype=float)
        g = np.where(t > 0, np.maximum(t, 0.0) ** m.param("exponent"), 0.0)
    else:
        r2 = np.sum(x * x, axis=-1)
        g = np.exp(-r2 / (2 * m.param("scale") ** 2))
        t = m.param("truncation")
        if t is not None:
            g = np.where(r2 <= t * t, g, 0.0)
    return np.where(_in_cone(m, x), g, 0.0)


def radial_integral(m: MeasureSpec, u, rho, k: int, method: str = "auto") -> np.ndarray:
    """``int_0^rho g(r u) r^k dr`` for unit ``u``.

    Closed forms for every catalog kind (``method="auto"``); ``"quadrature"``
    uses 32-node Gauss-Legendre on ``[0, rho]`` instead.
    """
    u = np.asarray(u, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if method == "quadrature":
        x, w = np.polynomial.legendre.leggauss(RADIAL_GAUSS_NODES)
        t = 0.5 * (x + 1.0)
        r = rho[..., None] * t
        vals = density(m, r[..., None] * u[..., None, :]) * r**k
        return 0.5 * rho * np.sum(vals * w, axis=-1)
    if method != "auto":
        raise ValueError(f"unknown radial method {method!r}")
    kind = m.kind
    if kind == "lebesgue":
        out = rho ** (k + 1) / (k + 1)
    elif kind == "radial_power":
        e = k + 1 + m.param("p")
        out = rho**e / e
    elif kind == "cone_power":
        a = m.param("exponent")
        out = density(m, u) * rho ** (k + 1 + a) / (k + 1 + a)
        return out
    else:
        s = m.param("scale")
        t = m.param("truncation")
        top = rho if t is None else np.minimum(rho, t)
        h = 0.5 * (k + 1)
        out = math.exp((k + 1) * math.log(s) + 0.5 * (k - 1) * math.log(2.0) + gammaln(h)) * gammainc(h, top**2 / (2 * s * s))
    return np.where(_in_cone(m, u), out, 0.0)


def ray_integral(m: MeasureSpec, y, k: int | None = None, method: str = "auto") -> np.ndarray:
    """``int_0^1 g(t y) t^k dt`` (default ``k = n - 1``) for points ``y != 0``."""
    y = np.asarray(y, dtype=float)
    k = m.dim - 1 if k is None else k
    if method == "quadrature":
        x, w = np.polynomial.legendre.leggauss(RADIAL_GAUSS_NODES)
        t = 0.5 * (x + 1.0)
        vals = density(m, t[:, None, None] * y[None, ...]) if y.ndim > 1 else density(m, t[:, None] * y)
        tk = (t**k).reshape((-1,) + (1,) * (vals.ndim - 1))
        return 0.5 * np.tensordot(w, vals * tk, axes=(0, 0))
    r = np.linalg.norm(y, axis=-1)
    return radial_integral(m, y / r[..., None], r, k) / r ** (k + 1)


def q_exponent(m: MeasureSpec) -> float | None:
    """Concavity exponent ``q`` of the measure: ``1/(n + 1/p)`` for p-concave densities."""
    cls, par = m.concavity
    if cls == "q_concave_measure":
        return par
    if cls == "p_concave":
        return 1.0 / (m.dim + 1.0 / par)
    return None


def sup_norm(m: MeasureSpec, region_radius: float | None = None) -> float:
    """``||g||_inf``, over ``region_radius * B`` when the global sup is infinite."""
    k = m.kind
    if k in ("lebesgue", "gaussian"):
        return 1.0
    if region_radius is None:
        return math.inf
    if k == "radial_power":
        return region_radius ** m.param("p")
    w = np.linalg.norm(m.param("direction"))
    return (region_radius * w) ** m.param("exponent")


def sphere_density_integral(m: MeasureSpec, level: int = 3) -> float:
    """``int_{S^{n-1}} g(u) du``."""
    n = m.dim
    if m.cone is None:
        if m.kind in ("lebesgue",) or m.kind == "radial_power":
            return sphere_area(n)
        if m.kind == "cone_power":
            a = m.param("exponent")
            w = np.linalg.norm(m.param("direction"))
            return w**a * sphere_area(n - 1) * 0.5 * beta(0.5 * (a + 1), 0.5 * (n - 1))
        if m.kind == "gaussian":
            t = m.param("truncation")
            if t is None or t >= 1:
                return sphere_area(n) * math.exp(-1.0 / (2 * m.param("scale") ** 2))
            return 0.0
    rule = sphere_rule(n, level)
    return float(integrate(rule, density(m, rule.nodes))[0])


def ball_mass(m: MeasureSpec, radius: float = 1.0, level: int = 3) -> float:
    """``mu(R B_2^n)``; closed forms for the catalog, polar quadrature with a cone."""
    n = m.dim
    R = float(radius)
    if not R > 0:
        raise ValueError("radius must be positive")
    if m.cone is None:
        if m.kind == "lebesgue":
            return ball_volume(n) * R**n
        if m.kind == "radial_power":
            p = m.param("p")
            return sphere_area(n) * R ** (n + p) / (n + p)
        if m.kind == "cone_power":
            a = m.param("exponent")
            return sphere_density_integral(m) * R ** (n + a) / (n + a)
        if m.kind == "gaussian":
            s = m.param("scale")
            t = m.param("truncation")
            top = R if t is None else min(R, t)
            return (2 * math.pi * s * s) ** (0.5 * n) * float(gammainc(0.5 * n, top * top / (2 * s * s)))
    rule = sphere_rule(n, level)
    vals = radial_integral(m, rule.nodes, np.full(rule.size, R), n - 1)
    return float(integrate(rule, vals)[0])
