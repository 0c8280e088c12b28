"""Directional hypotheses: evaluation on a grid and enforcement by dilation.

A hypothesis compares a directional functional of K with one of L,
``lhs_K(theta) <= rhs_L(theta) (+ eps)`` for every direction (or subspace) of
a deterministic grid.  Functional kinds:

* ``"section"``        weighted central section ``mu_{n-1}(K cap theta^perp)``
* ``"projection"``     shadow ``|K | theta^perp|``
* ``"mu_projection"``  ``P_{mu,K}(theta)``
* ``"section_k"`` / ``"projection_k"``  k-dimensional versions over frames
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .. import bodies as bd
from .. import functionals as fn
from ..bodies import BodySpec
from ..measures import MeasureSpec, lebesgue
from ..quadrature import Frame, direction_grid, grassmann_sample

__all__ = ["KINDS", "HypothesisEval", "directional_values", "evaluate_hypothesis", "enforce_hypothesis",
           "hyperplane_grid", "frame_grid", "DEFAULT_GRID_LEVEL"]

KINDS = ("section", "projection", "mu_projection", "section_k", "projection_k")
DEFAULT_GRID_LEVEL = 2


def hyperplane_grid(n: int, level: int = DEFAULT_GRID_LEVEL) -> np.ndarray:
    # every hyperplane functional is even in theta, so one of each antipodal pair suffices
    return direction_grid(n, level, symmetric=True)


def frame_grid(n: int, k: int, count: int = 32, seed: int = 0) -> list[Frame]:
    return grassmann_sample(n, k, count, seed)


def _degree(kind: str, m: MeasureSpec | None, n: int, k: int | None):
    """Scaling exponent of the functional under K -> sK, or None."""
    if kind in ("section_k", "projection_k"):
        return k
    if kind == "projection":
        return n - 1
    if m is None or m.kind == "lebesgue" and m.cone is None:
        return n - 1
    if m.homogeneous:
        return n - 1 + m.degree
    return None


def directional_values(kind: str, body: BodySpec, grid, m: MeasureSpec | None = None, level: int = 3,
                       seed: int | None = None):
    """Values and error estimates of a directional functional on a grid.

    Returns ``(values, errors, methods)``; ``grid`` is an array of unit
    normals for hyperplane kinds and a list of frames for k-dimensional kinds.
    """
    if kind == "section":
        v, e = fn.section_measures_many(m or lebesgue(body.dim), body, grid, level, seed)
        return v, e, "polar_quadrature"
    if kind == "projection":
        v, e, method = fn.projection_areas_many(body, grid, level, seed)
        return v, e, method
    if kind == "mu_projection":
        v, e = fn.mu_projections_many(m or lebesgue(body.dim), body, grid, level, seed=seed)
        return v, e, "boundary_integral"
    if kind in ("section_k", "projection_k"):
        f = fn.kdim_section_volume if kind == "section_k" else fn.kdim_projection_volume
        vals = [f(body, fr, level, seed) for fr in grid]
        methods = sorted({x.method for x in vals})
        return (np.array([x.value for x in vals]), np.array([x.error_estimate for x in vals]),
                "+".join(methods))
    raise ValueError(f"unknown functional kind {kind!r}; expected one of {KINDS}")


@dataclass
class HypothesisEval:
    """Both sides of a directional hypothesis on a grid."""

    pair: tuple
    lhs: np.ndarray
    lhs_err: np.ndarray
    rhs: np.ndarray
    rhs_err: np.ndarray
    eps: float = 0.0
    methods: tuple = ()
    extra: dict = field(default_factory=dict)

    @property
    def gaps(self) -> np.ndarray:
        return self.rhs + self.eps - self.lhs

    @property
    def margin(self) -> float:
        return float(np.min(self.gaps))

    @property
    def noise(self) -> float:
        scale = float(max(np.max(np.abs(self.lhs)), np.max(np.abs(self.rhs)), 0.0))
        return float(np.max(self.lhs_err + self.rhs_err)) + 1e-10 * scale

    @property
    def size(self) -> int:
        return len(self.lhs)

    def summary(self) -> dict:
        i = int(np.argmin(self.gaps))
        return {"pair": list(self.pair), "eps": self.eps, "argmin": i, "lhs_at_min": float(self.lhs[i]),
                "rhs_at_min": float(self.rhs[i]), "methods": list(self.methods)}


def evaluate_hypothesis(K: BodySpec, L: BodySpec, pair, grid, m: MeasureSpec | None = None, level: int = 3,
                        seed: int | None = None, eps: float = 0.0) -> HypothesisEval:
    lk, rk = pair
    lv, le, lm = directional_values(lk, K, grid, m, level, seed)
    rv, re_, rm = directional_values(rk, L, grid, m, level, seed)
    return HypothesisEval(tuple(pair), lv, le, rv, re_, float(eps), (lm, rm))


def _min_gap(kind, body, grid, m, level, seed, other, sign):
    v, _, _ = directional_values(kind, body, grid, m, level, seed)
    return float(np.min(sign * (v - other)))


def enforce_hypothesis(K: BodySpec, L: BodySpec, pair, grid, m: MeasureSpec | None = None, level: int = 3,
                       seed: int | None = None, scale: str = "L", tol: float = 1e-12) -> float:
    """Dilation factor s that makes the hypothesis hold with minimum margin 0.

    With ``scale="L"`` this is the smallest s such that ``lhs(K) <= rhs(sL)``
    on the grid; with ``scale="K"`` the largest s such that
    ``lhs(sK) <= rhs(L)`` for every smaller dilation.  Homogeneous functionals
    use their scaling law; otherwise s is found by an upward geometric scan
    over ``[2^-10, 2^10]`` and bisection, returning the end of that range when
    the hypothesis holds throughout.
    """
    if scale not in ("K", "L"):
        raise ValueError("scale must be 'K' or 'L'")
    lk, rk = pair
    n = K.dim
    k = grid[0].k if isinstance(grid, (list, tuple)) and grid and isinstance(grid[0], Frame) else None
    lv, _, _ = directional_values(lk, K, grid, m, level, seed)
    rv, _, _ = directional_values(rk, L, grid, m, level, seed)
    moving_kind, body, fixed = (rk, L, lv) if scale == "L" else (lk, K, rv)
    d = _degree(moving_kind, m, n, k)
    if d is not None:
        with np.errstate(divide="ignore", invalid="ignore"):
            if scale == "L":
                ratio = np.where(lv > 0, lv / rv, 0.0)
                s = float(np.max(ratio)) ** (1.0 / d)
            else:
                ratio = np.where(lv > 0, rv / lv, np.inf)
                s = float(np.min(ratio)) ** (1.0 / d)
        if not (math.isfinite(s) and s > 0):
            raise ValueError("hypothesis cannot be enforced by dilation on this grid")
        return s

    # no scaling law: gap(s) = min over grid of the hypothesis margin for the dilated body
    sign = 1.0 if scale == "L" else -1.0

    def gap(s):
        return _min_gap(moving_kind, bd.dilate(body, s), grid, m, level, seed, fixed, sign)

    if scale == "L":
        # smallest s with gap(s) >= 0; scan upward in a geometric grid
        s_lo, s = None, 2.0 ** -10
        while s <= 2.0**10:
            if gap(s) >= 0:
                break
            s_lo, s = s, 2 * s
        else:
            raise ValueError("hypothesis cannot be enforced by dilating L")
        if s_lo is None:
            return float(s)  # holds already at the smallest tested dilation
        ok, bad = s, s_lo
    else:
        # largest s of the component containing small dilations: lhs(sK) need
        # not be monotone in s (a gaussian mu-projection decays for large s),
        # so scan upward and stop at the first failure
        if gap(2.0**-10) < 0:
            raise ValueError("hypothesis cannot be enforced by shrinking K")
        ok, s = 2.0**-10, 2.0**-9
        while s <= 2.0**10:
            if gap(s) < 0:
                break
            ok, s = s, 2 * s
        else:
            return float(ok)  # holds up to the largest tested dilation
        bad = s
    while abs(ok - bad) > tol * ok:
        mid = 0.5 * (ok + bad)
        if gap(mid) >= 0:
            ok = mid
        else:
            bad = mid
    return float(ok)
