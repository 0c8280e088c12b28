"""Seeded random catalog instances for batteries."""
from __future__ import annotations

import numpy as np

from .. import bodies as bd
from .. import measures as ms
from ..bodies import BodySpec

__all__ = ["rng_for", "random_body", "random_pair", "random_measure", "random_unit"]

SYMMETRIC_KINDS = ("ball", "ellipsoid", "lp_ball", "box", "cross_polytope", "h_polytope")


def rng_for(seed: int, *salt) -> np.random.Generator:
    """Independent generator for ``seed`` and a salt tuple (stable across runs)."""
    words = [int(seed) & 0xFFFFFFFF]
    for s in salt:
        if isinstance(s, str):
            words.extend(s.encode())
        else:
            words.append(int(s) & 0xFFFFFFFF)
    return np.random.default_rng(np.random.SeedSequence(words))


def random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _random_hpoly(rng, n):
    count = int(rng.integers(n, n + 3))
    dirs = rng.standard_normal((count, n))
    dirs[:n] += 2 * np.eye(n)  # keeps the normals well spread
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    offs = rng.uniform(0.7, 1.4, count)
    return bd.h_polytope(np.vstack([dirs, -dirs]), np.concatenate([offs, offs]))


def random_body(rng: np.random.Generator, n: int, kinds=SYMMETRIC_KINDS, size=(0.6, 1.6)) -> BodySpec:
    """Origin-symmetric catalog body with parameters drawn from fixed ranges."""
    kind = kinds[int(rng.integers(len(kinds)))]
    lo, hi = size
    if kind == "ball":
        return bd.ball(n, rng.uniform(lo, hi))
    if kind == "ellipsoid":
        return bd.ellipsoid(rng.uniform(lo, hi, n))
    if kind == "lp_ball":
        p = float(rng.choice([1.5, 3.0, 4.0]))
        return bd.lp_ball(n, p, rng.uniform(lo, hi))
    if kind == "box":
        return bd.box(rng.uniform(lo, hi, n))
    if kind == "cross_polytope":
        return bd.cross_polytope(n, 1.5 * rng.uniform(lo, hi))
    if kind == "h_polytope":
        return _random_hpoly(rng, n)
    raise ValueError(f"unknown body kind {kind!r}")


def random_pair(rng: np.random.Generator, n: int, kinds=SYMMETRIC_KINDS):
    return random_body(rng, n, kinds), random_body(rng, n, kinds)


def random_measure(rng: np.random.Generator, n: int, kinds=("lebesgue", "cone_power", "gaussian")):
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "lebesgue":
        return ms.lebesgue(n)
    if kind == "cone_power":
        return ms.cone_power(random_unit(rng, n), float(rng.choice([0.5, 1.0, 2.0])))
    if kind == "gaussian":
        return ms.gaussian(n, float(rng.uniform(0.7, 1.5)))
    if kind == "truncated_gaussian":
        s = float(rng.uniform(0.8, 1.5))
        return ms.gaussian(n, s, float(rng.uniform(2.0, 3.0)))
    if kind == "radial_power":
        return ms.radial_power(n, float(rng.choice([1.0, 2.0])))
    raise ValueError(f"unknown measure kind {kind!r}")
