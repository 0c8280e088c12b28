"""Seeded theorem instances, suites and manifests."""
from __future__ import annotations

import math

from scipy.optimize import brentq

from .. import bodies as bd
from .. import functionals as fn
from ..measures import ball_mass, q_exponent
from .hypotheses import enforce_hypothesis, frame_grid, hyperplane_grid
from .instances import random_body, random_measure, rng_for
from .lemmas import LEMMAS, lemma_bank, lemma_instance
from .report import CheckReport
from .runner import run_jobs
from .theorems import (
    verify_cor13,
    verify_gk,
    verify_prop31,
    verify_thm12,
    verify_thm14,
    verify_thm51,
    verify_thm61,
)

__all__ = ["THEOREMS", "SUITES", "theorem_instance", "suite_seeds", "run_suite", "run_manifest"]

THEOREMS = ("gk", "thm12a", "thm12b", "cor13a", "cor13b", "prop31", "thm14", "thm51", "thm61")
JOHN_KINDS = ("ball", "ellipsoid", "lp_ball", "box", "cross_polytope")
SUITES = ("lemma_bank", "theorems", "all")


def _radius_for_mass(m, target, hi=1e3):
    """r with mu(rB) = target, or None when the target exceeds the total mass."""
    if ball_mass(m, hi) <= target:
        return None
    return brentq(lambda r: ball_mass(m, r) - target, 1e-9, hi, xtol=1e-14, rtol=1e-13)


def _shrink_to_mass(m, K, target, level):
    """Dilation factor t <= 1 with mu(tK) = target (K unchanged when already below)."""
    if fn.body_measure(m, K, level).value <= target:
        return 1.0
    return brentq(lambda t: fn.body_measure(m, bd.dilate(K, t), level).value - target, 1e-12, 1.0,
                  xtol=1e-15, rtol=1e-13)


def _enforce_mu(K, L, g, m, level):
    """Enforce ``P_{mu,K} <= mu_{n-1}(L cap theta^perp)`` by growing L, or by shrinking K
    when bounded sections of a finite measure cannot catch up.  Returns (K, L, details)."""
    pair = ("mu_projection", "section")
    try:
        s = enforce_hypothesis(K, L, pair, g, m, level, scale="L")
        return K, bd.dilate(L, s), {"L_scale": s}
    except ValueError:
        s = enforce_hypothesis(K, L, pair, g, m, level, scale="K")
        return bd.dilate(K, s), L, {"K_scale": s}


def theorem_instance(name: str, seed: int, level: int = 3, dims=None, gate: bool = False) -> CheckReport:
    """Run theorem check ``name`` on the enforced random instance fixed by ``seed``.

    With ``gate=True`` the thm51 instance shrinks K until the mass condition
    of the sharper sub-bound holds, so that sub-report is always applicable.
    """
    rng = rng_for(seed, name)
    if dims is None:
        dims = (2, 3, 4) if name in ("gk", "thm12a", "cor13a") else (2, 3)
    n = int(rng.choice(dims))
    g = hyperplane_grid(n)
    if name == "gk":
        K, L = random_body(rng, n), random_body(rng, n)
        s = enforce_hypothesis(K, L, ("projection", "section"), g, None, level, scale="K")
        rep = verify_gk(bd.dilate(K, s), L, grid=g, level=level)
        rep.details["K_scale"] = s
    elif name == "thm12a":
        K, L = random_body(rng, n), random_body(rng, n)
        s = enforce_hypothesis(K, L, ("section", "projection"), g, None, level, scale="L")
        rep = verify_thm12(K, bd.dilate(L, s), None, "a", g, level)
        rep.details["L_scale"] = s
    elif name == "thm12b":
        m = random_measure(rng, n, ("lebesgue", "cone_power", "gaussian", "radial_power"))
        K, L = random_body(rng, n), random_body(rng, n)
        s = enforce_hypothesis(K, L, ("section", "mu_projection"), g, m, level, scale="K")
        rep = verify_thm12(bd.dilate(K, s), L, m, "b", g, level)
        rep.details["K_scale"] = s
    elif name == "cor13a":
        K, L = random_body(rng, n, JOHN_KINDS), random_body(rng, n, JOHN_KINDS)
        rep = verify_cor13(K, L, None, "a", g, level, enforce=True)
    elif name == "cor13b":
        m = random_measure(rng, n, ("lebesgue", "cone_power", "gaussian"))
        K, L = random_body(rng, n, JOHN_KINDS), random_body(rng, n, JOHN_KINDS)
        rep = verify_cor13(K, L, m, "b", g, level, enforce=True)
    elif name == "prop31":
        n = int(rng.choice([3, 4])) if dims == (2, 3) else n
        k = int(rng.integers(1, n))
        K, L = random_body(rng, n), random_body(rng, n, JOHN_KINDS)
        frames = frame_grid(n, k, 24, seed)
        s = enforce_hypothesis(K, L, ("section_k", "projection_k"), frames, None, level, scale="K")
        rep = verify_prop31(bd.dilate(K, s), L, k, frames, seed=seed, level=level)
        rep.details["K_scale"] = s
    elif name == "thm14":
        m = random_measure(rng, n, ("lebesgue", "cone_power"))
        K, L = random_body(rng, n), random_body(rng, n)
        if m.kind == "lebesgue":
            s = enforce_hypothesis(K, L, ("mu_projection", "section"), g, m, level, scale="L")
            rep = verify_thm14(K, bd.dilate(L, s), m, 0.0, g, level)
            rep.details["L_scale"] = s
        else:
            rep = verify_thm14(K, L, m, "auto", g, level)
    elif name == "thm51":
        m = random_measure(rng, n, ("lebesgue", "truncated_gaussian"))
        K, L = random_body(rng, n), random_body(rng, n)
        q = q_exponent(m)
        if gate:
            # enforce by shrinking K, then shrink further below the mass gate
            r = float(rng.uniform(0.5, 3.0))
            s = enforce_hypothesis(K, L, ("mu_projection", "section"), g, m, level, scale="K")
            t = _shrink_to_mass(m, bd.dilate(K, s), 0.9 * (q / (q + 1)) ** (1 / q) * ball_mass(m, r), level)
            K = bd.dilate(K, s * t)
            scaled = {"K_scale": s * t}
        else:
            K, L, scaled = _enforce_mu(K, L, g, m, level)
        mk = fn.body_measure(m, K, level).value
        r = r if gate else None
        if not gate and rng.random() < 0.5:
            # place r so the corollary gate holds
            r = _radius_for_mass(m, mk / (q / (q + 1)) ** (1 / q) * rng.uniform(1.0, 1.5))
        if r is None:
            r = float(rng.uniform(0.5, 3.0))
        rep = verify_thm51(K, L, m, r, g, level)
        rep.details.update(scaled)
    elif name == "thm61":
        m = random_measure(rng, n, ("lebesgue", "gaussian"))
        K, L = random_body(rng, n), random_body(rng, n)
        K, L, scaled = _enforce_mu(K, L, g, m, level)
        mk = fn.body_measure(m, K, level).value
        u = rng.uniform(1.05, math.e * 0.98) if rng.random() < 0.5 else rng.uniform(math.e * 1.02, 3 * math.e)
        r = _radius_for_mass(m, mk * u) or _radius_for_mass(m, mk * 1.05)
        if r is None:
            r = 10.0
        rep = verify_thm61(K, L, m, r, g, level)
        rep.details.update(scaled)
    else:
        raise ValueError(f"unknown theorem check {name!r}; expected one of {THEOREMS}")
    rep.seed = seed
    return rep


def suite_seeds(seed: int, count: int) -> list[int]:
    """Instance seeds of a battery, derived from the battery seed."""
    rng = rng_for(seed, "battery")
    return [int(x) for x in rng.integers(0, 2**31 - 1, size=count)]


def run_suite(suite: str, seed: int = 0, level: int = 3, count: int | None = None,
              threads: int | None = None) -> list[CheckReport]:
    """``lemma_bank`` (default 200 instances), ``theorems`` (two per check) or ``all``."""
    if suite == "lemma_bank":
        return lemma_bank(suite_seeds(seed, 200 if count is None else count), level, threads=threads)
    if suite == "theorems":
        seeds = suite_seeds(seed + 1, 2 * len(THEOREMS) if count is None else count)
        jobs = [(lambda i=i, s=s: theorem_instance(THEOREMS[i % len(THEOREMS)], s, level))
                for i, s in enumerate(seeds)]
        return run_jobs(jobs, threads)
    if suite == "all":
        return run_suite("lemma_bank", seed, level, count, threads) + run_suite("theorems", seed, level, count,
                                                                                   threads)
    raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")


def run_manifest(entries, level: int = 3, threads: int | None = None) -> list[CheckReport]:
    """Run a list of ``{"check_id": name, "seed": s}`` entries (lemma or theorem names).

    Theorem entries may also carry ``"gate": true`` (thm51 only).
    """
    jobs = []
    for e in entries:
        name, s = e["check_id"], int(e.get("seed", 0))
        lv = int(e.get("level", level))
        if name in LEMMAS:
            jobs.append(lambda name=name, s=s, lv=lv: lemma_instance(name, s, lv))
        elif name in THEOREMS:
            gate = bool(e.get("gate", False))
            jobs.append(lambda name=name, s=s, lv=lv, gate=gate: theorem_instance(name, s, lv, gate=gate))
        else:
            raise ValueError(f"unknown check_id {name!r} in manifest")
    return run_jobs(jobs, threads)
