"""Executable comparison theorems for sections, projections and measures.

Every ``verify_*`` function evaluates the directional hypothesis on a
deterministic grid, evaluates both sides of the conclusion and returns a
:class:`CheckReport`.  Hypotheses are not enforced here; use
:func:`enforce_hypothesis` (or ``enforce=True`` where offered) to dilate one
body until the hypothesis holds with margin zero.
"""
from __future__ import annotations

import math

import numpy as np

from .. import bodies as bd
from .. import functionals as fn
from ..bodies import BodySpec
from ..measures import MeasureSpec, ball_mass, lebesgue, q_exponent, radial_integral, sup_norm
from ..quadrature import ball_volume, grassmann_sample, integrate, subspace_rule
from .hypotheses import (
    DEFAULT_GRID_LEVEL,
    enforce_hypothesis,
    evaluate_hypothesis,
    frame_grid,
    hyperplane_grid,
)
from .report import CheckReport, noise_floor, propagate

__all__ = [
    "UnsupportedCombination",
    "verify_gk",
    "verify_thm12",
    "verify_cor13",
    "verify_prop31",
    "aleksandrov_check",
    "verify_thm14",
    "verify_thm51",
    "verify_prop53",
    "verify_thm61",
    "thm14_coefficient",
]


class UnsupportedCombination(ValueError):
    """The measure or body does not meet a check's standing assumptions."""


def _grid(n, grid):
    if grid is None:
        return hyperplane_grid(n, DEFAULT_GRID_LEVEL)
    if isinstance(grid, (int, np.integer)):
        return hyperplane_grid(n, int(grid))
    return np.atleast_2d(np.asarray(grid, dtype=float))


def _measure(m, n):
    m = lebesgue(n) if m is None else m
    if m.dim != n:
        raise ValueError(f"measure lives in R^{m.dim} but bodies in R^{n}")
    return m


def _same_dim(K, L):
    if K.dim != L.dim:
        raise ValueError("K and L must live in the same dimension")
    return K.dim


def _need_symmetric(body, name):
    if not body.symmetric:
        raise UnsupportedCombination(f"{name} must be origin-symmetric for this check")


def _hyp_fields(h):
    return {"hypothesis_margin": h.margin, "hypothesis_noise": h.noise, "grid_size": h.size}


def _conclusion_noise(f, values, errors, lhs, rhs):
    return propagate(f, values, errors) + noise_floor(lhs, rhs)


def _mass(m, K, level, seed):
    return fn.body_measure(m, K, level, seed)


def _config(**kw):
    out = {}
    for k, v in kw.items():
        out[k] = v.to_json() if hasattr(v, "to_json") else v
    return out


# ---------------------------------------------------------------------------
# Lebesgue comparison of projections with sections


def verify_gk(K: BodySpec, L: BodySpec, k: int | None = None, grid=None, frames=None, level: int = 3,
              seed: int | None = None, count: int = 32) -> CheckReport:
    """``|K|F| <= |L cap F|`` for all k-subspaces F implies ``|K| <= |L|``.

    For ``k = n - 1`` the hypothesis grid is a set of hyperplane normals,
    otherwise a Haar sample of ``count`` frames (seeded by ``seed``).
    """
    n = _same_dim(K, L)
    k = n - 1 if k is None else int(k)
    if not 1 <= k <= n - 1:
        raise ValueError("k must lie in 1..n-1")
    if k == n - 1:
        g = _grid(n, grid)
        h = evaluate_hypothesis(K, L, ("projection", "section"), g, None, level, seed)
    else:
        g = frames if frames is not None else frame_grid(n, k, count, 0 if seed is None else seed)
        h = evaluate_hypothesis(K, L, ("projection_k", "section_k"), g, None, level, seed)
    m = lebesgue(n)
    vk, vl = _mass(m, K, level, seed), _mass(m, L, level, seed)
    noise = _conclusion_noise(lambda a, b: b - a, [vk.value, vl.value], [vk.error_estimate, vl.error_estimate],
                              vk.value, vl.value)
    return CheckReport("gk", vk.value, vl.value, noise, seed=seed, config=_config(K=K, L=L, k=k, level=level),
                       details=h.summary(), provenance=[vk.to_json(), vl.to_json()], **_hyp_fields(h))


# ---------------------------------------------------------------------------
# radius-dependent comparison


def verify_thm12(K: BodySpec, L: BodySpec, m: MeasureSpec | None = None, variant: str = "a", grid=None,
                 level: int = 3, seed: int | None = None, diagnostics: bool = False,
                 isotropic_samples: int = 50_000) -> CheckReport:
    """Comparison with a constant depending on the circumradius R of K and inradius r of L.

    Variant ``a`` (Lebesgue): ``|K cap theta^perp| <= |L | theta^perp|``
    implies ``|K| <= (R/r)|L|``.  With ``diagnostics`` a sub-report carries
    the realized constant of the isotropic-constant bound, which has no
    explicit constant and therefore no verdict.

    Variant ``b`` (symmetric L, any measure):
    ``mu_{n-1}(K cap theta^perp) <= P_{mu,L}(theta)`` implies
    ``mu(K) <= R mu(L) / (r (1 - 1/n))``.
    """
    n = _same_dim(K, L)
    g = _grid(n, grid)
    R = bd.radii(K)[1]
    r = bd.radii(L)[0]
    if variant == "a":
        if m is not None and not (m.kind == "lebesgue" and m.cone is None):
            raise UnsupportedCombination("variant a requires Lebesgue measure")
        m = lebesgue(n)
        h = evaluate_hypothesis(K, L, ("section", "projection"), g, m, level, seed)
        factor = R / r
    elif variant == "b":
        m = _measure(m, n)
        _need_symmetric(L, "L")
        h = evaluate_hypothesis(K, L, ("section", "mu_projection"), g, m, level, seed)
        factor = R / (r * (1 - 1 / n))
    else:
        raise ValueError("variant must be 'a' or 'b'")
    vk, vl = _mass(m, K, level, seed), _mass(m, L, level, seed)
    lhs, rhs = vk.value, factor * vl.value
    noise = _conclusion_noise(lambda a, b: factor * b - a, [vk.value, vl.value],
                              [vk.error_estimate, vl.error_estimate], lhs, rhs)
    details = h.summary()
    details.update({"variant": variant, "R": R, "r": r, "factor": factor,
                    "ratio": r * vk.value / (R * vl.value)})
    rep = CheckReport(f"thm12{variant}", lhs, rhs, noise, seed=seed,
                      config=_config(K=K, L=L, measure=m, variant=variant, level=level),
                      details=details, provenance=[vk.to_json(), vl.to_json()], **_hyp_fields(h))
    if diagnostics and variant == "a":
        iso = fn.isotropic_constant(K, isotropic_samples, 0 if seed is None else seed)
        bound = math.sqrt(iso.value) * n**0.75 * (R / r) ** (n / (2 * n - 1)) * vl.value
        rep.sub_reports.append(CheckReport(
            "thm12a_isotropic_bound", vk.value, bound, 0.0, diagnostic=True, seed=seed,
            details={"realized_constant": vk.value / bound, "isotropic_constant": iso.value,
                     "isotropic_error": iso.error_estimate},
            provenance=[iso.to_json()]))
    return rep


def verify_cor13(K: BodySpec, L: BodySpec, m: MeasureSpec | None = None, variant: str = "a", grid=None,
                 level: int = 3, seed: int | None = None, normalize: bool = True,
                 enforce: bool = False) -> CheckReport:
    """John-position comparison: ``|K| <= sqrt(n)|L|`` (a) or ``mu(K) <= sqrt(n) mu(L)/(1-1/n)`` (b).

    Both bodies are moved to John position first (``normalize``).  With
    ``enforce`` K is shrunk (never enlarged) until the hypothesis holds.
    """
    n = _same_dim(K, L)
    if normalize:
        K, L = bd.john_normalize(K), bd.john_normalize(L)
    g = _grid(n, grid)
    if variant == "a":
        if m is not None and not (m.kind == "lebesgue" and m.cone is None):
            raise UnsupportedCombination("variant a requires Lebesgue measure")
        m = lebesgue(n)
        pair = ("section", "projection")
        factor = math.sqrt(n)
    elif variant == "b":
        m = _measure(m, n)
        _need_symmetric(L, "L")
        pair = ("section", "mu_projection")
        factor = math.sqrt(n) / (1 - 1 / n)
    else:
        raise ValueError("variant must be 'a' or 'b'")
    s = 1.0
    if enforce:
        s = min(1.0, enforce_hypothesis(K, L, pair, g, m, level, seed, scale="K"))
        K = bd.dilate(K, s)
    h = evaluate_hypothesis(K, L, pair, g, m, level, seed)
    vk, vl = _mass(m, K, level, seed), _mass(m, L, level, seed)
    lhs, rhs = vk.value, factor * vl.value
    noise = _conclusion_noise(lambda a, b: factor * b - a, [vk.value, vl.value],
                              [vk.error_estimate, vl.error_estimate], lhs, rhs)
    details = h.summary()
    details.update({"variant": variant, "factor": factor, "K_scale": s})
    return CheckReport(f"cor13{variant}", lhs, rhs, noise, seed=seed,
                       config=_config(K=K, L=L, measure=m, variant=variant, level=level),
                       details=details, provenance=[vk.to_json(), vl.to_json()], **_hyp_fields(h))


# ---------------------------------------------------------------------------
# lower-dimensional sections against projections


def aleksandrov_check(L: BodySpec, k: int, frames=None, count: int = 64, seed: int = 0,
                      level: int = 3) -> CheckReport:
    """``((1/omega_k) E|L | H|)^{1/k} <= w(L)`` with the mean over Haar k-subspaces.

    The expectation is a Monte Carlo mean over ``count`` frames; the noise
    tolerance is three standard errors (propagated) plus quadrature errors.
    """
    n = L.dim
    frames = frames if frames is not None else grassmann_sample(n, k, count, seed + 7919)
    vals = [fn.kdim_projection_volume(L, f, None, seed) for f in frames]
    v = np.array([x.value for x in vals])
    bias = max(x.error_estimate for x in vals)
    mean = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
    wk = ball_volume(k)
    lhs = (mean / wk) ** (1 / k)
    w = fn.mean_width(L, level, seed)
    noise = propagate(lambda a, b: (a / wk) ** (1 / k) - b, [mean, w.value], [3 * se + bias, w.error_estimate])
    noise += noise_floor(lhs, w.value)
    return CheckReport("aleksandrov", lhs, w.value, noise, grid_size=len(frames), seed=seed,
                       config=_config(L=L, k=k), details={"mean_projection": mean, "standard_error": se},
                       provenance=[w.to_json()])


def verify_prop31(K: BodySpec, L: BodySpec, k: int, frames=None, count: int = 32, seed: int = 0,
                  level: int = 3, aleksandrov: bool = True) -> CheckReport:
    """``|K cap H| <= |L | H|`` for k-subspaces H implies ``|K| <= omega_n R^{n-k} w(L)^k``."""
    n = _same_dim(K, L)
    if not 1 <= k <= n - 1:
        raise ValueError("k must lie in 1..n-1")
    frames = frames if frames is not None else frame_grid(n, k, count, seed)
    h = evaluate_hypothesis(K, L, ("section_k", "projection_k"), frames, None, level, seed)
    R = bd.radii(K)[1]
    vk = _mass(lebesgue(n), K, level, seed)
    w = fn.mean_width(L, level, seed)
    wn = ball_volume(n)
    rhs = wn * R ** (n - k) * w.value**k
    noise = _conclusion_noise(lambda a, b: wn * R ** (n - k) * b**k - a, [vk.value, w.value],
                              [vk.error_estimate, w.error_estimate], vk.value, rhs)
    details = h.summary()
    details.update({"R": R, "mean_width": w.value, "k": k})
    rep = CheckReport("prop31", vk.value, rhs, noise, seed=seed, config=_config(K=K, L=L, k=k, level=level),
                      details=details, provenance=[vk.to_json(), w.to_json()], **_hyp_fields(h))
    if aleksandrov:
        rep.sub_reports.append(aleksandrov_check(L, k, seed=seed, level=level))
    return rep


# ---------------------------------------------------------------------------
# mu-projections against sections


def _need_homogeneous_concave(m):
    if not (m.homogeneous and m.concavity[0] in ("q_concave_measure", "p_concave")):
        raise UnsupportedCombination(
            f"{m.kind} measure: this check requires a p-concave, 1/p-homogeneous density "
            "(lebesgue or cone_power)")


def thm14_coefficient(m: MeasureSpec) -> float:
    """Coefficient of eps in the right-hand side: ``omega_n / (mu(B)^q omega_{n-1})``."""
    n = m.dim
    q = q_exponent(m)
    return float(ball_volume(n) / (ball_mass(m, 1.0) ** q * ball_volume(n - 1)))


def verify_thm14(K: BodySpec, L: BodySpec, m: MeasureSpec, eps=0.0, grid=None, level: int = 3,
                 seed: int | None = None) -> CheckReport:
    """Stability form: ``P_{mu,K} <= mu_{n-1}(L cap theta^perp) + eps`` implies
    ``mu(K)^{1-q} <= ((1-1/n)/(1-q)) mu(L)^{1-q} + C eps``.

    ``eps="auto"`` uses the smallest eps for which the hypothesis holds on the
    grid (useful for cone measures, whose sections can vanish).
    """
    n = _same_dim(K, L)
    m = _measure(m, n)
    _need_homogeneous_concave(m)
    _need_symmetric(K, "K")
    g = _grid(n, grid)
    h = evaluate_hypothesis(K, L, ("mu_projection", "section"), g, m, level, seed)
    if isinstance(eps, str):
        if eps != "auto":
            raise ValueError("eps must be a number or 'auto'")
        eps = max(0.0, -h.margin)
    eps = float(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    h.eps = eps
    q = q_exponent(m)
    c = thm14_coefficient(m)
    a = (1 - 1 / n) / (1 - q)
    vk, vl = _mass(m, K, level, seed), _mass(m, L, level, seed)
    lhs = vk.value ** (1 - q)
    rhs = a * vl.value ** (1 - q) + c * eps
    noise = _conclusion_noise(lambda x, y: a * y ** (1 - q) + c * eps - x ** (1 - q), [vk.value, vl.value],
                              [vk.error_estimate, vl.error_estimate], lhs, rhs)
    details = h.summary()
    details.update({"q": q, "eps_coefficient": c, "leading_factor": a})
    return CheckReport("thm14", lhs, rhs, noise, seed=seed,
                       config=_config(K=K, L=L, measure=m, epsilon=eps, level=level),
                       details=details, provenance=[vk.to_json(), vl.to_json()], **_hyp_fields(h))


def _sup_density(m, L):
    g = sup_norm(m)
    if math.isfinite(g):
        return g, "global"
    return sup_norm(m, bd.radii(L)[1]), "circumball_of_L"


def verify_thm51(K: BodySpec, L: BodySpec, m: MeasureSpec | None = None, r: float = 1.0, grid=None,
                 level: int = 3, seed: int | None = None) -> CheckReport:
    """q-concave measures with bounded density, with a free radius r > 0.

    Under ``P_{mu,K} <= mu_{n-1}(L cap theta^perp)`` checks
    ``mu(K)^{1-q} mu(rB)^q <= r omega_n^{1/n} |g|^{1/n} mu(L)^{(n-1)/n} + mu(K)/q``
    and, when ``mu(K) <= (q/(q+1))^{1/q} mu(rB)``, the sub-report
    ``mu(K) <= r omega_n^{1/n} |g|^{1/n} mu(L)^{(n-1)/n}``.
    For unbounded homogeneous densities the sup is taken over the
    circumscribed ball of L, which is all the argument uses.
    """
    n = _same_dim(K, L)
    m = _measure(m, n)
    q = q_exponent(m)
    if q is None:
        raise UnsupportedCombination(f"{m.kind} measure: this check requires a q-concave measure")
    _need_symmetric(K, "K")
    if not r > 0:
        raise ValueError("r must be positive")
    g = _grid(n, grid)
    h = evaluate_hypothesis(K, L, ("mu_projection", "section"), g, m, level, seed)
    G, where = _sup_density(m, L)
    mrb = ball_mass(m, r)
    vk, vl = _mass(m, K, level, seed), _mass(m, L, level, seed)
    wn = ball_volume(n)

    def core(y):
        return r * wn ** (1 / n) * G ** (1 / n) * y ** ((n - 1) / n)

    lhs = vk.value ** (1 - q) * mrb**q
    rhs = core(vl.value) + vk.value / q
    noise = _conclusion_noise(lambda x, y: core(y) + x / q - x ** (1 - q) * mrb**q, [vk.value, vl.value],
                              [vk.error_estimate, vl.error_estimate], lhs, rhs)
    details = h.summary()
    details.update({"q": q, "r": r, "sup_density": G, "sup_region": where, "mu_rB": mrb})
    rep = CheckReport("thm51", lhs, rhs, noise, seed=seed,
                      config=_config(K=K, L=L, measure=m, r=r, level=level),
                      details=details, provenance=[vk.to_json(), vl.to_json()], **_hyp_fields(h))
    gate = (q / (q + 1)) ** (1 / q) * mrb
    sub_rhs = core(vl.value)
    sub_noise = _conclusion_noise(lambda x, y: core(y) - x, [vk.value, vl.value],
                                  [vk.error_estimate, vl.error_estimate], vk.value, sub_rhs)
    rep.sub_reports.append(CheckReport(
        "cor54", vk.value, sub_rhs, sub_noise, applicable=vk.value <= gate, seed=seed,
        details={"gate": gate, "gate_holds": vk.value <= gate}, **_hyp_fields(h)))
    return rep


def _section_k_measure(m, L, frame, level, seed):
    rule = subspace_rule(frame, level, seed)
    rho = bd.radial(L, rule.nodes, check=False)
    return float(integrate(rule, radial_integral(m, rule.nodes, rho, frame.k - 1))[0])


def verify_prop53(L: BodySpec | None = None, m: MeasureSpec | None = None, k: int | None = None, n: int = 3,
                  count: int = 64, seed: int = 0, level: int = 3) -> CheckReport:
    """Averaged section inequality for ``f = g chi_L`` over Haar k-subspaces E:

    ``E[(int_E f)^n / |f|_E|_inf^{n-k}] <= (omega_k^n / omega_n^k) (int f)^k``
    with ``E`` the normalized Haar average.  Equality holds for the
    indicator of a ball.  The sup of ``f`` on E is ``g(0) = 1`` because only
    ray-decreasing densities are accepted.
    """
    L = bd.ball(n, 1.0) if L is None else L
    n = L.dim
    m = _measure(m, n)
    if not m.ray_decreasing:
        raise UnsupportedCombination(f"{m.kind} measure: this check requires a ray-decreasing density")
    k = n - 1 if k is None else int(k)
    frames = grassmann_sample(n, k, count, seed)
    vals = np.array([_section_k_measure(m, L, f, level, seed) ** n for f in frames])
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(len(vals)))
    total = _mass(m, L, level, seed)
    c = ball_volume(k) ** n / ball_volume(n) ** k
    rhs = c * total.value**k
    noise = 3 * se + c * k * total.value ** (k - 1) * total.error_estimate + noise_floor(mean, rhs)
    return CheckReport("prop53", mean, rhs, noise, grid_size=count, seed=seed,
                       config=_config(L=L, measure=m, k=k, level=level),
                       details={"standard_error": se, "frames": count}, provenance=[total.to_json()])


# ---------------------------------------------------------------------------
# log-concave measures


def verify_thm61(K: BodySpec, L: BodySpec, m: MeasureSpec | None = None, r: float = 1.0, grid=None,
                 level: int = 3, seed: int | None = None, case: str = "auto") -> CheckReport:
    """Log-concave, ray-decreasing densities; dispatches on ``mu(K)`` against ``mu(rB)``.

    Case a (``mu(rB)/e <= mu(K) < mu(rB)``):
    ``mu(K) log(mu(rB)/mu(K)) <= r omega_n^{1/n} |g|^{1/n} mu(L)^{(n-1)/n}``.
    Case b (``mu(K) <= mu(rB)/e``):
    ``mu(K) <= (e r^n omega_n |g| / mu(rB))^{1/(n-1)} mu(L)``.
    ``case`` forces one branch (used at the boundary between the cases).
    """
    n = _same_dim(K, L)
    m = _measure(m, n)
    if not (m.log_concave and m.ray_decreasing):
        raise UnsupportedCombination(f"{m.kind} measure: this check requires a log-concave, ray-decreasing density")
    _need_symmetric(K, "K")
    if not r > 0:
        raise ValueError("r must be positive")
    g = _grid(n, grid)
    h = evaluate_hypothesis(K, L, ("mu_projection", "section"), g, m, level, seed)
    G = sup_norm(m)
    mrb = ball_mass(m, r)
    vk, vl = _mass(m, K, level, seed), _mass(m, L, level, seed)
    wn = ball_volume(n)
    applicable = True
    if case == "auto":
        if vk.value >= mrb:
            case, applicable = "none", False
        else:
            case = "a" if vk.value >= mrb / math.e else "b"
    if case in ("a", "none"):
        def lhs_f(x):
            return x * math.log(mrb / x)

        def rhs_f(y):
            return r * wn ** (1 / n) * G ** (1 / n) * y ** ((n - 1) / n)
    elif case == "b":
        def lhs_f(x):
            return x

        def rhs_f(y):
            return (math.e * r**n * wn * G / mrb) ** (1 / (n - 1)) * y
    else:
        raise ValueError("case must be 'auto', 'a' or 'b'")
    lhs, rhs = lhs_f(vk.value), rhs_f(vl.value)
    noise = _conclusion_noise(lambda x, y: rhs_f(y) - lhs_f(x), [vk.value, vl.value],
                              [vk.error_estimate, vl.error_estimate], lhs, rhs)
    details = h.summary()
    details.update({"case": case, "r": r, "mu_rB": mrb, "mu_K": vk.value, "sup_density": G})
    return CheckReport("thm61", lhs, rhs, noise, applicable=applicable, seed=seed,
                       config=_config(K=K, L=L, measure=m, r=r, level=level, case=case),
                       details=details, provenance=[vk.to_json(), vl.to_json()], **_hyp_fields(h))
