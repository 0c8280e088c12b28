"""Auxiliary inequalities and identities, individually and as a seeded battery."""
from __future__ import annotations

import math

import numpy as np

from .. import bodies as bd
from .. import functionals as fn
from .. import measures as ms
from ..bodies import BodySpec
from ..functionals import SELF
from ..measures import MeasureSpec, ball_mass, q_exponent, sup_norm
from ..quadrature import ball_volume, grassmann_sample, integrate, sphere_area, sphere_rule, subspace_rule
from .instances import random_body, random_measure, random_unit, rng_for
from .report import CheckReport, noise_floor, propagate
from .runner import run_jobs
from .theorems import UnsupportedCombination

__all__ = [
    "LEMMAS",
    "lemma25_check",
    "lemma26_check",
    "lemma27_check",
    "lemma52_check",
    "lemma62_check",
    "lemma63_check",
    "lemma64_check",
    "identity32_check",
    "step34_check",
    "brunn_check",
    "remark41_check",
    "averaged_projection_check",
    "lemma_instance",
    "lemma_bank",
]


def _fv(v):
    return v.value, v.error_estimate


def _cfg(**kw):
    return {k: (v.to_json() if hasattr(v, "to_json") else v) for k, v in kw.items()}


def _mixed(m, E, F, level, seed):
    return fn.mixed_measure(m, E, SELF if F is E or F == E else F, "boundary_integral", level, seed)


def lemma25_check(m: MeasureSpec, E: BodySpec, F: BodySpec, lam: float, level: int = 3,
                  seed: int | None = None) -> CheckReport:
    """Concavity of the measure under Minkowski combinations.

    ``lam mu(E)^q + (1-lam) mu(F)^q <= mu(lam E + (1-lam) F)^q`` for q-concave
    measures; the logarithmic form for log-concave ones.
    """
    C = bd.minkowski_combination(E, F, lam)
    q = q_exponent(m)
    if q is None and not m.log_concave:
        raise UnsupportedCombination(f"{m.kind} measure is neither q-concave nor log-concave")
    (a, ea), (b, eb), (c, ec) = (_fv(fn.body_measure(m, X, level, seed)) for X in (E, F, C))
    if q is not None:
        def f(x, y, z):
            return z**q - lam * x**q - (1 - lam) * y**q
        lhs, rhs = lam * a**q + (1 - lam) * b**q, c**q
    else:
        def f(x, y, z):
            return math.log(z) - lam * math.log(x) - (1 - lam) * math.log(y)
        lhs, rhs = lam * math.log(a) + (1 - lam) * math.log(b), math.log(c)
    noise = propagate(f, [a, b, c], [ea, eb, ec]) + noise_floor(lhs, rhs)
    return CheckReport("lemma25", lhs, rhs, noise, seed=seed,
                       config=_cfg(measure=m, E=E, F=F, lam=lam, level=level),
                       details={"q": q, "form": "power" if q is not None else "log"})


def lemma26_check(m: MeasureSpec, E: BodySpec, F: BodySpec, level: int = 3, seed: int | None = None) -> CheckReport:
    """``mu(E)^{1-q} mu(F)^q <= q mu_1(E, F)`` for homogeneous q-concave measures (equality at E = F)."""
    q = q_exponent(m)
    if q is None or not m.homogeneous:
        raise UnsupportedCombination("this check requires a homogeneous q-concave measure")
    (a, ea), (b, eb) = _fv(fn.body_measure(m, E, level, seed)), _fv(fn.body_measure(m, F, level, seed))
    mix = _mixed(m, E, F, level, seed)
    lhs, rhs = a ** (1 - q) * b**q, q * mix.value
    noise = propagate(lambda x, y, z: q * z - x ** (1 - q) * y**q, [a, b, mix.value], [ea, eb, mix.error_estimate])
    noise += noise_floor(lhs, rhs)
    return CheckReport("lemma26", lhs, rhs, noise, seed=seed, config=_cfg(measure=m, E=E, F=F, level=level),
                       details={"q": q}, provenance=[mix.to_json()])


def lemma27_check(m: MeasureSpec, K: BodySpec, level: int = 3, seed: int | None = None) -> CheckReport:
    """Two evaluations of ``mu(K)`` for a homogeneous density must agree:
    the cone-volume path and ``q int_S rho^{1/q} g``."""
    a = fn.body_measure(m, K, level, seed)
    b = fn.homogeneous_polar_measure(m, K, level, seed)
    noise = a.error_estimate + b.error_estimate + noise_floor(a.value, b.value)
    return CheckReport("lemma27", a.value, b.value, noise, identity=True, seed=seed,
                       config=_cfg(measure=m, K=K, level=level),
                       provenance=[a.to_json(), b.to_json()])


def lemma52_check(m: MeasureSpec, E: BodySpec, F: BodySpec, level: int = 3, seed: int | None = None) -> CheckReport:
    """``mu_1(E,F) >= mu_1(E,E) + (mu(F)^q - mu(E)^q) / (q mu(E)^{q-1})`` for q-concave measures."""
    q = q_exponent(m)
    if q is None:
        raise UnsupportedCombination(f"{m.kind} measure: this check requires a q-concave measure")
    (a, ea), (b, eb) = _fv(fn.body_measure(m, E, level, seed)), _fv(fn.body_measure(m, F, level, seed))
    mef = _mixed(m, E, F, level, seed)
    mee = fn.mixed_measure(m, E, SELF, "boundary_integral", level, seed)

    def bound(x, y, s):
        return s + (y**q - x**q) / (q * x ** (q - 1))

    lhs, rhs = bound(a, b, mee.value), mef.value
    noise = propagate(lambda x, y, s, t: t - bound(x, y, s), [a, b, mee.value, mef.value],
                      [ea, eb, mee.error_estimate, mef.error_estimate]) + noise_floor(lhs, rhs)
    return CheckReport("lemma52", lhs, rhs, noise, seed=seed, config=_cfg(measure=m, E=E, F=F, level=level),
                       details={"q": q}, provenance=[mef.to_json(), mee.to_json()])


def lemma64_check(m: MeasureSpec, E: BodySpec, F: BodySpec, level: int = 3, seed: int | None = None) -> CheckReport:
    """``mu_1(E,F) >= mu_1(E,E) + mu(E) log(mu(F)/mu(E))`` for log-concave measures."""
    if not m.log_concave:
        raise UnsupportedCombination(f"{m.kind} measure: this check requires a log-concave measure")
    (a, ea), (b, eb) = _fv(fn.body_measure(m, E, level, seed)), _fv(fn.body_measure(m, F, level, seed))
    mef = _mixed(m, E, F, level, seed)
    mee = fn.mixed_measure(m, E, SELF, "boundary_integral", level, seed)

    def bound(x, y, s):
        return s + x * math.log(y / x)

    lhs, rhs = bound(a, b, mee.value), mef.value
    noise = propagate(lambda x, y, s, t: t - bound(x, y, s), [a, b, mee.value, mef.value],
                      [ea, eb, mee.error_estimate, mef.error_estimate]) + noise_floor(lhs, rhs)
    return CheckReport("lemma64", lhs, rhs, noise, seed=seed, config=_cfg(measure=m, E=E, F=F, level=level),
                       provenance=[mef.to_json(), mee.to_json()])


def lemma62_check(m: MeasureSpec, K: BodySpec, t: float, level: int = 3, seed: int | None = None) -> CheckReport:
    """``mu(tK) >= t^n mu(K)`` for ray-decreasing densities and ``0 < t <= 1``."""
    if not m.ray_decreasing:
        raise UnsupportedCombination(f"{m.kind} measure: this check requires a ray-decreasing density")
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    n = K.dim
    (a, ea) = _fv(fn.body_measure(m, K, level, seed))
    (b, eb) = _fv(fn.body_measure(m, bd.dilate(K, t), level, seed))
    lhs = t**n * a
    noise = t**n * ea + eb + noise_floor(lhs, b)
    return CheckReport("lemma62", lhs, b, noise, seed=seed, config=_cfg(measure=m, K=K, t=t, level=level))


def lemma63_check(m: MeasureSpec, xs=(1e-3, 1e3), level: int = 3, seed: int | None = None) -> CheckReport:
    """Ball ratio ``R(x) = mu_1(xB, B) / mu(xB)`` for ray-decreasing densities.

    The limits are replaced by their finite endpoints: ``x R(x) <= n`` at every
    x in ``xs`` (main report at the smallest x, sub-reports at the others) and
    ``R(x) >= int_S g / (x omega_n |g|)`` at the smallest x.  The values of
    ``x R(x)`` on a log grid between the endpoints are reported in details.
    """
    if not m.ray_decreasing:
        raise UnsupportedCombination(f"{m.kind} measure: this check requires a ray-decreasing density")
    n = m.dim
    xs = sorted(float(x) for x in xs)

    def ratio(x):
        mix = fn.mixed_measure(m, bd.ball(n, x), bd.ball(n, 1.0), "boundary_integral", level, seed)
        mass = ball_mass(m, x)
        return mix.value / mass, mix.error_estimate / mass

    reports = []
    for x in xs:
        r, e = ratio(x)
        reports.append(CheckReport("lemma63_upper", x * r, float(n), x * e + noise_floor(x * r, n), seed=seed,
                                   config=_cfg(measure=m, x=x, level=level)))
    x0 = xs[0]
    r0, e0 = ratio(x0)
    c = ms.sphere_density_integral(m, level) / (ball_volume(n) * sup_norm(m))
    reports.append(CheckReport("lemma63_lower", c / x0, r0, e0 + noise_floor(r0, c / x0), seed=seed,
                               config=_cfg(measure=m, x=x0, level=level), details={"c": c}))
    grid = np.geomspace(xs[0], xs[-1], 13)
    trend = [[float(x), float(x * ratio(x)[0])] for x in grid]
    main = reports[0]
    main.check_id = "lemma63"
    main.sub_reports = reports[1:]
    main.details = {"trend": trend}
    return main


def identity32_check(n: int, k: int, f: str = "square", count: int = 256, seed: int = 0,
                     level: int = 3) -> CheckReport:
    """Averaging identity over Haar subspaces H:
    ``E int_{S cap H} f = (|S^{k-1}| / |S^{n-1}|) int_S f``.

    ``f`` is one of ``"one"``, ``"square"`` (``u_1^2``), ``"abs"`` (``|u_1|``)
    or ``"exp"`` (``exp(<a,u>)`` for a fixed seeded vector ``a``).
    Monte Carlo over ``count`` frames; tolerance three standard errors.
    """
    rng = rng_for(seed, "identity32")
    a = random_unit(rng, n)
    funcs = {
        "one": lambda u: np.ones(len(u)),
        "square": lambda u: u[:, 0] ** 2,
        "abs": lambda u: np.abs(u[:, 0]),
        "exp": lambda u: np.exp(u @ a),
    }
    if f not in funcs:
        raise ValueError(f"unknown test function {f!r}")
    func = funcs[f]
    frames = grassmann_sample(n, k, count, seed)
    vals = np.array([integrate(r, func(r.nodes))[0] for r in (subspace_rule(fr, level) for fr in frames)])
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(count))
    rule = sphere_rule(n, level, seed)
    c = sphere_area(k) / sphere_area(n)
    rhs = c * float(integrate(rule, func(rule.nodes))[0])
    noise = 3 * se + noise_floor(mean, rhs) + 1e-9 * abs(rhs)
    return CheckReport("identity32", mean, rhs, noise, identity=True, grid_size=count, seed=seed,
                       config=_cfg(n=n, k=k, f=f, level=level), details={"standard_error": se})


def step34_check(L: BodySpec, level: int = 3, seed: int | None = None) -> CheckReport:
    """Surface area against volume and inradius: ``|dL| <= n |L| / r``."""
    n = L.dim
    s = fn.surface_area(L, level, seed)
    v = fn.body_measure(ms.lebesgue(n), L, level, seed)
    r = bd.radii(L)[0]
    rhs = n * v.value / r
    noise = s.error_estimate + n * v.error_estimate / r + noise_floor(s.value, rhs)
    return CheckReport("step34", s.value, rhs, noise, seed=seed, config=_cfg(L=L, level=level),
                       details={"inradius": r}, provenance=[s.to_json(), v.to_json()])


def brunn_check(K: BodySpec, theta, level: int = 3, seed: int | None = None) -> CheckReport:
    """Parallel sections of a symmetric convex body: ``A(t) <= A(0)`` and ``A^{1/(n-1)}`` concave.

    The main report compares ``max_t A(t)`` with ``A(0)``; a sub-report holds
    the largest midpoint defect ``(f(t-h) + f(t+h))/2 - f(t)`` of
    ``f = A^{1/(n-1)}``, which must be ``<= 0``.
    """
    n = K.dim
    theta = np.asarray(theta, dtype=float)
    h = float(bd.radial(K, theta / np.linalg.norm(theta), check=False))
    grid = h * np.linspace(-0.9, 0.9, 19)
    hi = np.array([a for _, a in fn.parallel_section_profile(K, theta, grid, level, seed)])
    lo = np.array([a for _, a in fn.parallel_section_profile(K, theta, grid, max(level - 1, 1), seed)])
    err = np.abs(hi - lo) + 1e-10 * hi.max()
    i0 = len(grid) // 2
    j = int(np.argmax(hi))
    main = CheckReport("brunn_max", float(hi[j]), float(hi[i0]), float(err[j] + err[i0]), grid_size=len(grid),
                       seed=seed, config=_cfg(K=K, theta=theta.tolist(), level=level),
                       details={"profile": [[float(t), float(a)] for t, a in zip(grid, hi)]})
    f = hi ** (1 / (n - 1))
    ferr = err * f / ((n - 1) * hi)
    defect = 0.5 * (f[:-2] + f[2:]) - f[1:-1]
    tol = 0.5 * (ferr[:-2] + ferr[2:]) + ferr[1:-1]
    i = int(np.argmax(defect - tol))
    main.sub_reports.append(CheckReport("brunn_concavity", float(defect[i]), 0.0, float(tol[i]),
                                        grid_size=len(grid) - 2, seed=seed))
    return main


def _average_mu_projection(m, K, level, seed):
    """``int_S P_{mu,K}(u) du = n omega_{n-1} int_0^1 mu_1(tK, B) dt`` (sum of ray weights)."""
    n = K.dim
    vals = [float(np.sum(fn._ray_weights(m, K, lv, "auto", seed)[1])) for lv in fn._levels(level)]
    c = n * ball_volume(n - 1)
    return c * vals[0], c * abs(vals[0] - vals[1])


def _average_section(m, L, level, seed):
    """``int_S mu_{n-1}(L cap u^perp) du = |S^{n-2}| int_S int_0^rho g(rv) r^{n-2} dr dv``."""
    n = L.dim
    vals = []
    for lv in fn._levels(level):
        rule = sphere_rule(n, lv, seed)
        rho = bd.radial(L, rule.nodes, check=False)
        vals.append(float(integrate(rule, ms.radial_integral(m, rule.nodes, rho, n - 2))[0]))
    c = sphere_area(n - 1)
    return c * vals[0], c * abs(vals[0] - vals[1])


def remark41_check(m: MeasureSpec, K: BodySpec, L: BodySpec, level: int = 3, seed: int | None = None,
                   enforce: bool = True) -> CheckReport:
    """Averaged hypothesis ``int_S P_{mu,K} <= int_S mu_{n-1}(L cap u^perp)`` implies
    ``mu(K) <= ((1-1/n)/(1-q))^{1/(1-q)} mu(L)``.

    Both averages are evaluated through exact averaging identities, so no
    direction grid is involved.  With ``enforce`` L is dilated until the two
    averages agree, and the error of the dilation factor is carried into the
    conclusion tolerance.
    """
    if not (m.homogeneous and m.concavity[0] in ("q_concave_measure", "p_concave")):
        raise UnsupportedCombination(
            f"{m.kind} measure: this check requires a p-concave, 1/p-homogeneous density")
    n = K.dim
    d = n - 1 + m.degree
    a, ea = _average_mu_projection(m, K, level, seed)
    b, eb = _average_section(m, L, level, seed)
    s, rel_s = 1.0, 0.0
    if enforce:
        s = (a / b) ** (1 / d)
        rel_s = (ea / a + eb / b) / d
        L = bd.dilate(L, s)
        b, eb = _average_section(m, L, level, seed)
    q = q_exponent(m)
    c = ((1 - 1 / n) / (1 - q)) ** (1 / (1 - q))
    vk, vl = fn.body_measure(m, K, level, seed), fn.body_measure(m, L, level, seed)
    lhs, rhs = vk.value, c * vl.value
    noise = vk.error_estimate + c * vl.error_estimate + rhs * (d + 1) * rel_s + noise_floor(lhs, rhs)
    return CheckReport("remark41", lhs, rhs, noise, hypothesis_margin=b - a,
                       hypothesis_noise=ea + eb + noise_floor(a, b), grid_size=0,
                       seed=seed, config=_cfg(measure=m, K=K, L=L, level=level),
                       details={"L_scale": s, "constant": c, "q": q},
                       provenance=[vk.to_json(), vl.to_json()])


def averaged_projection_check(m: MeasureSpec, K: BodySpec, level: int = 3, seed: int | None = None,
                              nodes: int = 16) -> CheckReport:
    """``(1/(n omega_{n-1})) int_S P_{mu,K}(u) du = int_0^1 mu_1(tK, B) dt``.

    The left side integrates mu-projections over a sphere rule; the right side
    applies Gauss-Legendre in t to boundary-integral mixed measures of tK.
    The t-rule error is the change from ``nodes - 4`` to ``nodes`` points.
    """
    n = K.dim
    c = n * ball_volume(n - 1)
    rule = sphere_rule(n, level, seed)
    v, e = fn.mu_projections_many(m, K, rule.nodes, level, seed=seed)
    lhs = float(integrate(rule, v)[0]) / c
    lhs_err = float(integrate(rule, e)[0]) / c
    # the sphere rule itself: compare with one level lower
    if level > 1:
        r2 = sphere_rule(n, level - 1, seed)
        v2, _ = fn.mu_projections_many(m, K, r2.nodes, level, seed=seed)
        lhs_err += abs(float(integrate(r2, v2)[0]) / c - lhs)
    B = bd.ball(n, 1.0)

    def t_rule(k):
        x, w = np.polynomial.legendre.leggauss(k)
        t, w = 0.5 * (x + 1), 0.5 * w
        vals = [fn.mixed_measure(m, bd.dilate(K, ti), B, "boundary_integral", level, seed) for ti in t]
        return sum(wi * f.value for wi, f in zip(w, vals)), sum(wi * f.error_estimate for wi, f in zip(w, vals))

    rhs, rhs_err = t_rule(nodes)
    coarse, _ = t_rule(nodes - 4)
    rhs_err += abs(rhs - coarse)
    return CheckReport("averaged_projection", lhs, rhs, lhs_err + rhs_err + noise_floor(lhs, rhs), identity=True,
                       grid_size=len(rule.nodes), seed=seed, config=_cfg(measure=m, K=K, level=level),
                       details={"lhs_error": lhs_err, "rhs_error": rhs_err, "rel_gap": abs(lhs - rhs) / abs(rhs)})


# ---------------------------------------------------------------------------
# seeded battery

LEMMAS = ("lemma25", "lemma26", "lemma27", "lemma52", "lemma62", "lemma63", "lemma64", "identity32",
          "step34", "brunn", "remark41")


def _convex_pair(rng, n):
    """Pair (E, F) whose Minkowski combinations are catalog bodies."""
    mode = int(rng.integers(3))
    if mode == 0:
        return bd.ball(n, rng.uniform(0.5, 1.5)), bd.ball(n, rng.uniform(0.5, 1.5))
    if mode == 1:
        return bd.box(rng.uniform(0.5, 1.5, n)), bd.box(rng.uniform(0.5, 1.5, n))
    E = random_body(rng, n)
    return E, bd.dilate(E, rng.uniform(0.5, 1.8))


def lemma_instance(name: str, seed: int, level: int = 3) -> CheckReport:
    """Run lemma ``name`` on the random instance determined by ``seed``."""
    rng = rng_for(seed, name)
    n = int(rng.choice([2, 3]))
    if name == "lemma25":
        m = random_measure(rng, n, ("lebesgue", "cone_power", "truncated_gaussian", "gaussian"))
        E, F = _convex_pair(rng, n)
        rep = lemma25_check(m, E, F, float(rng.choice([0.25, 0.5, 0.75])), level, seed)
    elif name == "lemma26":
        m = random_measure(rng, n, ("lebesgue", "cone_power"))
        E = random_body(rng, n)
        F = E if rng.random() < 0.25 else random_body(rng, n)
        rep = lemma26_check(m, E, F, level, seed)
    elif name == "lemma27":
        m = random_measure(rng, n, ("lebesgue", "cone_power", "radial_power"))
        rep = lemma27_check(m, random_body(rng, n), level, seed)
    elif name == "lemma52":
        m = random_measure(rng, n, ("lebesgue", "cone_power", "truncated_gaussian"))
        E = random_body(rng, n)
        F = E if rng.random() < 0.25 else random_body(rng, n)
        rep = lemma52_check(m, E, F, level, seed)
    elif name == "lemma62":
        m = random_measure(rng, n, ("lebesgue", "gaussian"))
        t = 1.0 if rng.random() < 0.2 else float(rng.uniform(0.1, 1.0))
        rep = lemma62_check(m, random_body(rng, n), t, level, seed)
    elif name == "lemma63":
        rep = lemma63_check(random_measure(rng, n, ("lebesgue", "gaussian")), level=level, seed=seed)
    elif name == "lemma64":
        m = random_measure(rng, n, ("lebesgue", "gaussian", "cone_power"))
        E = random_body(rng, n)
        F = E if rng.random() < 0.25 else random_body(rng, n)
        rep = lemma64_check(m, E, F, level, seed)
    elif name == "identity32":
        n = int(rng.choice([3, 4, 5]))
        k = int(rng.integers(1, n))
        f = str(rng.choice(["one", "square", "abs", "exp"]))
        rep = identity32_check(n, k, f, seed=seed, level=level)
    elif name == "step34":
        rep = step34_check(random_body(rng, n), level, seed)
    elif name == "brunn":
        rep = brunn_check(random_body(rng, n), random_unit(rng, n), level, seed)
    elif name == "remark41":
        m = random_measure(rng, n, ("lebesgue", "cone_power"))
        rep = remark41_check(m, random_body(rng, n), random_body(rng, n), level, seed)
    else:
        raise ValueError(f"unknown lemma {name!r}; expected one of {LEMMAS}")
    rep.seed = seed
    return rep


def lemma_bank(seeds, level: int = 3, names=LEMMAS, threads: int | None = None) -> list[CheckReport]:
    """The lemma battery: the i-th seed runs lemma ``names[i % len(names)]``.

    ``seeds`` is an iterable of integers; the reports come back in order.
    """
    seeds = [int(s) for s in seeds]
    jobs = [(lambda i=i, s=s: lemma_instance(names[i % len(names)], s, level)) for i, s in enumerate(seeds)]
    return run_jobs(jobs, threads)
