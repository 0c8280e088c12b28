"""Acceptance suite: one test per criterion, each printing a pass/fail line with its timing."""
import json
import math
import time

import numpy as np
import pytest

from geomtomo import bodies as bd
from geomtomo import cli
from geomtomo import functionals as fn
from geomtomo import measures as ms
from geomtomo.verifiers import lemmas as lm
from geomtomo.verifiers import theorems as th
from geomtomo.verifiers.battery import _enforce_mu, _radius_for_mass, run_suite, theorem_instance
from geomtomo.verifiers.hypotheses import hyperplane_grid
from geomtomo.verifiers.instances import random_body, random_unit, rng_for
from geomtomo.verifiers.sweeps import remark31_ratio, sharpness_sweep
import oracles


def _elapsed(t0):
    return time.perf_counter() - t0


def test_criterion_01_lebesgue_mu_projection_is_shadow(acceptance):
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(50):
        rng = rng_for(i, "acceptance-1")
        n = (2, 3, 4)[i % 3]
        K, u = random_body(rng, n), random_unit(rng, n)
        p = fn.mu_projection(ms.lebesgue(n), K, u, level=3).value
        q = fn.projection_area(K, u, level=3).value
        worst = max(worst, abs(p - q) / q)
    dt = _elapsed(t0)
    ok = worst <= 5e-3 and dt < 120
    acceptance(1, ok, f"50 pairs, worst relative gap {worst:.2e} (tol 5e-3), {dt:.1f}s (limit 120s)")
    assert ok


def test_criterion_02_averaged_projection_identity(acceptance):
    t0 = time.perf_counter()
    worst = 0.0
    measures = [ms.lebesgue(3), ms.cone_power([1.0, 0.0, 0.0], 1.0), ms.gaussian(3)]
    bodies = [bd.ball(3, 1.0), bd.box([1.0, 0.7, 1.2]), bd.ellipsoid([1.0, 0.6, 1.4])]
    for m in measures:
        for K in bodies:
            rep = lm.averaged_projection_check(m, K, 3, 0)
            worst = max(worst, rep.details["rel_gap"])
    dt = _elapsed(t0)
    ok = worst <= 1e-2 and dt < 300
    acceptance(2, ok, f"9 measure/body pairs, worst relative gap {worst:.2e} (tol 1e-2), {dt:.1f}s")
    assert ok


def test_criterion_03_sharpness_ratio(acceptance):
    t0 = time.perf_counter()
    t = sharpness_sweep({"name": "remark31", "n": 3, "p": [1, 10, 100, 1000]})
    obs = np.array(t.column("observed"))
    pred = np.array([remark31_ratio(3, p) for p in (1, 10, 100, 1000)])
    rel = np.abs(obs / pred - 1)
    toward = np.all(np.diff(np.abs(obs - 1.5)) < 0)
    dt = _elapsed(t0)
    ok = rel.max() <= 1e-3 and toward and dt < 60
    acceptance(3, ok, f"max relative error {rel.max():.2e} (tol 1e-3), ratios {np.round(obs, 4).tolist()} "
                      f"approach 1.5: {toward}, {dt:.1f}s")
    assert ok


def test_criterion_04_enforced_radius_and_john_checks(acceptance):
    t0 = time.perf_counter()
    bad = []
    for s in range(30):
        for name in ("thm12a", "cor13a"):
            rep = theorem_instance(name, s, 3, dims=(2, 3, 4))
            if rep.slack < -rep.noise_tolerance:
                bad.append((name, s))
    dt = _elapsed(t0)
    ok = not bad and dt < 600
    acceptance(4, ok, f"60 enforced runs (30 pairs x 2 checks), {len(bad)} with slack below -noise, {dt:.1f}s")
    assert ok


def test_criterion_05_eps_sweep_slope(acceptance):
    t0 = time.perf_counter()
    errs = {}
    for n in (2, 3):
        for measure in ("lebesgue", "cone_power"):
            t = sharpness_sweep({"name": "thm14_eps", "n": n, "measure": measure, "eps": [0.0, 0.1, 1.0]})
            errs[(n, measure)] = abs(t.config["slope_rel_error"])
    dt = _elapsed(t0)
    worst = max(errs.values())
    ok = worst <= 1e-3 and dt < 180
    acceptance(5, ok, f"slope vs predicted coefficient, worst relative error {worst:.2e} (tol 1e-3), {dt:.1f}s")
    assert ok


def test_criterion_06_bounded_density_checks(acceptance):
    t0 = time.perf_counter()
    sat = th.verify_prop53(bd.ball(3, 1.0), ms.lebesgue(3), 2, count=64, seed=0)
    sat_ok = abs(sat.lhs - sat.rhs) <= sat.noise_tolerance
    kinds, failures = set(), []
    for s in range(20):
        rep = theorem_instance("thm51", s, 3, dims=(3,), gate=True)
        kinds.add("truncated" if "truncation" in rep.config["measure"]["params"] else rep.config["measure"]["kind"])
        gate = rep.sub_reports[0]
        if rep.verdict != "pass" or gate.verdict != "pass":
            failures.append(s)
    dt = _elapsed(t0)
    ok = sat_ok and not failures and kinds == {"lebesgue", "truncated"} and dt < 300
    acceptance(6, ok, f"ball saturation gap {abs(sat.lhs - sat.rhs):.2e} <= 3SE {sat.noise_tolerance:.2e}; "
                      f"20 enforced instances ({sorted(kinds)}), {len(failures)} failing main or gated bound, "
                      f"{dt:.1f}s")
    assert ok


def _gaussian_instance(seed):
    rng = rng_for(seed, "acceptance-7")
    n = 3
    m = ms.gaussian(n, float(rng.uniform(0.8, 1.4)))
    K, L = random_body(rng, n), random_body(rng, n)
    g = hyperplane_grid(n)
    K, L, _ = _enforce_mu(K, L, g, m, 3)
    mk = fn.body_measure(m, K, 3).value
    # alternate the two cases; targets are multiples of mu(K)
    u = rng.uniform(1.1, math.e * 0.95) if seed % 2 == 0 else rng.uniform(math.e * 1.05, 2.5 * math.e)
    r = _radius_for_mass(m, mk * u)
    while r is None:
        K = bd.dilate(K, 0.7)  # shrinking K keeps the hypothesis
        mk = fn.body_measure(m, K, 3).value
        r = _radius_for_mass(m, mk * u)
    return th.verify_thm61(K, L, m, r, g, 3)


def test_criterion_07_log_concave_checks(acceptance):
    t0 = time.perf_counter()
    t = sharpness_sweep({"name": "remark61", "n": [3, 4, 5]})
    ns = np.array(t.column("n"), float)
    ea = np.abs(np.array(t.column("ratio_a")) - np.exp(-1 / ns))
    eb = np.abs(np.array(t.column("ratio_b")) - np.exp(1 / (ns - 1)))
    reps = [_gaussian_instance(s) for s in range(10)]
    cases = [r.details["case"] for r in reps]
    passed = sum(r.verdict == "pass" for r in reps)
    dt = _elapsed(t0)
    ok = max(ea.max(), eb.max()) <= 1e-6 and passed == 10 and dt < 180
    acceptance(7, ok, f"boundary ratio errors {ea.max():.1e}/{eb.max():.1e} (tol 1e-6); gaussian instances "
                      f"{passed}/10 pass (cases {''.join(cases)}), {dt:.1f}s")
    assert ok


def test_criterion_08_lemma_bank(acceptance):
    t0 = time.perf_counter()
    reps = run_suite("lemma_bank", seed=42, level=3)
    bad = [r for r in reps if r.failed]
    names = {r.check_id for r in reps}
    dt = _elapsed(t0)
    ok = len(reps) == 200 and not bad and len(names) == len(lm.LEMMAS) and dt < 900
    acceptance(8, ok, f"{len(reps)} seeded instances over {len(names)} checks, {len(bad)} violations, {dt:.1f}s")
    assert ok


def _mixed_cases():
    """30 (measure, A, B) triples; B is a ball, a segment or A itself."""
    bodies3 = [bd.ball(3, 1.2), bd.ellipsoid([1.0, 0.7, 1.3]), bd.box([1.0, 0.6, 0.8]), bd.cross_polytope(3, 1.3),
               bd.lp_ball(3, 3.0, 1.0)]
    measures = [ms.lebesgue(3), ms.gaussian(3, 1.1), ms.cone_power([1.0, 0.3, 0.0], 1.0)]
    cases = []
    for i, A in enumerate(bodies3):
        for j, m in enumerate(measures):
            cases.append((m, A, fn.SELF))
            # the ball case needs a nearest-point map, which smooth l_p balls lack
            B = bd.ball(3, 0.8) if A.kind != "lp_ball" else fn.Segment(np.array([0.6, 0.0, 0.8]))
            cases.append((m, A, B))
    return cases


def test_criterion_09_oracle_cross_validation(acceptance):
    t0 = time.perf_counter()
    cases = _mixed_cases()
    worst_mixed = 0.0
    for m, A, B in cases:
        a = fn.mixed_measure(m, A, B, "boundary_integral", 3)
        b = fn.mixed_measure(m, A, B, "finite_difference", 3)
        worst_mixed = max(worst_mixed, abs(a.value - b.value) / abs(a.value))
    worst_box = 0.0
    rng = np.random.default_rng(11)
    for i in range(6):
        w = rng.uniform(0.5, 1.5, 3)
        u = random_unit(rng, 3)
        facet = fn.projection_area(bd.box(w), u)
        mc, _ = oracles.box_shadow_mc(w, u, seed=i)
        assert facet.method == "facet_sum"
        worst_box = max(worst_box, abs(facet.value - mc) / facet.value)
    dt = _elapsed(t0)
    ok = len(cases) == 30 and worst_mixed <= 1e-2 and worst_box <= 1e-2 and dt < 300
    acceptance(9, ok, f"mixed measures: 30 instances, worst gap {worst_mixed:.2e}; box shadows: 6 directions, "
                      f"worst gap {worst_box:.2e} (tol 1e-2), {dt:.1f}s")
    assert ok


def _battery_doc(argv, capsys):
    code = cli.main(argv)
    doc = json.loads(capsys.readouterr().out)
    doc.pop("timestamp")
    return code, json.dumps(doc, indent=2, sort_keys=True)


def _verdicts(doc):
    t = json.loads(doc)["table"]
    rows = [dict(zip(t["columns"], row)) for row in t["rows"]]
    return [(r["check_id"], r["verdict"]) for r in rows]


def test_criterion_10_reproducibility(acceptance, capsys):
    t0 = time.perf_counter()
    argv = ["battery", "--suite", "all", "--seed", "7", "--level", "3"]
    c1, d1 = _battery_doc(argv, capsys)
    c2, d2 = _battery_doc(argv, capsys)
    identical = d1 == d2
    _, d4 = _battery_doc(["battery", "--suite", "all", "--seed", "7", "--level", "4"], capsys)
    v3, v4 = _verdicts(d1), _verdicts(d4)
    stable = v3 == v4
    dt = _elapsed(t0)
    ok = identical and stable and c1 == c2 == 0
    acceptance(10, ok, f"re-run byte-identical: {identical}; verdicts level 3 vs 4 identical over {len(v3)} "
                       f"reports: {stable}, {dt:.1f}s")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
