import math

import numpy as np
import pytest

from geomtomo import bodies as bd
from geomtomo import measures as ms
from geomtomo.verifiers import lemmas as lm
from geomtomo.verifiers.theorems import UnsupportedCombination

B3 = bd.ball(3, 1.0)
LEB = ms.lebesgue(3)
CONE = ms.cone_power([1.0, 0.0, 0.0], 1.0)


def test_lemma25_power_and_log_forms():
    E, F = bd.box([1.0, 0.5, 0.7]), bd.box([0.4, 1.2, 0.9])
    rep = lm.lemma25_check(LEB, E, F, 0.3)
    assert rep.verdict == "pass" and rep.details["form"] == "power"
    rep = lm.lemma25_check(ms.gaussian(3), E, F, 0.3)
    assert rep.verdict == "pass" and rep.details["form"] == "log"
    with pytest.raises(UnsupportedCombination):
        lm.lemma25_check(ms.radial_power(3, 1.0), E, F, 0.3)


@pytest.mark.parametrize("m", [LEB, CONE], ids=lambda m: m.kind)
def test_lemma26_equal_bodies_is_euler_relation(m):
    E = bd.ellipsoid([1.0, 0.7, 1.3])
    rep = lm.lemma26_check(m, E, E)
    assert abs(rep.slack) <= rep.noise_tolerance
    assert rep.verdict == "pass"


def test_lemma26_unequal_pair_positive_slack():
    rep = lm.lemma26_check(CONE, bd.ball(3, 0.8), bd.ball(3, 1.3))
    assert rep.verdict == "pass" and rep.slack > 0


@pytest.mark.parametrize("K", [bd.box([1.0, 0.5, 0.7]), bd.cross_polytope(3, 1.2), bd.lp_ball(3, 3.0)], ids=repr)
def test_lemma27_two_paths_agree(K):
    rep = lm.lemma27_check(CONE, K)
    assert rep.verdict == "pass"
    assert rep.lhs == pytest.approx(rep.rhs, rel=5e-3)


def test_lemma52_and_lemma64_equal_bodies():
    E = bd.box([1.0, 0.6, 0.8])
    rep = lm.lemma52_check(LEB, E, E)
    assert abs(rep.slack) <= rep.noise_tolerance
    rep = lm.lemma64_check(ms.gaussian(3), E, E)
    assert abs(rep.slack) <= rep.noise_tolerance


def test_lemma52_and_lemma64_unequal_pair():
    E, F = bd.ball(3, 0.7), bd.ball(3, 1.4)
    assert lm.lemma52_check(CONE, E, F).verdict == "pass"
    assert lm.lemma64_check(ms.gaussian(3), E, F).verdict == "pass"


def test_lemma62():
    K = bd.box([1.0, 0.6, 0.8])
    rep = lm.lemma62_check(ms.gaussian(3), K, 1.0)
    assert rep.slack == pytest.approx(0.0, abs=1e-12)
    rep = lm.lemma62_check(ms.gaussian(3), K, 0.4)
    assert rep.verdict == "pass" and rep.slack > 0
    with pytest.raises(ValueError):
        lm.lemma62_check(LEB, K, 1.5)


def test_lemma63_endpoint_surrogate():
    rep = lm.lemma63_check(ms.gaussian(3))
    assert rep.verdict == "pass" and not rep.failed
    trend = np.array(rep.details["trend"])
    # x R(x) -> n at small x for a density continuous at the origin
    assert trend[0, 1] == pytest.approx(3.0, rel=1e-3)
    assert np.all(np.diff(trend[:, 1]) <= 1e-9)


@pytest.mark.parametrize("n,k,f", [(3, 2, "square"), (4, 2, "abs"), (5, 3, "exp"), (4, 1, "one")])
def test_identity32(n, k, f):
    rep = lm.identity32_check(n, k, f, count=128, seed=2)
    assert rep.verdict == "pass"


def test_step34_ball_equality_and_box():
    rep = lm.step34_check(bd.ball(3, 1.5))
    assert rep.slack == pytest.approx(0.0, abs=1e-9)
    assert lm.step34_check(bd.box([1.0, 2.0, 0.5])).verdict == "pass"


def test_brunn_profile():
    rep = lm.brunn_check(bd.cross_polytope(3, 1.0), np.array([1.0, 1.0, 0.0]) / math.sqrt(2))
    assert rep.verdict == "pass" and not rep.failed
    assert rep.sub_reports[0].check_id == "brunn_concavity"


@pytest.mark.parametrize("m", [ms.lebesgue(2), ms.lebesgue(3), ms.cone_power([1.0, 0.0, 0.0], 1.0)],
                         ids=lambda m: f"{m.kind}{m.dim}")
def test_remark41_balls(m):
    n = m.dim
    rep = lm.remark41_check(m, bd.ball(n), bd.ball(n))
    assert rep.verdict == "pass"
    if m.kind == "lebesgue":
        # the constant is 1 for Lebesgue and the enforced balls coincide
        assert rep.lhs == pytest.approx(rep.rhs, rel=1e-9)


@pytest.mark.parametrize("m", [ms.lebesgue(3), ms.cone_power([1.0, 0.0, 0.0], 1.0), ms.gaussian(3)],
                         ids=lambda m: m.kind)
def test_averaged_projection_identity(m):
    rep = lm.averaged_projection_check(m, bd.box([1.0, 0.7, 1.2]))
    assert rep.verdict == "pass"
    assert rep.details["rel_gap"] < 1e-3


def test_averaged_projection_of_lebesgue_ball_is_volume():
    rep = lm.averaged_projection_check(LEB, B3)
    assert rep.rhs == pytest.approx(4 * math.pi / 3, rel=1e-6)


@pytest.mark.parametrize("name", lm.LEMMAS)
def test_each_lemma_instance_passes(name):
    for seed in (0, 1):
        rep = lm.lemma_instance(name, seed)
        assert not rep.failed, rep.summary()


def test_lemma_bank_is_deterministic():
    a = [r.to_json() for r in lm.lemma_bank(range(22))]
    b = [r.to_json() for r in lm.lemma_bank(range(22), threads=2)]
    assert a == b
