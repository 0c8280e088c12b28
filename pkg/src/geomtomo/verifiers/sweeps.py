"""Parameter sweeps that compare observed ratios with predicted ones."""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .. import bodies as bd
from .. import measures as ms
from .hypotheses import enforce_hypothesis, hyperplane_grid
from .lemmas import remark41_check
from .report import _clean
from .theorems import thm14_coefficient, verify_prop31, verify_thm12, verify_thm14, verify_thm51, verify_thm61

__all__ = ["SweepTable", "SWEEPS", "sharpness_sweep", "remark31_ratio"]


@dataclass
class SweepTable:
    name: str
    columns: list
    rows: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return _clean({"sweep": self.name, "config": self.config, "columns": list(self.columns),
                       "rows": [list(r) for r in self.rows]})

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def remark31_ratio(n: int, p: float) -> float:
    """Predicted ``r mu(K) / (R mu(L))`` for K = RB, L = rB at equality, density |x|^p."""
    return (p + n - 1) / (p + n) / (1 - 1 / n)


def _remark31(n=3, p=(1, 10, 100, 1000), level=3, grid=None, **_):
    table = SweepTable("remark31", ["p", "r_over_R", "observed", "predicted", "rel_error", "verdict"],
                       config={"n": n, "p": list(p), "level": level})
    g = hyperplane_grid(n) if grid is None else hyperplane_grid(n, grid)
    K = bd.ball(n, 1.0)
    for pv in p:
        m = ms.radial_power(n, float(pv))
        s = enforce_hypothesis(K, bd.ball(n, 1.0), ("section", "mu_projection"), g, m, level)
        rep = verify_thm12(K, bd.ball(n, s), m, "b", g, level)
        obs, pred = rep.details["ratio"], remark31_ratio(n, float(pv))
        table.rows.append([float(pv), s, obs, pred, obs / pred - 1, rep.verdict])
    return table


def _remark32(n=3, k=2, R=1.0, levels=(1, 2, 3, 4), **_):
    table = SweepTable("remark32", ["level", "slack", "slack_over_volume", "verdict"],
                       config={"n": n, "k": k, "R": R, "levels": list(levels)})
    K = bd.ball(n, R)
    for lv in levels:
        rep = verify_prop31(K, K, k, level=lv, aleksandrov=False)
        table.rows.append([lv, rep.slack, rep.slack / rep.lhs, rep.verdict])
    return table


def _remark41(n=(2, 3, 4), measure="lebesgue", level=3, **_):
    table = SweepTable("remark41", ["n", "ratio", "constant", "verdict"],
                       config={"n": list(n), "measure": measure, "level": level})
    for dim in n:
        if measure == "lebesgue":
            m = ms.lebesgue(dim)
        else:
            w = np.zeros(dim)
            w[0] = 1.0
            m = ms.cone_power(w, 1.0)
        rep = remark41_check(m, bd.ball(dim, 1.0), bd.ball(dim, 1.0), level)
        table.rows.append([dim, rep.lhs / (rep.rhs / rep.details["constant"]), rep.details["constant"], rep.verdict])
    return table


def _remark61(n=(3, 4, 5), r=1.0, level=3, **_):
    cols = ["n", "ratio_a", "predicted_a", "ratio_b", "predicted_b", "verdict_a", "verdict_b"]
    table = SweepTable("remark61", cols, config={"n": list(n), "r": r, "level": level})
    for dim in n:
        # ball with volume lambda(rB)/e sits on the boundary between the two cases
        K = bd.ball(dim, r * math.exp(-1 / dim))
        m = ms.lebesgue(dim)
        a = verify_thm61(K, K, m, r, level=level, case="a")
        b = verify_thm61(K, K, m, r, level=level, case="b")
        table.rows.append([dim, a.lhs / a.rhs, math.exp(-1 / dim), b.rhs / b.lhs, math.exp(1 / (dim - 1)),
                           a.verdict, b.verdict])
    return table


def _thm14_eps(n=3, measure="lebesgue", eps=(0.0, 0.1, 1.0), radius=0.8, level=3, **_):
    """Slack against eps for fixed K, L; the fitted slope is compared with the predicted coefficient.

    Each eps is added to the smallest eps for which the hypothesis holds on
    the grid (zero unless sections vanish, as for cone measures).
    """
    if measure == "lebesgue":
        m = ms.lebesgue(n)
    else:
        w = np.zeros(n)
        w[0] = 1.0
        m = ms.cone_power(w, 1.0)
    K, L = bd.ball(n, radius), bd.ball(n, 1.0)
    base = verify_thm14(K, L, m, "auto", level=level).config["epsilon"]
    table = SweepTable("thm14_eps", ["eps", "eps_total", "lhs", "rhs", "slack", "verdict"],
                       config={"n": n, "measure": m.to_json(), "eps": list(eps), "eps_offset": base,
                               "level": level})
    for e in eps:
        rep = verify_thm14(K, L, m, base + e, level=level)
        table.rows.append([float(e), base + e, rep.lhs, rep.rhs, rep.slack, rep.verdict])
    x, y = np.array(table.column("eps")), np.array(table.column("slack"))
    slope = float(np.polyfit(x, y, 1)[0]) if len(x) > 1 else float("nan")
    pred = thm14_coefficient(m)
    table.config.update({"fitted_slope": slope, "predicted_slope": pred, "slope_rel_error": slope / pred - 1})
    return table


def _r_sweep(n=3, check="thm51", measure="lebesgue", radius=0.5, r=(0.5, 1.0, 2.0, 4.0), level=3, **_):
    """Slack of the free-radius checks as r varies (no claim about an optimal r)."""
    m = ms.lebesgue(n) if measure == "lebesgue" else ms.gaussian(n)
    K, L = bd.ball(n, radius), bd.ball(n, 1.0)
    table = SweepTable("r_sweep", ["r", "lhs", "rhs", "slack", "verdict", "detail"],
                       config={"n": n, "check": check, "measure": m.to_json(), "r": list(r), "level": level})
    for rv in r:
        if check == "thm51":
            rep = verify_thm51(K, L, m, rv, level=level)
            detail = rep.sub_reports[0].verdict
        else:
            rep = verify_thm61(K, L, m, rv, level=level)
            detail = rep.details["case"]
        table.rows.append([float(rv), rep.lhs, rep.rhs, rep.slack, rep.verdict, detail])
    return table


SWEEPS = {
    "remark31": _remark31,
    "remark32": _remark32,
    "remark41": _remark41,
    "remark61": _remark61,
    "thm14_eps": _thm14_eps,
    "r_sweep": _r_sweep,
}


def sharpness_sweep(config) -> SweepTable:
    """Run the sweep named ``config["name"]`` with the remaining keys as parameters."""
    config = dict(config)
    name = config.pop("name", None)
    if name not in SWEEPS:
        raise ValueError(f"unknown sweep {name!r}; expected one of {sorted(SWEEPS)}")
    return SWEEPS[name](**config)
