"""Check reports and error propagation."""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

__all__ = ["CheckReport", "propagate", "noise_floor", "PASS", "FAIL", "DIAGNOSTIC", "NOT_APPLICABLE"]

PASS, FAIL, DIAGNOSTIC, NOT_APPLICABLE = "pass", "fail", "diagnostic", "not_applicable"
REL_FLOOR = 1e-10


def noise_floor(*values) -> float:
    """Round-off allowance for comparisons of analytic quantities."""
    scale = max((abs(v) for v in values if v is not None and math.isfinite(v)), default=0.0)
    return REL_FLOOR * scale


def propagate(fn, values, errors) -> float:
    """First-order error of ``fn(*values)`` given absolute errors of the inputs."""
    values = [float(v) for v in values]
    base = fn(*values)
    total = 0.0
    for i, (v, e) in enumerate(zip(values, errors)):
        if not e:
            continue
        h = 1e-7 * max(abs(v), 1e-300)
        shifted = list(values)
        shifted[i] = v + h
        total += abs((fn(*shifted) - base) / h) * abs(e)
    return total


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return _clean(x.item())
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


@dataclass
class CheckReport:
    """Outcome of one executable inequality or identity.

    ``hypothesis_margin`` is the minimum over the grid of RHS - LHS of the
    hypothesis (None when the check has no hypothesis).  The conclusion is
    ``lhs <= rhs`` with ``slack = rhs - lhs``; identities use
    ``slack = -|rhs - lhs|``.  ``noise_tolerance`` bounds the quadrature error
    of the slack and ``hypothesis_noise`` that of the margin.
    """

    check_id: str
    lhs: float
    rhs: float
    noise_tolerance: float
    hypothesis_margin: float | None = None
    hypothesis_noise: float = 0.0
    identity: bool = False
    diagnostic: bool = False
    applicable: bool = True
    grid_size: int = 0
    seed: int | None = None
    config: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    provenance: list = field(default_factory=list)
    sub_reports: list = field(default_factory=list)

    @property
    def slack(self) -> float:
        if self.identity:
            return -abs(self.rhs - self.lhs)
        return self.rhs - self.lhs

    @property
    def hypothesis_ok(self) -> bool:
        return self.hypothesis_margin is None or self.hypothesis_margin >= -self.hypothesis_noise

    @property
    def verdict(self) -> str:
        if not self.applicable:
            return NOT_APPLICABLE
        if self.diagnostic:
            return DIAGNOSTIC
        ok = self.slack >= -self.noise_tolerance and self.hypothesis_ok
        return PASS if ok else FAIL

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def all_reports(self):
        yield self
        for sub in self.sub_reports:
            yield from sub.all_reports()

    @property
    def failed(self) -> bool:
        """True when this report or any non-diagnostic sub-report fails."""
        return any(r.verdict == FAIL for r in self.all_reports())

    def to_json(self) -> dict:
        return _clean({
            "check_id": self.check_id,
            "verdict": self.verdict,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "noise_tolerance": self.noise_tolerance,
            "hypothesis_margin": self.hypothesis_margin,
            "hypothesis_noise": self.hypothesis_noise,
            "identity": self.identity,
            "grid_size": self.grid_size,
            "seed": self.seed,
            "config": self.config,
            "details": self.details,
            "provenance": self.provenance,
            "sub_reports": [s.to_json() for s in self.sub_reports],
        })

    def row(self) -> dict:
        """Flat record for CSV output."""
        return {
            "check_id": self.check_id,
            "verdict": self.verdict,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "noise_tolerance": self.noise_tolerance,
            "hypothesis_margin": "" if self.hypothesis_margin is None else self.hypothesis_margin,
            "hypothesis_noise": self.hypothesis_noise,
            "grid_size": self.grid_size,
            "seed": "" if self.seed is None else self.seed,
        }

    def summary(self) -> str:
        return (f"{self.check_id}: {self.verdict} lhs={self.lhs:.6g} rhs={self.rhs:.6g} "
                f"slack={self.slack:.3g} noise={self.noise_tolerance:.3g}")
