"""Checkers for section/projection inequalities, lemma identities and parameter sweeps."""

from .battery import SUITES, THEOREMS, run_manifest, run_suite, theorem_instance
from .hypotheses import enforce_hypothesis, evaluate_hypothesis, hyperplane_grid
from .lemmas import LEMMAS, lemma_bank, lemma_instance
from .report import CheckReport
from .sweeps import SWEEPS, SweepTable, sharpness_sweep
from .theorems import (
    UnsupportedCombination,
    aleksandrov_check,
    verify_cor13,
    verify_gk,
    verify_prop31,
    verify_prop53,
    verify_thm12,
    verify_thm14,
    verify_thm51,
    verify_thm61,
)

__all__ = [
    "CheckReport", "UnsupportedCombination", "SUITES", "THEOREMS", "LEMMAS", "SWEEPS", "SweepTable",
    "run_suite", "run_manifest", "theorem_instance", "lemma_bank", "lemma_instance", "sharpness_sweep",
    "enforce_hypothesis", "evaluate_hypothesis", "hyperplane_grid", "aleksandrov_check", "verify_gk",
    "verify_thm12", "verify_cor13", "verify_prop31", "verify_thm14", "verify_thm51", "verify_prop53",
    "verify_thm61",
]
