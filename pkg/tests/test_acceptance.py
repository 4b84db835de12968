"""Acceptance gate: every exit criterion at its stated tolerance.

Each criterion prints one pass/fail line; run with `pytest -s` to see
them, or `autqm verify all` for the same records as JSON lines.
"""

import pytest

from autqm.verify import ALL_CHECKS, ExperimentConfig

BUDGET_SECONDS = {
    "ad_conjugation_identity": 10,
    "autocommutator_equivariance": 10,
    "homogenisation_error_bound": 300,
    "conjugacy_invariance": 10,
    "single_autocommutator_witness": 1,
    "achiral_power_vanishing": 30,
    "free_factor_vanishing": 10,
    "whitehead_suite": 120,
    "product_averaging": 120,
    "finite_average_norm_bounds": 180,
    "graph_product_suite": 300,
    "pipeline_quasimorphism": 60,
    "autocommutator_vs_commutator": 300,
}


@pytest.mark.parametrize("check", ALL_CHECKS, ids=lambda c: c.check_name)
def test_acceptance(check):
    result = check(ExperimentConfig(seed=0))
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} {result.name} [{result.seconds:.2f}s] {result.detail}")
    assert result.passed, result.detail
    budget = BUDGET_SECONDS[result.name]
    assert result.seconds < budget, (
        f"{result.name} took {result.seconds:.1f}s, budget {budget}s"
    )


def test_every_criterion_is_covered():
    assert {c.check_name for c in ALL_CHECKS} == set(BUDGET_SECONDS)
    assert len(ALL_CHECKS) == 13
