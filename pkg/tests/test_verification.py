"""The self-verification harness, including mutation checks.

A verification suite that cannot fail is worthless, so beyond asserting the
clean build passes, these tests corrupt the production formulas in place
(monkeypatched, sign-flipped variants) and require the harness to notice.
"""

import numpy as np
import pytest

import rrkit.estimation as estimation
import rrkit.privacy as privacy
from rrkit.verification import run_verification

EXPECTED_CHECKS = {
    "posterior_matches_oracle",
    "alpha_matches_oracle",
    "mean_variance_identity",
    "enumeration_agreement",
    "total_proportion_variance",
    "alpha_guarantee_tight",
    "beta_guarantee_tight",
    "estimator_unbiased",
}


def test_clean_build_passes():
    report = run_verification(grid_step=0.1)
    assert report.passed
    assert {c.name for c in report.checks} == EXPECTED_CHECKS
    for check in report.checks:
        assert check.passed, check


def test_report_json_shape():
    doc = run_verification(grid_step=0.2).to_json_dict()
    assert doc["passed"] is True
    assert len(doc["checks"]) == len(EXPECTED_CHECKS)
    assert all(set(c) == {"name", "passed", "detail"} for c in doc["checks"])


def test_sign_flipped_mean_variance_fails_verification(monkeypatch):
    """Flip the final variance term back to the wrong transcription; the
    moment-identity and enumeration checks must both catch it."""

    def corrupted(device, support, population, n):
        p = device.p
        x = support.values_array
        mu = population.mean(support)
        sigma2 = population.variance(support)
        xbar = support.unweighted_mean
        spread = float(np.mean((x - xbar) ** 2))
        return (p * sigma2 + (1 - p) * spread + p * (p - 1) * (mu - xbar) ** 2) / (n * p * p)

    monkeypatch.setattr(estimation, "variance_mean_theoretical", corrupted)
    report = run_verification(grid_step=0.2)
    assert not report.passed
    failed = {c.name for c in report.checks if not c.passed}
    assert "mean_variance_identity" in failed
    assert "enumeration_agreement" in failed


def test_sign_flipped_proportion_variance_fails_verification(monkeypatch):
    def corrupted(device, population, n):
        inv_p2 = 1.0 / (device.p * device.p)
        sum_sq = float(population.pi_array @ population.pi_array)
        return (inv_p2 - sum_sq + (inv_p2 - 1.0) / device.m) / n

    monkeypatch.setattr(estimation, "total_variance_proportions_theoretical", corrupted)
    report = run_verification(grid_step=0.2)
    failed = {c.name for c in report.checks if not c.passed}
    assert failed == {"total_proportion_variance"}


def test_corrupted_posterior_fails_verification(monkeypatch):
    original = privacy.revealing_probabilities

    def corrupted(device, population):
        post = original(device, population).copy()
        post[0, 0] += 1e-6
        return post

    monkeypatch.setattr(privacy, "revealing_probabilities", corrupted)
    report = run_verification(grid_step=0.2)
    assert not report.passed
    failed = {c.name for c in report.checks if not c.passed}
    assert "posterior_matches_oracle" in failed


def test_coarser_grid_still_passes():
    assert run_verification(grid_step=0.25).passed


def test_bad_grid_step_rejected():
    from rrkit import ValidationError

    with pytest.raises(ValidationError) as e:
        run_verification(grid_step=0.07)
    assert e.value.code == "BAD_GRID"
