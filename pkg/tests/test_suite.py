"""Tests for the VerificationSuite module."""
import logging
import math

import pytest

from ou_kernels.operator_core import OUOperator, classify
from ou_kernels.suite import SUITES, VerificationSuite, reference_time
from ou_kernels.verify import VerificationReport


@pytest.fixture
def suite(l_plus):
    return VerificationSuite(l_plus, paths=4000, dt=1e-2, n_sigma=4.0)


def test_suite_init(suite):
    assert suite.regime.kind == "hyperbolic"
    assert suite.t_ref == 0.5
    assert suite.get_history() == []


def test_get_stats_empty(suite):
    stats = suite.get_stats()
    assert stats["total_checks"] == 0
    assert stats["passed"] == 0
    assert stats["worst_ratio"] == 0.0


def test_record_report(suite):
    suite.record_report(VerificationReport("x", 1.0, 2.0))
    suite.record_report(VerificationReport("y", 3.0, 2.0))
    stats = suite.get_stats()
    assert stats["total_checks"] == 2
    assert stats["passed"] == 1
    assert stats["failed"] == 1
    assert stats["worst_ratio"] == pytest.approx(1.5)
    assert not suite.all_passed


def test_run_pde(suite):
    reports = suite.run("pde")
    assert len(reports) == 3
    assert all(r.check == "pde_residual" for r in reports)
    assert suite.all_passed


def test_run_ode_covers_two_times(suite):
    reports = suite.run("ode")
    assert len(reports) == 12
    assert suite.all_passed


def test_run_accumulates_history(suite):
    suite.run("pde")
    suite.run("semigroup")
    assert len(suite.get_history()) == 4
    assert suite.get_stats()["total_checks"] == 4


def test_run_all(suite):
    reports = suite.run("all")
    checks = {r.check for r in reports}
    assert {"pde_residual", "ode_alpha", "chapman_kolmogorov", "delta_limit", "delta_limit_rate",
            "geodesic_ode", "geodesic_shooting", "feynman_kac"} <= checks
    assert suite.all_passed, [r.to_dict() for r in reports if not r.passed]


def test_unknown_suite(suite):
    with pytest.raises(ValueError, match="unknown suite"):
        suite.run("fourier")


def test_shooting_skipped_at_resonance(caplog):
    op = OUOperator(1.0, 0.0, 0.0, -math.pi ** 2 / 4.0)
    suite = VerificationSuite(op)
    with caplog.at_level(logging.WARNING, logger="ou_kernels.suite"):
        assert suite.run("shooting") == []
    assert "skipping shooting" in caplog.text
    assert suite.get_stats()["skipped"] == 1
    assert suite.get_skipped()[0]["suite"] == "shooting"


def test_reference_time_stays_in_first_window():
    op = OUOperator(1.0, 0.0, 0.0, -25.0)
    regime = classify(op)
    assert reference_time(regime) == pytest.approx(0.3 * math.pi / 10.0)
    assert reference_time(classify(OUOperator(1.0, 1.0, 0.0, -1.0))) == 0.5


def test_oscillatory_suite_passes(l_minus):
    suite = VerificationSuite(l_minus)
    for name in ("pde", "ode", "semigroup", "delta"):
        suite.run(name)
    assert suite.all_passed, [r.to_dict() for r in suite.get_history() if not r.passed]


def test_suite_names():
    assert SUITES == ("pde", "ode", "semigroup", "delta", "shooting", "monte-carlo")
