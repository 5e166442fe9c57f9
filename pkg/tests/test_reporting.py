"""Tests for the ReportFormatter module."""
import pytest

from ou_kernels.reporting import ReportFormatter
from ou_kernels.verify import VerificationReport


@pytest.fixture
def formatter():
    return ReportFormatter()


def test_table_has_header_and_rows(formatter):
    reports = [VerificationReport("pde_residual", 1e-8, 1e-6),
               VerificationReport("chapman_kolmogorov", 1e-3, 1e-8)]
    table = formatter.format_table(reports)
    lines = table.splitlines()
    assert lines[0].startswith("check")
    assert len(lines) == 4
    assert "pde_residual" in lines[2] and lines[2].endswith("pass")
    assert lines[3].endswith("FAIL")


def test_row_uses_scientific_notation(formatter):
    row = formatter.format_row(VerificationReport("ode_alpha", 2.5e-9, 1e-5))
    assert "2.500e-09" in row
    assert "1.000e-05" in row


def test_summary_all_passed(formatter):
    summary = formatter.format_summary(
        {"total_checks": 5, "passed": 5, "failed": 0, "skipped": 0, "worst_ratio": 0.2})
    assert "5/5 checks passed" in summary
    assert "All closed forms verified." in summary


def test_summary_with_failures(formatter):
    summary = formatter.format_summary(
        {"total_checks": 5, "passed": 3, "failed": 2, "skipped": 1, "worst_ratio": 40.0})
    assert "3/5" in summary
    assert "1 suite(s) skipped" in summary
    assert "2 check(s) FAILED." in summary


def test_summary_empty(formatter):
    assert "Nothing was checked." in formatter.format_summary({})
