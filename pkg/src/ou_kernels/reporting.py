"""Reporting: Plain-text tables and summaries of verification reports."""

import logging
from typing import List

from ou_kernels.verify import VerificationReport

logger = logging.getLogger(__name__)

HEADER = ("check", "measured", "tolerance", "status")


class ReportFormatter:
    """Formats suite reports for a terminal."""

    def __init__(self, check_width: int = 28):
        self.check_width = check_width

    def format_row(self, report: VerificationReport) -> str:
        status = "pass" if report.passed else "FAIL"
        return (f"{report.check:<{self.check_width}} {report.measured:>12.3e} "
                f"{report.tolerance:>12.3e}  {status}")

    def format_table(self, reports: List[VerificationReport]) -> str:
        """One row per report under a fixed header."""
        check, measured, tolerance, status = HEADER
        lines = [
            f"{check:<{self.check_width}} {measured:>12} {tolerance:>12}  {status}",
            "-" * (self.check_width + 34),
        ]
        lines.extend(self.format_row(r) for r in reports)
        return "\n".join(lines)

    def format_summary(self, stats: dict) -> str:
        """One-line verdict from VerificationSuite.get_stats()."""
        total = stats.get("total_checks", 0)
        passed = stats.get("passed", 0)
        failed = stats.get("failed", 0)
        skipped = stats.get("skipped", 0)
        worst = stats.get("worst_ratio", 0.0)
        summary = f"{passed}/{total} checks passed"
        if skipped:
            summary += f", {skipped} suite(s) skipped"
        summary += f"; worst measured/tolerance ratio {worst:.3g}. "
        if total == 0:
            summary += "Nothing was checked."
        elif failed == 0:
            summary += "All closed forms verified."
        else:
            summary += f"{failed} check(s) FAILED."
        return summary
