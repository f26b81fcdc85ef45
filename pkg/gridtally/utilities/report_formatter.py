import csv
import io
import json
from typing import Dict, List, Optional

from gridtally.core.config import settings
from gridtally.services.bounds.bounds_service import GrowthReport

REPORT_COLUMNS = [
    "variant", "m", "lambda", "h_bits", "nu_lower", "nu_upper",
    "nu_ratio", "certified", "tol", "iterations", "error"
]

REAL_COLUMNS = {"lambda", "h_bits", "nu_lower", "nu_upper", "nu_ratio", "tol"}


class ReportFormatter:
    """
    Renders growth reports and short result lines.
    Every real number goes out with the same number of significant digits.
    """

    def __init__(self, digits: Optional[int] = None):
        self.digits = digits or settings.REPORT_DIGITS

    # ==================== NUMBERS ====================

    def real(self, value: Optional[float]) -> Optional[float]:
        """Round to the report precision."""
        if value is None:
            return None
        return float(f"{value:.{self.digits}g}")

    def real_text(self, value: Optional[float]) -> str:
        if value is None:
            return ""
        return f"{value:.{self.digits}g}"

    # ==================== GROWTH REPORTS ====================

    def report_row(self, report: GrowthReport) -> Dict:
        """One report as an ordered dict with rounded reals."""
        raw = report.model_dump(by_alias=True)
        row = {}
        for column in REPORT_COLUMNS:
            value = raw.get(column)
            if column == "variant":
                value = report.variant.value
            elif column in REAL_COLUMNS:
                value = self.real(value)
            row[column] = value
        return row

    def to_json(self, reports: List[GrowthReport]) -> str:
        return json.dumps([self.report_row(r) for r in reports], indent=2) + "\n"

    def to_csv(self, reports: List[GrowthReport]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for report in reports:
            row = self.report_row(report)
            writer.writerow([self._csv_cell(column, row[column]) for column in REPORT_COLUMNS])
        return buffer.getvalue()

    def _csv_cell(self, column: str, value) -> str:
        if value is None:
            return ""
        if column in REAL_COLUMNS:
            return self.real_text(value)
        if isinstance(value, bool):
            return "true" if value else "false"
        return str(value)

    def to_text(self, reports: List[GrowthReport]) -> str:
        """Fixed-width table for terminals."""
        header = f"{'variant':<7} {'m':>3} {'lambda':>18} {'nu_lower':>14} {'nu_upper':>14} {'nu_ratio':>14}  status"
        lines = [header, "-" * len(header)]
        for r in reports:
            status = r.error or ("bound" if r.certified else "estimate")
            lines.append(
                f"{r.variant.value:<7} {r.m:>3} {self.real_text(r.lambda_m):>18} "
                f"{self.real_text(r.nu_lower):>14} {self.real_text(r.nu_upper):>14} "
                f"{self.real_text(r.nu_ratio):>14}  {status}"
            )
        return "\n".join(lines) + "\n"

    def render(self, reports: List[GrowthReport], fmt: str) -> str:
        if fmt == "json":
            return self.to_json(reports)
        if fmt == "csv":
            return self.to_csv(reports)
        return self.to_text(reports)

    # ==================== SHORT RESULT LINES ====================

    @staticmethod
    def verdict(valid: bool) -> str:
        return "valid" if valid else "invalid"

    @staticmethod
    def selftest_row(variant: str, n: int, m: int, brute: int, transfer: int) -> str:
        status = "PASS" if brute == transfer else "FAIL"
        return f"{variant:<3} {n:>2}x{m:<2} brute={brute:<10} transfer={transfer:<10} {status}"
