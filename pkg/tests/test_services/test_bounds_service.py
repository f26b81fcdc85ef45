import csv
import io
import json

import pytest

from gridtally.core.config import KNOWN_GROWTH_BOUNDS, KNOWN_RATIO_LIMITS
from gridtally.core.exceptions import InvalidInputException
from gridtally.services.bounds.bounds_service import BoundsService, GrowthReport
from gridtally.services.grid.grid_core import Variant
from gridtally.services.transfer.transfer_service import TransferService
from gridtally.utilities.report_formatter import REPORT_COLUMNS, ReportFormatter

TOL = 1e-10


class TestBoundsService:
    """Test growth-constant bounds from strip automata."""

    def setup_method(self):
        """Setup before each test."""
        self.service = BoundsService(TransferService(), tol=TOL)

    @pytest.mark.parametrize("variant", [Variant.D, Variant.T])
    def test_lower_below_upper(self, variant):
        """Test the bracketing order for the certified variants."""
        for m in range(3, 6):
            assert self.service.growth_lower_bound(variant, m) <= \
                self.service.growth_upper_bound(variant, m) + 10 * TOL

    @pytest.mark.parametrize("variant", [Variant.D, Variant.T])
    def test_doubling(self, variant):
        """Test that stacked strips never lower the bound."""
        lower = {m: self.service.growth_lower_bound(variant, m) for m in (1, 2, 4, 8)}

        assert lower[2] >= lower[1] - 10 * TOL
        assert lower[4] >= lower[2] - 10 * TOL
        assert lower[8] >= lower[4] - 10 * TOL

    @pytest.mark.slow
    @pytest.mark.parametrize("variant", [Variant.D, Variant.T])
    def test_doubling_from_three(self, variant):
        """Test the doubling chain 3, 6, 12."""
        lower = {m: self.service.growth_lower_bound(variant, m) for m in (3, 6, 12)}

        assert lower[6] >= lower[3] - 10 * TOL
        assert lower[12] >= lower[6] - 10 * TOL

    @pytest.mark.parametrize("variant", [Variant.M, Variant.MT])
    def test_minimal_lower_below_upper(self, variant):
        """Test the bracketing order of the minimal variants at small heights."""
        for m in range(3, 6):
            assert self.service.growth_lower_bound(variant, m) <= \
                self.service.growth_upper_bound(variant, m) + 10 * TOL

    @pytest.mark.slow
    @pytest.mark.parametrize("variant", [Variant.D, Variant.T])
    def test_brackets_known_constant(self, variant):
        """Test that bounds at every height up to 12 are ordered and enclose the stabilised ratio."""
        limit = KNOWN_RATIO_LIMITS[variant.value]
        lo, hi = KNOWN_GROWTH_BOUNDS[variant.value]
        for m in range(3, 13):
            lower = self.service.growth_lower_bound(variant, m)
            upper = self.service.growth_upper_bound(variant, m)

            assert lower <= upper + 10 * TOL
            assert lower <= limit <= upper
        assert lower <= hi
        assert upper >= lo

    @pytest.mark.slow
    @pytest.mark.parametrize("variant,expected", [
        (Variant.M, (1.43596, 1.55033)),
        (Variant.MT, (1.41113, 1.53798)),
    ])
    def test_minimal_bounds_at_ceiling(self, variant, expected):
        """Test the minimal-variant bounds at the tallest strip the height ceiling allows."""
        for m in range(3, 9):
            assert self.service.growth_lower_bound(variant, m) <= \
                self.service.growth_upper_bound(variant, m) + 10 * TOL

        assert self.service.growth_lower_bound(variant, 8) == pytest.approx(expected[0], abs=1e-4)
        assert self.service.growth_upper_bound(variant, 8) == pytest.approx(expected[1], abs=1e-4)

    def test_path_lower_bound(self):
        """Test that the height-1 dominating strip gives the tribonacci constant."""
        assert self.service.growth_lower_bound(Variant.D, 1) == pytest.approx(1.839286755, abs=1e-8)

    @pytest.mark.parametrize("variant", [Variant.D, Variant.T])
    def test_overlaps_known_interval(self, variant):
        """Test that desk-scale bounds are consistent with the known interval."""
        lo, hi = KNOWN_GROWTH_BOUNDS[variant.value]

        assert self.service.growth_lower_bound(variant, 6) <= hi
        assert self.service.growth_upper_bound(variant, 6) >= lo

    def test_upper_needs_three_rows(self):
        """Test that starred strips below 3 rows are rejected."""
        with pytest.raises(InvalidInputException):
            self.service.growth_upper_bound(Variant.D, 2)
        with pytest.raises(InvalidInputException):
            self.service.starred_ratio_estimate(Variant.D, 2)

    def test_ratio_is_radius_quotient(self):
        """Test that the ratio estimate is lambda_(m+1) / lambda_m."""
        lam1 = self.service.strip_spectrum(Variant.D, 1).lam
        lam2 = self.service.strip_spectrum(Variant.D, 2).lam

        assert self.service.ratio_estimate(Variant.D, 1) == pytest.approx(lam2 / lam1, rel=1e-12)

    def test_certification(self):
        """Test that only D and T are certified."""
        assert BoundsService.is_certified(Variant.D)
        assert BoundsService.is_certified(Variant.T)
        assert not BoundsService.is_certified(Variant.M)
        assert not BoundsService.is_certified(Variant.MT)

    @pytest.mark.slow
    def test_domination_ratio(self):
        """Test the stabilised ratio of dominating strips."""
        assert self.service.ratio_estimate(Variant.D, 11) == pytest.approx(KNOWN_RATIO_LIMITS["D"], abs=1e-3)

    @pytest.mark.slow
    def test_total_domination_ratio(self):
        """Test the stabilised ratio of totally dominating strips."""
        assert self.service.ratio_estimate(Variant.T, 10) == pytest.approx(KNOWN_RATIO_LIMITS["T"], abs=1e-3)


class TestBoundsReport:
    """Test the m sweep."""

    def setup_method(self):
        """Setup before each test."""
        self.service = BoundsService(TransferService(), tol=TOL)

    def test_domination_sweep(self):
        """Test one report per m, starred fields only from m = 3."""
        reports = self.service.bounds_report(Variant.D, 5)

        assert [r.m for r in reports] == [1, 2, 3, 4, 5]
        assert reports[0].nu_upper is None and reports[1].nu_upper is None
        assert all(r.nu_upper is not None for r in reports[2:])
        assert all(r.certified and r.error is None for r in reports)
        assert reports[-1].nu_ratio is None
        assert reports[0].nu_ratio == pytest.approx(reports[1].lambda_m / reports[0].lambda_m)
        assert reports[3].nu_lower >= reports[1].nu_lower >= reports[0].nu_lower - 10 * TOL

    @pytest.mark.parametrize("variant", [Variant.M, Variant.MT])
    def test_minimal_sweeps_stay_in_band(self, variant):
        """Test that minimal-variant estimates stay below the known upper bound."""
        _, hi = KNOWN_GROWTH_BOUNDS[variant.value]
        reports = self.service.bounds_report(variant, 4)

        assert all(not r.certified for r in reports)
        assert all(r.nu_lower <= hi for r in reports if r.nu_lower is not None)

    def test_resource_error_marked(self):
        """Test that a strip above the ceiling becomes an error marker, not a failure."""
        service = BoundsService(TransferService(ceiling_mb=1e-6), tol=TOL)
        reports = service.bounds_report(Variant.D, 2)

        assert len(reports) == 2
        assert all(r.error and r.error.startswith("resource") for r in reports)

    def test_workers_identical(self):
        """Test that worker processes give the same reports."""
        serial = self.service.bounds_report(Variant.D, 4, workers=1)
        parallel = BoundsService(TransferService(), tol=TOL).bounds_report(Variant.D, 4, workers=2)

        assert [r.model_dump() for r in serial] == [r.model_dump() for r in parallel]

    def test_bad_range(self):
        """Test that m_max must be positive."""
        with pytest.raises(InvalidInputException):
            self.service.bounds_report(Variant.D, 0)


class TestReportFormatter:
    """Test JSON, CSV and text rendering."""

    def setup_method(self):
        """Setup before each test."""
        self.formatter = ReportFormatter()
        self.reports = [
            GrowthReport(variant=Variant.D, m=1, lambda_m=1.8392867552141612, h_bits=0.8791800990,
                         nu_lower=1.8392867552141612, nu_ratio=1.0341234567891234,
                         certified=True, tol=1e-10, iterations=57),
            GrowthReport(variant=Variant.M, m=3, tol=1e-10, error="resource: too big"),
        ]

    def test_json(self):
        """Test JSON keys and rounding to 10 significant digits."""
        rows = json.loads(self.formatter.to_json(self.reports))

        assert list(rows[0].keys()) == REPORT_COLUMNS
        assert rows[0]["lambda"] == 1.839286755
        assert rows[0]["certified"] is True
        assert rows[1]["lambda"] is None

    def test_csv(self):
        """Test CSV header, booleans and empty cells."""
        rows = list(csv.reader(io.StringIO(self.formatter.to_csv(self.reports))))

        assert rows[0] == REPORT_COLUMNS
        assert rows[1][2] == "1.839286755"
        assert rows[1][REPORT_COLUMNS.index("certified")] == "true"
        assert rows[2][REPORT_COLUMNS.index("nu_upper")] == ""
        assert rows[2][REPORT_COLUMNS.index("certified")] == "false"

    def test_alias_population(self):
        """Test that reports accept the serialised lambda key."""
        report = GrowthReport(**{"variant": "T", "m": 2, "lambda": 1.5, "tol": 1e-10})

        assert report.lambda_m == 1.5
        assert report.variant is Variant.T

    def test_text(self):
        """Test that the text table marks estimates and errors."""
        text = self.formatter.render(self.reports, "text")

        assert "bound" in text
        assert "resource: too big" in text

    def test_verdict(self):
        """Test the verify wording."""
        assert ReportFormatter.verdict(True) == "valid"
        assert ReportFormatter.verdict(False) == "invalid"
