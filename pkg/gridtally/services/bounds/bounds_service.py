"""
Bounds Service
Single Responsibility: Growth-constant bounds and ratio estimates from strip spectral radii
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from gridtally.core.config import settings
from gridtally.core.exceptions import (
    InvalidInputException,
    NonConvergenceException,
    ResourceLimitException
)
from gridtally.services.grid.grid_core import Variant
from gridtally.services.transfer.spectral import SpectralResult, spectral_radius
from gridtally.services.transfer.transfer_service import TransferService

logger = logging.getLogger(__name__)


class GrowthReport(BaseModel):
    """Per-(variant, m) sweep record."""
    model_config = ConfigDict(populate_by_name=True)

    variant: Variant
    m: int
    lambda_m: Optional[float] = Field(default=None, alias="lambda")
    h_bits: Optional[float] = None
    nu_lower: Optional[float] = None
    nu_upper: Optional[float] = None
    nu_ratio: Optional[float] = None
    certified: bool = False
    tol: float
    iterations: Optional[int] = None
    error: Optional[str] = None


def _strip_report_job(job: Tuple[str, int, float, int, Optional[float]]) -> GrowthReport:
    """One sweep row in a worker process."""
    tag, m, tol, max_iters, ceiling_mb = job
    service = BoundsService(TransferService(ceiling_mb), tol=tol, max_iters=max_iters)
    return service.strip_report(Variant(tag), m)


class BoundsService:
    """
    Turns strip spectral radii into bounds on the growth constant.

    Lower bounds come from plain strips, upper bounds from starred strips,
    both normalised per row. Only D and T carry proven monotone directions;
    M and MT values are labelled as estimates.
    """

    def __init__(
        self,
        transfer_service: Optional[TransferService] = None,
        tol: Optional[float] = None,
        max_iters: Optional[int] = None
    ):
        self.transfer_service = transfer_service or TransferService()
        self.tol = tol or settings.POWER_TOL
        self.max_iters = max_iters or settings.POWER_MAX_ITERS
        self._spectra: Dict[Tuple[Variant, int, bool, float, int], SpectralResult] = {}

    def strip_spectrum(self, variant: Variant, m: int, starred: bool = False) -> SpectralResult:
        """Spectral radius of a strip automaton, cached."""
        key = (variant, m, starred, self.tol, self.max_iters)
        if key not in self._spectra:
            automaton = self.transfer_service.automaton(variant, m, starred)
            self._spectra[key] = spectral_radius(automaton, self.tol, self.max_iters)
        return self._spectra[key]

    @staticmethod
    def is_certified(variant: Variant) -> bool:
        return variant in (Variant.D, Variant.T)

    def growth_lower_bound(self, variant: Variant, m: int) -> float:
        """2^(h_m / m) from the plain height-m strip."""
        return 2 ** (self.strip_spectrum(variant, m).h_bits / m)

    def growth_upper_bound(self, variant: Variant, m: int) -> float:
        """2^(h*_m / m) from the starred height-m strip."""
        if m < 3:
            raise InvalidInputException(f"Upper bounds need starred strips with at least 3 rows, got {m}")
        return 2 ** (self.strip_spectrum(variant, m, starred=True).h_bits / m)

    def ratio_estimate(self, variant: Variant, m: int) -> float:
        """lambda_(m+1) / lambda_m from plain strips."""
        return self.strip_spectrum(variant, m + 1).lam / self.strip_spectrum(variant, m).lam

    def starred_ratio_estimate(self, variant: Variant, m: int) -> float:
        """lambda*_(m+1) / lambda*_m from starred strips."""
        if m < 3:
            raise InvalidInputException(f"Starred ratios need at least 3 rows, got {m}")
        return self.strip_spectrum(variant, m + 1, True).lam / self.strip_spectrum(variant, m, True).lam

    def strip_report(self, variant: Variant, m: int) -> GrowthReport:
        """
        Report for one strip height, without the ratio column.

        Resource and convergence failures become the report's error marker.
        """
        report = GrowthReport(variant=variant, m=m, certified=self.is_certified(variant), tol=self.tol)
        try:
            plain = self.strip_spectrum(variant, m)
            report.lambda_m = plain.lam
            report.h_bits = plain.h_bits
            report.iterations = plain.diagnostics.iterations
            report.nu_lower = 2 ** (plain.h_bits / m)
            if m >= 3:
                report.nu_upper = self.growth_upper_bound(variant, m)
        except ResourceLimitException as e:
            logger.warning(f"{variant.value} m={m}: {e}")
            report.error = f"resource: {e}"
        except NonConvergenceException as e:
            logger.warning(f"{variant.value} m={m}: {e}")
            report.error = f"non-convergence: {e}"

        if report.nu_upper is not None and report.nu_upper < report.nu_lower - 10 * self.tol:
            logger.warning(f"{variant.value} m={m}: upper {report.nu_upper} below lower {report.nu_lower}")
            report.error = "nu_upper below nu_lower"
        return report

    def bounds_report(
        self,
        variant: Variant,
        m_max: int,
        tol: Optional[float] = None,
        workers: Optional[int] = None
    ) -> List[GrowthReport]:
        """
        Sweep m = 1..m_max.

        nu_ratio at m is lambda_(m+1) / lambda_m when m+1 is also in the sweep.
        Reports come back in m order whatever the worker count.
        """
        if m_max < 1:
            raise InvalidInputException(f"m_max must be positive, got {m_max}")
        if tol is not None and tol != self.tol:
            return BoundsService(self.transfer_service, tol, self.max_iters).bounds_report(variant, m_max, workers=workers)

        logger.info(f"Bounds sweep for {variant.value}, m = 1..{m_max}, tol {self.tol}")
        if workers and workers > 1 and m_max > 1:
            jobs = [
                (variant.value, m, self.tol, self.max_iters, self.transfer_service.ceiling_mb)
                for m in range(1, m_max + 1)
            ]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(_strip_report_job, jobs))
        else:
            reports = [self.strip_report(variant, m) for m in range(1, m_max + 1)]

        for current, following in zip(reports, reports[1:]):
            if current.lambda_m and following.lambda_m:
                current.nu_ratio = following.lambda_m / current.lambda_m
        return reports
