"""
Oracle Service - Exhaustive enumeration only
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from gridtally.core.config import settings
from gridtally.core.exceptions import InvalidInputException, ResourceLimitException
from gridtally.services.grid.batch_rules import chunk_bounds, subset_range, valid_mask
from gridtally.services.grid.grid_core import GridDims, GridPattern, Variant

logger = logging.getLogger(__name__)


def _count_chunk(job: Tuple[str, int, int, int, int, bool, bool]) -> int:
    """Count valid subsets in one bitmask range; module-level so worker processes can run it."""
    tag, n, m, lo, hi, starred, use_local_rules = job
    mask = valid_mask(Variant(tag), GridDims(n, m), subset_range(lo, hi), use_local_rules, starred)
    return int(np.count_nonzero(mask))


class BruteForceOracle:
    """
    Ground truth by enumerating all 2^(n·m) subsets in binary-counter order.
    """

    def __init__(
        self,
        max_cells: Optional[int] = None,
        chunk_bits: Optional[int] = None,
        workers: Optional[int] = None
    ):
        self.max_cells = max_cells or settings.ORACLE_MAX_CELLS
        self.chunk = 1 << (chunk_bits or settings.ORACLE_CHUNK_BITS)
        self.workers = workers or 1

    def _check_limits(self, dims: GridDims, starred: bool, override: bool):
        """Validate grid size and the starred precondition."""
        if starred and dims.m < 3:
            raise InvalidInputException(f"Starred counts need at least 3 rows, got {dims.m}")
        if dims.size > self.max_cells and not override:
            raise ResourceLimitException(
                f"oracle enumeration of 2^{dims.size} subsets "
                f"(limit {self.max_cells} cells, pass override to force)"
            )

    def _jobs(self, variant: Variant, dims: GridDims, starred: bool, use_local_rules: bool):
        return [
            (variant.value, dims.n, dims.m, lo, hi, starred, use_local_rules)
            for lo, hi in chunk_bounds(1 << dims.size, self.chunk)
        ]

    def brute_force_count(
        self,
        variant: Variant,
        dims: GridDims,
        starred: bool = False,
        override: bool = False,
        use_local_rules: bool = True
    ) -> int:
        """
        Count the valid subsets of the grid.

        Args:
            starred: waive the obligations of rows 1 and m
            override: enumerate even above max_cells
            use_local_rules: evaluate the local characterisation (default) or the definition

        Returns:
            Exact count
        """
        self._check_limits(dims, starred, override)
        jobs = self._jobs(variant, dims, starred, use_local_rules)
        logger.info(f"Oracle: {variant.value} on {dims.n}×{dims.m}{' starred' if starred else ''}, {len(jobs)} chunks")

        if self.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                return sum(pool.map(_count_chunk, jobs))
        return sum(_count_chunk(job) for job in jobs)

    def valid_subsets(
        self,
        variant: Variant,
        dims: GridDims,
        starred: bool = False,
        override: bool = False
    ) -> np.ndarray:
        """Bitmasks of all valid subsets, in enumeration order."""
        self._check_limits(dims, starred, override)
        found = []
        for lo, hi in chunk_bounds(1 << dims.size, self.chunk):
            subsets = subset_range(lo, hi)
            found.append(subsets[valid_mask(variant, dims, subsets, True, starred)])
        return np.concatenate(found) if found else np.zeros(0, dtype=np.int64)

    def enumerate_valid(
        self,
        variant: Variant,
        dims: GridDims,
        starred: bool = False,
        override: bool = False
    ) -> List[GridPattern]:
        """All valid patterns, in enumeration order."""
        return [GridPattern.from_mask(dims, int(s)) for s in self.valid_subsets(variant, dims, starred, override)]
