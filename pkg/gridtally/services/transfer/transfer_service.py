"""
Transfer Service - Automaton cache and grid counting
"""
import logging
from typing import Dict, Optional, Tuple

from gridtally.core.exceptions import InvalidInputException
from gridtally.services.grid.grid_core import GridDims, Variant
from gridtally.services.transfer.automaton import TransferAutomaton, build_automaton, count_exact

logger = logging.getLogger(__name__)


class TransferService:
    """
    Builds strip automata once per (variant, m, starred) and counts grids with them.
    """

    def __init__(self, ceiling_mb: Optional[float] = None):
        self.ceiling_mb = ceiling_mb
        self._automata: Dict[Tuple[Variant, int, bool], TransferAutomaton] = {}

    def automaton(self, variant: Variant, m: int, starred: bool = False) -> TransferAutomaton:
        """Get or build the automaton of a strip."""
        key = (variant, m, starred)
        if key not in self._automata:
            self._automata[key] = build_automaton(variant, m, starred, ceiling_mb=self.ceiling_mb)
        return self._automata[key]

    def count_grid(self, variant: Variant, dims: GridDims, starred: bool = False) -> int:
        """
        Exact count of valid sets of the n × m grid.

        Plain counts use the shorter side as strip height; starred counts
        keep m as the height since the waived rows are rows 1 and m.
        """
        if starred:
            if dims.m < 3:
                raise InvalidInputException(f"Starred counts need at least 3 rows, got {dims.m}")
            return count_exact(self.automaton(variant, dims.m, True), dims.n)
        height, width = (dims.m, dims.n) if dims.m <= dims.n else (dims.n, dims.m)
        logger.debug(f"Counting {variant.value} on {dims.n}×{dims.m} with strip height {height}")
        return count_exact(self.automaton(variant, height), width)

    def clear(self):
        """Drop every cached automaton."""
        self._automata = {}
