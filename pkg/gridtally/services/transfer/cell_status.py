"""
Cell Status Alphabet
Single Responsibility: Per-row symbols of the column-profile automaton and the one-cell step table

The automaton sweeps columns left to right and, inside a column, rows bottom
to top. Placing the new cell at row i finalises the old cell at row i (its
right neighbour is now known). The profile therefore holds the new column
below row i and the old column from row i upwards.
"""
import logging
from functools import lru_cache
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from gridtally.services.grid.grid_core import Variant

logger = logging.getLogger(__name__)

WHITE = 0
GREY = 1
CLOSE = 2
CHOICES = (WHITE, GREY)


class CellStatus(NamedTuple):
    """What the automaton remembers about one placed cell."""
    in_set: bool = False
    grey_count: int = 0              # grey neighbours placed so far, saturating at 2
    obligation_pending: bool = False  # grey cell whose isolation / private witness is still open
    left_pending: bool = False        # the left neighbour is grey and needs this cell as its private neighbour
    virtual: bool = False             # placeholder before the first and after the last column


VIRTUAL = CellStatus(virtual=True)
VIRTUAL_PENDING = CellStatus(left_pending=True, virtual=True)


def canonical(variant: Variant, s: CellStatus) -> CellStatus:
    """Forget whatever the variant can no longer observe."""
    if s.virtual:
        return VIRTUAL_PENDING if s.left_pending else VIRTUAL
    if variant is Variant.D:
        return CellStatus(s.in_set, 0 if s.in_set else min(s.grey_count, 1))
    if variant is Variant.T:
        return CellStatus(s.in_set, min(s.grey_count, 1))
    if variant is Variant.M:
        if not s.in_set:
            return CellStatus(False, s.grey_count, False, s.left_pending)
        if s.obligation_pending:
            return CellStatus(True, min(s.grey_count, 1), True, s.left_pending)
        return CellStatus(True, 0, False, s.left_pending)
    return CellStatus(s.in_set, s.grey_count, s.obligation_pending and s.in_set, s.left_pending)


def _private_capable(variant: Variant, s: CellStatus) -> bool:
    # M only accepts white private neighbours
    return variant is Variant.MT or (variant is Variant.M and not s.in_set)


def _demand_open(variant: Variant, s: CellStatus) -> bool:
    """Whether a cell carrying left_pending can still end with exactly one grey neighbour."""
    return not s.virtual and s.grey_count <= 1 and _private_capable(variant, s)


def advance_cell(
    variant: Variant,
    old: CellStatus,
    above: Optional[CellStatus],
    below: Optional[CellStatus],
    choice: int,
    waived: bool
) -> Optional[Tuple[Optional[CellStatus], CellStatus, Optional[CellStatus]]]:
    """
    Place the new cell at row i and finalise the old cell at row i.

    Args:
        old: old-column cell at row i
        above: old-column cell at row i+1 (None on the top row)
        below: new-column cell at row i-1 (None on the bottom row)
        choice: WHITE, GREY or CLOSE (virtual column after the last one)
        waived: row i is exempt from domination and obligations

    Returns:
        (below, new, above) after the step, or None when a rule is broken
    """
    tracks = variant.is_minimal
    grey_new = choice == GREY
    witnessed_new = False
    left_pending_new = False

    if not old.virtual:
        final = min(2, old.grey_count + int(grey_new))
        if final == 0 and not waived and (variant.is_total or not old.in_set):
            return None
        capable = _private_capable(variant, old)
        if old.left_pending and not (final == 1 and capable):
            return None
        if tracks and final == 1 and capable:
            # old is private to its unique grey neighbour, wherever it sits
            if below is not None and below.left_pending:
                below = below._replace(left_pending=False)
            if above is not None and above.in_set:
                above = above._replace(obligation_pending=False)
            if grey_new:
                witnessed_new = True
        if old.in_set and old.obligation_pending and not (variant is Variant.M and final == 0):
            left_pending_new = True

    if choice == CLOSE:
        new = VIRTUAL_PENDING if left_pending_new else VIRTUAL
    else:
        count = int(old.in_set) + int(below is not None and below.in_set)
        pending = grey_new and tracks and not waived and not witnessed_new
        new = CellStatus(grey_new, count, pending, left_pending_new)
        if grey_new and below is not None:
            below = below._replace(grey_count=min(2, below.grey_count + 1))

    # below's demand can now only be met by below itself
    if below is not None and below.left_pending and not _demand_open(variant, below):
        return None
    if above is None and new.left_pending and not _demand_open(variant, new):
        return None

    return (
        None if below is None else canonical(variant, below),
        canonical(variant, new),
        None if above is None else canonical(variant, above),
    )


class StepTable(NamedTuple):
    """advance_cell tabulated over symbol indices; index len(symbols) stands for a missing neighbour."""
    symbols: Tuple[CellStatus, ...]
    index: Dict[CellStatus, int]
    new: np.ndarray
    above: np.ndarray
    below: np.ndarray
    ok: np.ndarray

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def virtual(self) -> int:
        return self.index[VIRTUAL]


@lru_cache(maxsize=None)
def step_table(variant: Variant) -> StepTable:
    """Tabulate advance_cell for every (old, above, below, choice, waived) combination."""
    raw = {
        canonical(variant, CellStatus(g, c, p, lp))
        for g in (False, True) for c in range(3) for p in (False, True) for lp in (False, True)
    }
    symbols = tuple(sorted(raw | {VIRTUAL, VIRTUAL_PENDING}))
    index = {s: i for i, s in enumerate(symbols)}
    k = len(symbols)
    shape = (k, k + 1, k + 1, 3, 2)

    # rejected entries keep their inputs so digit arithmetic stays in range
    new = np.broadcast_to(np.arange(k).reshape(k, 1, 1, 1, 1), shape).astype(np.int64)
    above = np.broadcast_to(np.arange(k + 1).reshape(1, k + 1, 1, 1, 1), shape).astype(np.int64)
    below = np.broadcast_to(np.arange(k + 1).reshape(1, 1, k + 1, 1, 1), shape).astype(np.int64)
    ok = np.zeros(shape, dtype=bool)

    for a in range(k):
        for b in range(k + 1):
            up = symbols[b] if b < k else None
            for c in range(k + 1):
                down = symbols[c] if c < k else None
                for choice in (WHITE, GREY, CLOSE):
                    for waived in (0, 1):
                        result = advance_cell(variant, symbols[a], up, down, choice, bool(waived))
                        if result is None:
                            continue
                        down_out, new_out, up_out = result
                        new[a, b, c, choice, waived] = index[new_out]
                        above[a, b, c, choice, waived] = k if up_out is None else index[up_out]
                        below[a, b, c, choice, waived] = k if down_out is None else index[down_out]
                        ok[a, b, c, choice, waived] = True

    logger.debug(f"Step table for {variant.value}: {k} symbols, {int(ok.sum())} allowed entries")
    return StepTable(symbols, index, new, above, below, ok)
