"""
Cylinder Windows
Columns of height h with vertical wraparound, used by the gluing constructions
"""
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from gridtally.core.exceptions import InvalidInputException
from gridtally.services.grid.grid_core import Variant, cell_obeys_rules

CylCell = Tuple[int, int]


@dataclass(frozen=True)
class CylinderWindow:
    """Occupancy over columns 1..width and rows 1..height, rows taken mod height."""
    height: int
    width: int
    grey: FrozenSet[CylCell]

    def __post_init__(self):
        if self.height < 1 or self.width < 0:
            raise InvalidInputException(f"Bad cylinder size: width {self.width}, height {self.height}")
        cells = frozenset((int(c), (int(r) - 1) % self.height + 1) for c, r in self.grey)
        outside = [c for c in cells if not 1 <= c[0] <= self.width]
        if outside:
            raise InvalidInputException(f"Columns outside 1..{self.width}: {sorted(outside)[:5]}")
        object.__setattr__(self, "grey", cells)

    @classmethod
    def from_columns(cls, height: int, columns: Sequence[Sequence[bool]]) -> "CylinderWindow":
        """Build from a list of columns, each a bottom-to-top list of grey flags."""
        grey = set()
        for col, column in enumerate(columns, start=1):
            if len(column) != height:
                raise InvalidInputException(f"Column {col} has {len(column)} cells, expected {height}")
            grey.update((col, row) for row, flag in enumerate(column, start=1) if flag)
        return cls(height, len(columns), frozenset(grey))

    def wrap(self, row: int) -> int:
        return (row - 1) % self.height + 1

    def is_grey(self, cell: Sequence[int]) -> bool:
        return (cell[0], self.wrap(cell[1])) in self.grey

    def column(self, col: int) -> List[bool]:
        return [(col, row) in self.grey for row in range(1, self.height + 1)]

    def columns(self) -> List[List[bool]]:
        return [self.column(col) for col in range(1, self.width + 1)]

    def mirrored(self) -> "CylinderWindow":
        """Left-right mirror image."""
        return CylinderWindow(self.height, self.width, frozenset((self.width + 1 - c, r) for c, r in self.grey))

    def padded(self, left: int = 0, right: int = 0) -> "CylinderWindow":
        """Add white columns on either side."""
        return CylinderWindow(self.height, self.width + left + right, frozenset((c + left, r) for c, r in self.grey))

    def neighbours(self, cell: Sequence[int]) -> List[CylCell]:
        """Distinct neighbours of a cell: left and right when in range, up and down with wraparound."""
        col, row = cell[0], self.wrap(cell[1])
        found: List[CylCell] = []
        for w in ((col - 1, row), (col + 1, row), (col, self.wrap(row - 1)), (col, self.wrap(row + 1))):
            if 1 <= w[0] <= self.width and w != (col, row) and w not in found:
                found.append(w)
        return found


def cylinder_violations(
    variant: Variant,
    window: CylinderWindow,
    dominate_cols: Iterable[int],
    oblige_cols: Optional[Iterable[int]] = None
) -> List[CylCell]:
    """
    Cells breaking the variant's local rules on a cylinder.

    Args:
        dominate_cols: columns whose cells must be dominated
        oblige_cols: columns whose grey cells must meet their obligation
            (defaults to dominate_cols)
    """
    dominate = set(dominate_cols)
    oblige = dominate if oblige_cols is None else set(oblige_cols)
    bad = []
    for col in sorted(dominate | oblige):
        if not 1 <= col <= window.width:
            continue
        for row in range(1, window.height + 1):
            if not cell_obeys_rules(
                variant, (col, row), window.is_grey, window.neighbours,
                dominate=col in dominate, oblige=col in oblige
            ):
                bad.append((col, row))
    return bad
