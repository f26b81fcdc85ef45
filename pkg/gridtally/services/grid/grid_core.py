"""
Grid Core
Single Responsibility: Grid geometry and the four domination predicates
"""
import logging
import operator
from dataclasses import dataclass
from enum import Enum
from typing import Callable, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Set

from gridtally.core.exceptions import InvalidInputException

logger = logging.getLogger(__name__)


class Variant(str, Enum):
    """Domination notion enforced by every polymorphic operation."""
    D = "D"
    T = "T"
    M = "M"
    MT = "MT"

    @classmethod
    def parse(cls, tag: str) -> "Variant":
        """Parse a variant tag, case-insensitively."""
        try:
            return cls(str(tag).strip().upper())
        except ValueError:
            raise InvalidInputException(f"Unknown variant: {tag!r} (expected D, T, M or MT)")

    @property
    def is_total(self) -> bool:
        return self in (Variant.T, Variant.MT)

    @property
    def is_minimal(self) -> bool:
        return self in (Variant.M, Variant.MT)

    def relaxation(self) -> "Variant":
        """The non-minimal variant with the same domination requirement."""
        return Variant.T if self.is_total else Variant.D


class Cell(NamedTuple):
    col: int
    row: int


@dataclass(frozen=True)
class GridDims:
    """Size of the n × m grid: n columns, m rows."""
    n: int
    m: int

    def __post_init__(self):
        try:
            object.__setattr__(self, "n", operator.index(self.n))
            object.__setattr__(self, "m", operator.index(self.m))
        except TypeError:
            raise InvalidInputException(f"Grid dimensions must be integers, got {self.n!r} × {self.m!r}")
        if self.n < 1 or self.m < 1:
            raise InvalidInputException(f"Grid dimensions must be positive, got {self.n} × {self.m}")

    @property
    def size(self) -> int:
        return self.n * self.m

    def contains(self, cell: Cell) -> bool:
        return 1 <= cell[0] <= self.n and 1 <= cell[1] <= self.m

    def cells(self) -> Iterator[Cell]:
        """All cells in row-major order, bottom row first."""
        for row in range(1, self.m + 1):
            for col in range(1, self.n + 1):
                yield Cell(col, row)

    def index(self, cell: Cell) -> int:
        """Bit index of a cell in subset bitmasks."""
        return (cell[1] - 1) * self.n + (cell[0] - 1)

    def cell_at(self, index: int) -> Cell:
        row, col = divmod(index, self.n)
        return Cell(col + 1, row + 1)


@dataclass(frozen=True)
class GridPattern:
    """Occupancy of a grid: the grey cells; every other cell is white."""
    dims: GridDims
    grey: FrozenSet[Cell]

    def __post_init__(self):
        cells = frozenset(Cell(int(c[0]), int(c[1])) for c in self.grey)
        outside = [c for c in cells if not self.dims.contains(c)]
        if outside:
            raise InvalidInputException(f"Cells outside {self.dims.n}×{self.dims.m} grid: {sorted(outside)[:5]}")
        object.__setattr__(self, "grey", cells)

    @classmethod
    def empty(cls, dims: GridDims) -> "GridPattern":
        return cls(dims, frozenset())

    @classmethod
    def full(cls, dims: GridDims) -> "GridPattern":
        return cls(dims, frozenset(dims.cells()))

    @classmethod
    def from_cells(cls, dims: GridDims, cells: Iterable[Sequence[int]]) -> "GridPattern":
        return cls(dims, frozenset(Cell(c[0], c[1]) for c in cells))

    @classmethod
    def from_mask(cls, dims: GridDims, mask: int) -> "GridPattern":
        """Build the pattern whose grey cells are the set bits of mask."""
        return cls(dims, frozenset(dims.cell_at(i) for i in range(dims.size) if (mask >> i) & 1))

    def is_grey(self, cell: Sequence[int]) -> bool:
        return Cell(cell[0], cell[1]) in self.grey

    def to_mask(self) -> int:
        mask = 0
        for cell in self.grey:
            mask |= 1 << self.dims.index(cell)
        return mask

    def restrict(self, col_lo: int, row_lo: int, dims: GridDims) -> "GridPattern":
        """Window of the given dims whose bottom-left cell is (col_lo, row_lo), re-indexed from 1."""
        cells = [
            Cell(c.col - col_lo + 1, c.row - row_lo + 1)
            for c in self.grey
            if col_lo <= c.col < col_lo + dims.n and row_lo <= c.row < row_lo + dims.m
        ]
        return GridPattern(dims, frozenset(cells))


# ==================== GEOMETRY ====================

def neighbour_list(dims: GridDims, c: Sequence[int]) -> List[Cell]:
    """In-bounds axis neighbours in a fixed order: left, right, down, up."""
    col, row = c[0], c[1]
    candidates = (Cell(col - 1, row), Cell(col + 1, row), Cell(col, row - 1), Cell(col, row + 1))
    return [w for w in candidates if dims.contains(w)]


def neighbours(dims: GridDims, c: Sequence[int]) -> Set[Cell]:
    """
    Axis-adjacent in-bounds cells of c.

    Raises:
        InvalidInputException: if c lies outside the grid
    """
    if not dims.contains(c):
        raise InvalidInputException(f"Cell {tuple(c)} outside {dims.n}×{dims.m} grid")
    return set(neighbour_list(dims, c))


def grey_neighbour_count(p: GridPattern, c: Sequence[int]) -> int:
    return sum(1 for w in neighbour_list(p.dims, c) if w in p.grey)


def private_neighbours(p: GridPattern, v: Sequence[int]) -> Set[Cell]:
    """
    Neighbours w of v (grey or white) whose only grey neighbour is v.

    Raises:
        InvalidInputException: if v is white or outside the grid
    """
    if not p.dims.contains(v):
        raise InvalidInputException(f"Cell {tuple(v)} outside {p.dims.n}×{p.dims.m} grid")
    if not p.is_grey(v):
        raise InvalidInputException(f"Cell {tuple(v)} is white; private neighbours need a grey cell")
    return {w for w in neighbour_list(p.dims, v) if grey_neighbour_count(p, w) == 1}


# ==================== LOCAL RULES ====================

def cell_obeys_rules(
    variant: Variant,
    cell,
    is_grey: Callable[[object], bool],
    nbrs: Callable[[object], Sequence[object]],
    dominate: bool = True,
    oblige: bool = True
) -> bool:
    """
    Evaluate the variant's local rules at one cell.

    Works on any geometry given by the is_grey / nbrs callables, so grids
    and cylinders share one implementation.

    Args:
        dominate: check the domination requirement at this cell
        oblige: check the isolated-or-private (M) / private (MT) obligation
    """
    around = nbrs(cell)
    grey_here = is_grey(cell)
    if dominate and (variant.is_total or not grey_here):
        if not any(is_grey(w) for w in around):
            return False
    if oblige and grey_here and variant.is_minimal:
        if variant is Variant.M and not any(is_grey(w) for w in around):
            return True
        for w in around:
            if variant is Variant.M and is_grey(w):
                continue
            if sum(1 for x in nbrs(w) if is_grey(x)) == 1:
                return True
        return False
    return True


def local_rule_violations(
    variant: Variant,
    p: GridPattern,
    cells: Optional[Iterable[Cell]] = None,
    waived_rows: Iterable[int] = ()
) -> List[Cell]:
    """
    Cells breaking the variant's local rules.

    Args:
        cells: restrict the check to these cells (default: whole grid)
        waived_rows: rows whose cells need no domination and carry no obligation

    Returns:
        Violating cells in the order checked
    """
    waived = set(waived_rows)
    is_grey = p.grey.__contains__
    nbrs = lambda c: neighbour_list(p.dims, c)
    checked = p.dims.cells() if cells is None else cells
    bad = []
    for cell in checked:
        enforce = cell[1] not in waived
        if not cell_obeys_rules(variant, cell, is_grey, nbrs, dominate=enforce, oblige=enforce):
            bad.append(Cell(cell[0], cell[1]))
    return bad


def starred_rows(dims: GridDims) -> tuple:
    """Rows waived by the starred relaxation."""
    return (1, dims.m)


# ==================== DEFINITIONS ====================

def _dominates(variant: Variant, dims: GridDims, grey: FrozenSet[Cell]) -> bool:
    if variant.is_total:
        return all(any(w in grey for w in neighbour_list(dims, c)) for c in dims.cells())
    return all(c in grey or any(w in grey for w in neighbour_list(dims, c)) for c in dims.cells())


def is_valid(variant: Variant, p: GridPattern, use_local_rules: bool = True) -> bool:
    """
    Check whether the grey cells of p form a valid set for the variant.

    With use_local_rules the isolation / private-neighbour characterisation
    is evaluated cell by cell; otherwise the definition is applied literally,
    including the single-removal test for the minimal variants.
    """
    if use_local_rules:
        return not local_rule_violations(variant, p)
    base = variant.relaxation()
    if not _dominates(base, p.dims, p.grey):
        return False
    if variant.is_minimal:
        return all(not _dominates(base, p.dims, p.grey - {v}) for v in p.grey)
    return True


def is_valid_starred(variant: Variant, p: GridPattern) -> bool:
    """Validity with the top and bottom row obligations waived."""
    if p.dims.m < 3:
        raise InvalidInputException(f"Starred relaxation needs at least 3 rows, got {p.dims.m}")
    return not local_rule_violations(variant, p, waived_rows=starred_rows(p.dims))
