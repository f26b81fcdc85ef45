"""
Boundary Maps
Single Responsibility: Ring-by-ring extension of valid sets and repair of grid borders

Coordinates of a FramedPattern keep the core at columns 1..n and rows 1..m
conceptually; the stored GridPattern is shifted by k so that ring k starts at 1.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Set

from gridtally.core.exceptions import InvalidInputException
from gridtally.services.grid.grid_core import (
    Cell,
    GridDims,
    GridPattern,
    Variant,
    is_valid,
    local_rule_violations,
    neighbour_list
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FramedPattern:
    """A core pattern surrounded by k rings; the full support is (n+2k) × (m+2k)."""
    core_dims: GridDims
    rings: int
    pattern: GridPattern

    def restrict_core(self) -> GridPattern:
        return self.pattern.restrict(self.rings + 1, self.rings + 1, self.core_dims)

    def window(self, r: int) -> GridPattern:
        """The core dilated r times (r <= rings)."""
        if not 0 <= r <= self.rings:
            raise InvalidInputException(f"Window radius {r} outside 0..{self.rings}")
        dims = GridDims(self.core_dims.n + 2 * r, self.core_dims.m + 2 * r)
        offset = self.rings - r + 1
        return self.pattern.restrict(offset, offset, dims)


# ==================== RING GEOMETRY ====================

def ring_index(dims: GridDims, c: Cell) -> int:
    """Distance of a cell to the border frame of the grid."""
    return min(c.col - 1, dims.n - c.col, c.row - 1, dims.m - c.row)


def ring_cells(dims: GridDims, r: int) -> List[Cell]:
    """
    Cells of ring r, clockwise from the bottom-left corner:
    up the left side, along the top, down the right side, back along the bottom.
    """
    lo_c, hi_c, lo_r, hi_r = 1 + r, dims.n - r, 1 + r, dims.m - r
    if lo_c > hi_c or lo_r > hi_r:
        return []
    order: List[Cell] = []
    order += [Cell(lo_c, row) for row in range(lo_r, hi_r + 1)]
    order += [Cell(col, hi_r) for col in range(lo_c + 1, hi_c + 1)]
    order += [Cell(hi_c, row) for row in range(hi_r - 1, lo_r - 1, -1)]
    order += [Cell(col, lo_r) for col in range(hi_c - 1, lo_c, -1)]
    seen: Set[Cell] = set()
    unique = []
    for cell in order:
        if cell not in seen:
            seen.add(cell)
            unique.append(cell)
    return unique


def all_rings(dims: GridDims) -> List[List[Cell]]:
    rings = []
    r = 0
    while True:
        cells = ring_cells(dims, r)
        if not cells:
            return rings
        rings.append(cells)
        r += 1


# ==================== EXTENSION ====================

def _dominated(variant: Variant, grey: Set[Cell], dims: GridDims, c: Cell) -> bool:
    return any(w in grey for w in neighbour_list(dims, c))


def extend_rings(variant: Variant, p: GridPattern, k: int) -> FramedPattern:
    """
    Extend a valid pattern by k rings, one ring at a time.

    M and MT: ring corners are white, and so are the ring cells next to a
    corner on the vertical sides; any other ring cell is grey exactly when its
    inward neighbour is not yet dominated (and, for M, not grey) inside the
    pattern built so far. D and T rings are all grey.

    Raises:
        InvalidInputException: p is not valid for the variant, or k < 1
    """
    if k < 1:
        raise InvalidInputException(f"Ring count must be positive, got {k}")
    if not is_valid(variant, p):
        raise InvalidInputException(f"Pattern is not a valid {variant.value} set")

    n, m = p.dims.n, p.dims.m
    full = GridDims(n + 2 * k, m + 2 * k)
    grey = {Cell(c.col + k, c.row + k) for c in p.grey}

    for r in range(1, k + 1):
        # the pattern built so far lives in the window of radius r-1
        inner = GridDims(n + 2 * (r - 1), m + 2 * (r - 1))
        lo_c, hi_c, lo_r, hi_r = k + 1 - r, k + n + r, k + 1 - r, k + m + r
        ring = ring_cells(GridDims(hi_c - lo_c + 1, hi_r - lo_r + 1), 0)
        shifted = {Cell(g.col - lo_c, g.row - lo_r) for g in grey}
        added = []
        for cell in ring:
            col, row = cell.col + lo_c - 1, cell.row + lo_r - 1
            if not variant.is_minimal:
                added.append(Cell(col, row))
                continue
            on_side = col in (lo_c, hi_c)
            on_end = row in (lo_r, hi_r)
            if on_side and on_end:
                continue
            if on_side and row in (lo_r + 1, hi_r - 1):
                continue
            inward = Cell(
                col + (1 if col == lo_c else -1 if col == hi_c else 0),
                row + (1 if row == lo_r and not on_side else -1 if row == hi_r and not on_side else 0)
            )
            local = Cell(inward.col - lo_c, inward.row - lo_r)
            undominated = not _dominated(variant, shifted, inner, local)
            if variant is Variant.M:
                fire = undominated and inward not in grey
            else:
                fire = undominated
            if fire:
                added.append(Cell(col, row))
        grey.update(added)
        logger.debug(f"Ring {r}: {len(added)} grey cells")

    return FramedPattern(p.dims, k, GridPattern(full, frozenset(grey)))


# ==================== REPAIR ====================

def _grey_count(dims: GridDims, grey: Set[Cell], c: Cell) -> int:
    return sum(1 for w in neighbour_list(dims, c) if w in grey)


def _has_private(variant: Variant, dims: GridDims, grey: Set[Cell], v: Cell) -> bool:
    for w in neighbour_list(dims, v):
        if variant is Variant.M and w in grey:
            continue
        if _grey_count(dims, grey, w) == 1:
            return True
    return False


def _redundant(variant: Variant, dims: GridDims, grey: Set[Cell], v: Cell) -> bool:
    """A grey cell whose removal keeps the set dominating."""
    if variant is Variant.M and _grey_count(dims, grey, v) == 0:
        return False
    return not _has_private(variant, dims, grey, v)


def _is_dominated(variant: Variant, dims: GridDims, grey: Set[Cell], u: Cell) -> bool:
    if variant is Variant.M and u in grey:
        return True
    return _grey_count(dims, grey, u) > 0


def _outward(dims: GridDims, u: Cell) -> Cell:
    r = ring_index(dims, u)
    for w in neighbour_list(dims, u):
        if ring_index(dims, w) == r - 1:
            return w
    return neighbour_list(dims, u)[0]


def _total_dominator(dims: GridDims, u: Cell, r: int) -> Cell:
    """The cell MT repair turns grey to dominate an undominated cell u on ring r."""
    nbrs = neighbour_list(dims, u)
    if r >= 1:
        return _outward(dims, u)
    corner = u.col in (1, dims.n) and u.row in (1, dims.m)
    if corner:
        horizontal = [w for w in nbrs if w.row == u.row]
        return horizontal[0] if horizontal else nbrs[0]
    inward = [w for w in nbrs if 2 <= w.col <= dims.n - 1 and 2 <= w.row <= dims.m - 1]
    return inward[0] if inward else nbrs[0]


def _release_owners(dims: GridDims, grey: Set[Cell], v: Cell):
    """Remove each grey w' whose only private neighbour is a grey neighbour w of v."""
    for w in neighbour_list(dims, v):
        if w not in grey:
            continue
        for owner in neighbour_list(dims, w):
            if owner == v or owner not in grey:
                continue
            privates = [x for x in neighbour_list(dims, owner) if _grey_count(dims, grey, x) == 1]
            if privates == [w]:
                grey.discard(owner)


def repair_boundary(variant: Variant, p: GridPattern) -> GridPattern:
    """
    Turn a pattern that obeys the local rules away from its border into a valid set.

    Steps, each a sweep over rings in clockwise order from the bottom-left:
      1. drop redundant grey cells on the outer ring;
      2. dominate every undominated cell (M: the cell itself on the outer
         ring, its outward neighbour further in; MT: a chosen neighbour, after
         freeing grey cells whose only private neighbour it would take);
      3. drop every grey cell that has become redundant.

    Raises:
        InvalidInputException: the interior breaks the local rules, or no
            valid set exists (MT on a single cell)
    """
    if not variant.is_minimal:
        raise InvalidInputException(f"Repair is defined for M and MT, not {variant.value}")
    dims = p.dims
    interior = [
        Cell(col, row) for row in range(3, dims.m - 1) for col in range(3, dims.n - 1)
    ]
    broken = local_rule_violations(variant, p, interior)
    if broken:
        raise InvalidInputException(f"Interior breaks the {variant.value} rules at {broken[:5]}")
    if variant is Variant.MT and dims.size == 1:
        raise InvalidInputException("A single cell has no total dominating set")

    grey = set(p.grey)
    rings = all_rings(dims)

    for v in rings[0]:
        if v in grey and _redundant(variant, dims, grey, v):
            grey.discard(v)

    for r, ring in enumerate(rings):
        for u in ring:
            if _is_dominated(variant, dims, grey, u):
                continue
            if variant is Variant.M:
                grey.add(u if r == 0 else _outward(dims, u))
            else:
                target = _total_dominator(dims, u, r)
                _release_owners(dims, grey, target)
                grey.add(target)

    for ring in rings:
        for v in ring:
            if v in grey and _redundant(variant, dims, grey, v):
                grey.discard(v)

    changed = len(grey.symmetric_difference(p.grey))
    if changed:
        logger.debug(f"Repair changed {changed} cells on {dims.n}×{dims.m}")
    return GridPattern(dims, frozenset(grey))
