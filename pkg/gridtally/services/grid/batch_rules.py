"""
Batch Rules
Single Responsibility: Evaluate domination predicates on whole arrays of subsets

Subsets are int64 bitmasks with bit (row-1)*n + (col-1) set for grey cells,
the same indexing as GridDims.index.
"""
from functools import lru_cache
from typing import Iterable, List, Tuple

import numpy as np

from gridtally.core.exceptions import InvalidInputException
from gridtally.services.grid.grid_core import GridDims, Variant, neighbour_list, starred_rows

MAX_BATCH_CELLS = 62


@lru_cache(maxsize=128)
def neighbour_table(dims: GridDims) -> Tuple[Tuple[int, ...], ...]:
    """Neighbour bit indices for every cell, in bit order."""
    return tuple(
        tuple(dims.index(w) for w in neighbour_list(dims, dims.cell_at(k)))
        for k in range(dims.size)
    )


def _bits(subsets: np.ndarray, size: int) -> np.ndarray:
    shifts = np.arange(size, dtype=np.int64)[:, None]
    return ((subsets[None, :] >> shifts) & 1).astype(bool)


def _dominating(variant: Variant, dims: GridDims, subsets: np.ndarray) -> np.ndarray:
    table = neighbour_table(dims)
    ok = np.ones(subsets.shape, dtype=bool)
    for k, nbrs in enumerate(table):
        mask = 0 if variant.is_total else 1 << k
        for j in nbrs:
            mask |= 1 << j
        ok &= (subsets & np.int64(mask)) != 0
    return ok


def _local_mask(variant: Variant, dims: GridDims, subsets: np.ndarray, waived: Iterable[int]) -> np.ndarray:
    table = neighbour_table(dims)
    grey = _bits(subsets, dims.size)
    counts = np.zeros(grey.shape, dtype=np.int8)
    for k, nbrs in enumerate(table):
        for j in nbrs:
            counts[k] += grey[j]
    waived_rows = set(waived)
    ok = np.ones(subsets.shape, dtype=bool)
    for k, nbrs in enumerate(table):
        if k // dims.n + 1 in waived_rows:
            continue
        if variant.is_total:
            ok &= counts[k] > 0
        else:
            ok &= grey[k] | (counts[k] > 0)
        if variant.is_minimal:
            if variant is Variant.M:
                witnessed = counts[k] == 0
                for j in nbrs:
                    witnessed |= ~grey[j] & (counts[j] == 1)
            else:
                witnessed = np.zeros(subsets.shape, dtype=bool)
                for j in nbrs:
                    witnessed |= counts[j] == 1
            ok &= ~grey[k] | witnessed
    return ok


def _definitional_mask(variant: Variant, dims: GridDims, subsets: np.ndarray) -> np.ndarray:
    base = variant.relaxation()
    ok = _dominating(base, dims, subsets)
    if not variant.is_minimal:
        return ok
    for k in range(dims.size):
        bit = np.int64(1 << k)
        member = (subsets & bit) != 0
        ok &= ~member | ~_dominating(base, dims, subsets & ~bit)
    return ok


def valid_mask(
    variant: Variant,
    dims: GridDims,
    subsets: np.ndarray,
    use_local_rules: bool = True,
    starred: bool = False
) -> np.ndarray:
    """
    Validity of every subset in an array, same semantics as is_valid.

    Args:
        subsets: int64 array of bitmasks
        use_local_rules: local characterisation (True) or literal definition (False)
        starred: waive the top and bottom row obligations (local rules only)

    Returns:
        Boolean array aligned with subsets
    """
    if dims.size > MAX_BATCH_CELLS:
        raise InvalidInputException(f"Batch evaluation supports at most {MAX_BATCH_CELLS} cells")
    subsets = np.asarray(subsets, dtype=np.int64)
    if starred:
        if dims.m < 3:
            raise InvalidInputException(f"Starred relaxation needs at least 3 rows, got {dims.m}")
        if not use_local_rules:
            raise InvalidInputException("The starred relaxation is defined through the local rules")
        return _local_mask(variant, dims, subsets, starred_rows(dims))
    if use_local_rules:
        return _local_mask(variant, dims, subsets, ())
    return _definitional_mask(variant, dims, subsets)


def subset_range(start: int, stop: int) -> np.ndarray:
    return np.arange(start, stop, dtype=np.int64)


def chunk_bounds(total: int, chunk: int) -> List[Tuple[int, int]]:
    """Split [0, total) into contiguous [lo, hi) chunks."""
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
