"""
Strip Recoding
Shade each white cell by whether a grey cell in its own or the previous column dominates it
"""
from enum import Enum
from typing import Sequence, Tuple

from gridtally.core.exceptions import InvalidInputException
from gridtally.services.grid.grid_core import Cell, GridDims, GridPattern


class Shade(str, Enum):
    GREY = "#"
    DOMINATED = "+"
    UNDOMINATED = "."


ShadedColumn = Tuple[Shade, ...]


def recode_strip(p: GridPattern) -> Tuple[ShadedColumn, ...]:
    """
    Recode a pattern column by column.

    A white cell (j, i) is dominated when (j-1, i), (j, i-1) or (j, i+1) is grey.

    Returns:
        One tuple of shades per column, bottom row first
    """
    columns = []
    for col in range(1, p.dims.n + 1):
        shades = []
        for row in range(1, p.dims.m + 1):
            if Cell(col, row) in p.grey:
                shades.append(Shade.GREY)
            elif any(w in p.grey for w in (Cell(col - 1, row), Cell(col, row - 1), Cell(col, row + 1))):
                shades.append(Shade.DOMINATED)
            else:
                shades.append(Shade.UNDOMINATED)
        columns.append(tuple(shades))
    return tuple(columns)


def decode_strip(columns: Sequence[Sequence[Shade]]) -> GridPattern:
    """Erase the shading."""
    if not columns or not columns[0]:
        raise InvalidInputException("Empty shaded strip")
    m = len(columns[0])
    if any(len(column) != m for column in columns):
        raise InvalidInputException("Shaded columns have unequal heights")
    grey = [
        Cell(col, row)
        for col, column in enumerate(columns, start=1)
        for row, shade in enumerate(column, start=1)
        if Shade(shade) is Shade.GREY
    ]
    return GridPattern(GridDims(len(columns), m), frozenset(grey))


def shaded_rows(columns: Sequence[Sequence[Shade]]) -> str:
    """Render shaded columns as text rows, top row first."""
    m = len(columns[0]) if columns else 0
    return "\n".join(
        "".join(Shade(column[row]).value for column in columns) for row in range(m - 1, -1, -1)
    ) + "\n"
