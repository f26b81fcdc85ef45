import logging
import os
import sys
from typing import List, Optional, Tuple

from gridtally.core.exceptions import InvalidInputException
from gridtally.services.grid.cylinder import CylinderWindow
from gridtally.services.grid.grid_core import Cell, GridDims, GridPattern

logger = logging.getLogger(__name__)

GREY = "#"
WHITE = "."


def _split_header(text: str, keyword: str) -> Tuple[Optional[Tuple[int, int]], List[str]]:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise InvalidInputException("Empty pattern text")
    header = None
    first = lines[0].split()
    if first[0] in ("dims", "cyl"):
        if first[0] != keyword or len(first) != 3:
            raise InvalidInputException(f"Bad header line: {lines[0]!r} (expected '{keyword} <w> <h>')")
        try:
            header = (int(first[1]), int(first[2]))
        except ValueError:
            raise InvalidInputException(f"Bad header line: {lines[0]!r}")
        lines = lines[1:]
    return header, lines


def _parse_rows(lines: List[str], header: Optional[Tuple[int, int]]) -> Tuple[int, int, List[Tuple[int, int]]]:
    if not lines:
        raise InvalidInputException("Pattern has no rows")
    width = len(lines[0])
    height = len(lines)
    if any(len(line) != width for line in lines):
        raise InvalidInputException("Pattern rows have unequal lengths")
    if header is not None and header != (width, height):
        raise InvalidInputException(f"Header says {header[0]}×{header[1]} but rows give {width}×{height}")
    grey = []
    for top_index, line in enumerate(lines):
        row = height - top_index
        for col, ch in enumerate(line, start=1):
            if ch == GREY:
                grey.append((col, row))
            elif ch != WHITE:
                raise InvalidInputException(f"Unexpected character {ch!r} in pattern (use '#' and '.')")
    return width, height, grey


def parse_pattern(text: str) -> GridPattern:
    """
    Parse the pattern text format.

    Args:
        text: m lines of n characters, top row first, '#' grey and '.' white,
            optionally preceded by a "dims <n> <m>" line

    Returns:
        GridPattern
    """
    header, lines = _split_header(text, "dims")
    n, m, grey = _parse_rows(lines, header)
    return GridPattern(GridDims(n, m), frozenset(Cell(c, r) for c, r in grey))


def format_pattern(p: GridPattern, header: bool = True) -> str:
    rows = []
    for row in range(p.dims.m, 0, -1):
        rows.append("".join(GREY if Cell(col, row) in p.grey else WHITE for col in range(1, p.dims.n + 1)))
    if header:
        rows.insert(0, f"dims {p.dims.n} {p.dims.m}")
    return "\n".join(rows) + "\n"


def parse_cylinder(text: str) -> CylinderWindow:
    """Parse a cylinder window: pattern format with an optional "cyl <w> <h>" header."""
    header, lines = _split_header(text, "cyl")
    width, height, grey = _parse_rows(lines, header)
    return CylinderWindow(height, width, frozenset(grey))


def format_cylinder(window: CylinderWindow, header: bool = True) -> str:
    rows = []
    for row in range(window.height, 0, -1):
        rows.append("".join(GREY if (col, row) in window.grey else WHITE for col in range(1, window.width + 1)))
    if header:
        rows.insert(0, f"cyl {window.width} {window.height}")
    return "\n".join(rows) + "\n"


def read_text_file(path: str) -> str:
    """
    Read a pattern or cylinder file.

    Raises:
        InvalidInputException: if the file cannot be read
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return f.read()
    except OSError as e:
        logger.error(f"Error reading {path}: {e}")
        raise InvalidInputException(f"Cannot read {path}: {e.strerror}")


def write_output(text: str, out_path: Optional[str] = None) -> None:
    """Write a report to out_path, or to stdout when no path is given."""
    if out_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(out_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(out_path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    logger.info(f"Report written to {out_path}")
