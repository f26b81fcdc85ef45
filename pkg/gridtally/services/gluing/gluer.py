"""
Gluer
Single Responsibility: Fill the columns between two admissible cylinder windows

Layout of a glued cylinder: the left window, then gap columns C_1..C_k,
then the right window. Rows wrap modulo the common height.
"""
import logging
from typing import Callable, List, Optional

from gridtally.core.config import settings
from gridtally.core.exceptions import InvalidInputException, ResourceLimitException
from gridtally.services.grid.cylinder import CylCell, CylinderWindow, cylinder_violations
from gridtally.services.grid.grid_core import Variant

logger = logging.getLogger(__name__)

LEFT = "left"
RIGHT = "right"
MIN_SIDE_WIDTH = 3
MIN_GLUE_HEIGHT = 6
MIN_GAP = 5


def _require_minimal(variant: Variant):
    if not variant.is_minimal:
        raise InvalidInputException(f"Gluing is defined for M and MT, not {variant.value}")


# ==================== SIDE CHECKS ====================

def check_side(variant: Variant, window: CylinderWindow, side: str) -> List[CylCell]:
    """
    Rule violations of a side window, read as the end of a half-plane.

    The inner side is padded with two white columns; grey obligations must hold
    from column 3 to the inner edge, domination up to one column before it.
    """
    if side not in (LEFT, RIGHT):
        raise InvalidInputException(f"Side must be '{LEFT}' or '{RIGHT}', got {side!r}")
    oriented = window if side == LEFT else window.mirrored()
    padded = oriented.padded(right=2)
    w = oriented.width
    return cylinder_violations(variant, padded, range(3, w), range(3, w + 1))


def interior_violations(variant: Variant, window: CylinderWindow) -> List[CylCell]:
    """Rule violations at horizontal distance at least 3 from both vertical edges."""
    return cylinder_violations(variant, window, range(3, window.width - 1))


def _check_pair(variant: Variant, left: CylinderWindow, right: CylinderWindow, min_height: int):
    if left.height != right.height:
        raise InvalidInputException(f"Side heights differ: {left.height} vs {right.height}")
    if left.height < min_height:
        raise InvalidInputException(f"Height must be at least {min_height}, got {left.height}")
    if left.width < MIN_SIDE_WIDTH or right.width < MIN_SIDE_WIDTH:
        raise InvalidInputException(f"Side windows need at least {MIN_SIDE_WIDTH} columns")
    for name, window in ((LEFT, left), (RIGHT, right)):
        broken = check_side(variant, window, name)
        if broken:
            raise InvalidInputException(f"{name} window breaks the {variant.value} rules at {broken[:5]}")


# ==================== CONSTRUCTIVE FILLING ====================

class _Columns:
    """Mutable column store, 1-based columns and 0-based wrapping rows."""

    def __init__(self, columns: List[List[bool]], height: int):
        self.cols = columns
        self.h = height

    def __call__(self, x: int, y: int) -> bool:
        if not 1 <= x <= len(self.cols):
            return False
        return self.cols[x - 1][y % self.h]

    def set(self, x: int, y: int, value: bool):
        self.cols[x - 1][y % self.h] = value

    def window(self) -> CylinderWindow:
        grey = frozenset(
            (x, y + 1) for x, column in enumerate(self.cols, start=1) for y, flag in enumerate(column) if flag
        )
        return CylinderWindow(self.h, len(self.cols), grey)


def _forward_rule(variant: Variant, g: Callable[[int, int], bool], step: int) -> Callable[[int, int], bool]:
    """Grey iff the trailing cells are white; step is +1 reading leftwards, -1 reading rightwards."""
    def rule(x: int, y: int) -> bool:
        back = x - step
        if variant is Variant.M and g(back, y):
            return False
        return not (g(back, y - 1) or g(back, y + 1) or g(back - step, y))
    return rule


def _sweep_central_m(g: _Columns, xc: int):
    """Make every central cell's closed neighbourhood meet the set, visiting rows outwards from row 1."""
    h = g.h
    order = [0]
    up, down = 1, h - 1
    while len(order) < h:
        if up <= down:
            order.append(up)
            up += 1
        if up <= down and len(order) < h:
            order.append(down)
            down -= 1
    for y in order:
        if not (g(xc, y) or g(xc - 1, y) or g(xc + 1, y) or g(xc, y - 1) or g(xc, y + 1)):
            g.set(xc, y, True)


def _sweep_central_mt(g: _Columns, xc: int):
    """Totally dominate the central column, anchored at its lowest dominated row."""
    h = g.h

    def dominated(y: int) -> bool:
        return g(xc - 1, y) or g(xc + 1, y) or g(xc, y - 1) or g(xc, y + 1)

    anchors = [y for y in range(h) if dominated(y)]
    if not anchors:
        # central and neighbouring columns all white: lay pairs of grey cells
        q, r = divmod(h, 4)
        greys = [y for y in range(4 * q) if y % 4 in (0, 1)]
        greys += {0: [], 1: [h - 1], 2: [h - 2, h - 1], 3: [h - 3, h - 2]}[r]
        for y in greys:
            g.set(xc, y, True)
        return

    anchor = anchors[0]
    for offset in range(h):
        y = anchor + offset
        if dominated(y):
            continue
        if offset < h - 1:
            g.set(xc, y + 1, True)
        else:
            g.set(xc, y - 1, True)


def glue(variant: Variant, left: CylinderWindow, right: CylinderWindow, k: int) -> CylinderWindow:
    """
    Fill k >= 5 columns between two side windows.

    Columns C_1..C_(k-3) are filled left to right and C_k, C_(k-1) right to
    left, each cell grey exactly when its trailing cells are white (for M the
    straight predecessor included). The central column C_(k-2) takes either
    rule, then a repair sweep settles its remaining domination errors.

    Raises:
        InvalidInputException: k < 5, mismatched or rule-breaking sides
    """
    _require_minimal(variant)
    if k < MIN_GAP:
        raise InvalidInputException(f"Gap must be at least {MIN_GAP} columns, got {k}")
    _check_pair(variant, left, right, MIN_GLUE_HEIGHT)

    h, wl = left.height, left.width
    g = _Columns(left.columns() + [[False] * h for _ in range(k)] + right.columns(), h)
    from_left = _forward_rule(variant, g, 1)
    from_right = _forward_rule(variant, g, -1)

    for j in range(1, k - 2):
        x = wl + j
        for y in range(h):
            g.set(x, y, from_left(x, y))
    for j in (k, k - 1):
        x = wl + j
        for y in range(h):
            g.set(x, y, from_right(x, y))
    xc = wl + k - 2
    for y in range(h):
        g.set(xc, y, from_left(xc, y) or from_right(xc, y))

    if variant is Variant.M:
        _sweep_central_m(g, xc)
    else:
        _sweep_central_mt(g, xc)

    glued = g.window()
    logger.info(f"Glued {variant.value} windows: height {h}, gap {k}, width {glued.width}")
    return glued


# ==================== WITNESSES AND SEARCH ====================

def make_stripe_witness(side: str, height: int, width: int = 8) -> CylinderWindow:
    """
    Striped window: pairs of grey columns separated by pairs of white ones,
    ending with a grey pair on the inner edge.
    """
    if side not in (LEFT, RIGHT):
        raise InvalidInputException(f"Side must be '{LEFT}' or '{RIGHT}', got {side!r}")
    if height < 4:
        raise InvalidInputException(f"Stripe witnesses need height at least 4, got {height}")
    if width < MIN_SIDE_WIDTH:
        raise InvalidInputException(f"Stripe witnesses need width at least {MIN_SIDE_WIDTH}, got {width}")
    if side == LEFT:
        grey_cols = [c for c in range(1, width + 1) if (width - c) % 4 in (0, 1)]
    else:
        grey_cols = [c for c in range(1, width + 1) if (c - 1) % 4 in (0, 1)]
    return CylinderWindow(height, width, frozenset((c, r) for c in grey_cols for r in range(1, height + 1)))


def exhaustive_glue_search(
    variant: Variant,
    left: CylinderWindow,
    right: CylinderWindow,
    k: int,
    max_cells: Optional[int] = None,
    max_nodes: Optional[int] = None
) -> Optional[CylinderWindow]:
    """
    Look for any filling of k gap columns whose interior obeys the local rules.

    Backtracks cell by cell in column-major order, white first, checking each
    rule as soon as every cell it reads is placed; the first filling found is
    the lexicographically least.

    Returns:
        The glued cylinder, or None when no filling exists

    Raises:
        ResourceLimitException: above the cell or node ceiling
    """
    _require_minimal(variant)
    if k < 1:
        raise InvalidInputException(f"Gap must be positive, got {k}")
    if left.height != right.height:
        raise InvalidInputException(f"Side heights differ: {left.height} vs {right.height}")
    h = left.height
    if h < 4:
        raise InvalidInputException(f"Height must be at least 4, got {h}")
    max_cells = max_cells or settings.GLUE_SEARCH_MAX_CELLS
    max_nodes = max_nodes or settings.GLUE_SEARCH_MAX_NODES
    if k * h > max_cells:
        raise ResourceLimitException(f"glue search over {k}×{h} free cells (limit {max_cells})")

    wl = left.width
    g = _Columns(left.columns() + [[False] * h for _ in range(k)] + right.columns(), h)
    total_width = len(g.cols)
    minimal_m = variant is Variant.M

    def count(x: int, y: int) -> int:
        return g(x - 1, y) + g(x + 1, y) + g(x, y - 1) + g(x, y + 1)

    def dominated_ok(x: int, y: int) -> bool:
        if minimal_m and g(x, y):
            return True
        return count(x, y) > 0

    def obligation_ok(x: int, y: int) -> bool:
        if not g(x, y):
            return True
        if minimal_m and count(x, y) == 0:
            return True
        for wx, wy in ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)):
            if not 1 <= wx <= total_width:
                continue
            if minimal_m and g(wx, wy):
                continue
            if count(wx, wy) == 1:
                return True
        return False

    def checks_ok(x: int, y: int) -> bool:
        if 3 <= x - 1 <= total_width - 2 and not dominated_ok(x - 1, y):
            return False
        if 3 <= x - 2 <= total_width - 2 and not obligation_ok(x - 2, y):
            return False
        return True

    cells = [(x, y) for x in range(1, total_width + 1) for y in range(h)]
    free = [wl < x <= wl + k for x, _ in cells]
    next_value = [0] * len(cells)
    pos, forward, nodes = 0, True, 0

    while 0 <= pos < len(cells):
        x, y = cells[pos]
        if not free[pos]:
            if forward and checks_ok(x, y):
                pos += 1
            else:
                forward = False
                pos -= 1
            continue
        if next_value[pos] == 2:
            next_value[pos] = 0
            g.set(x, y, False)
            forward = False
            pos -= 1
            continue
        g.set(x, y, next_value[pos] == 1)
        next_value[pos] += 1
        nodes += 1
        if nodes > max_nodes:
            raise ResourceLimitException(f"glue search beyond {max_nodes} nodes")
        if checks_ok(x, y):
            forward = True
            pos += 1
        else:
            forward = False

    logger.info(f"Glue search ({variant.value}, k={k}, h={h}): {nodes} nodes, {'found' if pos >= 0 else 'none'}")
    if pos < 0:
        return None
    return g.window()
