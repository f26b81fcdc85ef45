"""
Transfer Automaton
Single Responsibility: Compile strips into column-profile automata and count accepted paths

A profile state is the tuple of per-row CellStatus symbols of the last placed
column, packed into one int64 as base-K digits (row 1 is the lowest digit).
One column step is stored as m sparse row steps, each placing one cell.
"""
import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix

from gridtally.core.config import settings
from gridtally.core.exceptions import InvalidInputException, ResourceLimitException
from gridtally.services.grid.grid_core import Variant
from gridtally.services.transfer.cell_status import CHOICES, CLOSE, CellStatus, StepTable, step_table

logger = logging.getLogger(__name__)

# int64 codes, index array, float data and intermediate codes per stored transition
BYTES_PER_TRANSITION = 8 + 4 + 8 + 8


@dataclass
class TransferAutomaton:
    """
    Column-profile automaton of a height-m strip.

    Accepted paths of length n from the start state are in bijection with the
    valid sets of the n × m grid (starred: with rows 1 and m waived).
    """
    variant: Optional[Variant]
    m: int
    starred: bool
    states: np.ndarray
    start: int
    accept: np.ndarray
    steps: List[csr_matrix]
    live: np.ndarray
    alphabet: Tuple[CellStatus, ...] = ()
    _exact: Optional[list] = field(default=None, repr=False)

    @property
    def n_states(self) -> int:
        return int(self.states.size)

    @classmethod
    def from_edges(
        cls,
        n_states: int,
        edges: Iterable[Tuple[int, int]],
        start: int = 0,
        accepting: Optional[Sequence[int]] = None
    ) -> "TransferAutomaton":
        """
        Build an explicit automaton from (src, dst) edges.

        Args:
            accepting: accepting state indices (default: every state)
        """
        edges = list(edges)
        if n_states < 1 or not 0 <= start < n_states:
            raise InvalidInputException(f"Bad automaton: {n_states} states, start {start}")
        if any(not (0 <= s < n_states and 0 <= d < n_states) for s, d in edges):
            raise InvalidInputException("Edge endpoint out of range")
        src = np.array([s for s, _ in edges], dtype=np.int64)
        dst = np.array([d for _, d in edges], dtype=np.int64)
        step = csr_matrix((np.ones(src.size), (dst, src)), shape=(n_states, n_states))
        accept = np.zeros(n_states, dtype=bool)
        accept[list(range(n_states)) if accepting is None else list(accepting)] = True
        live = _co_reachable([step], accept)
        return cls(None, 1, False, np.arange(n_states, dtype=np.int64), start, accept, [step], live)

    def has_accepted_paths(self) -> bool:
        """Whether some path of length at least one from the start is accepted."""
        if self.variant is None:
            return bool(self.live.any())
        others = self.live.copy()
        others[self.start] = False
        return bool(others.any())

    def profile(self, state: int) -> Tuple[CellStatus, ...]:
        """Decode a state index into its per-row symbols, bottom row first."""
        if not self.alphabet:
            return ()
        code = int(self.states[state])
        k = len(self.alphabet)
        symbols = []
        for _ in range(self.m):
            code, digit = divmod(code, k)
            symbols.append(self.alphabet[digit])
        return tuple(symbols)

    # ==================== APPLYING ONE COLUMN ====================

    def apply_float(self, v: np.ndarray) -> np.ndarray:
        for step in self.steps:
            v = step @ v
        return v

    def apply_exact(self, v: List[int]) -> List[int]:
        """One column step on a vector of Python integers."""
        if self._exact is None:
            self._exact = [(step.indptr.tolist(), step.indices.tolist(), step.shape[0]) for step in self.steps]
        for indptr, indices, rows in self._exact:
            v = [sum(v[s] for s in indices[indptr[r]:indptr[r + 1]]) for r in range(rows)]
        return v

    def count_sequence(self, n_max: int) -> List[int]:
        """Accepted path counts for lengths 1..n_max."""
        v = [0] * self.n_states
        v[self.start] = 1
        accepted = np.flatnonzero(self.accept).tolist()
        counts = []
        for _ in range(n_max):
            v = self.apply_exact(v)
            counts.append(sum(v[s] for s in accepted))
        return counts

    def column_operator(self) -> csr_matrix:
        """The composed one-column transition matrix (rows are destinations)."""
        composed = self.steps[0]
        for step in self.steps[1:]:
            composed = step @ composed
        return composed.tocsr()


# ==================== BUILDING ====================

def _max_height(variant: Variant) -> int:
    return settings.MAX_STRIP_HEIGHT_MIN if variant.is_minimal else settings.MAX_STRIP_HEIGHT_DT


def _estimate_mb(n_states: int, m: int) -> float:
    return n_states * m * len(CHOICES) * BYTES_PER_TRANSITION / 2 ** 20


class _ProfileCodec:
    """Vectorised digit arithmetic over packed profile codes."""

    def __init__(self, table: StepTable, m: int, waived: Iterable[int]):
        self.table = table
        self.m = m
        self.k = table.size
        self.powers = np.array([self.k ** i for i in range(m + 1)], dtype=np.int64)
        self.waived = set(waived)

    def start_code(self) -> int:
        return int(sum(self.table.virtual * int(p) for p in self.powers[:self.m]))

    def advance(self, codes: np.ndarray, row: int, choice: int) -> Tuple[np.ndarray, np.ndarray]:
        """Place one cell at a row for every code; returns (allowed mask, new codes)."""
        k, p, t = self.k, self.powers, self.table
        none = np.full(codes.shape, k, dtype=np.int64)
        a = (codes // p[row]) % k
        b = (codes // p[row + 1]) % k if row + 1 < self.m else none
        c = (codes // p[row - 1]) % k if row > 0 else none
        w = int(row in self.waived)
        ok = t.ok[a, b, c, choice, w]
        out = codes + (t.new[a, b, c, choice, w] - a) * p[row]
        if row + 1 < self.m:
            out = out + (t.above[a, b, c, choice, w] - b) * p[row + 1]
        if row > 0:
            out = out + (t.below[a, b, c, choice, w] - c) * p[row - 1]
        return ok, out

    def successors(self, codes: np.ndarray) -> np.ndarray:
        for row in range(self.m):
            parts = []
            for choice in CHOICES:
                ok, out = self.advance(codes, row, choice)
                parts.append(out[ok])
            codes = np.unique(np.concatenate(parts))
        return codes


def _reachable(codec: _ProfileCodec, ceiling_mb: float, label: str) -> np.ndarray:
    seen = np.array([codec.start_code()], dtype=np.int64)
    frontier = seen
    while frontier.size:
        fresh = np.setdiff1d(codec.successors(frontier), seen, assume_unique=True)
        seen = np.union1d(seen, fresh)
        frontier = fresh
        estimate = _estimate_mb(seen.size, codec.m)
        if estimate > ceiling_mb:
            raise ResourceLimitException(f"{label}: at least {seen.size} states", estimate, ceiling_mb)
        logger.debug(f"{label}: {seen.size} states reached")
    return seen


def _row_steps(codec: _ProfileCodec, states: np.ndarray) -> List[csr_matrix]:
    steps = []
    codes = states
    for row in range(codec.m):
        src_parts, out_parts = [], []
        for choice in CHOICES:
            ok, out = codec.advance(codes, row, choice)
            idx = np.flatnonzero(ok)
            src_parts.append(idx)
            out_parts.append(out[idx])
        src = np.concatenate(src_parts)
        out = np.concatenate(out_parts)
        if row == codec.m - 1:
            targets = states
            dst = np.searchsorted(states, out)
        else:
            targets, dst = np.unique(out, return_inverse=True)
        steps.append(csr_matrix((np.ones(src.size), (dst.ravel(), src)), shape=(targets.size, codes.size)))
        codes = targets
    return steps


def _accepting(codec: _ProfileCodec, states: np.ndarray) -> np.ndarray:
    alive = np.ones(states.size, dtype=bool)
    codes = states
    for row in range(codec.m):
        ok, codes = codec.advance(codes, row, CLOSE)
        alive &= ok
    return alive


def _co_reachable(steps: List[csr_matrix], accept: np.ndarray) -> np.ndarray:
    """States from which an accepting state can be reached."""
    marked = accept.copy()
    while True:
        y = marked.astype(np.float64)
        for step in reversed(steps):
            y = step.T @ y
        grown = marked | (y > 0)
        if np.array_equal(grown, marked):
            return marked
        marked = grown


def build_automaton(
    variant: Variant,
    m: int,
    starred: bool = False,
    ceiling_mb: Optional[float] = None,
    max_height: Optional[int] = None
) -> TransferAutomaton:
    """
    Compile the height-m strip of a variant into a reachability-pruned automaton.

    Args:
        starred: waive the obligations of rows 1 and m (needs m >= 3)
        ceiling_mb: memory ceiling for the state tables (default GRIDTALLY_CEILING_MB)
        max_height: strip height ceiling (default from settings, by variant)

    Raises:
        InvalidInputException: bad height
        ResourceLimitException: ceiling exceeded, with a state-count estimate
    """
    if m < 1:
        raise InvalidInputException(f"Strip height must be positive, got {m}")
    if starred and m < 3:
        raise InvalidInputException(f"Starred strips need at least 3 rows, got {m}")
    ceiling_mb = ceiling_mb or settings.GRIDTALLY_CEILING_MB
    max_height = max_height or _max_height(variant)
    label = f"{variant.value} strip m={m}{' starred' if starred else ''}"
    if m > max_height:
        raise ResourceLimitException(f"{label} above height ceiling {max_height}")

    table = step_table(variant)
    if table.size ** (m + 1) >= 2 ** 63:
        raise ResourceLimitException(f"{label}: profile codes exceed 64 bits")
    codec = _ProfileCodec(table, m, (0, m - 1) if starred else ())

    try:
        states = _reachable(codec, ceiling_mb, label)
        steps = _row_steps(codec, states)
        accept = _accepting(codec, states)
    except MemoryError:
        raise ResourceLimitException(f"{label}: out of memory")

    live = _co_reachable(steps, accept)
    start = int(np.searchsorted(states, codec.start_code()))
    nnz = sum(step.nnz for step in steps)
    logger.info(f"Built {label}: {states.size} states, {nnz} row transitions, {int(live.sum())} live")
    return TransferAutomaton(variant, m, starred, states, start, accept, steps, live, table.symbols)


# ==================== COUNTING ====================

def count_exact(a: TransferAutomaton, n: int) -> int:
    """
    Exact number of valid sets of the n × m grid: accepted length-n paths from the start.
    """
    if n < 1:
        raise InvalidInputException(f"Grid width must be positive, got {n}")
    return a.count_sequence(n)[-1]


def dump(a: TransferAutomaton, max_states: Optional[int] = None) -> str:
    """
    Diagnostic listing: header "variant m starred states transitions", then "src dst" lines.
    """
    limit = max_states or settings.DUMP_MAX_STATES
    if a.n_states > limit:
        raise ResourceLimitException(f"dump of {a.n_states} states (limit {limit})")
    forward = a.column_operator().T.tocsr()
    forward.sort_indices()
    tag = a.variant.value if a.variant is not None else "-"
    lines = [f"{tag} {a.m} {str(a.starred).lower()} {a.n_states} {forward.nnz}"]
    for src in range(a.n_states):
        for dst in forward.indices[forward.indptr[src]:forward.indptr[src + 1]]:
            lines.append(f"{src} {dst}")
    return "\n".join(lines) + "\n"
