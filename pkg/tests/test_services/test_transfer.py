import numpy as np
import pytest

from gridtally.core.exceptions import InvalidInputException, ResourceLimitException
from gridtally.services.grid.grid_core import GridDims, Variant
from gridtally.services.oracle_service import BruteForceOracle
from gridtally.services.transfer.automaton import (
    TransferAutomaton,
    build_automaton,
    count_exact,
    dump
)
from gridtally.services.transfer.cell_status import VIRTUAL, step_table
from gridtally.services.transfer.transfer_service import TransferService

FAST_DIMS = [(n, m) for n in range(1, 13) for m in range(1, 13) if n * m <= 12]
SLOW_DIMS = [(n, m) for n in range(1, 21) for m in range(1, 21) if 12 < n * m <= 20]
STARRED_DIMS = [(n, m) for m in range(3, 6) for n in range(1, 6) if n * m <= 16]


class TestStepTable:
    """Test the tabulated one-cell step."""

    @pytest.mark.parametrize("variant", list(Variant))
    def test_table_shape(self, variant):
        """Test that every symbol has a table slot and a missing-neighbour slot."""
        table = step_table(variant)
        k = table.size

        assert table.ok.shape == (k, k + 1, k + 1, 3, 2)
        assert table.symbols[table.virtual] == VIRTUAL

    def test_rejected_entries_stay_in_range(self):
        """Test that rejected entries never point outside the alphabet."""
        table = step_table(Variant.MT)

        assert table.new.max() < table.size
        assert table.above.max() <= table.size


class TestBuildAutomaton:
    """Test automaton construction and exact counts."""

    def setup_method(self):
        """Setup before each test."""
        self.oracle = BruteForceOracle()
        self.service = TransferService()

    @pytest.mark.parametrize("n,m", FAST_DIMS)
    @pytest.mark.parametrize("variant", list(Variant))
    def test_matches_oracle(self, variant, n, m):
        """Test transfer counts against brute force on small grids."""
        dims = GridDims(n, m)

        assert self.service.count_grid(variant, dims) == self.oracle.brute_force_count(variant, dims)

    @pytest.mark.slow
    @pytest.mark.parametrize("n,m", SLOW_DIMS)
    @pytest.mark.parametrize("variant", list(Variant))
    def test_matches_oracle_up_to_twenty_cells(self, variant, n, m):
        """Test transfer counts against brute force up to 20 cells."""
        dims = GridDims(n, m)

        assert self.service.count_grid(variant, dims) == self.oracle.brute_force_count(variant, dims)

    @pytest.mark.parametrize("variant", [Variant.M, Variant.MT])
    def test_tall_grid_uses_short_side(self, variant):
        """Test that grids taller than the strip ceiling are counted along their short side."""
        dims = GridDims(1, 12)

        assert self.service.count_grid(variant, dims) == self.oracle.brute_force_count(variant, dims)
        assert (variant, 12, False) not in self.service._automata

    @pytest.mark.parametrize("n,m", FAST_DIMS)
    @pytest.mark.parametrize("variant", list(Variant))
    def test_direct_automaton_within_ceiling(self, variant, n, m):
        """Test a directly built automaton of height min(n, m) against brute force."""
        height, width = min(n, m), max(n, m)
        a = self.service.automaton(variant, height)

        assert count_exact(a, width) == self.oracle.brute_force_count(variant, GridDims(width, height))

    @pytest.mark.parametrize("n,m", STARRED_DIMS)
    @pytest.mark.parametrize("variant", list(Variant))
    def test_starred_matches_oracle(self, variant, n, m):
        """Test starred counts against starred brute force."""
        a = self.service.automaton(variant, m, starred=True)

        assert count_exact(a, n) == self.oracle.brute_force_count(variant, GridDims(n, m), starred=True)

    @pytest.mark.parametrize("variant", list(Variant))
    def test_transposition(self, variant):
        """Test that strips of height m and width n count the same as the transpose."""
        for m in range(1, 7):
            for n in range(1, 7):
                assert count_exact(self.service.automaton(variant, m), n) == \
                    count_exact(self.service.automaton(variant, n), m)

    @pytest.mark.parametrize("m1,m2", [(3, 3), (3, 4), (4, 3)])
    @pytest.mark.parametrize("variant", [Variant.D, Variant.T])
    def test_starred_sub_multiplicative(self, variant, m1, m2):
        """Test that a starred strip counts at most the product of its two starred halves."""
        for n in range(1, 5):
            stacked = self.service.count_grid(variant, GridDims(n, m1 + m2), starred=True)
            lower = self.service.count_grid(variant, GridDims(n, m1), starred=True)
            upper = self.service.count_grid(variant, GridDims(n, m2), starred=True)

            assert stacked <= lower * upper

    def test_known_counts(self):
        """Test pinned small counts through the service."""
        assert self.service.count_grid(Variant.D, GridDims(2, 2)) == 11
        assert self.service.count_grid(Variant.D, GridDims(2, 3)) == 41
        assert self.service.count_grid(Variant.T, GridDims(2, 2)) == 9
        assert self.service.count_grid(Variant.M, GridDims(2, 2)) == 6
        assert self.service.count_grid(Variant.MT, GridDims(2, 2)) == 4
        assert self.service.count_grid(Variant.T, GridDims(1, 1)) == 0

    def test_state_count_grows_with_height(self):
        """Test that reachable D state counts never shrink as the strip gets taller."""
        sizes = [build_automaton(Variant.D, m).n_states for m in range(1, 7)]

        assert sizes == sorted(sizes)

    def test_path_sequence(self):
        """Test dominating-set counts of paths from one automaton."""
        a = build_automaton(Variant.D, 1)

        assert a.count_sequence(6) == [1, 3, 5, 9, 17, 31]

    def test_wide_grid_exact(self):
        """Test that counts beyond 64 bits stay exact."""
        a = build_automaton(Variant.D, 2)
        counts = a.count_sequence(80)

        assert counts[-1] > 2 ** 64
        assert all(isinstance(c, int) for c in counts)

    def test_service_caches(self):
        """Test that the service builds each strip once."""
        first = self.service.automaton(Variant.M, 3)

        assert self.service.automaton(Variant.M, 3) is first
        self.service.clear()
        assert self.service.automaton(Variant.M, 3) is not first

    def test_profiles_decode(self):
        """Test that a state decodes into one symbol per row."""
        a = build_automaton(Variant.T, 3)

        assert a.profile(a.start) == (VIRTUAL,) * 3
        assert all(len(a.profile(s)) == 3 for s in range(a.n_states))

    def test_start_has_accepted_paths(self):
        """Test liveness of a strip with valid sets."""
        assert build_automaton(Variant.MT, 2).has_accepted_paths()
        assert build_automaton(Variant.T, 1).has_accepted_paths()


class TestAutomatonErrors:
    """Test input and resource errors."""

    def test_bad_height(self):
        """Test that a non-positive height is an input error."""
        with pytest.raises(InvalidInputException):
            build_automaton(Variant.D, 0)

    def test_starred_needs_three_rows(self):
        """Test that starred strips need at least 3 rows."""
        with pytest.raises(InvalidInputException):
            build_automaton(Variant.D, 2, starred=True)
        with pytest.raises(InvalidInputException):
            TransferService().count_grid(Variant.D, GridDims(5, 2), starred=True)

    def test_height_ceiling(self):
        """Test the strip height ceiling."""
        with pytest.raises(ResourceLimitException):
            build_automaton(Variant.D, 4, max_height=3)

    def test_memory_ceiling(self):
        """Test that a tiny memory ceiling stops the build with an estimate."""
        with pytest.raises(ResourceLimitException) as info:
            build_automaton(Variant.D, 6, ceiling_mb=1e-6)

        assert info.value.estimate_mb is not None

    def test_bad_width(self):
        """Test that a non-positive width is an input error."""
        with pytest.raises(InvalidInputException):
            count_exact(build_automaton(Variant.D, 1), 0)


class TestExplicitAutomata:
    """Test hand-built automata and the dump listing."""

    def test_from_edges_counts(self):
        """Test path counts of the golden-mean graph."""
        a = TransferAutomaton.from_edges(2, [(0, 0), (0, 1), (1, 0)])

        assert a.count_sequence(5) == [2, 3, 5, 8, 13]

    def test_from_edges_rejects_bad_edge(self):
        """Test that edges must stay in range."""
        with pytest.raises(InvalidInputException):
            TransferAutomaton.from_edges(2, [(0, 2)])

    def test_column_operator(self):
        """Test that the composed column operator equals the row steps applied in turn."""
        a = build_automaton(Variant.M, 3)
        v = np.arange(a.n_states, dtype=np.float64)

        assert np.allclose(a.column_operator() @ v, a.apply_float(v))

    def test_dump(self):
        """Test the dump header and its transition lines."""
        a = build_automaton(Variant.D, 2)
        lines = dump(a).splitlines()
        tag, m, starred, states, transitions = lines[0].split()

        assert (tag, m, starred) == ("D", "2", "false")
        assert int(states) == a.n_states
        assert len(lines) == 1 + int(transitions)
        assert all(0 <= int(x) < a.n_states for line in lines[1:] for x in line.split())

    def test_dump_ceiling(self):
        """Test that dumping a large automaton is refused."""
        with pytest.raises(ResourceLimitException):
            dump(build_automaton(Variant.D, 3), max_states=1)