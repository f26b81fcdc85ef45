import random
from typing import Optional

import pytest

from gridtally.core.exceptions import InvalidInputException, ResourceLimitException
from gridtally.services.gluing.gluer import (
    LEFT,
    RIGHT,
    check_side,
    exhaustive_glue_search,
    glue,
    interior_violations,
    make_stripe_witness
)
from gridtally.services.grid.cylinder import CylinderWindow, cylinder_violations
from gridtally.services.grid.grid_core import Variant
from gridtally.utilities.util import format_cylinder, parse_cylinder

MINIMAL = [Variant.M, Variant.MT]


def random_side(variant: Variant, rng: random.Random, height: int, width: int) -> Optional[CylinderWindow]:
    """Two random columns continued by the forward filling rule; None when the draw breaks the side rules."""
    cols = [[rng.random() < 0.4 for _ in range(height)] for _ in range(2)]
    for _ in range(2, width):
        prev, prev2 = cols[-1], cols[-2]
        column = []
        for y in range(height):
            blocked = prev[(y - 1) % height] or prev[(y + 1) % height] or prev2[y]
            if variant is Variant.M:
                blocked = blocked or prev[y]
            column.append(not blocked)
        cols.append(column)
    side = CylinderWindow.from_columns(height, cols)
    return side if not check_side(variant, side, LEFT) else None


def random_pair(variant: Variant, rng: random.Random, height: int):
    left = right = None
    while left is None:
        left = random_side(variant, rng, height, rng.randint(3, 6))
    while right is None:
        right = random_side(variant, rng, height, rng.randint(3, 6))
    return left, right.mirrored()


class TestStripeWitness:
    """Test the striped side windows."""

    def test_left_columns(self):
        """Test that the grey pairs end on the inner edge."""
        left = make_stripe_witness(LEFT, 8)

        assert [left.column(c)[0] for c in range(1, 9)] == [False, False, True, True] * 2
        assert format_cylinder(left).splitlines()[1] == "..##..##"

    def test_right_is_mirror(self):
        """Test that the right witness mirrors the left one."""
        assert make_stripe_witness(RIGHT, 8) == make_stripe_witness(LEFT, 8).mirrored()

    @pytest.mark.parametrize("height", [4, 8, 12])
    @pytest.mark.parametrize("variant", MINIMAL)
    def test_sides_obey_rules(self, variant, height):
        """Test that both witnesses are admissible sides."""
        assert check_side(variant, make_stripe_witness(LEFT, height), LEFT) == []
        assert check_side(variant, make_stripe_witness(RIGHT, height), RIGHT) == []

    def test_too_short(self):
        """Test that witnesses need height at least 4."""
        with pytest.raises(InvalidInputException):
            make_stripe_witness(LEFT, 3)

    def test_cylinder_text(self):
        """Test reading a witness back from its text form."""
        left = make_stripe_witness(LEFT, 8)

        assert parse_cylinder(format_cylinder(left)) == left


class TestGlue:
    """Test the constructive filling."""

    @pytest.mark.parametrize("k", [5, 6, 7])
    @pytest.mark.parametrize("variant", MINIMAL)
    def test_stripes(self, variant, k):
        """Test gluing the striped witnesses at gap 5 and above."""
        left, right = make_stripe_witness(LEFT, 8), make_stripe_witness(RIGHT, 8)
        glued = glue(variant, left, right, k)

        assert glued.width == left.width + k + right.width
        assert interior_violations(variant, glued) == []

    @pytest.mark.parametrize("variant", MINIMAL)
    def test_random_sides(self, variant):
        """Test gluing random admissible sides at several gaps."""
        rng = random.Random(20240611)
        for trial in range(40):
            left, right = random_pair(variant, rng, 12)
            k = 5 + trial % 4
            glued = glue(variant, left, right, k)
            columns = glued.columns()

            assert interior_violations(variant, glued) == []
            assert columns[:left.width] == left.columns()
            assert columns[left.width + k:] == right.columns()

    @pytest.mark.slow
    @pytest.mark.parametrize("variant", MINIMAL)
    def test_random_sides_many(self, variant):
        """Test a thousand random gluings."""
        rng = random.Random(7)
        for trial in range(1000):
            left, right = random_pair(variant, rng, 12)
            assert interior_violations(variant, glue(variant, left, right, 5 + trial % 4)) == []

    @pytest.mark.parametrize("variant", MINIMAL)
    def test_odd_heights(self, variant):
        """Test heights that are not multiples of the stripe period."""
        rng = random.Random(3)
        for height in (6, 7, 9, 10, 11):
            left, right = random_pair(variant, rng, height)
            assert interior_violations(variant, glue(variant, left, right, 5)) == []

    def test_central_column_fixed_sides(self):
        """Test every gap cell of a total gluing whose central column needs the repair sweep."""
        side = CylinderWindow.from_columns(6, [
            [False] * 6,
            [False, False, False, True, True, True],
            [True, True, False, False, False, False],
        ])
        glued = glue(Variant.MT, side, side.mirrored(), 5)
        gap = glued.columns()[3:8]

        assert gap == [
            [False] * 6,
            [False, False, True, True, True, True],
            [True, True, False, False, False, False],
            [False, False, True, True, True, True],
            [False] * 6,
        ]
        assert interior_violations(Variant.MT, glued) == []

    @pytest.mark.parametrize("k", [5, 6])
    def test_uniform_stripes_fill_whole_columns(self, k):
        """Test that striped sides give gap columns that are entirely grey or entirely white."""
        glued = glue(Variant.MT, make_stripe_witness(LEFT, 8), make_stripe_witness(RIGHT, 8), k)
        gap = glued.columns()[8:8 + k]
        expected = {5: [False, False, True, False, False], 6: [False, False, True, True, False, False]}[k]

        assert [all(column) for column in gap] == expected
        assert all(all(column) or not any(column) for column in gap)

    def test_half_plane_filling(self):
        """Test a gap of six between two narrow sides, comparing the rows that do not wrap."""
        def column(*rows):
            return [y in rows for y in range(8)]

        left = CylinderWindow.from_columns(8, [column(), column(0, 3, 4, 5, 6, 7), column(2)])
        right = CylinderWindow.from_columns(8, [column(1), column(1), column(3, 4, 5, 6, 7)])
        glued = glue(Variant.M, left, right, 6)
        gap = [c[1:7] for c in glued.columns()[3:9]]

        assert gap == [
            [False] * 6,
            [True, False, True, True, True, True],
            [False] * 6,
            [True, True, False, True, False, True],
            [False] * 6,
            [False, False, True, True, True, True],
        ]
        assert interior_violations(Variant.M, glued) == []

    def test_gap_too_small(self):
        """Test that gaps below 5 are rejected."""
        with pytest.raises(InvalidInputException):
            glue(Variant.M, make_stripe_witness(LEFT, 8), make_stripe_witness(RIGHT, 8), 4)

    def test_dominating_variants_rejected(self):
        """Test that only minimal variants are glued."""
        with pytest.raises(InvalidInputException):
            glue(Variant.D, make_stripe_witness(LEFT, 8), make_stripe_witness(RIGHT, 8), 5)

    def test_height_mismatch(self):
        """Test that both sides need the same height."""
        with pytest.raises(InvalidInputException):
            glue(Variant.M, make_stripe_witness(LEFT, 8), make_stripe_witness(RIGHT, 12), 5)

    def test_broken_side(self):
        """Test that a side breaking the rules is rejected."""
        broken = CylinderWindow(8, 4, frozenset((c, r) for c in range(1, 5) for r in range(1, 9)))

        with pytest.raises(InvalidInputException):
            glue(Variant.M, broken, make_stripe_witness(RIGHT, 8), 5)

    @pytest.mark.parametrize("variant", [Variant.D, Variant.T])
    def test_all_grey_glues_dominating_variants(self, variant):
        """Test that an all-grey filling joins any dominating sides."""
        full = CylinderWindow(8, 13, frozenset((c, r) for c in range(1, 14) for r in range(1, 9)))

        assert cylinder_violations(variant, full, range(1, 14)) == []


class TestExhaustiveSearch:
    """Test the exhaustive filling search."""

    @pytest.mark.parametrize("height", [4, 8])
    @pytest.mark.parametrize("variant", MINIMAL)
    def test_gap_four_impossible(self, variant, height):
        """Test that the striped sides cannot be joined with four columns."""
        left, right = make_stripe_witness(LEFT, height), make_stripe_witness(RIGHT, height)

        assert exhaustive_glue_search(variant, left, right, 4) is None

    @pytest.mark.slow
    @pytest.mark.parametrize("variant", MINIMAL)
    def test_gap_four_impossible_tall(self, variant):
        """Test the obstruction at height 12."""
        left, right = make_stripe_witness(LEFT, 12), make_stripe_witness(RIGHT, 12)

        assert exhaustive_glue_search(variant, left, right, 4) is None

    @pytest.mark.parametrize("variant", MINIMAL)
    def test_gap_five_possible(self, variant):
        """Test that a filling exists at gap 5 and matches the constructive one in validity."""
        left, right = make_stripe_witness(LEFT, 8), make_stripe_witness(RIGHT, 8)
        found = exhaustive_glue_search(variant, left, right, 5)

        assert found is not None
        assert interior_violations(variant, found) == []
        assert interior_violations(variant, glue(variant, left, right, 5)) == []
        assert found.columns()[:8] == left.columns()

    def test_search_is_deterministic(self):
        """Test that repeated searches return the same filling."""
        left, right = make_stripe_witness(LEFT, 8), make_stripe_witness(RIGHT, 8)

        assert exhaustive_glue_search(Variant.M, left, right, 5) == \
            exhaustive_glue_search(Variant.M, left, right, 5)

    def test_cell_ceiling(self):
        """Test the free-cell ceiling."""
        left, right = make_stripe_witness(LEFT, 8), make_stripe_witness(RIGHT, 8)

        with pytest.raises(ResourceLimitException):
            exhaustive_glue_search(Variant.M, left, right, 5, max_cells=16)

    def test_node_ceiling(self):
        """Test the search-node ceiling."""
        left, right = make_stripe_witness(LEFT, 8), make_stripe_witness(RIGHT, 8)

        with pytest.raises(ResourceLimitException):
            exhaustive_glue_search(Variant.MT, left, right, 4, max_nodes=10)
