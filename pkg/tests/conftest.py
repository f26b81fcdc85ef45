from pathlib import Path

import pytest

from gridtally.services.grid.grid_core import GridPattern
from gridtally.utilities.util import parse_pattern, read_text_file

DATA_DIR = Path(__file__).resolve().parents[1] / "data"


def load_pattern(name: str) -> GridPattern:
    return parse_pattern(read_text_file(str(DATA_DIR / name)))


@pytest.fixture
def fig1a() -> GridPattern:
    """Dominating, neither minimal nor total."""
    return load_pattern("fig1a.txt")


@pytest.fixture
def fig1b() -> GridPattern:
    """Minimal dominating, not total."""
    return load_pattern("fig1b.txt")


@pytest.fixture
def fig1c() -> GridPattern:
    """Minimal total dominating."""
    return load_pattern("fig1c.txt")
