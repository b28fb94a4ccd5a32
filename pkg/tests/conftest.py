import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ptlab.models.grid import Grid
from ptlab.potential import load_tabulated, scarf2, scarf2_strengths

FIXTURES = Path(__file__).resolve().parent / "fixtures"

# coarse enough to keep the suite quick, fine enough for 1e-6 level checks
FAST_POINTS = 10001


@pytest.fixture
def reflectionless():
    """A = 2.5, B = 0.5: left-reflectionless, bound states at E = 0, 4, 6"""
    return scarf2(2.5, 0.5)


@pytest.fixture
def generic_scarf():
    """Nonzero left reflection and nonzero flux deviation"""
    return scarf2(1.2, 0.3)


@pytest.fixture
def hermitian_well():
    return scarf2(2.5, 0.0)


@pytest.fixture
def broken_pair():
    """Strength form past the exceptional point: one conjugate pair near 0.026 -+ 0.348i"""
    return scarf2_strengths(depth=1.0, coupling=2.0, alpha=1.0)


@pytest.fixture
def gaussian_csv():
    return FIXTURES / "gaussian_non_pt.csv"


@pytest.fixture
def gaussian(gaussian_csv):
    return load_tabulated(gaussian_csv)


@pytest.fixture
def fast_grid():
    def make(spec, n_points=FAST_POINTS, **kwargs):
        return Grid.for_potential(spec, n_points=n_points, **kwargs)
    return make
