import numpy as np
import pytest

from su2pillow.obstruction import AnalysisConfig, analyze
from su2pillow.presentation import cyclic, three_torus_twisted, torus_knot, unknot
from su2pillow.repvariety import SweepConfig, sweep_solve


@pytest.fixture(scope="session")
def cyclic5_sample():
    return sweep_solve(cyclic(5), config=SweepConfig(seeds=200))


@pytest.fixture(scope="session")
def t3_sample():
    return sweep_solve(three_torus_twisted(), config=SweepConfig(seeds=200))


@pytest.fixture(scope="session")
def trefoil_fibres():
    """Meridian-pinned trefoil sweep on a coarse grid, with cohomology and PCA dimensions."""
    grid = np.linspace(0.0, np.pi, 24)
    return sweep_solve(torus_knot(2, 3), meridian_grid=grid, config=SweepConfig(seeds=20))


@pytest.fixture(scope="session")
def unknot_report():
    return analyze(unknot(), AnalysisConfig(grid_size=64, seeds_per_fiber=10, line_seeds=40))


@pytest.fixture(scope="session")
def trefoil_report():
    return analyze(torus_knot(2, 3), AnalysisConfig(grid_size=96, seeds_per_fiber=20))


def pytest_terminal_summary(terminalreporter):
    from tests.test_acceptance import ACCEPTANCE

    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
