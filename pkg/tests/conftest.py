import numpy as np
import pytest
from hypothesis import settings

from agrobio.core import ModelParams, SizeClass

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def tiny_params():
    """Three thousand farmers on 1e5 ha: fast enough for many full runs."""
    return ModelParams().desk_scale(0.01)


@pytest.fixture
def histogram():
    return [SizeClass(1, 20, 100), SizeClass(20, 100, 150), SizeClass(100, 300, 50)]


def make_population(land, pesticide=5.0, efficiency=1.0, target=7.0, roi=None):
    from agrobio.core import Population
    land = np.asarray(land, dtype=float)
    full = lambda v: np.broadcast_to(np.asarray(v, dtype=float), land.shape).copy()
    pop = Population.from_arrays(land, full(pesticide), full(efficiency), full(target))
    if roi is not None:
        pop.roi[:] = full(roi)
    return pop


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
