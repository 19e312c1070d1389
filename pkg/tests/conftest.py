import math

import numpy as np
import pytest

from metalgeom.chart import Chart, TensorField11
from metalgeom.demos import _R2_J, _R2_L, _R2_M
from metalgeom.metallic import MetallicParams

GOLDEN = MetallicParams(1, 1)
SILVER = MetallicParams(2, 1)


def r2_fields(params: MetallicParams):
    """The rotational structure on the punctured plane with its projectors."""
    chart = Chart(("x", "y"))
    c = params.constants()
    J = TensorField11.parse(chart, _R2_J, c)
    l = TensorField11.parse(chart, _R2_L, c)
    m = TensorField11.parse(chart, _R2_M, c)
    return chart, J, l, m


def safe_points(count: int, seed: int, half: float = 2.0, radius: float = 0.1):
    """Uniform points in [-half, half]^2 outside the disk of the given radius."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        p = rng.uniform(-half, half, size=2)
        if math.hypot(*p) >= radius:
            out.append(p)
    return out


@pytest.fixture
def plane():
    return Chart(("x", "y"))


@pytest.fixture
def space():
    return Chart(("x", "y", "z"))


@pytest.fixture(params=[GOLDEN, SILVER], ids=["golden", "silver"])
def params(request):
    return request.param


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Record one pass/fail line per acceptance criterion; echoed in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number: int, ok: bool, text: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {text}"
        print(line)
        lines.append(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
