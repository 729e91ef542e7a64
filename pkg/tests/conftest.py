import numpy as np
import pytest

from conelip.rng import SplitMix64


@pytest.fixture
def rng():
    return SplitMix64(12345)


@pytest.fixture
def line3():
    from conelip import from_points

    return from_points([[0.0], [1.0], [2.0]], "l2")


def brute_lip(points, values, norm):
    points = np.asarray(points, dtype=float)
    best = 0.0
    for i in range(len(points)):
        for j in range(len(points)):
            if i != j:
                d = np.linalg.norm(points[i] - points[j], ord={"l1": 1, "l2": 2, "linf": np.inf}[norm])
                best = max(best, abs(values[i] - values[j]) / d)
    return best


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
