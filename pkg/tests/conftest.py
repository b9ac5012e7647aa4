import random

import pytest
from hypothesis import HealthCheck, settings

from shallowtree.geom import Point4

settings.register_profile(
    "repo", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")

ACCEPTANCE_LINES: list[str] = []


def rank_points(n: int, seed: int) -> list[Point4]:
    """n points whose four coordinates are independent permutations of 1..n."""
    rng = random.Random(seed)
    cols = [list(range(1, n + 1)) for _ in range(4)]
    for c in cols:
        rng.shuffle(c)
    return [Point4(cols[0][i], cols[1][i], cols[2][i], cols[3][i], i + 1) for i in range(n)]


@pytest.fixture
def make_points():
    return rank_points


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
