import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mincover.family import SetFamily

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def families(draw, max_ground=8, max_sets=5, max_size=4, uniform=False):
    ground = draw(st.integers(1, max_ground))
    size = draw(st.integers(1, min(max_size, ground)))
    r = draw(st.integers(1, max_sets))
    sets = []
    for _ in range(r):
        k = size if uniform else draw(st.integers(1, min(max_size, ground)))
        sets.append(frozenset(draw(st.lists(st.integers(0, ground - 1), min_size=k, max_size=k, unique=True))))
    sets = list(dict.fromkeys(sets))
    return SetFamily(tuple(sets), ground, size if uniform else None)


@pytest.fixture
def rng():
    return random.Random(12345)


_criteria: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number = mark.args[0]
    if rep.failed or number not in _criteria:
        _criteria[number] = ("FAIL" if rep.failed else "PASS", mark.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")
