import time
from collections import defaultdict

import pytest

from landaukit.graphfile import load_fixture
from landaukit.kinematics import default_triangle_point

CRITERIA = {
    1: "golden denominator sets and Landau matrices",
    2: "pole-decomposition identity",
    3: "H_j classification and delta-row certificates",
    4: "Farkas exclusivity and invariances",
    5: "distortion sweep over all strata",
    6: "nested radial coordinate round trips",
    7: "diagram closure equals matrix contractions",
    8: "structure checks and contraction cascade",
    9: "reproducible reports and exit codes",
}

_outcomes = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes[mark.args[0]].append((item.name, rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        runs = _outcomes.get(n)
        if not runs:
            continue
        ok = all(p for _, p, _ in runs)
        secs = sum(d for _, _, d in runs)
        failed = [name for name, p, _ in runs if not p]
        line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {CRITERIA[n]} ({len(runs)} tests, {secs:.2f}s)"
        if failed:
            line += " failing: " + ", ".join(failed)
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def tp():
    return default_triangle_point()


@pytest.fixture(scope="session")
def fixture():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_fixture(name)
        return cache[name]

    return get


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.fixture
def timer():
    return Timer
