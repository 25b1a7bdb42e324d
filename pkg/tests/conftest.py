import numpy as np
import pytest

from fitcert.mask import ObservationPattern, ObservationSet

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def random_pattern(rng: np.random.Generator, d: int, r: int, N: int) -> ObservationPattern:
    sets = tuple(ObservationSet(tuple(int(j) + 1 for j in rng.choice(d, size=r + 1, replace=False)), d) for _ in range(N))
    return ObservationPattern(sets, d, r)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _ACCEPTANCE[number] = ("PASS" if rep.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
