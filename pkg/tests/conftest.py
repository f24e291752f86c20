import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from goldbach import BasePrimes, Phase2Table, SmallPrimeTable  # noqa: E402

_ACCEPTANCE: dict[tuple[int, str], str] = {}


@pytest.fixture(scope="session")
def base_1e9():
    return BasePrimes.for_bound(10**9)


@pytest.fixture(scope="session")
def base_ceiling():
    """Every odd prime below 2**32; enough to sieve anywhere below 2**64."""
    return BasePrimes.for_bound(2**64 - 1)


@pytest.fixture(scope="session")
def small():
    return SmallPrimeTable.build(10**6)


@pytest.fixture(scope="session")
def no_phase2():
    return Phase2Table.build(0)


@pytest.fixture(scope="session")
def td_mask_1e6():
    from oracles import trial_division_mask
    return trial_division_mask(10**6 + 1)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, text): exit criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    num, text = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = _ACCEPTANCE.get((num, text), "PASS")
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        if prev == "FAIL" or (prev == "SKIP" and status == "PASS"):
            status = prev
        _ACCEPTANCE[(num, text)] = status


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (num, text), status in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"[{status}] criterion {num}: {text}")
