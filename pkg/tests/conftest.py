import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

TESTS = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))  # makes the ``oracles`` package importable

GOLDEN = TESTS / "golden"

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def table():
    from approx3d.techlib import load_table

    return load_table()


@pytest.fixture(scope="session")
def library(table):
    """Bundled multiplier library with proxy accuracy drops attached."""
    from approx3d.accproxy import load_dataset, load_model, measure_library
    from approx3d.approxmul import build_library, default_specs

    lib = build_library(default_specs(), table)
    measure_library(lib, load_model(), load_dataset())
    return lib


@pytest.fixture(scope="session")
def by_id(library):
    return {r.id: r for r in library}


@pytest.fixture(scope="session")
def toy():
    from approx3d.perf import load_workload

    return load_workload("vgg_toy")


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, text: str) -> None:
    """Store the one-line verdict for an acceptance criterion."""
    ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {text}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
