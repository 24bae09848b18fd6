import pytest

from welschinger import FactBase, HClass, Surface
from welschinger.lattice import PROJECTIVE_PLANE
from welschinger.presets import load_preset


@pytest.fixture
def plane():
    return Surface(PROJECTIVE_PLANE)


@pytest.fixture
def cubic(plane):
    return HClass(plane, (3,))


@pytest.fixture(scope="session")
def table1_store() -> FactBase:
    store = load_preset("table1")
    store.derive_closure()
    return store


@pytest.fixture(scope="session")
def dp2_store() -> FactBase:
    store = load_preset("delpezzo2")
    store.derive_closure()
    return store


_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""
    def report(n, ok, detail=""):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}{' ' + detail if detail else ''}"
        _CRITERIA.append(line)
        print(line)
        assert ok, detail
    return report


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance")
        for line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
