import pytest

from epdecomp.formats import load_example

ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def diels_alder():
    return load_example("diels_alder")


@pytest.fixture(scope="session")
def claisen():
    return load_example("claisen")


@pytest.fixture(scope="session")
def trisulfur():
    return load_example("trisulfur")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
