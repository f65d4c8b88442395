import pytest

from contextkit.ks import ceg18


@pytest.fixture(scope="session")
def ceg():
    return ceg18()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
