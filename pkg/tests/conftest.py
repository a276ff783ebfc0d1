import pytest

from acceptance_report import RESULTS


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Yields a recorder; the test's outcome is logged as one summary line."""
    from acceptance_report import Recorder

    rec = Recorder(request.node.name)
    yield rec
    rec.finish()
