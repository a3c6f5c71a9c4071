import pytest

_VERDICTS = []


@pytest.fixture(scope='session')
def verdicts():
    """Collects one summary line per acceptance criterion."""
    return _VERDICTS


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section('acceptance criteria')
    for line in _VERDICTS:
        terminalreporter.write_line(line)
