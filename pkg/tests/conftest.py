import pytest

VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdicts(request):
    return request.config.stash.setdefault(VERDICTS, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance verdicts")
        for line in sorted(lines):
            terminalreporter.write_line(line[1])
