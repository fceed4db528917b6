import pytest

# acceptance tests append one "PASS ..." / "FAIL ..." line each
ACCEPTANCE_LINES = []


@pytest.fixture
def gate():
    def record(number: int, title: str, ok: bool, detail: str):
        ACCEPTANCE_LINES.append((number, f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}: {detail}"))
        print(ACCEPTANCE_LINES[-1][1])
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
