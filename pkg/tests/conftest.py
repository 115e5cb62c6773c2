import pytest

_ACCEPTANCE: list[str] = []


@pytest.fixture
def record_criterion():
    def record(number, title, ok, detail=""):
        _ACCEPTANCE.append(f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}"
                           + (f" -- {detail}" if detail else ""))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
