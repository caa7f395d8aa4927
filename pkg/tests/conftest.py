import pytest

_LINES = []


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line for an acceptance criterion, then assert it."""
    def emit(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {title}  [{detail}]"
        _LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)
