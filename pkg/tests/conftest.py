import pytest

ACCEPTANCE = {}


@pytest.fixture
def acceptance_report():
    def record(name, passed, detail=""):
        ACCEPTANCE[name] = (passed, detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
        passed, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
