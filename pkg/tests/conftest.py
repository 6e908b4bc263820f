import pytest

# filled by tests/test_acceptance.py, printed once at the end of the session
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {name}: {detail}")


@pytest.fixture
def report(capsys):
    def _report(number, name, ok, detail):
        ACCEPTANCE.append((number, name, ok, detail))
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {number:>2}. {name}: {detail}")
        assert ok, detail

    return _report
