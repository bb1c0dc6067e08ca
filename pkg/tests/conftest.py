import pytest

_ACCEPTANCE = []


@pytest.fixture
def record_criterion():
    """Record one acceptance criterion outcome for the end-of-run summary."""

    def record(number, title, passed, detail=""):
        _ACCEPTANCE.append((number, title, bool(passed), detail))
        print(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}: {title} -- {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}")
