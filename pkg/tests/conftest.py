import pytest

ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record a numbered acceptance criterion's outcome for the summary."""

    def record(number, title, detail=""):
        ACCEPTANCE[number] = [title, detail, None]
        return ACCEPTANCE[number]

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call":
        return
    number = getattr(item.function, "criterion", None)
    if number in ACCEPTANCE:
        ACCEPTANCE[number][2] = rep.passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, detail, ok = ACCEPTANCE[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title}  {detail}".rstrip())
