import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

VERDICTS: dict[int, tuple[str, str]] = {}


@pytest.fixture
def verdict(request):
    """Record a criterion outcome: call with (number, detail) before asserting."""
    pending = {}

    def record(number: int, detail: str) -> None:
        pending["number"] = number
        pending["detail"] = detail

    yield record
    if "number" in pending:
        failed = getattr(request.node, "rep_call", None)
        ok = failed is not None and failed.passed
        VERDICTS[pending["number"]] = ("PASS" if ok else "FAIL", pending["detail"])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(VERDICTS):
        status, detail = VERDICTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {detail}")
