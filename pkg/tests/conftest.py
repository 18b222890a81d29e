import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE: dict = {}
_AC_NAME = re.compile(r"test_ac(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _AC_NAME.search(report.nodeid)
    if not m or "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        detail = dict(report.user_properties).get("detail", "")
        outcome = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _ACCEPTANCE[int(m.group(1))] = (m.group(2).replace("_", " "), outcome, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        name, outcome, detail = _ACCEPTANCE[n]
        line = f"AC{n:<2} {outcome}  {name}"
        terminalreporter.write_line(f"{line}  ({detail})" if detail else line)
