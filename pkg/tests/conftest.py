"""Shared pytest configuration: collects the acceptance verdict lines."""

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[c]
        terminalreporter.write_line(f"criterion {c:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
