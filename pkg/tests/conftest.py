"""Shared test plumbing: the acceptance summary printed after the run."""

_acceptance_lines = []


def record_acceptance(label: str, ok: bool, elapsed: float) -> None:
    _acceptance_lines.append((label, ok, elapsed))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria")
    for label, ok, elapsed in _acceptance_lines:
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"  {label}: {status} ({elapsed:.2f}s)")
