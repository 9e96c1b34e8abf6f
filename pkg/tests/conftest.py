"""Shared pytest plumbing: collects the acceptance criteria PASS/FAIL
lines and replays them in the terminal summary (stdout capture would
otherwise hide them on passing runs)."""

criterion_lines: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in criterion_lines:
            terminalreporter.write_line(line)
