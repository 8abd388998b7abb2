"""Shared pytest plumbing: collects acceptance verdict lines and prints
them as one block in the terminal summary so every run shows the full
criterion-by-criterion outcome regardless of output capture."""

import re

_acceptance_lines = []


def record_acceptance(line):
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return

    def key(line):
        m = re.search(r"\d+", line)
        return int(m.group()) if m else 0

    terminalreporter.section("acceptance criteria")
    for line in sorted(_acceptance_lines, key=key):
        terminalreporter.write_line(line)
