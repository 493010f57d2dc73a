import time
from contextlib import contextmanager

import pytest

_ACCEPTANCE_LINES: list[str] = []


class Criterion:
    """Times one acceptance criterion and records a pass/fail line."""

    def __init__(self, number: int, title: str, limit: float):
        self.number, self.title, self.limit = number, title, limit

    @contextmanager
    def run(self):
        start = time.perf_counter()
        ok = False
        try:
            yield self
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            within = elapsed < self.limit
            verdict = "PASS" if ok and within else "FAIL"
            line = f"criterion {self.number:>2} {verdict}  {self.title} ({elapsed:.2f}s, limit {self.limit:g}s)"
            _ACCEPTANCE_LINES.append(line)
            print(line)
        assert within, f"criterion {self.number} took {elapsed:.2f}s, limit {self.limit:g}s"


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
