from dataclasses import dataclass, field

import pytest


@dataclass
class CriterionReport:
    number: int
    title: str
    checks: list = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append((name, bool(ok), detail))
        return bool(ok)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [f"{n} ({d})" if d else n for n, ok, d in self.checks if not ok]
        tail = f"; failed: {'; '.join(failed)}" if failed else ""
        n = len(self.checks)
        return f"criterion {self.number:>2} {status}  {self.title} [{n} check{'s' if n != 1 else ''}]{tail}"

    def assert_passed(self):
        assert self.passed, self.line()


_REPORTS: dict = {}


@pytest.fixture
def criterion():
    def make(number: int, title: str) -> CriterionReport:
        rep = CriterionReport(number, title)
        _REPORTS[number] = rep
        return rep
    return make


def pytest_terminal_summary(terminalreporter):
    if not _REPORTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_REPORTS):
        terminalreporter.write_line(_REPORTS[number].line())
