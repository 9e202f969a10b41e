import pytest

from alertcache.alerts import Alert


@pytest.fixture
def make_alert():
    counter = iter(range(10**6))

    def _make(severity="Moderate", urgency="Expected", issued=0, expires=None, id=None, **kw):
        n = next(counter)
        return Alert(
            id=id or f"x{n:04d}",
            eventType=kw.pop("eventType", "Flood"),
            severity=severity,
            urgency=urgency,
            issuedAt=issued,
            expiresAt=issued + 600 if expires is None else expires,
            **kw,
        )

    return _make


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.REPORT, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
