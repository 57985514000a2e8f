import pytest

# criterion number -> list of (part, ok, detail)
_RESULTS = {}
_TITLES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


class Recorder:
    def __init__(self, number, title):
        self.number = number
        _TITLES.setdefault(number, title)
        self.parts = _RESULTS.setdefault(number, [])
        self.start = len(self.parts)

    def check(self, part, value, target, ok):
        self.parts.append((part, bool(ok), f"{value} vs {target}"))
        return bool(ok)

    def near(self, part, value, target, tol):
        return self.check(part, f"{value:.6g}", f"{target:.6g} +/- {tol:g}",
                          abs(value - target) <= tol)

    def verdict(self):
        # assert the parts recorded by the calling test only
        failing = [p for p, ok, _ in self.parts[self.start:] if not ok]
        assert not failing, f"criterion {self.number} failing parts: {failing}"


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    return Recorder(*marker.args)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number = marker.args[0]
    _TITLES.setdefault(number, marker.args[1])
    parts = _RESULTS.setdefault(number, [])
    if report.failed and all(ok for _, ok, _ in parts):
        # the test raised before recording a failing part
        parts.append((item.name, False, "error"))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        parts = _RESULTS[number]
        ok = all(flag for _, flag, _ in parts)
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {_TITLES[number]}"
        if not ok:
            bad = [f"{p} ({d})" for p, flag, d in parts if not flag]
            line += " | failing: " + "; ".join(bad)
        terminalreporter.write_line(line)
