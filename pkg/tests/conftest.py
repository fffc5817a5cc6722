import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.register_profile("thorough", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))



_criteria = {}


def pytest_runtest_logreport(report):
    # one line per acceptance criterion; a failure in any phase marks it failed
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.failed:
        _criteria[name] = "FAIL"
    elif report.when == "call":
        _criteria.setdefault(name, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        num, _, rest = name[len("test_criterion_"):].partition("_")
        terminalreporter.write_line(f"criterion {int(num):2d}: {_criteria[name]}  "
                                    f"{rest.replace('_', ' ')}")
