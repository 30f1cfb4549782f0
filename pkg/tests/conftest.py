import pytest

from uavbuoy.harness import run
from uavbuoy.scenario import builtin_scenario


@pytest.fixture(scope="session")
def full_runs():
    """Full-length runs of the built-in scenarios, computed once per session."""
    cache = {}

    def get(name, controller):
        key = (name, controller)
        if key not in cache:
            cache[key] = run(builtin_scenario(name).with_(controller=controller))
        return cache[key]

    return get


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip("abc:").split(".")[0])):
            terminalreporter.write_line(line)
