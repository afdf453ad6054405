import hypothesis
import pytest

from mlwng.graph import Graph, complete_graph, path_graph

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in lines:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def report(request):
    """Record one criterion verdict; it is printed in the terminal summary."""

    def _report(name: str, ok: bool, detail: str) -> bool:
        request.config.stash[_LINES].append((name, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return ok

    return _report


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def path3():
    return path_graph(3)


@pytest.fixture
def two_disjoint_edges():
    return Graph.from_edges(4, [(0, 1), (2, 3)])
