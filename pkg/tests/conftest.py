import pytest

from gsmloc.network import Network, build_topology
from gsmloc.protocol import MessageLog

THREE_MSC = [
    ("c1", "LA1", "MSC1"), ("c2", "LA1", "MSC1"),
    ("c3", "LA2", "MSC2"), ("c4", "LA2", "MSC2"),
    ("c5", "LA3", "MSC3"), ("c6", "LA3", "MSC3"),
    ("c7", "LA4", "MSC1"),
]


@pytest.fixture
def topo():
    return build_topology(THREE_MSC)


@pytest.fixture
def net(topo):
    n = Network(topo)
    for imsi in ("A", "B", "C"):
        n.provision(imsi)
    return n


@pytest.fixture
def log():
    return MessageLog()


_ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
        print(line)
        _ACCEPTANCE.append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
