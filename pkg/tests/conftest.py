import pathlib

import pytest

DATA = pathlib.Path(__file__).parent / "data"
GOLDEN = pathlib.Path(__file__).parent / "golden"

CRITERIA = {
    1: "semiring law suite",
    2: "dequantization bounds",
    3: "completion suite",
    4: "Bellman solver vs Dijkstra",
    5: "functional representation suite",
    6: "dual-space identities",
    7: "extension and separation",
    8: "Legendre transform",
    9: "Hopf-Lax and Cole-Hopf",
    10: "CLI determinism and goldens",
}

_results: dict[int, tuple[bool, str]] = {}


class AcceptanceRecorder:
    def record(self, number: int, ok: bool, detail: str) -> None:
        _results[number] = (bool(ok), detail)
        print(f"\n{_line(number)}")


def _line(number: int) -> str:
    if number not in _results:
        return f"criterion {number:2d} FAIL {CRITERIA[number]}: no result recorded"
    ok, detail = _results[number]
    return f"criterion {number:2d} {'PASS' if ok else 'FAIL'} {CRITERIA[number]}: {detail}"


@pytest.fixture
def acceptance() -> AcceptanceRecorder:
    return AcceptanceRecorder()


@pytest.fixture
def data_dir() -> pathlib.Path:
    return DATA


def pytest_terminal_summary(terminalreporter):
    ran = any(
        "test_acceptance" in rep.nodeid
        for key in ("passed", "failed", "error")
        for rep in terminalreporter.stats.get(key, [])
    )
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for number in CRITERIA:
        terminalreporter.write_line(_line(number))
