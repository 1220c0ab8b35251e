import pytest

CRITERIA = {
    1: "cubic subproblem exactness",
    2: "per-realization lemma suite",
    3: "expected hitting-time bound validity",
    4: "tolerance-scaling exponents",
    5: "dependence on p",
    6: "adaptive-radius variants",
    7: "sweep determinism",
    8: "numerical hygiene",
}
_RESULTS: dict[int, tuple[bool, str]] = {}


def _line(n: int, ok: bool, detail: str) -> str:
    return f"criterion {n} ({CRITERIA[n]}): {'PASS' if ok else 'FAIL'}: {detail}"


@pytest.fixture
def acceptance():
    """Record the outcome of an acceptance criterion and print its summary line."""

    def record(n: int, ok: bool, detail: str) -> None:
        _RESULTS[n] = (bool(ok), detail)
        print(_line(n, ok, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    ids = [r.nodeid for key in ("passed", "failed", "error")
           for r in terminalreporter.stats.get(key, []) if hasattr(r, "nodeid")]
    ran = [n for n in CRITERIA if any(f"test_criterion_{n}_" in i for i in ids)]
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for n in ran:
        ok, detail = _RESULTS.get(n, (False, "did not complete"))
        terminalreporter.write_line(_line(n, ok, detail))
