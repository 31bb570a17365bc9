import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA = {
    1: "c3-bound certified lower bound >= 1.858 within 2 min (single thread)",
    2: "c at the theta_s convergent within 5e-3 of 1.5437772 after transfer",
    3: "anticommuting pair c = sqrt(2) within 1e-6",
    4: "closed-form constants and c_uf * c_f0_upper = sqrt(2d), d = 2..10",
    5: "T_d(u0)* T_d(u0) = d I to 1e-12, d = 1..5",
    6: "Monte-Carlo norms at N = 500, d = 2, 3",
    7: "norm inequality holds in 20 seeded trials with 0.05 allowance",
    8: "Weyl compression: invariants, residual <= 1e-3, phase defect <= 1e-4 at cutoff 10",
    9: "l1-ball containment delta >= 1/sqrt(d) - 1e-3",
    10: "path extension ratios <= 2kC1/(1 - k^-alpha) and extend consistency",
    11: "bit-identical reruns of every command",
}

_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """criterion(number, passed, detail) records the outcome of an acceptance criterion."""

    def record(number: int, passed: bool, detail: str = "") -> bool:
        _RESULTS[number] = (bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    ran = any("test_acceptance" in r.nodeid for stats in terminalreporter.stats.values()
              for r in stats if hasattr(r, "nodeid"))
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for number, title in CRITERIA.items():
        if number in _RESULTS:
            ok, detail = _RESULTS[number]
            status = "PASS" if ok else "FAIL"
        else:
            status, detail = "FAIL", "not evaluated"
        terminalreporter.write_line(f"[{status}] {number:2d}. {title} :: {detail}")
