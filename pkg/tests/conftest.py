import numpy as np
import pytest


def rel_l2(a, b):
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def dft2_oracle(a):
    """Row-then-column direct DFT built from the O(n^2) oracle."""
    from nmfft.fft import dft_oracle

    rows = np.array([dft_oracle(r) for r in np.asarray(a)])
    return np.array([dft_oracle(c) for c in rows.T]).T


@pytest.fixture
def rng():
    return np.random.default_rng(20201018)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", None) == "call" and "test_acceptance.py::" in rep.nodeid:
                name = rep.nodeid.split("::", 1)[1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL", rep.duration))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, verdict, dt in sorted(lines):
            terminalreporter.write_line(f"{verdict}  {name}  ({dt:.2f}s)")
