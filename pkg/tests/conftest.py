import math

import numpy as np
import pytest

R2 = 1 / math.sqrt(2)

ACCEPTANCE_LINES = []


def brute_prob(amps, n, qubits, vec):
    """Pure-Python projection probability: sum over the unmeasured bits."""
    rest = [q for q in range(n) if q not in qubits]
    total = 0.0
    for r in range(1 << len(rest)):
        rbits = format(r, f"0{len(rest)}b") if rest else ""
        coeff = 0j
        for s in range(1 << len(qubits)):
            sbits = format(s, f"0{len(qubits)}b")
            bits = ["0"] * n
            for q, b in zip(qubits, sbits):
                bits[q] = b
            for q, b in zip(rest, rbits):
                bits[q] = b
            coeff += complex(vec[s]).conjugate() * complex(amps[int("".join(bits), 2)])
        total += abs(coeff) ** 2
    return total


def ket(*pairs, n=None):
    """Amplitude vector from ("011", coeff) pairs."""
    n = n or len(pairs[0][0])
    v = np.zeros(1 << n, dtype=complex)
    for bits, c in pairs:
        v[int(bits, 2)] += c
    return v


def within_3sigma(observed: float, p: float, n: int) -> bool:
    return abs(observed - p) <= 3 * math.sqrt(p * (1 - p) / n) + 1e-12


@pytest.fixture
def rng():
    return np.random.default_rng(20071120)


@pytest.fixture
def record():
    def _record(criterion, ok, detail=""):
        ACCEPTANCE_LINES.append(f"[{criterion}] {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
