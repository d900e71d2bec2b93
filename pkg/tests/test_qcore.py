import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdcsim import qcore
from qdcsim.errors import InvalidArgument
from qdcsim.qcore import PauliCode, Statevector

from conftest import R2, brute_prob, ket, within_3sigma


def sv(amps):
    return Statevector(int(math.log2(len(amps))), amps)


@pytest.mark.parametrize(
    "n, bits, index",
    [(1, [0], 0), (3, [1, 1, 1], 7), (4, [0, 0, 0, 0], 0), (3, [1, 0, 0], 4)],
)
def test_make_basis_state(n, bits, index):
    s = qcore.make_basis_state(n, bits)
    expected = np.zeros(1 << n)
    expected[index] = 1
    np.testing.assert_array_equal(s.amps, expected)


@pytest.mark.parametrize("n, bits", [(0, []), (9, [0] * 9), (3, [0, 1]), (2, [0, 2])])
def test_make_basis_state_rejects(n, bits):
    with pytest.raises(InvalidArgument):
        qcore.make_basis_state(n, bits)


@pytest.mark.parametrize(
    "label, n, expected",
    [
        ("P+", 3, ket(("000", R2), ("111", R2))),
        ("S-", 3, ket(("011", R2), ("100", -R2))),
        ("S−", 3, ket(("011", R2), ("100", -R2))),
        ("Q+", 3, ket(("001", R2), ("110", R2))),
        ("R-", 3, ket(("010", R2), ("101", -R2))),
        ("P+", 4, ket(("0000", R2), ("1111", R2))),
    ],
)
def test_ghz_state(label, n, expected):
    np.testing.assert_allclose(qcore.ghz_state(label, n).amps, expected, atol=1e-15)


@pytest.mark.parametrize("label, n", [("T+", 3), ("P", 3), ("Q+", 4), ("P+", 5)])
def test_ghz_state_rejects(label, n):
    with pytest.raises(InvalidArgument):
        qcore.ghz_state(label, n)


@pytest.mark.parametrize(
    "label, expected",
    [
        ("phi+", ket(("00", R2), ("11", R2))),
        ("psi-", ket(("01", R2), ("10", -R2))),
        ("phi-", ket(("00", R2), ("11", -R2))),
        ("ψ+", ket(("01", R2), ("10", R2))),
    ],
)
def test_bell_state(label, expected):
    np.testing.assert_allclose(qcore.bell_state(label).amps, expected, atol=1e-15)


def test_bell_state_rejects():
    with pytest.raises(InvalidArgument):
        qcore.bell_state("chi+")


def test_apply_gate_examples():
    zero, one = qcore.make_basis_state(1, [0]), qcore.make_basis_state(1, [1])
    np.testing.assert_array_equal(qcore.apply_gate(zero, PauliCode.X, 0).amps, [0, 1])
    np.testing.assert_array_equal(qcore.apply_gate(zero, PauliCode.iY, 0).amps, [0, -1])
    np.testing.assert_array_equal(qcore.apply_gate(one, PauliCode.iY, 0).amps, [1, 0])
    flipped = qcore.apply_gate(qcore.ghz_state("P+"), PauliCode.X, 0)
    np.testing.assert_allclose(flipped.amps, ket(("100", R2), ("011", R2)), atol=1e-15)


def test_apply_gate_bad_index():
    with pytest.raises(InvalidArgument):
        qcore.apply_gate(qcore.ghz_state("P+"), PauliCode.X, 3)


@pytest.mark.parametrize("code", list(PauliCode))
def test_gates_are_unitary(code):
    m = code.matrix
    np.testing.assert_allclose(m.conj().T @ m, np.eye(2), atol=1e-12)


def test_gate_entries_match_outer_products():
    k0, k1 = np.array([1, 0]), np.array([0, 1])
    outer = np.outer
    np.testing.assert_array_equal(PauliCode.I.matrix, outer(k0, k0) + outer(k1, k1))
    np.testing.assert_array_equal(PauliCode.X.matrix, outer(k0, k1) + outer(k1, k0))
    np.testing.assert_array_equal(PauliCode.iY.matrix, outer(k0, k1) - outer(k1, k0))
    np.testing.assert_array_equal(PauliCode.Z.matrix, outer(k0, k0) - outer(k1, k1))
    y = np.array([[0, -1j], [1j, 0]])
    np.testing.assert_allclose(PauliCode.iY.matrix, 1j * y)


@pytest.mark.parametrize("name", ["Z", "X", "BELL", "GHZ3"])
def test_bases_orthonormal(name):
    v = qcore.BASES[name].vectors
    np.testing.assert_allclose(v.conj() @ v.T, np.eye(len(v)), atol=1e-12)
    assert qcore.BASES[name].arity == {"Z": 1, "X": 1, "BELL": 2, "GHZ3": 3}[name]


def _dist(state, qubits, basis):
    return {k.label: v for k, v in qcore.outcome_distribution(state, qubits, basis).items()}


def test_outcome_distribution_examples():
    d = _dist(qcore.ghz_state("P+"), (1,), "X")
    assert d == pytest.approx({"+": 0.5, "-": 0.5}, abs=1e-12)
    # |00> = (phi+ + phi-)/sqrt2, by hand
    d = _dist(qcore.make_basis_state(3, [0, 0, 0]), (0, 1), "BELL")
    assert d == pytest.approx({"phi+": 0.5, "phi-": 0.5, "psi+": 0, "psi-": 0}, abs=1e-12)
    d = _dist(qcore.bell_state("phi+"), (0, 1), "BELL")
    assert d["phi+"] == pytest.approx(1, abs=1e-12)


def test_outcome_distribution_arity_mismatch():
    with pytest.raises(InvalidArgument):
        qcore.outcome_distribution(qcore.ghz_state("P+"), (0,), "BELL")
    with pytest.raises(InvalidArgument):
        qcore.outcome_distribution(qcore.ghz_state("P+"), (0, 0), "BELL")


def test_measure_trent_then_bell_correlation(rng):
    seen = set()
    for _ in range(200):
        t, state, _ = qcore.measure(qcore.ghz_state("P+"), (1,), "X", rng)
        b, _, p = qcore.measure(state, (0, 2), "BELL", rng)
        assert p == pytest.approx(1, abs=1e-12)
        seen.add((t.label, b.label))
    assert seen == {("+", "phi+"), ("-", "phi-")}


def test_measure_basis_state(rng):
    s = qcore.make_basis_state(3, [1, 1, 1])
    label, post, p = qcore.measure(s, (0,), "Z", rng)
    assert label.label == "1" and p == 1.0
    assert qcore.fidelity(post, s) == pytest.approx(1)


def test_measure_iy_encoded_trent_plus_leaves_psi_minus(rng):
    state = Statevector(3, ket(("011", R2), ("100", -R2)))
    for _ in range(50):
        t, post, _ = qcore.measure(state, (1,), "X", rng)
        if t.label == "+":
            d = _dist(post, (0, 2), "BELL")
            assert d["psi-"] == pytest.approx(1, abs=1e-12)
            return
    pytest.fail("never observed +")


def test_collapsed_state_is_stable(rng):
    state = qcore.ghz_state("R-")
    label, post, _ = qcore.measure(state, (0, 2), "BELL", rng)
    label2, _, p2 = qcore.measure(post, (0, 2), "BELL", rng)
    assert label2 == label and p2 == pytest.approx(1, abs=1e-12)


def test_fidelity_examples():
    p_plus, p_minus = qcore.ghz_state("P+"), qcore.ghz_state("P-")
    assert qcore.fidelity(p_plus, p_plus) == pytest.approx(1, abs=1e-12)
    assert qcore.fidelity(p_plus, p_minus) == pytest.approx(0, abs=1e-12)
    with pytest.raises(InvalidArgument):
        qcore.fidelity(p_plus, qcore.bell_state("phi+"))


def test_statevector_rejects_unnormalized():
    with pytest.raises(InvalidArgument):
        Statevector(1, [1, 1])
    with pytest.raises(InvalidArgument):
        Statevector(2, [1, 0])


def test_statevector_is_read_only():
    s = qcore.ghz_state("P+")
    with pytest.raises(ValueError):
        s.amps[0] = 1


def test_sampling_matches_distribution():
    rng = np.random.default_rng(5)
    state = qcore.apply_gate(qcore.ghz_state("Q-"), PauliCode.H, 1)
    exact = _dist(state, (0, 1), "BELL")
    n = 100_000
    counts = dict.fromkeys(exact, 0)
    for _ in range(n):
        counts[qcore.measure(state, (0, 1), "BELL", rng)[0].label] += 1
    for lab, p in exact.items():
        assert within_3sigma(counts[lab] / n, p, n), (lab, counts[lab] / n, p)


# ---------------------------------------------------------------- properties

complex_amp = st.tuples(
    st.floats(-1, 1, allow_nan=False), st.floats(-1, 1, allow_nan=False)
).map(lambda t: complex(*t))


@st.composite
def states(draw, min_n=1, max_n=5):
    n = draw(st.integers(min_n, max_n))
    amps = np.array(draw(st.lists(complex_amp, min_size=1 << n, max_size=1 << n)))
    norm = np.linalg.norm(amps)
    if norm < 1e-3:
        amps = np.zeros(1 << n, dtype=complex)
        amps[0] = 1
        norm = 1.0
    return Statevector(n, amps / norm)


@st.composite
def state_and_measurement(draw):
    basis = draw(st.sampled_from(["Z", "X", "BELL", "GHZ3"]))
    arity = qcore.BASES[basis].arity
    state = draw(states(min_n=max(arity, 1)))
    qubits = draw(st.permutations(range(state.n_qubits)))[:arity]
    return state, tuple(qubits), basis


@settings(max_examples=150, deadline=None)
@given(state_and_measurement())
def test_distribution_complete_and_matches_bruteforce(case):
    state, qubits, basis = case
    dist = qcore.outcome_distribution(state, qubits, basis)
    assert sum(dist.values()) == pytest.approx(1, abs=1e-12)
    b = qcore.BASES[basis]
    for label, p in dist.items():
        assert p == pytest.approx(brute_prob(state.amps, state.n_qubits, qubits, b.vector(label.label)), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(states(), st.sampled_from(list(PauliCode)), st.data())
def test_gates_preserve_norm(state, code, data):
    q = data.draw(st.integers(0, state.n_qubits - 1))
    out = qcore.apply_gate(state, code, q)
    assert np.vdot(out.amps, out.amps).real == pytest.approx(1, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(state_and_measurement(), st.integers(0, 2**32 - 1))
def test_collapse_normalized_and_repeatable(case, seed):
    state, qubits, basis = case
    rng = np.random.default_rng(seed)
    label, post, p = qcore.measure(state, qubits, basis, rng)
    assert p > 0
    assert np.vdot(post.amps, post.amps).real == pytest.approx(1, abs=1e-12)
    again = qcore.outcome_distribution(post, qubits, basis)
    assert again[label] == pytest.approx(1, abs=1e-12)


def test_permute_and_tensor():
    s = qcore.tensor(qcore.make_basis_state(1, [1]), qcore.make_basis_state(2, [0, 1]))
    assert np.argmax(np.abs(s.amps)) == 0b101
    p = qcore.permute(s, (2, 0, 1))
    assert np.argmax(np.abs(p.amps)) == 0b110
