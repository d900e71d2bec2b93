import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdcsim import _kernels, qcore

needs_numba = pytest.mark.skipif(_kernels.numba is None, reason="numba not installed")


@st.composite
def amps_and_qubits(draw):
    n = draw(st.integers(1, 6))
    seed = draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    a = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    a /= np.linalg.norm(a)
    basis = draw(st.sampled_from([b for b in qcore.BASES.values() if b.arity <= n]))
    qubits = tuple(draw(st.permutations(range(n)))[: basis.arity])
    return n, a, qubits, basis


@needs_numba
@settings(max_examples=120, deadline=None)
@given(amps_and_qubits(), st.floats(0, 0.999999))
def test_numba_and_numpy_agree(case, u):
    n, a, qubits, basis = case
    q = np.array(qubits, dtype=np.int64)
    for gate in qcore.PauliCode:
        np.testing.assert_allclose(
            _kernels.apply_1q_nb(a, n, qubits[0], gate.matrix),
            _kernels.apply_1q_np(a, n, qubits[0], gate.matrix), atol=1e-13)
    np.testing.assert_allclose(
        _kernels.subset_probs_nb(a, n, q, basis.vectors),
        _kernels.subset_probs_np(a, n, qubits, basis.vectors), atol=1e-13)
    np.testing.assert_allclose(
        _kernels.project_nb(a, n, q, basis.vectors[0]),
        _kernels.project_np(a, n, qubits, basis.vectors[0]), atol=1e-13)
    k1, s1, p1 = _kernels.measure_nb(a, n, q, basis.vectors, u)
    k2, s2, p2 = _kernels.measure_np(a, n, qubits, basis.vectors, u)
    assert k1 == k2
    assert p1 == pytest.approx(p2, abs=1e-13)
    np.testing.assert_allclose(s1, s2, atol=1e-12)


def test_measure_kernel_never_picks_forbidden_outcome():
    # |000>: only phi+/phi- have weight on qubits (0, 1)
    a = np.zeros(8, dtype=complex)
    a[0] = 1
    vecs = qcore.BELL_BASIS.vectors
    for u in np.linspace(0, 0.999999, 101):
        k, _, p = _kernels.measure_np(a, 3, (0, 1), vecs, u)
        assert qcore.BELL_BASIS.labels[k] in ("phi+", "phi-") and p == pytest.approx(0.5)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, QDC_SIM_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c", "import qdcsim; print(qdcsim.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"


@needs_numba
def test_backends_sample_identically():
    script = (
        "import numpy as np; from qdcsim import adversary as a;"
        "r = a.run_attack_scenario(a.zlw('p1', False), 500, np.random.default_rng(9));"
        "print(r.empirical)"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, QDC_SIM_NUMBA=flag)
        outs.append(subprocess.run([sys.executable, "-c", script], env=env,
                                   capture_output=True, text=True, check=True).stdout)
    assert outs[0] == outs[1]
