"""Statevector inner loops.

Two interchangeable backends live here: numba-compiled loops and a pure
numpy (reshape/tensordot) path. Set ``QDC_SIM_NUMBA=0`` before import to
force the numpy path; the numba path is used whenever numba imports.

Bit convention: qubit 0 is the most significant bit of the amplitude index.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

# outcome probabilities below this are float residue of forbidden outcomes
ZERO_PROB = 1e-14

USE_NUMBA = numba is not None and os.environ.get("QDC_SIM_NUMBA", "1").lower() not in (
    "0",
    "false",
    "no",
    "off",
)


# ---------------------------------------------------------------- numpy path


def _front(amps, n, qubits):
    """Matrix view (2^k, 2^(n-k)) with the listed qubits moved to the rows."""
    k = len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    tensor = amps.reshape((2,) * n).transpose(list(qubits) + rest)
    return tensor.reshape(1 << k, 1 << (n - k)), rest


def _back(mat, n, qubits, rest):
    perm = list(qubits) + rest
    inv = np.argsort(perm)
    return mat.reshape((2,) * n).transpose(inv).reshape(-1)


def apply_1q_np(amps, n, qubit, mat):
    front, rest = _front(amps, n, (qubit,))
    return np.ascontiguousarray(_back(mat @ front, n, (qubit,), rest))


def subset_probs_np(amps, n, qubits, vecs):
    front, _ = _front(amps, n, tuple(qubits))
    coeffs = vecs.conj() @ front
    return np.sum(np.abs(coeffs) ** 2, axis=1)


def measure_np(amps, n, qubits, vecs, u):
    """Sample an outcome index from uniform ``u`` and collapse onto it."""
    probs = subset_probs_np(amps, n, qubits, vecs)
    probs = np.where(probs < ZERO_PROB, 0.0, probs)
    cdf = np.cumsum(probs)
    k = min(int(np.searchsorted(cdf, u * cdf[-1], side="right")), len(probs) - 1)
    while probs[k] == 0.0:
        k -= 1
    out = project_np(amps, n, qubits, vecs[k])
    p = float(np.vdot(out, out).real)
    return k, out / np.sqrt(p), p


def project_np(amps, n, qubits, vec):
    qubits = tuple(qubits)
    front, rest = _front(amps, n, qubits)
    coeff = vec.conj() @ front
    return np.ascontiguousarray(_back(np.outer(vec, coeff), n, qubits, rest))


# ---------------------------------------------------------------- numba path


def measure_nb(amps, n, qubits, vecs, u):
    probs = subset_probs_nb(amps, n, qubits, vecs)
    m = probs.shape[0]
    total = 0.0
    for v in range(m):
        if probs[v] < ZERO_PROB:
            probs[v] = 0.0
        total += probs[v]
    target = u * total
    k = m - 1
    acc = 0.0
    for v in range(m):
        acc += probs[v]
        if acc > target:
            k = v
            break
    while probs[k] == 0.0:
        k -= 1
    out = project_nb(amps, n, qubits, vecs[k])
    p = 0.0
    for i in range(out.shape[0]):
        p += out[i].real * out[i].real + out[i].imag * out[i].imag
    scale = 1.0 / np.sqrt(p)
    for i in range(out.shape[0]):
        out[i] *= scale
    return k, out, p


def _sub_index(i, n, qubits):
    # Index of basis ket i restricted to `qubits` (first listed = MSB).
    k = qubits.shape[0]
    s = 0
    for j in range(k):
        s = (s << 1) | ((i >> (n - 1 - qubits[j])) & 1)
    return s


def _rest_index(i, n, qubits):
    # Index i with the `qubits` bits cleared.
    r = i
    for j in range(qubits.shape[0]):
        r &= ~(1 << (n - 1 - qubits[j]))
    return r


def apply_1q_nb(amps, n, qubit, mat):
    out = np.empty_like(amps)
    bit = 1 << (n - 1 - qubit)
    for i in range(amps.shape[0]):
        if i & bit:
            continue
        a0 = amps[i]
        a1 = amps[i | bit]
        out[i] = mat[0, 0] * a0 + mat[0, 1] * a1
        out[i | bit] = mat[1, 0] * a0 + mat[1, 1] * a1
    return out


def subset_probs_nb(amps, n, qubits, vecs):
    m = vecs.shape[0]
    dim = amps.shape[0]
    # coeffs[v, r] accumulated over the rest-index r (dense over dim for simplicity)
    acc = np.zeros((m, dim), dtype=np.complex128)
    for i in range(dim):
        a = amps[i]
        if a == 0:
            continue
        s = _sub_index(i, n, qubits)
        r = _rest_index(i, n, qubits)
        for v in range(m):
            acc[v, r] += np.conj(vecs[v, s]) * a
    probs = np.zeros(m)
    for v in range(m):
        tot = 0.0
        for r in range(dim):
            c = acc[v, r]
            tot += c.real * c.real + c.imag * c.imag
        probs[v] = tot
    return probs


def project_nb(amps, n, qubits, vec):
    dim = amps.shape[0]
    coeff = np.zeros(dim, dtype=np.complex128)
    for i in range(dim):
        a = amps[i]
        if a == 0:
            continue
        coeff[_rest_index(i, n, qubits)] += np.conj(vec[_sub_index(i, n, qubits)]) * a
    out = np.empty(dim, dtype=np.complex128)
    for i in range(dim):
        out[i] = vec[_sub_index(i, n, qubits)] * coeff[_rest_index(i, n, qubits)]
    return out


if numba is not None:
    _sub_index = numba.njit(cache=True)(_sub_index)
    _rest_index = numba.njit(cache=True)(_rest_index)
    apply_1q_nb = numba.njit(cache=True)(apply_1q_nb)
    subset_probs_nb = numba.njit(cache=True)(subset_probs_nb)
    project_nb = numba.njit(cache=True)(project_nb)
    measure_nb = numba.njit(cache=True)(measure_nb)


def _as_qubits(qubits):
    return np.asarray(qubits, dtype=np.int64)


if USE_NUMBA:

    def apply_1q(amps, n, qubit, mat):
        return apply_1q_nb(amps, n, qubit, mat)

    def subset_probs(amps, n, qubits, vecs):
        return subset_probs_nb(amps, n, _as_qubits(qubits), vecs)

    def project(amps, n, qubits, vec):
        return project_nb(amps, n, _as_qubits(qubits), vec)

    def measure(amps, n, qubits, vecs, u):
        return measure_nb(amps, n, _as_qubits(qubits), vecs, u)

else:
    apply_1q = apply_1q_np
    subset_probs = subset_probs_np
    project = project_np
    measure = measure_np

BACKEND = "numba" if USE_NUMBA else "numpy"
