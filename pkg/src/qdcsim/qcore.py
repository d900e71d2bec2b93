"""Exact statevector simulation for small qubit registers.

Qubit 0 is the leftmost symbol of a ket, so ``|ATB>`` maps A->0, T->1, B->2
and ``|ABTC>`` maps A->0, B->1, T->2, C->3. Amplitude index bit ``n-1-q``
holds qubit ``q``.

All values are immutable; randomness is passed in explicitly as a
``numpy.random.Generator``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import sqrt
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import InvalidArgument, SimulationError

MAX_QUBITS = 8
NORM_TOL = 1e-12
_R2 = 1 / sqrt(2)


@dataclass(frozen=True, eq=False)
class Statevector:
    n_qubits: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise InvalidArgument(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 1 << self.n_qubits:
            raise InvalidArgument(
                f"expected {1 << self.n_qubits} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidArgument(f"state is not normalized (norm^2 = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @classmethod
    def _trusted(cls, n_qubits: int, amps: np.ndarray) -> "Statevector":
        # kernel outputs are normalized by construction; skip re-validation
        obj = object.__new__(cls)
        amps.flags.writeable = False
        object.__setattr__(obj, "n_qubits", n_qubits)
        object.__setattr__(obj, "amps", amps)
        return obj

    @classmethod
    def from_kets(cls, terms: Mapping[str, complex], scale: complex = 1.0) -> "Statevector":
        """Build a state from ``{"011": coeff, ...}``, every key of equal length."""
        keys = list(terms)
        n = len(keys[0])
        amps = np.zeros(1 << n, dtype=np.complex128)
        for ket, coeff in terms.items():
            if len(ket) != n:
                raise InvalidArgument("ket strings must share one length")
            amps[int(ket, 2)] += scale * coeff
        return cls(n, amps)

    def __repr__(self):
        terms = []
        for i, a in enumerate(self.amps):
            if abs(a) > 1e-12:
                terms.append(f"({a.real:+.4g}{a.imag:+.4g}j)|{i:0{self.n_qubits}b}>")
        return f"Statevector({' '.join(terms)})"


class PauliCode(enum.Enum):
    I = "I"
    X = "X"
    iY = "iY"
    Z = "Z"
    H = "H"

    @property
    def matrix(self) -> np.ndarray:
        return _GATES[self]


_GATES = {
    PauliCode.I: np.array([[1, 0], [0, 1]], dtype=np.complex128),
    PauliCode.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    # i*sigma_y = |0><1| - |1><0|, a real matrix
    PauliCode.iY: np.array([[0, 1], [-1, 0]], dtype=np.complex128),
    PauliCode.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
    PauliCode.H: np.array([[1, 1], [1, -1]], dtype=np.complex128) * _R2,
}
for _m in _GATES.values():
    _m.flags.writeable = False


_ALIASES = {"−": "-", "φ": "phi", "ψ": "psi"}


def normalize_label(label: str) -> str:
    for src, dst in _ALIASES.items():
        label = label.replace(src, dst)
    return label


@dataclass(frozen=True)
class OutcomeLabel:
    basis: str
    label: str

    def __post_init__(self):
        object.__setattr__(self, "label", normalize_label(self.label))
        if self.label not in BASES[self.basis].labels:
            raise InvalidArgument(f"{self.label!r} is not a {self.basis} outcome")

    def __str__(self):
        return self.label


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    name: str
    arity: int
    labels: tuple[str, ...]
    vectors: np.ndarray = field(repr=False)

    def outcome(self, k: int) -> "OutcomeLabel":
        return _OUTCOMES[self.name][k]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(normalize_label(label))
        except ValueError:
            raise InvalidArgument(f"{label!r} is not a {self.name} outcome") from None

    def vector(self, label: str) -> np.ndarray:
        return self.vectors[self.index(label)]


def _ket_vector(terms: Mapping[str, float]) -> np.ndarray:
    n = len(next(iter(terms)))
    v = np.zeros(1 << n, dtype=np.complex128)
    for ket, c in terms.items():
        v[int(ket, 2)] = c
    return v


def _basis(name, table):
    labels = tuple(table)
    vecs = np.array([_ket_vector(t) for t in table.values()])
    vecs.flags.writeable = False
    arity = int(np.log2(vecs.shape[1]))
    return MeasurementBasis(name, arity, labels, vecs)


_BELL_TERMS = {
    "phi+": {"00": _R2, "11": _R2},
    "phi-": {"00": _R2, "11": -_R2},
    "psi+": {"01": _R2, "10": _R2},
    "psi-": {"01": _R2, "10": -_R2},
}

# P, Q, R, S pair the first ket 000, 001, 010, 011 with its complement.
_GHZ_FIRST = {"P": "000", "Q": "001", "R": "010", "S": "011"}


def _ghz_terms(family: str, sign: str, n: int) -> dict[str, float]:
    head = _GHZ_FIRST[family]
    if n == 4:
        if family != "P":
            raise InvalidArgument("only P+/P- are defined on four qubits")
        head = "0000"
    tail = "".join("1" if b == "0" else "0" for b in head)
    return {head: _R2, tail: _R2 if sign == "+" else -_R2}


BASES: dict[str, MeasurementBasis] = {
    "Z": _basis("Z", {"0": {"0": 1.0}, "1": {"1": 1.0}}),
    "X": _basis("X", {"+": {"0": _R2, "1": _R2}, "-": {"0": _R2, "1": -_R2}}),
    "BELL": _basis("BELL", _BELL_TERMS),
    "GHZ3": _basis(
        "GHZ3", {f + s: _ghz_terms(f, s, 3) for f in "PQRS" for s in "+-"}
    ),
}
_OUTCOMES = {name: tuple(OutcomeLabel(name, lab) for lab in b.labels) for name, b in BASES.items()}
Z_BASIS, X_BASIS, BELL_BASIS, GHZ3_BASIS = (BASES[k] for k in ("Z", "X", "BELL", "GHZ3"))


def _get_basis(basis) -> MeasurementBasis:
    if isinstance(basis, MeasurementBasis):
        return basis
    try:
        return BASES[basis]
    except KeyError:
        raise InvalidArgument(f"unknown basis {basis!r}") from None


# ------------------------------------------------------------ construction


def make_basis_state(n_qubits: int, bit_pattern: Sequence[int]) -> Statevector:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise InvalidArgument(f"n_qubits must be in 1..{MAX_QUBITS}")
    if len(bit_pattern) != n_qubits or any(b not in (0, 1) for b in bit_pattern):
        raise InvalidArgument("bit_pattern must be n_qubits bits")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[int("".join(map(str, bit_pattern)), 2)] = 1.0
    return Statevector(n_qubits, amps)


def ghz_state(label: str | OutcomeLabel, n_qubits: int = 3) -> Statevector:
    """One of the eight 3-qubit GHZ states, or the 4-qubit ``P+``/``P-``."""
    name = normalize_label(str(label))
    if n_qubits not in (3, 4) or len(name) != 2 or name[0] not in _GHZ_FIRST or name[1] not in "+-":
        raise InvalidArgument(f"no GHZ state {name!r} on {n_qubits} qubits")
    return Statevector.from_kets(_ghz_terms(name[0], name[1], n_qubits))


def bell_state(label: str | OutcomeLabel) -> Statevector:
    name = normalize_label(str(label))
    if name not in _BELL_TERMS:
        raise InvalidArgument(f"unknown Bell label {name!r}")
    return Statevector.from_kets(_BELL_TERMS[name])


def tensor(*states: Statevector) -> Statevector:
    amps = np.array([1.0 + 0j])
    for s in states:
        amps = np.kron(amps, s.amps)
    return Statevector(sum(s.n_qubits for s in states), amps)


def permute(state: Statevector, order: Sequence[int]) -> Statevector:
    """Reorder qubits: new qubit ``k`` is old qubit ``order[k]``."""
    n = state.n_qubits
    if sorted(order) != list(range(n)):
        raise InvalidArgument("order must be a permutation of the qubit indices")
    amps = state.amps.reshape((2,) * n).transpose(list(order)).reshape(-1)
    return Statevector(n, amps)


# ------------------------------------------------------------ dynamics


def _check_qubits(state: Statevector, qubits: Iterable[int]) -> tuple[int, ...]:
    qubits = tuple(qubits)
    if len(set(qubits)) != len(qubits):
        raise InvalidArgument("qubits must be distinct")
    for q in qubits:
        if not isinstance(q, (int, np.integer)) or not 0 <= q < state.n_qubits:
            raise InvalidArgument(f"qubit {q} out of range for {state.n_qubits} qubits")
    return qubits


def apply_gate(state: Statevector, gate: PauliCode, qubit: int) -> Statevector:
    (qubit,) = _check_qubits(state, (qubit,))
    amps = _kernels.apply_1q(state.amps, state.n_qubits, qubit, gate.matrix)
    return Statevector._trusted(state.n_qubits, amps)


def _probs(state, qubits, basis):
    basis = _get_basis(basis)
    qubits = _check_qubits(state, qubits)
    if len(qubits) != basis.arity:
        raise InvalidArgument(
            f"{basis.name} basis measures {basis.arity} qubit(s), got {len(qubits)}"
        )
    return basis, qubits, _kernels.subset_probs(state.amps, state.n_qubits, qubits, basis.vectors)


def outcome_distribution(
    state: Statevector, qubits: Sequence[int], basis
) -> dict[OutcomeLabel, float]:
    """Born-rule probabilities for measuring ``qubits`` in ``basis``.

    Every label of the basis appears in the result, including zero-probability
    ones.
    """
    basis, _, probs = _probs(state, qubits, basis)
    return {OutcomeLabel(basis.name, lab): float(p) for lab, p in zip(basis.labels, probs)}


def collapse(state: Statevector, qubits: Sequence[int], basis, label: str) -> tuple[Statevector, float]:
    """Post-measurement state for a given outcome, plus its probability."""
    basis = _get_basis(basis)
    qubits = _check_qubits(state, qubits)
    vec = basis.vector(label)
    amps = _kernels.project(state.amps, state.n_qubits, qubits, vec)
    p = float(np.vdot(amps, amps).real)
    if p <= 1e-24:
        raise SimulationError(f"projection onto {label!r} has zero norm")
    return Statevector(state.n_qubits, amps / np.sqrt(p)), p


def measure(
    state: Statevector, qubits: Sequence[int], basis, rng: np.random.Generator
) -> tuple[OutcomeLabel, Statevector, float]:
    """Sample one projective measurement outcome and collapse the state.

    The collapsed state keeps all qubits; measuring it again in the same
    basis returns the same outcome with probability 1.
    """
    basis = _get_basis(basis)
    qubits = _check_qubits(state, qubits)
    if len(qubits) != basis.arity:
        raise InvalidArgument(
            f"{basis.name} basis measures {basis.arity} qubit(s), got {len(qubits)}"
        )
    k, amps, p = _kernels.measure(state.amps, state.n_qubits, qubits, basis.vectors, rng.random())
    if not p > 1e-24:
        raise SimulationError(f"sampled zero-norm {basis.name} outcome")
    return basis.outcome(k), Statevector._trusted(state.n_qubits, amps), float(p)


def fidelity(a: Statevector, b: Statevector) -> float:
    if a.n_qubits != b.n_qubits:
        raise InvalidArgument("fidelity needs equal register sizes")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def superpose(terms: Sequence[tuple[complex, Statevector]]) -> Statevector:
    """Linear combination of states; the result must already be normalized."""
    n = terms[0][1].n_qubits
    amps = sum(c * s.amps for c, s in terms)
    return Statevector(n, amps)
