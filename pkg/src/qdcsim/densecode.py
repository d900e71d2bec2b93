"""Dense-coding codec and the four decode tables.

Bit pairs map to Pauli operations as 00->I, 01->X, 10->iY, 11->Z; the
single-bit sender of the four-party variants uses 0->I, 1->X.

Every decode table is keyed by ``(announcement, measurement)`` where the
announcement is Trent's public outcome and the measurement is the
receiver's own outcome. Tables are literal data; :func:`simulated_table`
regenerates them from the simulator for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import NamedTuple

from . import qcore
from .errors import InvalidArgument
from .qcore import PauliCode, Statevector


class BitPair(NamedTuple):
    hi: int
    lo: int

    @classmethod
    def parse(cls, text: str) -> "BitPair":
        if len(text) != 2 or set(text) - {"0", "1"}:
            raise InvalidArgument(f"not a bit pair: {text!r}")
        return cls(int(text[0]), int(text[1]))

    def __str__(self):
        return f"{self.hi}{self.lo}"


ALL_PAIRS = tuple(BitPair(h, l) for h in (0, 1) for l in (0, 1))

_PAIR_CODE = {
    BitPair(0, 0): PauliCode.I,
    BitPair(0, 1): PauliCode.X,
    BitPair(1, 0): PauliCode.iY,
    BitPair(1, 1): PauliCode.Z,
}


def encode_pair(bits) -> PauliCode:
    if isinstance(bits, str):
        bits = BitPair.parse(bits)
    return _PAIR_CODE[BitPair(*bits)]


def encode_single(bit: int) -> PauliCode:
    if bit not in (0, 1):
        raise InvalidArgument(f"not a bit: {bit!r}")
    return PauliCode.X if bit else PauliCode.I


# The encoded three-qubit state written as sum of (sign, Bell label on AB,
# X label on T). Pairing is fixed by the encoding; the iY sign is negative.
_AB_T_DECOMPOSITION = {
    BitPair(0, 0): ((+1, "phi+", "+"), (+1, "phi-", "-")),
    BitPair(0, 1): ((+1, "psi+", "+"), (-1, "psi-", "-")),
    BitPair(1, 0): ((+1, "psi-", "+"), (-1, "psi+", "-")),
    BitPair(1, 1): ((+1, "phi-", "+"), (+1, "phi+", "-")),
}

_X_STATES = {
    "+": Statevector.from_kets({"0": 1, "1": 1}, 1 / sqrt(2)),
    "-": Statevector.from_kets({"0": 1, "1": -1}, 1 / sqrt(2)),
}


def bell_x_state(terms) -> Statevector:
    """Sum over ``(sign, bell, x)`` of ``sign/sqrt(2) |bell>_AB |x>_T`` in ATB order."""
    parts = []
    for sign, bell, x in terms:
        abt = qcore.tensor(qcore.bell_state(bell), _X_STATES[x])
        parts.append((sign / sqrt(2), qcore.permute(abt, (0, 2, 1))))
    return qcore.superpose(parts)


def expected_joint_state(bits) -> Statevector:
    """ATB state after encoding ``bits`` on Alice's qubit of a fresh P+."""
    if isinstance(bits, str):
        bits = BitPair.parse(bits)
    return bell_x_state(_AB_T_DECOMPOSITION[BitPair(*bits)])


# ------------------------------------------------------------ decode tables

P = BitPair.parse

TABLE_P1 = {
    ("+", "phi+"): P("00"),
    ("+", "psi+"): P("01"),
    ("+", "psi-"): P("10"),
    ("+", "phi-"): P("11"),
    ("-", "phi-"): P("00"),
    ("-", "psi-"): P("01"),
    ("-", "psi+"): P("10"),
    ("-", "phi+"): P("11"),
}

TABLE_P2 = {
    ("phi+", "+"): P("00"),
    ("phi+", "-"): P("11"),
    ("psi+", "+"): P("01"),
    ("psi+", "-"): P("10"),
    ("phi-", "+"): P("11"),
    ("phi-", "-"): P("00"),
    ("psi-", "+"): P("10"),
    ("psi-", "-"): P("01"),
}

TABLE_MP1 = {
    ("+", "P+"): (P("00"), 0),
    ("+", "S+"): (P("01"), 0),
    ("+", "S-"): (P("10"), 0),
    ("+", "P-"): (P("11"), 0),
    ("-", "P-"): (P("00"), 0),
    ("-", "S-"): (P("01"), 0),
    ("-", "S+"): (P("10"), 0),
    ("-", "P+"): (P("11"), 0),
    ("+", "R+"): (P("00"), 1),
    ("+", "Q+"): (P("01"), 1),
    ("+", "Q-"): (P("10"), 1),
    ("+", "R-"): (P("11"), 1),
    ("-", "R-"): (P("00"), 1),
    ("-", "Q-"): (P("01"), 1),
    ("-", "Q+"): (P("10"), 1),
    ("-", "R+"): (P("11"), 1),
}

TABLE_MP2 = {
    ("P+", "+"): (P("00"), 0),
    ("P+", "-"): (P("11"), 0),
    ("S+", "+"): (P("01"), 0),
    ("S+", "-"): (P("10"), 0),
    ("P-", "+"): (P("11"), 0),
    ("P-", "-"): (P("00"), 0),
    ("S-", "+"): (P("10"), 0),
    ("S-", "-"): (P("01"), 0),
    ("R+", "+"): (P("00"), 1),
    ("R+", "-"): (P("11"), 1),
    ("Q+", "+"): (P("01"), 1),
    ("Q+", "-"): (P("10"), 1),
    ("Q-", "+"): (P("10"), 1),
    ("Q-", "-"): (P("01"), 1),
    ("R-", "+"): (P("11"), 1),
    ("R-", "-"): (P("00"), 1),
}

TABLES = {"p1": TABLE_P1, "p2": TABLE_P2, "mp1": TABLE_MP1, "mp2": TABLE_MP2}

# Rows as originally published where they differ from the algebra: under the
# "-" announcement the identity and Z rows (and, for mp1, the two X_B rows
# sharing R+/R-) carry each other's measurement labels.
PUBLISHED_ERRATA = {
    "p1": {("-", "phi+"): P("00"), ("-", "phi-"): P("11")},
    "mp1": {
        ("-", "P+"): (P("00"), 0),
        ("-", "P-"): (P("11"), 0),
        ("-", "R+"): (P("00"), 1),
        ("-", "R-"): (P("11"), 1),
    },
}


def published_table(variant: str) -> dict:
    table = dict(TABLES[variant])
    table.update(PUBLISHED_ERRATA.get(variant, {}))
    return table


def _lookup(variant, announcement, measurement):
    key = (qcore.normalize_label(str(announcement)), qcore.normalize_label(str(measurement)))
    try:
        return TABLES[variant][key]
    except KeyError:
        raise InvalidArgument(f"no {variant} decode row for {key}") from None


def decode_p1(trent, bob) -> BitPair:
    return _lookup("p1", trent, bob)


def decode_p2(trent, bob) -> BitPair:
    return _lookup("p2", trent, bob)


def decode_mp1(trent, charlie) -> tuple[BitPair, int]:
    return _lookup("mp1", trent, charlie)


def decode_mp2(trent, charlie) -> tuple[BitPair, int]:
    return _lookup("mp2", trent, charlie)


DECODERS = {"p1": decode_p1, "p2": decode_p2, "mp1": decode_mp1, "mp2": decode_mp2}


# ------------------------------------------------------------ layouts


@dataclass(frozen=True)
class Layout:
    """Who holds which qubit, and who measures what, for one variant."""

    variant: str
    n_qubits: int
    qubits: dict  # role -> qubit index
    announcer_qubits: tuple[int, ...]
    announcer_basis: str
    receiver: str
    receiver_qubits: tuple[int, ...]
    receiver_basis: str
    # role that receives the senders' qubits in transit
    sink: str

    @property
    def senders(self) -> tuple[str, ...]:
        return ("alice",) if self.n_qubits == 3 else ("alice", "bob")

    @property
    def in_flight(self) -> tuple[int, ...]:
        return tuple(self.qubits[s] for s in self.senders)


ATB = {"alice": 0, "trent": 1, "bob": 2}
ABTC = {"alice": 0, "bob": 1, "trent": 2, "charlie": 3}

LAYOUTS = {
    "p1": Layout("p1", 3, ATB, (1,), "X", "bob", (0, 2), "BELL", "bob"),
    "p2": Layout("p2", 3, ATB, (0, 1), "BELL", "bob", (2,), "X", "trent"),
    "mp1": Layout("mp1", 4, ABTC, (2,), "X", "charlie", (0, 1, 3), "GHZ3", "charlie"),
    "mp2": Layout("mp2", 4, ABTC, (0, 1, 2), "GHZ3", "charlie", (3,), "X", "trent"),
}


def encoded_state(variant: str, pair, bit: int = 0) -> Statevector:
    """Fresh shared GHZ state with the sender encodings applied."""
    layout = LAYOUTS[variant]
    state = qcore.ghz_state("P+", layout.n_qubits)
    state = qcore.apply_gate(state, encode_pair(pair), layout.qubits["alice"])
    if layout.n_qubits == 4:
        state = qcore.apply_gate(state, encode_single(bit), layout.qubits["bob"])
    return state


def branch_distribution(variant: str, state: Statevector) -> dict[tuple[str, str], float]:
    """Exact joint distribution of (announcement, measurement) labels."""
    layout = LAYOUTS[variant]
    out = {}
    ann = qcore.outcome_distribution(state, layout.announcer_qubits, layout.announcer_basis)
    for a_label, pa in ann.items():
        if pa < 1e-14:
            continue
        post, _ = qcore.collapse(state, layout.announcer_qubits, layout.announcer_basis, a_label.label)
        meas = qcore.outcome_distribution(post, layout.receiver_qubits, layout.receiver_basis)
        for m_label, pm in meas.items():
            out[(a_label.label, m_label.label)] = pa * pm
    for a in qcore.BASES[layout.announcer_basis].labels:
        for m in qcore.BASES[layout.receiver_basis].labels:
            out.setdefault((a, m), 0.0)
    return out


def message_units(variant: str):
    """All sender messages for one shared state: pairs, or (pair, bit)."""
    if LAYOUTS[variant].n_qubits == 3:
        return list(ALL_PAIRS)
    return [(p, b) for b in (0, 1) for p in ALL_PAIRS]


def simulated_table(variant: str, tol: float = 1e-12) -> dict:
    """Rebuild a decode table by exhaustive branch enumeration."""
    table = {}
    for unit in message_units(variant):
        pair, bit = (unit, 0) if isinstance(unit, BitPair) else unit
        dist = branch_distribution(variant, encoded_state(variant, pair, bit))
        for key, p in dist.items():
            if p > tol:
                if key in table:
                    raise InvalidArgument(f"{variant}: branch {key} is ambiguous")
                table[key] = unit
    return table
