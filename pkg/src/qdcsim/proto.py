"""Message transmission over authenticated GHZ states.

One engine drives all four variants; a :class:`~qdcsim.densecode.Layout`
says who sends which qubit where and who measures in which basis. A run
follows the fixed step order: reserve a secret subset, draw check bits,
ECC-encode, interleave, encode on qubits, send (adversary tap point),
receiver measures, Trent measures and announces, receiver decodes, Alice
reveals the check positions, and the receiver accepts or aborts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import densecode, ecc, qcore
from .auth import ErrorReport, SharedTriplets
from .bitstr import bits_to_hex, bits_to_str
from .densecode import LAYOUTS, BitPair
from .errors import InvalidArgument

SCHEMA_VERSION = 1
VARIANTS = ("p1", "p2", "mp1", "mp2")

Adversary = Callable[[qcore.Statevector, tuple, np.random.Generator], qcore.Statevector]


@dataclass
class ProtocolConfig:
    variant: str
    message: Sequence[int]
    # second sender's bits, multiparty variants only
    message_b: Sequence[int] = ()
    seed: int = 0
    ecc: str = "hamming-7-4"
    check_fraction: float = 0.25
    check_count: int | None = None
    threshold: float = 0.05
    reserve_fraction: float = 0.25

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidArgument(f"variant must be one of {VARIANTS}")
        self.message = [int(b) for b in self.message]
        self.message_b = [int(b) for b in self.message_b]
        if any(b not in (0, 1) for b in self.message + self.message_b):
            raise InvalidArgument("message bits must be 0/1")
        if self.variant in ("p1", "p2") and self.message_b:
            raise InvalidArgument("message_b is only used by the multiparty variants")
        if not 0 <= self.check_fraction < 1:
            raise InvalidArgument("check_fraction must be in [0, 1)")
        if self.check_count is not None and self.check_count < 1:
            raise InvalidArgument("check_count must be at least 1")
        if not 0 <= self.reserve_fraction < 1:
            raise InvalidArgument("reserve_fraction must be in [0, 1)")
        ecc.block_sizes(self.ecc)

    @property
    def multiparty(self) -> bool:
        return self.variant in ("mp1", "mp2")

    def message_units(self) -> int:
        a = ecc.encoded_length(len(self.message), self.ecc)
        units = -(-a // 2)
        if self.multiparty:
            units = max(units, ecc.encoded_length(len(self.message_b), self.ecc))
        return units

    def check_units(self) -> int:
        if self.check_count is not None:
            return self.check_count
        m = self.message_units()
        # check units make up check_fraction of the combined stream
        return max(1, math.ceil(self.check_fraction * m / (1 - self.check_fraction)))

    def total_units(self) -> int:
        return self.message_units() + self.check_units()

    def states_needed(self) -> int:
        """Shared states required after authentication, reservation included."""
        s = self.total_units()
        while s - math.ceil(self.reserve_fraction * s) < self.total_units():
            s += 1
        return s


def _round(p: float) -> float:
    return float(f"{p:.15g}")


@dataclass
class Transcript:
    variant: str
    seed: int
    events: list[dict] = field(default_factory=list)
    decision: str = ""
    reason: str = ""
    error_report: ErrorReport | None = None
    decoded: list[int] | None = None
    decoded_b: list[int] | None = None
    header: dict = field(default_factory=dict)
    auth_report: ErrorReport | None = None

    def log(self, kind: str, **payload) -> None:
        self.events.append({"kind": kind, **payload})

    @property
    def accepted(self) -> bool:
        return self.decision == "accept"

    def to_json(self) -> dict:
        if self.decoded is None:
            decoded_hex = None
        elif self.variant in ("mp1", "mp2"):
            decoded_hex = {"alice": bits_to_hex(self.decoded), "bob": bits_to_hex(self.decoded_b)}
        else:
            decoded_hex = bits_to_hex(self.decoded)
        out = {
            "version": SCHEMA_VERSION,
            "variant": self.variant,
            "seed": self.seed,
            "header": self.header,
            "events": self.events,
            "decision": self.decision,
            "reason": self.reason,
            "decoded_hex": decoded_hex,
            "decoded_bits": None if self.decoded is None else bits_to_str(self.decoded),
            "error_report": None if self.error_report is None else self.error_report.to_json(),
        }
        if self.decoded_b is not None:
            out["decoded_bits_b"] = bits_to_str(self.decoded_b)
        if self.auth_report is not None:
            out["auth_report"] = self.auth_report.to_json()
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1, ensure_ascii=True)


def _unit_of(variant, alice_stream, bob_stream, i):
    pair = BitPair(alice_stream[2 * i], alice_stream[2 * i + 1])
    if variant in ("mp1", "mp2"):
        return (pair, bob_stream[i])
    return pair


def _unit_str(unit) -> str:
    if isinstance(unit, BitPair):
        return str(unit)
    return f"{unit[0]}|{unit[1]}"


def run_protocol(
    config: ProtocolConfig,
    shared: SharedTriplets,
    adversary: Adversary | None = None,
    rng: np.random.Generator | None = None,
) -> Transcript:
    """Run one message transmission for any variant."""
    variant = config.variant
    layout = LAYOUTS[variant]
    if shared.states and shared.states[0].n_qubits != layout.n_qubits:
        raise InvalidArgument(f"{variant} needs {layout.n_qubits}-qubit shared states")
    rng = np.random.default_rng(config.seed) if rng is None else rng
    tr = Transcript(variant, config.seed, auth_report=shared.report)
    tr.header = {
        "message_length": len(config.message),
        "ecc": config.ecc,
        "threshold": config.threshold,
    }
    if config.multiparty:
        tr.header["message_b_length"] = len(config.message_b)

    # (a) secret reserved subset, kept aside
    n_shared = len(shared)
    n_reserve = math.ceil(config.reserve_fraction * n_shared)
    reserved = set(int(i) for i in rng.choice(n_shared, size=n_reserve, replace=False)) if n_reserve else set()
    available = [i for i in range(n_shared) if i not in reserved]
    tr.log("reserved", party="alice", count=n_reserve)

    # (b)-(c) check bits, ECC, interleave
    n_msg = config.message_units()
    n_chk = config.check_units()
    total = n_msg + n_chk
    if len(available) < total:
        raise InvalidArgument(
            f"{total} shared states needed after reservation, {len(available)} available"
        )
    coded_a = ecc.ecc_encode(config.message, config.ecc)
    coded_a += [0] * (2 * n_msg - len(coded_a))
    check_a = [int(b) for b in rng.integers(0, 2, size=2 * n_chk)]
    alice_stream, positions = ecc.interleave(coded_a, check_a, rng, unit=2)
    bob_stream: list[int] = []
    if config.multiparty:
        coded_b = ecc.ecc_encode(config.message_b, config.ecc)
        coded_b += [0] * (n_msg - len(coded_b))
        check_b = [int(b) for b in rng.integers(0, 2, size=n_chk)]
        bob_stream = ecc.place(coded_b, check_b, positions, unit=1)
    tr.header["units"] = total

    # (d)-(e) encode and send
    states = []
    for u in range(total):
        idx = available[u]
        state = shared.states[idx]
        tr.log("prepared", state=shared.ids[idx], unit=u)
        unit = _unit_of(variant, alice_stream, bob_stream, u)
        pair, bit = (unit, None) if isinstance(unit, BitPair) else unit
        code = densecode.encode_pair(pair)
        state = qcore.apply_gate(state, code, layout.qubits["alice"])
        tr.log("gate", party="alice", code=code.value, qubit=layout.qubits["alice"], unit=u)
        if bit is not None:
            code_b = densecode.encode_single(bit)
            state = qcore.apply_gate(state, code_b, layout.qubits["bob"])
            tr.log("gate", party="bob", code=code_b.value, qubit=layout.qubits["bob"], unit=u)
        for sender in layout.senders:
            tr.log("sent", qubit=layout.qubits[sender], src=sender, dst=layout.sink, unit=u)
        if adversary is not None:
            state = adversary(state, layout.in_flight, rng)
        states.append(state)

    # (f) receiver's own measurement
    received = []
    for u, state in enumerate(states):
        label, state, p = qcore.measure(state, layout.receiver_qubits, layout.receiver_basis, rng)
        states[u] = state
        received.append(label.label)
        tr.log("measured", party=layout.receiver, basis=layout.receiver_basis,
               qubits=list(layout.receiver_qubits), outcome=label.label, probability=_round(p), unit=u)

    # (g) Trent measures, then publishes all outcomes in one batch
    announced = []
    for u, state in enumerate(states):
        label, state, p = qcore.measure(state, layout.announcer_qubits, layout.announcer_basis, rng)
        states[u] = state
        announced.append(label.label)
        tr.log("measured", party="trent", basis=layout.announcer_basis,
               qubits=list(layout.announcer_qubits), outcome=label.label, probability=_round(p), unit=u)
    tr.log("announced", party="trent", payload=announced)

    # (h) decode
    decode = densecode.DECODERS[variant]
    decoded_units = [decode(a, m) for a, m in zip(announced, received)]

    # (i) reveal check positions and values
    sent_checks = [_unit_of(variant, alice_stream, bob_stream, p) for p in positions]
    tr.log("announced", party="alice", payload={
        "positions": positions,
        "values": [_unit_str(c) for c in sent_checks],
    })

    # (j) check and accept/abort
    errors = sum(decoded_units[p] != c for p, c in zip(positions, sent_checks))
    report = ErrorReport(len(positions), errors)
    tr.error_report = report
    if report.rate > config.threshold:
        tr.decision, tr.reason = "abort", f"check error rate {report.rate:.6g} > {config.threshold}"
        tr.log("decision", party=layout.receiver, result="abort", rate=_round(report.rate))
        return tr

    marks = set(positions)
    msg_units = [decoded_units[u] for u in range(total) if u not in marks]
    if config.multiparty:
        a_bits = [b for unit, _ in msg_units for b in unit]
        b_bits = [bit for _, bit in msg_units]
    else:
        a_bits = [b for unit in msg_units for b in unit]
        b_bits = None
    tr.decoded = _unpack(a_bits, config.ecc, len(config.message))
    if b_bits is not None:
        tr.decoded_b = _unpack(b_bits, config.ecc, len(config.message_b))
    tr.decision = "accept"
    tr.log("decision", party=layout.receiver, result="accept", rate=_round(report.rate))
    return tr


def _unpack(bits, scheme, length):
    n = ecc.encoded_length(length, scheme)
    return ecc.ecc_decode(bits[:n], scheme)[:length]


def run_protocol1(config, shared, adversary=None, rng=None) -> Transcript:
    if config.variant != "p1":
        raise InvalidArgument("run_protocol1 expects variant p1")
    return run_protocol(config, shared, adversary, rng)


def run_protocol2(config, shared, adversary=None, rng=None) -> Transcript:
    if config.variant != "p2":
        raise InvalidArgument("run_protocol2 expects variant p2")
    return run_protocol(config, shared, adversary, rng)


def run_multiparty(config, shared, adversary=None, rng=None) -> Transcript:
    if not config.multiparty:
        raise InvalidArgument("run_multiparty expects variant mp1 or mp2")
    return run_protocol(config, shared, adversary, rng)


def honest_shared(variant: str, n: int) -> SharedTriplets:
    """Fresh, already-trusted GHZ states, skipping the authentication round."""
    layout = LAYOUTS[variant]
    states = [qcore.ghz_state("P+", layout.n_qubits)] * n
    return SharedTriplets(list(states), owners=dict(layout.qubits), accepted=True)
