"""GHZ distribution with identity-keyed Hadamard masking.

Trent holds a registry of user identities. For a session of ``N`` GHZ
states he derives one key bit per state from each user's secret identity
and call counter, applies H to that user's qubit wherever the bit is 1,
and ships the qubits out. Legitimate users undo the mask with their own
key; a Z-basis correlation check on a random subset then decides whether
the shared states are trusted.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import qcore
from .densecode import ABTC, ATB
from .errors import AlreadyRegistered, InvalidArgument, UnknownUser
from .qcore import PauliCode, Statevector

HASHES: dict[str, Callable] = {
    "sha-256": hashlib.sha256,
    "sha3-256": hashlib.sha3_256,
    "blake2b": hashlib.blake2b,
    "sha-512": hashlib.sha512,
}

DEFAULT_THRESHOLD = 0.05
DEFAULT_CHECK_FRACTION = 0.25

# tap(state, in-flight qubit indices, rng) -> state
Tap = Callable[[Statevector, tuple, np.random.Generator], Statevector]


@dataclass
class Identity:
    user_id: str
    id_bits: bytes
    hash: str = "sha-256"
    counter: int = 0

    def __post_init__(self):
        if isinstance(self.id_bits, str):
            self.id_bits = bytes.fromhex(self.id_bits)
        if len(self.id_bits) * 8 < 128:
            raise InvalidArgument("identity sequence must be at least 128 bits")
        if self.hash not in HASHES:
            raise InvalidArgument(f"unknown hash {self.hash!r}; choose from {sorted(HASHES)}")
        if self.counter < 0:
            raise InvalidArgument("counter must be non-negative")

    @classmethod
    def random(cls, user_id: str, rng: np.random.Generator, n_bytes: int = 16, **kw) -> "Identity":
        return cls(user_id, rng.bytes(n_bytes), **kw)

    def to_json(self) -> dict:
        return {
            "user_id": self.user_id,
            "id_bits_hex": self.id_bits.hex(),
            "hash": self.hash,
            "counter": self.counter,
        }


@dataclass(frozen=True)
class AuthKey:
    bits: tuple[int, ...]

    def __len__(self):
        return len(self.bits)


def derive_key(identity: Identity, n: int, counter: int | None = None) -> AuthKey:
    """``n`` key bits from hash(ID || counter || block) blocks, MSB first."""
    h = HASHES[identity.hash]
    c = identity.counter if counter is None else counter
    bits: list[int] = []
    block = 0
    while len(bits) < n:
        digest = h(identity.id_bits + c.to_bytes(8, "big") + block.to_bytes(4, "big")).digest()
        bits.extend((byte >> (7 - k)) & 1 for byte in digest for k in range(8))
        block += 1
    return AuthKey(tuple(bits[:n]))


class Registry:
    """Trent's table of registered identities."""

    def __init__(self, identities: Sequence[Identity] = ()):
        self._users: dict[str, Identity] = {}
        self._lock = threading.Lock()
        for ident in identities:
            self.register(ident)

    def register(self, identity: Identity) -> None:
        with self._lock:
            if identity.user_id in self._users:
                raise AlreadyRegistered(identity.user_id)
            self._users[identity.user_id] = identity

    def __contains__(self, user_id):
        return user_id in self._users

    def get(self, user_id: str) -> Identity:
        try:
            return self._users[user_id]
        except KeyError:
            raise UnknownUser(user_id) from None

    def auth_key(self, user_id: str, n: int) -> AuthKey:
        return derive_key(self.get(user_id), n)

    def complete_session(self, user_id: str) -> None:
        with self._lock:
            self.get(user_id).counter += 1

    def to_json(self) -> list[dict]:
        return [ident.to_json() for ident in self._users.values()]

    @classmethod
    def load(cls, path) -> "Registry":
        entries = json.loads(Path(path).read_text())
        return cls(
            [Identity(e["user_id"], e["id_bits_hex"], e.get("hash", "sha-256"), e.get("counter", 0)) for e in entries]
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")


@dataclass
class SharedTriplets:
    """Jointly held GHZ states, one register per index.

    ``owners`` maps role to qubit index; ``ids`` keeps each state's position
    in the originally generated sequence.
    """

    states: list[Statevector]
    owners: dict = field(default_factory=lambda: dict(ATB))
    ids: list[int] = field(default_factory=list)
    accepted: bool = False
    report: "ErrorReport | None" = None

    def __post_init__(self):
        if not self.ids:
            self.ids = list(range(len(self.states)))

    def __len__(self):
        return len(self.states)


@dataclass(frozen=True)
class ErrorReport:
    checked: int
    errors: int

    @property
    def rate(self) -> float:
        return self.errors / self.checked if self.checked else 0.0

    def to_json(self) -> dict:
        return {"checked": self.checked, "errors": self.errors, "rate": self.rate}


class AuthFailure(Exception):
    def __init__(self, report: ErrorReport, threshold: float):
        self.report = report
        self.threshold = threshold
        super().__init__(
            f"authentication check failed: error rate {report.rate:.4f} > {threshold}"
        )


def mask(triplets: SharedTriplets, key: AuthKey, qubit: int) -> None:
    """Apply H to ``qubit`` of state i wherever key bit i is 1 (in place)."""
    if len(key) != len(triplets):
        raise InvalidArgument(f"key length {len(key)} != {len(triplets)} states")
    for i, bit in enumerate(key.bits):
        if bit:
            triplets.states[i] = qcore.apply_gate(triplets.states[i], PauliCode.H, qubit)


# H is self-inverse, so undoing the mask is the same operation.
unmask = mask


def z_check(state: Statevector, rng: np.random.Generator) -> tuple[bool, str]:
    """Every party measures Z; passes iff all outcomes agree."""
    outcomes = []
    for q in range(state.n_qubits):
        label, state, _ = qcore.measure(state, (q,), "Z", rng)
        outcomes.append(label.label)
    return len(set(outcomes)) == 1, "".join(outcomes)


def z_check_failure_probability(state: Statevector) -> float:
    n = state.n_qubits
    probs = np.abs(state.amps) ** 2
    return float(1.0 - probs[0] - probs[(1 << n) - 1])


def check_eavesdrop(
    triplets: SharedTriplets, check_fraction: float, rng: np.random.Generator
) -> ErrorReport:
    """Consume a random ceil(fraction*N) subset for the Z-correlation check."""
    if not 0 < check_fraction < 1:
        raise InvalidArgument("check_fraction must lie strictly between 0 and 1")
    n = len(triplets)
    if n == 0:
        raise InvalidArgument("no shared states to check")
    k = math.ceil(check_fraction * n)
    chosen = set(int(i) for i in rng.choice(n, size=k, replace=False))
    errors = 0
    for i in sorted(chosen):
        ok, _ = z_check(triplets.states[i], rng)
        errors += not ok
    triplets.states = [s for i, s in enumerate(triplets.states) if i not in chosen]
    triplets.ids = [t for i, t in enumerate(triplets.ids) if i not in chosen]
    return ErrorReport(k, errors)


def layout_for(users: Sequence[str]) -> dict:
    if len(users) == 2:
        roles = ("alice", "bob")
        layout = ATB
    elif len(users) == 3:
        roles = ("alice", "bob", "charlie")
        layout = ABTC
    else:
        raise InvalidArgument("authentication supports two or three users")
    return {user: layout[role] for user, role in zip(users, roles)}, layout


def run_authentication(
    registry: Registry,
    users: Sequence[str],
    n: int,
    rng: np.random.Generator,
    check_fraction: float = DEFAULT_CHECK_FRACTION,
    threshold: float = DEFAULT_THRESHOLD,
    tap: Tap | None = None,
    forged_keys: Mapping[str, AuthKey] | None = None,
) -> SharedTriplets:
    """Generate, mask, distribute, unmask and check ``n`` GHZ states.

    ``users`` are (alice, bob) for three-qubit states or (alice, bob,
    charlie) for the four-qubit variant. ``forged_keys`` lets a party unmask
    with a key other than the registered one (an impersonator). Raises
    :class:`AuthFailure` when the check error rate exceeds ``threshold``.
    Each user's counter advances once the session has run, pass or fail.
    """
    if n <= 0:
        raise InvalidArgument("need at least one GHZ state")
    qubit_of, layout = layout_for(users)
    keys = {u: registry.auth_key(u, n) for u in users}
    n_qubits = len(layout)
    triplets = SharedTriplets(
        [qcore.ghz_state("P+", n_qubits) for _ in range(n)], owners=dict(layout)
    )
    for u in users:
        mask(triplets, keys[u], qubit_of[u])
    if tap is not None:
        in_flight = tuple(qubit_of[u] for u in users)
        triplets.states = [tap(s, in_flight, rng) for s in triplets.states]
    forged_keys = forged_keys or {}
    for u in users:
        unmask(triplets, forged_keys.get(u, keys[u]), qubit_of[u])
    try:
        report = check_eavesdrop(triplets, check_fraction, rng)
    finally:
        for u in users:
            registry.complete_session(u)
    triplets.report = report
    if report.rate > threshold:
        raise AuthFailure(report, threshold)
    triplets.accepted = True
    return triplets
