"""Intercept-resend attacks and exact leakage/detection accounting.

Strategies
----------
``zlw-p1`` / ``zlw-p2``
    Trent grabs Alice's qubit (on its way to Bob, or as its legitimate
    recipient), optionally applies H to it, then measures it and his own
    qubit. Observation: the two outcomes.
``eve-intercept``
    An outsider measures Alice's in-flight qubit. Observation: one outcome.
``none``
    Observes nothing and changes nothing.

In every case the measured qubits are left in their collapsed state and
forwarded (measure-and-resend).

Exact quantities enumerate every measurement branch; the Monte Carlo
routines sample the same physics through :func:`qcore.measure` so the two
routes can be compared.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import densecode, qcore
from .densecode import LAYOUTS, BitPair
from .errors import InvalidArgument
from .qcore import PauliCode

STRATEGIES = ("zlw-p1", "zlw-p2", "eve-intercept", "none")


@dataclass(frozen=True)
class AttackStrategy:
    name: str
    apply_h: bool = True
    basis: str = "Z"
    resend: str = "measured-state"
    # variant the attack runs against; zlw-* fix it, eve may target any
    variant: str = ""

    def __post_init__(self):
        if self.name not in STRATEGIES:
            raise InvalidArgument(f"strategy must be one of {STRATEGIES}")
        if self.basis not in ("Z", "X"):
            raise InvalidArgument("attack basis must be Z or X")
        if self.resend != "measured-state":
            raise InvalidArgument("only the measured-state resend policy is modelled")
        fixed = {"zlw-p1": "p1", "zlw-p2": "p2"}.get(self.name)
        variant = self.variant or fixed or "p1"
        if fixed and variant != fixed:
            raise InvalidArgument(f"{self.name} only applies to variant {fixed}")
        if variant not in LAYOUTS:
            raise InvalidArgument(f"unknown variant {variant!r}")
        object.__setattr__(self, "variant", variant)

    @property
    def layout(self) -> densecode.Layout:
        return LAYOUTS[self.variant]

    @property
    def measured_roles(self) -> tuple[str, ...]:
        if self.name.startswith("zlw"):
            return ("alice", "trent")
        if self.name == "eve-intercept":
            return ("alice",)
        return ()


def zlw(variant: str = "p1", apply_h: bool = True) -> AttackStrategy:
    return AttackStrategy(f"zlw-{variant}", apply_h=apply_h)


def eve(variant: str = "p1", basis: str = "Z", apply_h: bool = False) -> AttackStrategy:
    return AttackStrategy("eve-intercept", apply_h=apply_h, basis=basis, variant=variant)


NO_ATTACK = AttackStrategy("none")


# ------------------------------------------------------------ intercept physics


def _prepare(strategy: AttackStrategy, state):
    if strategy.apply_h and strategy.measured_roles:
        state = qcore.apply_gate(state, PauliCode.H, strategy.layout.qubits["alice"])
    return state


def intercept_branches(strategy: AttackStrategy, state) -> list[tuple[tuple, float, qcore.Statevector]]:
    """All (observation, probability, resent state) branches, zero-probability ones dropped."""
    state = _prepare(strategy, state)
    branches = [((), 1.0, state)]
    for role in strategy.measured_roles:
        q = strategy.layout.qubits[role]
        nxt = []
        for obs, p, s in branches:
            for label, pl in qcore.outcome_distribution(s, (q,), strategy.basis).items():
                if pl < 1e-14:
                    continue
                post, _ = qcore.collapse(s, (q,), strategy.basis, label.label)
                nxt.append((obs + (label.label,), p * pl, post))
        branches = nxt
    return branches


def intercept_sample(strategy: AttackStrategy, state, rng: np.random.Generator):
    """Sample one intercept: returns (observation, resent state)."""
    state = _prepare(strategy, state)
    obs = []
    for role in strategy.measured_roles:
        label, state, _ = qcore.measure(state, (strategy.layout.qubits[role],), strategy.basis, rng)
        obs.append(label.label)
    return tuple(obs), state


class Interceptor:
    """Adversary hook for :func:`qdcsim.proto.run_protocol` and auth taps.

    Records each observation in ``observations``.
    """

    def __init__(self, strategy: AttackStrategy):
        self.strategy = strategy
        self.observations: list[tuple] = []

    def __call__(self, state, in_flight, rng):
        obs, state = intercept_sample(self.strategy, state, rng)
        self.observations.append(obs)
        return state


# ------------------------------------------------------------ exact analysis


def _units(strategy):
    return densecode.message_units(strategy.variant)


def _encoded(strategy, unit):
    pair, bit = (unit, 0) if isinstance(unit, BitPair) else unit
    return densecode.encoded_state(strategy.variant, pair, bit)


def observation_distribution(strategy: AttackStrategy, unit) -> dict[tuple, float]:
    out: dict[tuple, float] = {}
    for obs, p, _ in intercept_branches(strategy, _encoded(strategy, unit)):
        out[obs] = out.get(obs, 0.0) + p
    return out


def zlw_observation_distribution(bits, apply_h: bool) -> dict[tuple[str, str], float]:
    """Joint Z outcomes of (Alice's intercepted qubit, Trent's qubit)."""
    if isinstance(bits, str):
        bits = BitPair.parse(bits)
    dist = observation_distribution(zlw("p1", apply_h), BitPair(*bits))
    return {k: v for k, v in dist.items() if v > 1e-14}


def conditional_table(strategy: AttackStrategy) -> tuple[list, list, np.ndarray]:
    """(units, observations, P[o | unit]) with rows indexed by unit."""
    units = _units(strategy)
    dists = [observation_distribution(strategy, u) for u in units]
    observations = sorted({o for d in dists for o in d})
    table = np.array([[d.get(o, 0.0) for o in observations] for d in dists])
    return units, observations, table


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 1e-15]
    return float(-(p * np.log2(p)).sum())


def mutual_information(strategy: AttackStrategy) -> float:
    """I(unit; observation) in bits with a uniform prior over units."""
    units, _, cond = conditional_table(strategy)
    prior = 1.0 / len(units)
    marginal = prior * cond.sum(axis=0)
    mi = _entropy_bits(marginal) - sum(prior * _entropy_bits(row) for row in cond)
    # entropies of dyadic distributions differ by float residue only
    return 0.0 if abs(mi) < 1e-12 else mi


def guess_accuracy(strategy: AttackStrategy, target: Callable | None = None) -> float:
    """Max-likelihood success probability for guessing ``target(unit)``.

    ``target`` defaults to the whole unit; pass :func:`xor_bit` to score
    only the parity of Alice's pair.
    """
    units, _, cond = conditional_table(strategy)
    target = target or (lambda u: u)
    prior = 1.0 / len(units)
    classes = sorted({target(u) for u in units}, key=repr)
    total = 0.0
    for col in cond.T:
        total += max(
            sum(prior * col[i] for i, u in enumerate(units) if target(u) == c) for c in classes
        )
    return total


def xor_bit(unit) -> int:
    pair = unit if isinstance(unit, BitPair) else unit[0]
    return pair.hi ^ pair.lo


def ml_guesser(strategy: AttackStrategy) -> dict[tuple, object]:
    """Observation -> most likely unit (first unit wins ties)."""
    units, observations, cond = conditional_table(strategy)
    return {o: units[int(np.argmax(cond[:, j]))] for j, o in enumerate(observations)}


def _decode(variant, announced, measured):
    return densecode.DECODERS[variant](announced, measured)


def detection_by_unit(strategy: AttackStrategy) -> dict:
    """Per-unit probability that a check unit decodes wrongly after the attack."""
    out = {}
    for unit in _units(strategy):
        p_err = 0.0
        for _, p, post in intercept_branches(strategy, _encoded(strategy, unit)):
            for (a, m), q in densecode.branch_distribution(strategy.variant, post).items():
                if q > 0 and _decode(strategy.variant, a, m) != unit:
                    p_err += p * q
        out[unit] = p_err
    return out


def detection_probability(strategy: AttackStrategy) -> float:
    """Error probability of one check unit, averaged over uniform units."""
    per = detection_by_unit(strategy)
    return sum(per.values()) / len(per)


def abort_probability(per_unit: float, check_units: int, threshold: float = 0.05) -> float:
    """P(error rate over ``check_units`` independent units exceeds ``threshold``)."""
    return sum(
        math.comb(check_units, k) * per_unit**k * (1 - per_unit) ** (check_units - k)
        for k in range(check_units + 1)
        if k / check_units > threshold
    )


# ------------------------------------------------------------ Monte Carlo


def sigma3(p: float, n: int) -> float:
    return 3.0 * math.sqrt(p * (1.0 - p) / n)


@dataclass
class AttackReport:
    strategy: AttackStrategy
    exact: dict
    empirical: dict = field(default_factory=dict)
    trials: int = 0
    seed: int | None = None

    def to_json(self) -> dict:
        s = self.strategy
        return {
            "version": 1,
            "strategy": {"name": s.name, "apply_h": s.apply_h, "basis": s.basis,
                         "resend": s.resend, "variant": s.variant},
            "exact": self.exact,
            "empirical": self.empirical,
            "trials": self.trials,
            "seed": self.seed,
        }


def exact_report(strategy: AttackStrategy, check_units: int = 8, threshold: float = 0.05) -> dict:
    detect = detection_probability(strategy)
    out = {
        "mi_bits": mutual_information(strategy),
        "accuracy": guess_accuracy(strategy),
        "xor_accuracy": guess_accuracy(strategy, xor_bit),
        "detect_per_unit": detect,
        "check_units": check_units,
        "abort_probability": abort_probability(detect, check_units, threshold),
    }
    return {k: (float(f"{v:.15g}") if isinstance(v, float) else v) for k, v in out.items()}


def run_attack_scenario(
    strategy: AttackStrategy,
    trials: int,
    rng: np.random.Generator,
    check_units: int = 8,
    threshold: float = 0.05,
    seed: int | None = None,
) -> AttackReport:
    """Monte Carlo over ``trials`` single-unit transmissions under attack.

    Each trial draws a uniform unit, encodes it on a fresh GHZ state, lets
    the attacker intercept and resend, then runs the honest measurements
    and decoding. Consecutive blocks of ``check_units`` trials are scored as
    one check round for the abort rate.
    """
    if trials < 1:
        raise InvalidArgument("trials must be at least 1")
    units = _units(strategy)
    encoded = [_encoded(strategy, u) for u in units]
    guesser = ml_guesser(strategy)
    layout = strategy.layout
    variant = strategy.variant

    picks = rng.integers(0, len(units), size=trials)
    obs_counts: Counter = Counter()
    correct = xor_correct = errors = 0
    err_flags = np.zeros(trials, dtype=bool)
    for t in range(trials):
        unit = units[picks[t]]
        obs, state = intercept_sample(strategy, encoded[picks[t]], rng)
        obs_counts[obs] += 1
        guess = guesser[obs]
        correct += guess == unit
        xor_correct += xor_bit(guess) == xor_bit(unit)
        m, state, _ = qcore.measure(state, layout.receiver_qubits, layout.receiver_basis, rng)
        a, state, _ = qcore.measure(state, layout.announcer_qubits, layout.announcer_basis, rng)
        if _decode(variant, a.label, m.label) != unit:
            errors += 1
            err_flags[t] = True

    n_runs = trials // check_units
    if n_runs:
        per_run = err_flags[: n_runs * check_units].reshape(n_runs, check_units).sum(axis=1)
        abort_rate = float(np.mean(per_run / check_units > threshold))
    else:
        abort_rate = None
    empirical = {
        "accuracy": correct / trials,
        "xor_accuracy": xor_correct / trials,
        "detect_per_unit": errors / trials,
        "abort_rate": abort_rate,
        "runs": n_runs,
        "observations": {"".join(o) or "-": c / trials for o, c in sorted(obs_counts.items())},
    }
    return AttackReport(strategy, exact_report(strategy, check_units, threshold), empirical, trials, seed)
