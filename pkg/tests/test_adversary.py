import math
from collections import defaultdict

import numpy as np
import pytest

from qdcsim import adversary, densecode, proto
from qdcsim.adversary import AttackStrategy
from qdcsim.densecode import BitPair
from qdcsim.errors import InvalidArgument
from qdcsim.identities import H_ENCODED

from conftest import ket, within_3sigma

PAIRS = ["00", "01", "10", "11"]
R = 1 / math.sqrt(2)

# Encoded A,T,B registers written out by hand, without H.
PLAIN_ENCODED = {
    "00": {"000": R, "111": R},
    "01": {"100": R, "011": R},
    "10": {"100": -R, "011": R},
    "11": {"000": R, "111": -R},
}


def literal_obs(amps: dict) -> dict:
    """Joint Z outcomes of qubits A and T from a literal ket expansion."""
    out = defaultdict(float)
    for bits, a in amps.items():
        out[(bits[0], bits[1])] += abs(a) ** 2
    return {k: v for k, v in out.items() if v > 1e-14}


def mi_from_table(table):
    """I(X;Y) from rows P[y|x] under a uniform prior, plain Python."""
    n = len(table)
    cols = len(table[0])
    py = [sum(row[j] for row in table) / n for j in range(cols)]
    mi = 0.0
    for row in table:
        for j, p in enumerate(row):
            if p > 0:
                mi += p / n * math.log2(p / py[j])
    return mi


def accuracy_from_table(table):
    n = len(table)
    return sum(max(row[j] for row in table) for j in range(len(table[0]))) / n


def literal_table(literals):
    dists = [literal_obs(literals[p]) for p in PAIRS]
    keys = sorted({k for d in dists for k in d})
    return [[d.get(k, 0.0) for k in keys] for d in dists]


def h_amplitudes(pair):
    vec = H_ENCODED[pair].amps
    return {format(i, "03b"): a for i, a in enumerate(vec) if abs(a) > 1e-14}


# ------------------------------------------------------------ oracle sanity


def test_table_oracles_on_perfect_channel():
    eye = np.eye(4).tolist()
    assert mi_from_table(eye) == pytest.approx(2.0)
    assert accuracy_from_table(eye) == pytest.approx(1.0)
    flat = [[0.25] * 4] * 4
    assert mi_from_table(flat) == pytest.approx(0.0, abs=1e-15)
    assert accuracy_from_table(flat) == pytest.approx(0.25)


# ------------------------------------------------------------ zlw distributions


def test_zlw_with_h_examples():
    assert adversary.zlw_observation_distribution("00", True) == pytest.approx(
        {(a, t): 0.25 for a in "01" for t in "01"})
    d = adversary.zlw_observation_distribution("10", True)
    assert set(d) == {("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")}


def test_zlw_without_h_examples():
    assert adversary.zlw_observation_distribution("00", False) == pytest.approx(
        {("0", "0"): 0.5, ("1", "1"): 0.5})
    assert adversary.zlw_observation_distribution("01", False) == pytest.approx(
        {("1", "0"): 0.5, ("0", "1"): 0.5})


@pytest.mark.parametrize("pair", PAIRS)
def test_h_encoded_literals_match_simulation(pair):
    by_hand = defaultdict(float)
    for bits, a in PLAIN_ENCODED[pair].items():
        sign = -1 if bits[0] == "1" else 1
        by_hand["0" + bits[1:]] += R * a
        by_hand["1" + bits[1:]] += sign * R * a
    assert ket(*by_hand.items()) == pytest.approx(H_ENCODED[pair].amps, abs=1e-12)
    lit = literal_obs(h_amplitudes(pair))
    sim = adversary.zlw_observation_distribution(pair, True)
    assert set(lit) == set(sim)
    for k in lit:
        assert abs(lit[k] - sim[k]) < 1e-12


@pytest.mark.parametrize("pair", PAIRS)
def test_plain_literals_match_simulation(pair):
    lit = literal_obs(PLAIN_ENCODED[pair])
    sim = adversary.zlw_observation_distribution(pair, False)
    assert set(lit) == set(sim)
    for k in lit:
        assert abs(lit[k] - sim[k]) < 1e-12


def test_mi_and_accuracy_against_literal_oracle():
    h_tab = literal_table({p: h_amplitudes(p) for p in PAIRS})
    plain_tab = literal_table(PLAIN_ENCODED)
    assert mi_from_table(h_tab) == pytest.approx(0.0, abs=1e-12)
    assert mi_from_table(plain_tab) == pytest.approx(1.0, abs=1e-12)
    assert adversary.mutual_information(adversary.zlw("p1", True)) == 0.0
    assert adversary.mutual_information(adversary.zlw("p1", False)) == pytest.approx(1.0, abs=1e-12)
    assert adversary.guess_accuracy(adversary.zlw("p1", True)) == pytest.approx(accuracy_from_table(h_tab))
    assert adversary.guess_accuracy(adversary.zlw("p1", False)) == pytest.approx(
        accuracy_from_table(plain_tab))
    assert accuracy_from_table(h_tab) == pytest.approx(0.25)
    assert accuracy_from_table(plain_tab) == pytest.approx(0.5)


def test_xor_fully_recovered_without_h():
    assert adversary.guess_accuracy(adversary.zlw("p1", False), adversary.xor_bit) == pytest.approx(1.0)
    assert adversary.guess_accuracy(adversary.zlw("p1", True), adversary.xor_bit) == pytest.approx(0.5)


def test_zlw_p2_matches_p1():
    for h in (True, False):
        a, b = adversary.zlw("p1", h), adversary.zlw("p2", h)
        assert adversary.mutual_information(a) == pytest.approx(adversary.mutual_information(b), abs=1e-12)
        assert adversary.guess_accuracy(a) == pytest.approx(adversary.guess_accuracy(b))
    for pair in densecode.ALL_PAIRS:
        assert adversary.observation_distribution(adversary.zlw("p2", True), pair) == pytest.approx(
            {(a, t): 0.25 for a in "01" for t in "01"})


# ------------------------------------------------------------ detection


@pytest.mark.parametrize("variant", proto.VARIANTS)
@pytest.mark.parametrize("basis", ["Z", "X"])
def test_intercept_detection_half(variant, basis):
    strat = adversary.eve(variant, basis)
    assert adversary.detection_probability(strat) == pytest.approx(0.5, abs=1e-12)
    assert adversary.mutual_information(strat) <= 1.0 + 1e-12


@pytest.mark.parametrize("variant", proto.VARIANTS)
@pytest.mark.parametrize("basis", ["Z", "X"])
def test_some_unit_detected_with_quarter_or_more(variant, basis):
    per = adversary.detection_by_unit(adversary.eve(variant, basis))
    assert max(per.values()) >= 0.25


def test_eve_z_learns_nothing_from_p1():
    assert adversary.mutual_information(adversary.eve("p1", "Z")) == 0.0


def test_zlw_detection_values():
    assert adversary.detection_probability(adversary.zlw("p1", False)) == pytest.approx(0.5)
    assert adversary.detection_probability(adversary.zlw("p1", True)) == pytest.approx(0.75)


def test_no_attack_is_invisible():
    assert adversary.detection_probability(adversary.NO_ATTACK) == 0.0
    assert adversary.abort_probability(0.0, 8) == 0.0


def test_abort_closed_form():
    for c in (1, 4, 8, 16):
        assert adversary.abort_probability(0.5, c, 0.05) == pytest.approx(1 - 0.5**c)
    # 2 of 20 errors needed at 10% threshold... strictly above: >2
    p = 0.3
    exact = 1 - sum(math.comb(20, k) * p**k * (1 - p) ** (20 - k) for k in range(3))
    assert adversary.abort_probability(p, 20, 0.1) == pytest.approx(exact)
    assert adversary.abort_probability(0.5, 8) >= 0.99


def test_strategy_validation():
    with pytest.raises(InvalidArgument):
        AttackStrategy("mitm")
    with pytest.raises(InvalidArgument):
        AttackStrategy("zlw-p1", variant="p2")
    with pytest.raises(InvalidArgument):
        adversary.eve("p1", "Y")
    with pytest.raises(InvalidArgument):
        AttackStrategy("none", resend="fresh")
    with pytest.raises(InvalidArgument):
        adversary.run_attack_scenario(adversary.NO_ATTACK, 0, np.random.default_rng())


# ------------------------------------------------------------ Monte Carlo


@pytest.mark.parametrize("apply_h", [True, False])
def test_monte_carlo_within_3sigma(apply_h):
    strat = adversary.zlw("p1", apply_h)
    n = 10_000
    rep = adversary.run_attack_scenario(strat, n, np.random.default_rng(11), check_units=8)
    for key in ("accuracy", "xor_accuracy", "detect_per_unit"):
        assert within_3sigma(rep.empirical[key], rep.exact[key], n), key
    runs = rep.empirical["runs"]
    assert within_3sigma(rep.empirical["abort_rate"], rep.exact["abort_probability"], runs)


def test_monte_carlo_observation_frequencies():
    n = 10_000
    rep = adversary.run_attack_scenario(adversary.zlw("p1", True), n, np.random.default_rng(3))
    for key, freq in rep.empirical["observations"].items():
        assert within_3sigma(freq, 0.25, n), key


def test_single_trial_smoke():
    rep = adversary.run_attack_scenario(adversary.eve("mp1"), 1, np.random.default_rng(0))
    assert rep.trials == 1 and rep.empirical["abort_rate"] is None
    assert rep.to_json()["strategy"]["variant"] == "mp1"


def test_report_replay():
    a = adversary.run_attack_scenario(adversary.zlw("p2"), 200, np.random.default_rng(5), seed=5)
    b = adversary.run_attack_scenario(adversary.zlw("p2"), 200, np.random.default_rng(5), seed=5)
    assert a.to_json() == b.to_json()


def test_intercept_branches_sum_to_one():
    for strat in (adversary.zlw("p1"), adversary.eve("mp2", "X"), adversary.NO_ATTACK):
        for unit in densecode.message_units(strat.variant):
            total = sum(p for _, p, _ in adversary.intercept_branches(
                strat, densecode.encoded_state(strat.variant, *(
                    (unit, 0) if isinstance(unit, BitPair) else unit))))
            assert total == pytest.approx(1.0, abs=1e-12)


def test_interceptor_in_protocol_leaks_xor():
    """zlw without H reads the parity of every message pair during a real run."""
    hook = adversary.Interceptor(adversary.zlw("p1", apply_h=False))
    msg = [0, 1, 1, 1, 0, 0, 1, 0]
    cfg = proto.ProtocolConfig("p1", msg, seed=2, ecc="identity", check_count=1, reserve_fraction=0)
    tr = proto.run_protocol(cfg, proto.honest_shared("p1", cfg.states_needed()), hook)
    checks = set(next(e for e in tr.events if e["kind"] == "announced" and e["party"] == "alice")
                 ["payload"]["positions"])
    parities = [int(a != t) for u, (a, t) in enumerate(hook.observations) if u not in checks]
    assert parities == [msg[i] ^ msg[i + 1] for i in range(0, len(msg), 2)]
