from itertools import product

import numpy as np
import pytest

from iqot.bitmath import BitString, xor_all
from iqot.errors import BoundsError, DomainError, StateError
from iqot.hashing import eval_index_hash
from iqot.protocols import (
    HonestBob,
    SessionConfig,
    SessionRngs,
    Transcript,
    party_rng,
    run_identification,
    run_kot_chain,
    run_leaky_rot,
    run_ot_from_rot,
    run_rot,
    run_srot,
    run_string_rot,
    srot_index_bits,
)
from iqot.protocols.engine import Session
from iqot.quantum import Basis, prepare

B = BitString.from_str


def rngs(seed, trial=0):
    return SessionRngs.from_seed(seed, 0, trial)


# ------------------------------------------------------------------- engine


def test_party_streams_are_split_and_reproducible():
    a = party_rng(5, "alice").integers(0, 2**32, size=4)
    b = party_rng(5, "bob").integers(0, 2**32, size=4)
    assert list(a) == list(party_rng(5, "alice").integers(0, 2**32, size=4))
    assert list(a) != list(b)
    assert list(party_rng(5, "alice", 0, 1).integers(0, 2**32, size=4)) != list(a)


def test_config_validation_and_roundtrip():
    with pytest.raises(DomainError):
        SessionConfig(q=6)
    with pytest.raises(DomainError):
        SessionConfig(ideal={"magic"})
    with pytest.raises(DomainError):
        SessionConfig().rngs()
    cfg = SessionConfig(k=8, ideal={"rot"}, seed=3)
    assert SessionConfig.from_dict(cfg.to_dict()) == cfg


def test_qubits_only_inside_subprotocol():
    session = Session(SessionConfig(seed=0))
    with pytest.raises(StateError):
        session.transfer("alice", "bob", prepare(B("1"), [Basis.COMPUTATIONAL]))


def test_transcript_roundtrip_and_no_preparation_data():
    result = run_string_rot(SessionConfig(seed=1), 0, rngs(1))
    text = result.transcript.dumps()
    back = Transcript.loads(text)
    assert back.dumps() == text
    for event in back.of_kind("qubits"):
        assert set(event.payload) == {"count"}
    assert "gammas" not in text


def test_outputs_appear_once_per_party():
    result = run_rot(SessionConfig(seed=2), 1, rngs(2))
    outputs = result.transcript.of_kind("output")
    assert sorted(e.sender for e in outputs) == ["alice", "bob"]


def test_every_transfer_closed_by_boundary():
    for runner in (
        lambda: run_srot(SessionConfig(k=8, seed=4), 5, rngs(4)),
        lambda: run_identification(SessionConfig(k=4, seed=4), 2, 2, rngs(4)),
    ):
        events = runner().transcript.events
        open_transfers = 0
        for e in events:
            if e.kind == "qubits":
                open_transfers += 1
            elif e.kind == "boundary" and e.label == "leaky-rot":
                assert open_transfers == 1
                open_transfers = 0
            assert e.kind != "abort"
        assert open_transfers == 0


# --------------------------------------------------------------- leaky ROT


def test_leaky_rot_delivers_chosen_string():
    cfg = SessionConfig(ell=4, n=24, q=4)
    ok = {0: 0, 1: 0}
    for d in (0, 1):
        for i in range(1000):
            result = run_leaky_rot(cfg, d, rngs(2024, i))
            s, t = result.alice
            ok[d] += result.bob == (t if d else s)
            assert ("decode-failure" in result.flags) == (result.bob != (t if d else s))
    assert ok[0] / 1000 >= 0.95 and ok[1] / 1000 >= 0.95


def test_gamma_coins_fair():
    cfg = SessionConfig(ell=4, n=24, q=4)
    fractions = []
    for i in range(1000):
        result = run_leaky_rot(cfg, 0, rngs(77, i))
        gammas = result.audit["leaky"][0]["gammas"]
        fractions.append(gammas.count(0) / len(gammas))
    assert 0.45 <= np.mean(fractions) <= 0.55


def test_block_layout_shares_basis():
    cfg = SessionConfig(ell=4, n=8, q=4)
    result = run_leaky_rot(cfg, 0, rngs(3), bob=HonestBob(0))
    assert result.transcript.of_kind("qubits")[0].payload["count"] == 16


def test_ideal_leaky_binding():
    cfg = SessionConfig(ideal={"leaky"})
    for d in (0, 1):
        result = run_leaky_rot(cfg, d, rngs(9))
        assert result.bob == result.alice[d]
        assert not result.transcript.of_kind("qubits")


# -------------------------------------------------------------- string ROT


def test_string_rot_correct_and_truncated():
    cfg = SessionConfig(ell=6, ell_prime=3, n=24)
    for d in (0, 1):
        for i in range(30):
            result = run_string_rot(cfg, d, rngs(10, i))
            a0, a1 = result.alice
            assert len(a0) == len(a1) == 3
            if not result.flags:
                assert result.bob == (a1 if d else a0)


def test_hashes_sent_before_qubits():
    events = run_string_rot(SessionConfig(seed=0), 0, rngs(0)).transcript.events
    kinds = [(e.kind, e.label) for e in events]
    assert kinds.index(("message", "F")) < kinds.index(("qubits", "q0"))
    assert kinds.index(("message", "G")) < kinds.index(("qubits", "q0"))


def test_string_rot_outputs_uniform_over_family_with_ideal_leaky():
    cfg = SessionConfig(ell=3, ell_prime=2, r=2, ideal={"leaky"})
    counts = {}
    for i in range(4000):
        a0, a1 = run_string_rot(cfg, 0, rngs(12, i)).alice
        counts[a0] = counts.get(a0, 0) + 1
    freq = np.array(list(counts.values())) / 4000
    assert len(counts) == 4 and np.all(np.abs(freq - 0.25) < 0.03)


# ----------------------------------------------------------------------- OT


def test_ot_with_ideal_rot_every_input():
    cfg = SessionConfig(ell=2, ell_prime=2, ideal={"rot"})
    strings = [BitString.from_int(v, 2) for v in range(4)]
    for a0, a1, d in product(strings, strings, (0, 1)):
        assert run_ot_from_rot(cfg, a0, a1, d, rngs(1)).bob == (a1 if d else a0)


def test_ot_equal_inputs_same_output():
    cfg = SessionConfig(ell=3, ideal={"rot"})
    x = B("101")
    assert run_ot_from_rot(cfg, x, x, 0, rngs(4)).bob == run_ot_from_rot(cfg, x, x, 1, rngs(4)).bob == x


def test_ot_over_real_rot():
    cfg = SessionConfig(ell=4, ell_prime=2)
    good = 0
    for i in range(40):
        result = run_ot_from_rot(cfg, B("01"), B("10"), 1, rngs(6, i))
        good += result.bob == B("10")
    assert good >= 36


# ---------------------------------------------------------------------- kOT


@pytest.mark.parametrize("variant", ["k", "k-1"])
def test_kot_chain_every_choice(variant):
    for k in range(2, 9):
        cfg = SessionConfig(k=k, ell=3, ideal={"ot"}, kot_variant=variant)
        xs = [BitString.from_int(int(v), 3) for v in party_rng(k, "auditor").permutation(8)[:k]]
        for d in range(1, k + 1):
            assert run_kot_chain(cfg, xs, d, rngs(k, d)).bob == xs[d - 1]


def test_kot_first_choice_uses_empty_prefix():
    cfg = SessionConfig(k=4, ell=2, ideal={"ot"})
    xs = [B("01"), B("10"), B("11"), B("00")]
    result = run_kot_chain(cfg, xs, 1, rngs(0))
    assert result.audit["kot"][0]["received"][0] == xs[0]


def test_kot_rejects_bad_choice():
    cfg = SessionConfig(k=3, ell=2, ideal={"ot"}, seed=0)
    with pytest.raises(BoundsError):
        run_kot_chain(cfg, [B("00")] * 3, 4)


# --------------------------------------------------------------------- sROT


def test_srot_table_rows():
    cfg = SessionConfig(k=8, ell=3, ideal={"rot"})
    result = run_srot(cfg, 3, rngs(5))
    pairs = []
    for e in result.transcript.of_kind("ideal"):
        assert e.label == "rot"
    # recompute the ROT pairs from Alice's stream: three ideal ROTs, two strings each
    alice = rngs(5).alice
    for _ in range(3):
        pairs.append((BitString.random(3, alice), BitString.random(3, alice)))
    assert result.alice[0] == xor_all((p[0] for p in pairs), 3)
    assert result.alice[7] == xor_all((p[1] for p in pairs), 3)
    for index in range(1, 9):
        bits = srot_index_bits(index, 8)
        assert result.alice[index - 1] == xor_all((pairs[j][b] for j, b in enumerate(bits)), 3)


def test_srot_correct_with_ideal_rot():
    for k in (2, 4, 8):
        cfg = SessionConfig(k=k, ell=3, ideal={"rot"})
        for d in range(1, k + 1):
            result = run_srot(cfg, d, rngs(k, d))
            assert result.bob == result.alice[d - 1]


def test_srot_index_bits_lsb_first():
    assert srot_index_bits(1, 4) == [0, 0]
    assert srot_index_bits(2, 4) == [1, 0]
    assert srot_index_bits(4, 4) == [1, 1]


# ----------------------------------------------------------- identification


def test_identification_matching_passwords_accept():
    cfg = SessionConfig(k=4, ell=8, ideal={"srot"})
    for i in range(200):
        w = 1 + i % 4
        assert run_identification(cfg, w, w, rngs(21, i)).bob == 1


def test_identification_mismatch_rate():
    cfg = SessionConfig(k=4, ell=8, ideal={"srot"})
    trials = 10_000
    accepts = 0
    for i in range(trials):
        w_a = 1 + i % 4
        w_b = 1 + (i + 1 + (i // 4) % 3) % 4
        accepts += run_identification(cfg, w_a, w_b, rngs(31, i)).bob
    rate = accepts / trials
    sigma = np.sqrt(max(rate * (1 - rate), 1 / trials) / trials)
    assert rate <= 16 / 256 + 3 * sigma


def test_identification_reply_recomputed():
    cfg = SessionConfig(k=4, ell=6, ideal={"srot"})
    result = run_identification(cfg, 3, 2, rngs(8))
    msgs = {e.label: e.payload for e in result.transcript.of_kind("message")}
    alice = rngs(8).alice
    strings = [BitString.random(6, alice) for _ in range(4)]
    assert msgs["z"] == strings[2] ^ eval_index_hash(msgs["h"], 3)
    assert result.bob == int(msgs["z"] == strings[1] ^ eval_index_hash(msgs["h"], 2))


def test_kot_bound_identification_matches_srot_bound():
    srot_cfg = SessionConfig(k=4, ell=5, ideal={"srot"})
    kot_cfg = SessionConfig(k=4, ell=5, ideal={"kot"})
    for i in range(300):
        w_a, w_b = 1 + i % 4, 1 + (i // 4) % 4
        g1 = run_identification(srot_cfg, w_a, w_b, rngs(40, i), binding="srot").bob
        g2 = run_identification(kot_cfg, w_a, w_b, rngs(40, i), binding="kot").bob
        assert g1 == g2


def test_identification_over_real_srot():
    cfg = SessionConfig(k=4, ell=4, ell_prime=4)
    results = [run_identification(cfg, 2, 2, rngs(50, i)) for i in range(20)]
    assert sum(r.bob for r in results if not r.flags) == sum(not r.flags for r in results)


def test_password_bounds():
    cfg = SessionConfig(k=4, ideal={"srot"}, seed=0)
    with pytest.raises(BoundsError):
        run_identification(cfg, 0, 1)
