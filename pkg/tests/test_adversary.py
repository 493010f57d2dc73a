import inspect

import numpy as np
import pytest

from iqot.adversary import (
    NonInteractiveIdScheme,
    alternating_plan,
    attack_non_interactive_id,
    check_accepting_input_exists,
    check_injectivity,
    codebook_scheme,
    constant_choice_scheme,
    dishonest_bob_delayed,
    dishonest_bob_single_basis,
    forge_inputs,
    half_measured_plan,
    random_scheme,
    reject_all_scheme,
    sample_fixed_hash_scheme,
    scheme_from_dict,
)
from iqot.bitmath import BitString, FiniteDistribution
from iqot.errors import AttackInapplicable, DomainError
from iqot.protocols import SessionConfig, SessionRngs, run_leaky_rot
from iqot.quantum import Basis

BITS = (BitString.from_str("0"), BitString.from_str("1"))


def toy_scheme(k, choice_fn, accept_fn, ys=(0, 1, 2)):
    def sampler(w):
        return FiniteDistribution.uniform([((x,) * k, y) for x in BITS for y in ys])

    return NonInteractiveIdScheme(k, BITS, sampler, choice_fn, accept_fn)


# --------------------------------------------------------- precondition checks


def test_injectivity_examples():
    assert check_injectivity(toy_scheme(4, lambda w, y: w, lambda w, x, y: 1))
    assert not check_injectivity(toy_scheme(4, lambda w, y: 1, lambda w, x, y: 1))
    y_hash = {0: 5, 1: 2, 2: 7}
    shifted = toy_scheme(4, lambda w, y: (w + y_hash[y]) % 4 + 1, lambda w, x, y: 1)
    assert check_injectivity(shifted)


def test_accepting_input_examples():
    assert check_accepting_input_exists(toy_scheme(3, lambda w, y: w, lambda w, x, y: 1))
    assert not check_accepting_input_exists(toy_scheme(3, lambda w, y: w, lambda w, x, y: 0))
    assert check_accepting_input_exists(codebook_scheme(2, 2, 1, np.random.default_rng(0)))


# ----------------------------------------------------------------- the attack


@pytest.mark.parametrize("seed", range(10))
def test_attack_on_fixed_hash_scheme(seed):
    scheme = sample_fixed_hash_scheme(4, 2, np.random.default_rng(seed))
    result = attack_non_interactive_id(scheme, np.random.default_rng(100 + seed))
    assert result.success
    assert result.acceptance == {1: 1, 2: 1, 3: 1, 4: 1}


def test_attack_on_binary_codebook_checked_exhaustively():
    scheme = codebook_scheme(2, 2, 1, np.random.default_rng(3))
    forced, y = forge_inputs(scheme, np.random.default_rng(4))
    for w_b in (1, 2):
        assert scheme.accept_fn(w_b, forced[scheme.choice_fn(w_b, y) - 1], y) == 1


def test_attack_names_violated_lemma():
    with pytest.raises(AttackInapplicable) as info:
        attack_non_interactive_id(constant_choice_scheme(4), np.random.default_rng(0))
    assert info.value.lemma == "injectivity"
    with pytest.raises(AttackInapplicable) as info:
        attack_non_interactive_id(reject_all_scheme(4), np.random.default_rng(0))
    assert info.value.lemma == "accepting input existence"


def test_forged_inputs_never_see_bobs_password():
    assert list(inspect.signature(forge_inputs).parameters) == ["scheme", "rng"]
    calls = []
    base = sample_fixed_hash_scheme(3, 2, np.random.default_rng(1))

    def spy_choice(w, y):
        calls.append(w)
        return base.choice_fn(w, y)

    scheme = NonInteractiveIdScheme(base.k, base.x_domain, base.sampler, spy_choice, base.accept_fn)
    forced, y = forge_inputs(scheme, np.random.default_rng(2))
    # Alice ranges over every password herself; the forged table is fixed now
    assert sorted(set(calls)) == [1, 2, 3]
    frozen = list(forced)
    attack = attack_non_interactive_id(scheme, np.random.default_rng(2))
    assert attack.forced_inputs == frozen


def test_fifty_generated_schemes_all_broken():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        scheme = random_scheme(rng)
        assert scheme.k <= 8
        assert check_injectivity(scheme) and check_accepting_input_exists(scheme)
        assert attack_non_interactive_id(scheme, rng).success


def test_scheme_descriptions():
    assert scheme_from_dict({"kind": "fixed-hash", "k": 4, "ell": 2, "seed": 1}).k == 4
    with pytest.raises(DomainError):
        scheme_from_dict({"kind": "mystery"})


# ------------------------------------------------------------ dishonest Bob


def test_single_basis_bob_recovers_branch_string():
    cfg = SessionConfig(ell=4, n=24, q=4)
    for basis, index in ((Basis.COMPUTATIONAL, 0), (Basis.HADAMARD, 1)):
        hits = 0
        for i in range(200):
            result = run_leaky_rot(cfg, 0, SessionRngs.from_seed(8, 0, i), dishonest_bob_single_basis(basis))
            hits += result.bob == result.alice[index]
        assert hits / 200 >= 0.9


def test_single_basis_measures_everything_before_output():
    cfg = SessionConfig(ell=4, n=24, q=4)
    result = run_leaky_rot(cfg, 0, SessionRngs.from_seed(1), dishonest_bob_single_basis(Basis.HADAMARD))
    kinds = [e.kind for e in result.transcript.events]
    assert kinds.index("boundary") < kinds.index("output")
    assert len(result.audit["leaky"][0]["measurements"]) == 48


def test_half_measured_plan_aborts():
    cfg = SessionConfig(ell=4, n=8, q=4)
    result = run_leaky_rot(cfg, 0, SessionRngs.from_seed(1), dishonest_bob_delayed(half_measured_plan))
    assert result.aborted and "abort" in result.flags
    assert result.transcript.of_kind("abort")[0].payload == {"unmeasured": 8}


def test_alternating_plan_is_valid():
    cfg = SessionConfig(ell=4, n=8, q=4)
    bob = dishonest_bob_delayed(alternating_plan(cfg.block_bits))
    result = run_leaky_rot(cfg, 0, SessionRngs.from_seed(1), bob)
    assert not result.aborted
    bases = [b for _, b, _ in result.audit["leaky"][0]["measurements"]]
    assert bases == [(i // 2) % 2 for i in range(16)]
