import numpy as np
import pytest

from iqot.bitmath import BitString
from iqot.errors import BoundsError, DimensionError, StateError
from iqot.quantum import Basis, assert_all_measured, measure, prepare

C, H = Basis.COMPUTATIONAL, Basis.HADAMARD


def test_prepare_examples():
    reg = prepare(BitString.from_str("101"), [C, C, C])
    assert len(reg) == 3 and reg.unmeasured() == [0, 1, 2]
    assert len(prepare(BitString(()), [])) == 0
    with pytest.raises(DimensionError):
        prepare(BitString.from_str("10"), [C])


def test_same_basis_readout_is_deterministic():
    rng = np.random.default_rng(0)
    for basis in (C, H):
        for bit in (0, 1):
            reg = prepare(BitString((bit,) * 50), [basis] * 50)
            assert all(measure(reg, i, basis, rng) == bit for i in range(50))


def test_cross_basis_is_a_fair_coin():
    rng = np.random.default_rng(1)
    for bit in (0, 1):
        reg = prepare(BitString((bit,) * 10_000), [C] * 10_000)
        mean = np.mean([measure(reg, i, H, rng) for i in range(10_000)])
        assert 0.47 <= mean <= 0.53


def test_measure_once_and_bounds():
    rng = np.random.default_rng(2)
    reg = prepare(BitString.from_str("01"), [C, H])
    measure(reg, 0, C, rng)
    assert reg.is_measured(0) and not reg.is_measured(1)
    with pytest.raises(StateError):
        measure(reg, 0, C, rng)
    with pytest.raises(BoundsError):
        measure(reg, 2, C, rng)


def test_assert_all_measured_examples():
    rng = np.random.default_rng(3)
    reg = prepare(BitString.from_str("110"), [C, H, C])
    assert not assert_all_measured(reg)
    measure(reg, 0, C, rng)
    measure(reg, 1, C, rng)
    assert not assert_all_measured(reg)
    measure(reg, 2, H, rng)
    assert assert_all_measured(reg)


def test_basis_parse():
    assert Basis.parse("hadamard") is H and Basis.parse("c") is C and Basis.parse(1) is H
    with pytest.raises(ValueError):
        Basis.parse("diagonal")


def test_register_hides_preparation():
    reg = prepare(BitString.from_str("1"), [H])
    public = [name for name in dir(reg) if not name.startswith("_")]
    assert sorted(public) == ["is_measured", "measure", "session_tag", "unmeasured"]
