import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iqot.bitmath import BitString
from iqot.codes import LinearCode, channel_error, code_from_seed, encode, gf2_rank, ml_decode, sample_code
from iqot.errors import DomainError

CODE = code_from_seed(4, 24, 4, 0)


def corrupt(code: LinearCode, word: BitString, rng) -> BitString:
    """q-ary symmetric channel: each block replaced by a uniform other value w.p. p_e."""
    p_e = channel_error(code.q)
    out = []
    for block in word.blocks(code.block_bits):
        value = block.to_int()
        if rng.random() < p_e:
            value = (value + int(rng.integers(1, code.q))) % code.q
        out.append(BitString.from_int(value, code.block_bits))
    return BitString(sum((b.bits for b in out), ()))


def test_channel_error_value():
    assert channel_error(4) == 0.375


def test_generator_full_rank():
    assert gf2_rank(CODE.generator) == 4
    with pytest.raises(DomainError):
        LinearCode(2, 2, 2, (0b0011, 0b0011))


def test_zero_and_identity():
    assert encode(CODE, BitString.zeros(4)).is_zero()
    ident = LinearCode.identity(3, 2)
    for v in range(64):
        s = BitString.from_int(v, 6)
        assert encode(ident, s) == s


@given(st.integers(0, 15), st.integers(0, 15))
def test_linearity(a, b):
    sa, sb = BitString.from_int(a, 4), BitString.from_int(b, 4)
    assert encode(CODE, sa) ^ encode(CODE, sb) == encode(CODE, sa ^ sb)


def test_noiseless_decode():
    for v in range(16):
        s = BitString.from_int(v, 4)
        assert ml_decode(CODE, encode(CODE, s)) == s


def test_decode_rate_over_symmetric_channel():
    rng = np.random.default_rng(2024)
    ok = 0
    for _ in range(1000):
        s = BitString.random(4, rng)
        ok += ml_decode(CODE, corrupt(CODE, encode(CODE, s), rng)) == s
    assert ok / 1000 >= 0.95


def test_ties_break_to_smallest_message():
    code = LinearCode(1, 2, 1, (0b11,))
    # observed 10 is one flip from both codewords 00 and 11
    assert ml_decode(code, BitString.from_str("10")) == BitString.from_str("0")


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1))
def test_sampled_codes_are_full_rank(seed):
    code = sample_code(6, 8, 4, np.random.default_rng(seed))
    assert gf2_rank(code.generator) == 6
    assert code.codeword_blocks.shape == (64, 8)
