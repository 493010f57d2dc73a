import math
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iqot.bitmath import (
    BitString,
    FiniteDistribution,
    NdlFunction,
    conditional_min_entropy,
    enumerate_ndlfs,
    inner_product,
    min_entropy,
    ndlf_eval,
    smoothed_min_entropy,
    smoothing_cap,
    statistical_distance,
    verify_two_balanced,
    xor_all,
)
from iqot.errors import DimensionError, DomainError

B = BitString.from_str


def bitstrings(length):
    return st.tuples(*[st.integers(0, 1)] * length).map(BitString)


# ------------------------------------------------------------------ BitString


def test_msb_first_int_roundtrip():
    assert str(BitString.from_int(6, 3)) == "110"
    assert BitString.from_int(6, 3).to_int() == 6
    assert BitString.from_int(1, 4).hex() == "1"
    assert BitString.from_hex("a", 4) == B("1010")


def test_bits_validated():
    with pytest.raises(DomainError):
        BitString((0, 2))
    with pytest.raises(DomainError):
        BitString.from_int(8, 3)


def test_xor_requires_equal_lengths():
    with pytest.raises(DimensionError):
        B("101") ^ B("10")


def test_bitstring_is_immutable():
    s = B("101")
    with pytest.raises(AttributeError):
        s.bits = (0, 0, 0)


def test_empty_xor_is_zero():
    assert xor_all([], 3) == B("000")


def test_blocks_split():
    assert B("110010").blocks(2) == [B("11"), B("00"), B("10")]
    with pytest.raises(DimensionError):
        B("101").blocks(2)


@given(st.integers(1, 16).flatmap(lambda n: st.tuples(bitstrings(n), bitstrings(n))))
def test_xor_self_inverse(pair):
    a, b = pair
    assert (a ^ b) ^ b == a
    assert (a ^ a).is_zero()


@given(st.integers(0, 2**12 - 1))
def test_hex_roundtrip(value):
    s = BitString.from_int(value, 12)
    assert BitString.from_hex(s.hex(), 12) == s


# ------------------------------------------------------------ inner products


def test_inner_product_examples():
    assert inner_product(B("1010"), B("1100")) == 1
    for s in product((0, 1), repeat=4):
        assert inner_product(B("0000"), BitString(s)) == 0


def test_kernel_of_nonzero_vector_has_half_the_strings():
    u = B("0110")
    zeros = sum(inner_product(u, BitString(s)) == 0 for s in product((0, 1), repeat=4))
    assert zeros == 8


def test_ndlf_examples():
    assert ndlf_eval(NdlFunction(B("1"), B("1")), B("1"), B("1")) == 0
    assert ndlf_eval(NdlFunction(B("10"), B("01")), B("10"), B("10")) == 1


def test_ndlf_rejects_zero_vectors():
    with pytest.raises(DomainError):
        NdlFunction(B("00"), B("01"))
    with pytest.raises(DomainError):
        NdlFunction(B("01"), B("00"))


def test_each_ndlf_balanced_in_second_argument_at_three_bits():
    strings = [BitString.from_int(v, 3) for v in range(8)]
    for beta in enumerate_ndlfs(3):
        for s0 in strings:
            assert sum(beta(s0, s1) for s1 in strings) == 4


def test_ndlf_counts():
    assert len(list(enumerate_ndlfs(2))) == 9
    assert len(list(enumerate_ndlfs(4))) == 225


def test_two_balanced_all_small():
    assert all(verify_two_balanced(b) for b in enumerate_ndlfs(2))
    assert all(verify_two_balanced(b) for b in enumerate_ndlfs(4))


def test_degenerate_function_not_two_balanced():
    beta = NdlFunction.unchecked(B("01"), B("00"))
    assert not verify_two_balanced(beta)


# ------------------------------------------------------------- distributions


def test_distribution_validation():
    with pytest.raises(DomainError):
        FiniteDistribution({0: 0.5, 1: 0.4})
    with pytest.raises(DomainError):
        FiniteDistribution({0: 1.5, 1: -0.5})
    d = FiniteDistribution({0: 0.5, 1: 0.5 + 1e-12})
    assert math.isclose(d[1], 0.5)


def test_statistical_distance_examples():
    u = FiniteDistribution.uniform([0, 1])
    assert statistical_distance(u, u) == 0
    assert statistical_distance(FiniteDistribution.point(0), u) == pytest.approx(1.0)
    assert statistical_distance(FiniteDistribution.point(0), FiniteDistribution.point(1)) == 2.0


@given(st.lists(st.floats(0.01, 1), min_size=2, max_size=6), st.lists(st.floats(0.01, 1), min_size=2, max_size=6))
def test_distance_symmetric_and_bounded(a, b):
    p = FiniteDistribution({i: x / sum(a) for i, x in enumerate(a)})
    q = FiniteDistribution({i: x / sum(b) for i, x in enumerate(b)})
    d = statistical_distance(p, q)
    assert d == pytest.approx(statistical_distance(q, p))
    assert -1e-12 <= d <= 2 + 1e-12


def test_distance_invariant_under_relabeling():
    p = FiniteDistribution({"a": 0.5, "b": 0.3, "c": 0.2})
    q = FiniteDistribution({"a": 0.2, "b": 0.2, "c": 0.6})
    relabel = {"a": 7, "b": 3, "c": 5}
    assert statistical_distance(p, q) == pytest.approx(
        statistical_distance(p.map(relabel.get), q.map(relabel.get))
    )


def test_min_entropy_examples():
    assert min_entropy(FiniteDistribution.uniform(range(8))) == pytest.approx(3)
    assert min_entropy(FiniteDistribution.point("x")) == 0
    assert min_entropy(FiniteDistribution({0: 0.5, 1: 0.25, 2: 0.25})) == pytest.approx(1)


def test_conditional_min_entropy_examples():
    indep = FiniteDistribution.uniform(list(product(range(4), range(3))))
    assert conditional_min_entropy(indep) == pytest.approx(2)
    equal = FiniteDistribution.uniform([(i, i) for i in range(4)])
    assert conditional_min_entropy(equal) == pytest.approx(0)
    table = FiniteDistribution({(0, 0): 0.5, (1, 0): 0.25, (0, 1): 0.25})
    # P(x=0 | y=1) = 1 dominates
    assert conditional_min_entropy(table) == pytest.approx(0)


def test_smoothed_min_entropy_examples():
    p = FiniteDistribution({0: 0.5, 1: 0.25, 2: 0.25})
    assert smoothed_min_entropy(p, 0) == pytest.approx(min_entropy(p))
    assert smoothed_min_entropy(p, 0.25) == pytest.approx(2.0)
    assert smoothed_min_entropy(FiniteDistribution.point(0), 0.5) == pytest.approx(1.0)


@given(st.lists(st.floats(0.01, 1), min_size=1, max_size=8), st.floats(0, 0.9))
def test_cap_removes_at_most_eps(masses, eps):
    p = FiniteDistribution({i: m / sum(masses) for i, m in enumerate(masses)})
    lam = smoothing_cap(p, eps)
    removed = math.fsum(max(x - lam, 0) for _, x in p.items())
    assert removed <= eps + 1e-9
    assert smoothed_min_entropy(p, eps) >= min_entropy(p) - 1e-9
