"""t-wise independent hash families: random degree-(t-1) polynomials over GF(2^a).

A field element is an ``int`` whose bit i is the coefficient of X^i. Inputs are
encoded by ``BitString.to_int`` (zero-padded to a bits) and outputs are the low
``out_bits`` bits of the polynomial value.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .bitmath import BitString
from .errors import DimensionError, DomainError, FeasibilityError

# Low-weight irreducible polynomials, including the X^a term.
IRREDUCIBLE = {
    1: 0b11,  # x + 1
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10000011,  # x^7 + x + 1
    8: 0b100011011,  # x^8 + x^4 + x^3 + x + 1
    9: 0b1000010001,  # x^9 + x^4 + 1
    10: 0b10000001001,  # x^10 + x^3 + 1
    11: 0b100000000101,  # x^11 + x^2 + 1
    12: 0b1000000001001,  # x^12 + x^3 + 1
    13: 0b10000000011011,  # x^13 + x^4 + x^3 + x + 1
    14: 0b100000000100001,  # x^14 + x^5 + 1
    15: 0b1000000000000011,  # x^15 + x + 1
    16: 0b10000000000101011,  # x^16 + x^5 + x^3 + x + 1
}


def gf_mul(x: int, y: int, a: int) -> int:
    """Multiply two elements of GF(2^a)."""
    try:
        modulus = IRREDUCIBLE[a]
    except KeyError:
        raise DomainError(f"no field table for GF(2^{a})") from None
    acc = 0
    while y:
        if y & 1:
            acc ^= x
        y >>= 1
        x <<= 1
        if x >> a:
            x ^= modulus
    return acc


@lru_cache(maxsize=None)
def mul_table(a: int) -> np.ndarray:
    """Full multiplication table of GF(2^a); only built for a <= 10."""
    if a > 10:
        raise FeasibilityError("multiplication tables are limited to a <= 10")
    size = 1 << a
    table = np.zeros((size, size), dtype=np.int64)
    for x in range(size):
        for y in range(size):
            table[x, y] = gf_mul(x, y, a)
    return table


@dataclass(frozen=True)
class PolyHash:
    """h(x) = c_0 + c_1 x + ... + c_{t-1} x^{t-1} over GF(2^a), truncated."""

    degree_bound: int
    field_bits: int
    coefficients: tuple[int, ...]
    in_bits: int
    out_bits: int

    def __post_init__(self):
        if self.degree_bound < 1:
            raise DomainError("degree bound t must be >= 1")
        if len(self.coefficients) != self.degree_bound:
            raise DimensionError(
                f"expected {self.degree_bound} coefficients, got {len(self.coefficients)}"
            )
        if not (1 <= self.in_bits <= self.field_bits and 1 <= self.out_bits <= self.field_bits):
            raise DimensionError("in_bits and out_bits must lie in 1..field_bits")
        if any(not 0 <= c < (1 << self.field_bits) for c in self.coefficients):
            raise DomainError("coefficient outside the field")
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))

    def eval_int(self, x: int) -> int:
        a = self.field_bits
        acc = 0
        for c in reversed(self.coefficients):
            acc = gf_mul(acc, x, a) ^ c
        return acc & ((1 << self.out_bits) - 1)

    def __call__(self, x: BitString) -> BitString:
        return eval_hash(self, x)

    def to_dict(self) -> dict:
        width = max(1, -(-self.field_bits // 4))
        return {
            "t": self.degree_bound,
            "a": self.field_bits,
            "in_bits": self.in_bits,
            "out_bits": self.out_bits,
            "coefficients": [format(c, f"0{width}x") for c in self.coefficients],
        }

    @classmethod
    def from_dict(cls, data: dict) -> PolyHash:
        return cls(
            degree_bound=int(data["t"]),
            field_bits=int(data["a"]),
            coefficients=tuple(int(c, 16) for c in data["coefficients"]),
            in_bits=int(data["in_bits"]),
            out_bits=int(data["out_bits"]),
        )


def sample_hash(t: int, in_bits: int, out_bits: int, rng: np.random.Generator) -> PolyHash:
    """Uniform member of the degree-(t-1) family with a = max(in_bits, out_bits)."""
    if t < 1 or in_bits < 1 or out_bits < 1:
        raise DomainError("t, in_bits and out_bits must be >= 1")
    a = max(in_bits, out_bits)
    coeffs = tuple(int(c) for c in rng.integers(0, 1 << a, size=t))
    return PolyHash(t, a, coeffs, in_bits, out_bits)


def eval_hash(h: PolyHash, x: BitString) -> BitString:
    if len(x) != h.in_bits:
        raise DimensionError(f"hash expects {h.in_bits} input bits, got {len(x)}")
    return BitString.from_int(h.eval_int(x.to_int()), h.out_bits)


def index_hash_bits(k: int) -> int:
    """Input width used to hash a password/index in 1..k (encoded as index - 1)."""
    return max(1, (k - 1).bit_length())


def eval_index_hash(h: PolyHash, index: int) -> BitString:
    return BitString.from_int(h.eval_int(index - 1), h.out_bits)


def evaluate_family(t: int, a: int, in_bits: int, out_bits: int) -> np.ndarray:
    """Value table of the whole family: shape (2^(t*a), 2^in_bits)."""
    size = 1 << a
    table = mul_table(a)
    xs = np.arange(1 << in_bits)
    coeffs = np.array(list(product(range(size), repeat=t)), dtype=np.int64)
    acc = np.zeros((len(coeffs), len(xs)), dtype=np.int64)
    for j in range(t):
        # Horner step: acc <- acc * x + c_{t-1-j}
        acc = table[acc, xs[None, :]] ^ coeffs[:, [j]]
    # itertools.product lists the leading (highest-degree) coefficient first
    return acc & ((1 << out_bits) - 1)


def verify_t_wise(
    t: int, in_bits: int, out_bits: int, order: int | None = None, max_work: int = 16
) -> bool:
    """Exhaustively test the degree-(t-1) family for ``order``-wise independence.

    ``order`` defaults to ``t``. Every set of at most ``order`` distinct inputs
    must receive a uniformly distributed output tuple over the family draw.
    """
    order = t if order is None else order
    a = max(in_bits, out_bits)
    if t * a > max_work:
        raise FeasibilityError(f"family of size 2^{t * a} exceeds 2^{max_work}")
    values = evaluate_family(t, a, in_bits, out_bits)
    members = values.shape[0]
    n_inputs = 1 << in_bits
    for size in range(1, min(order, n_inputs) + 1):
        cells = 1 << (out_bits * size)
        if members % cells:
            return False
        expected = members // cells
        for subset in combinations(range(n_inputs), size):
            code = np.zeros(members, dtype=np.int64)
            for x in subset:
                code = (code << out_bits) | values[:, x]
            counts = np.bincount(code, minlength=cells)
            if not (counts == expected).all():
                return False
    return True
