"""Binary linear codes read as n blocks of log2(q) bits, with brute-force ML decoding.

The decoder targets the q-ary symmetric channel seen by an honest receiver in
the leaky ROT: a block arrives intact with probability 1 - p_e and otherwise as
a uniformly random other value, p_e = 1/2 - 1/(2q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .bitmath import BitString
from .errors import DimensionError, DomainError, FeasibilityError

MAX_MESSAGE_BITS = 20


def channel_error(q: int) -> float:
    return 0.5 - 1.0 / (2 * q)


def _gf2_reduce(row: int, basis: dict[int, int]) -> int:
    """Reduce ``row`` against an echelon basis keyed by leading bit."""
    while row:
        lead = row.bit_length() - 1
        if lead not in basis:
            return row
        row ^= basis[lead]
    return 0


def gf2_rank(rows) -> int:
    basis: dict[int, int] = {}
    for row in rows:
        r = _gf2_reduce(int(row), basis)
        if r:
            basis[r.bit_length() - 1] = r
    return len(basis)


@dataclass(frozen=True)
class LinearCode:
    message_bits: int
    block_count: int
    block_bits: int
    generator: tuple[int, ...]  # one int per row, codeword bits MSB-first

    def __post_init__(self):
        if len(self.generator) != self.message_bits:
            raise DimensionError("generator must have one row per message bit")
        if self.length < self.message_bits:
            raise DomainError("codeword shorter than message")
        if any(not 0 <= row < (1 << self.length) for row in self.generator):
            raise DimensionError("generator row wider than the codeword")
        if gf2_rank(self.generator) != self.message_bits:
            raise DomainError("generator is not full rank over GF(2)")

    @property
    def length(self) -> int:
        return self.block_count * self.block_bits

    @property
    def q(self) -> int:
        return 1 << self.block_bits

    @classmethod
    def identity(cls, block_count: int, block_bits: int) -> LinearCode:
        n = block_count * block_bits
        rows = tuple(1 << (n - 1 - i) for i in range(n))
        return cls(n, block_count, block_bits, rows)

    def encode_int(self, message: int) -> int:
        word = 0
        for i, row in enumerate(self.generator):
            if (message >> (self.message_bits - 1 - i)) & 1:
                word ^= row
        return word

    @cached_property
    def codeword_blocks(self) -> np.ndarray:
        """Block values of every codeword, row m = encoding of message integer m."""
        if self.message_bits > MAX_MESSAGE_BITS:
            raise FeasibilityError(f"brute force limited to {MAX_MESSAGE_BITS} message bits")
        msgs = np.arange(1 << self.message_bits, dtype=np.int64)
        mask = self.q - 1
        shifts = [(self.block_count - 1 - i) * self.block_bits for i in range(self.block_count)]
        out = np.zeros((len(msgs), self.block_count), dtype=np.int64)
        for i, row in enumerate(self.generator):
            row_blocks = np.array([(row >> sh) & mask for sh in shifts], dtype=np.int64)
            bit = (msgs >> (self.message_bits - 1 - i)) & 1
            out ^= bit[:, None] * row_blocks[None, :]
        return out

    def to_dict(self) -> dict:
        width = max(1, -(-self.length // 4))
        return {
            "ell": self.message_bits,
            "n": self.block_count,
            "q": self.q,
            "generator": [format(r, f"0{width}x") for r in self.generator],
        }


def sample_code(
    message_bits: int, block_count: int, q: int, rng: np.random.Generator, max_retries: int = 64
) -> LinearCode:
    """Random full-rank generator; a dependent row is redrawn up to ``max_retries`` times."""
    if q < 2 or q & (q - 1):
        raise DomainError(f"q must be a power of two >= 2, got {q}")
    block_bits = q.bit_length() - 1
    length = block_count * block_bits
    if length < message_bits:
        raise DomainError(f"n*log2(q) = {length} < ell = {message_bits}")
    basis: dict[int, int] = {}
    rows = []
    for _ in range(message_bits):
        for _attempt in range(max_retries):
            row = int.from_bytes(rng.bytes((length + 7) // 8), "big") & ((1 << length) - 1)
            reduced = _gf2_reduce(row, basis)
            if reduced:
                basis[reduced.bit_length() - 1] = reduced
                rows.append(row)
                break
        else:
            raise FeasibilityError("could not sample a full-rank generator")
    return LinearCode(message_bits, block_count, block_bits, tuple(rows))


@lru_cache(maxsize=64)
def code_from_seed(message_bits: int, block_count: int, q: int, seed: int) -> LinearCode:
    return sample_code(message_bits, block_count, q, np.random.default_rng(seed))


def encode(code: LinearCode, s: BitString) -> BitString:
    if len(s) != code.message_bits:
        raise DimensionError(f"code expects {code.message_bits} message bits, got {len(s)}")
    return BitString.from_int(code.encode_int(s.to_int()), code.length)


def block_values(code: LinearCode, word: BitString) -> np.ndarray:
    return np.array([b.to_int() for b in word.blocks(code.block_bits)], dtype=np.int64)


def ml_decode(code: LinearCode, observed: BitString, p_e: float | None = None) -> BitString:
    """Maximum-likelihood message; ties go to the smallest message integer."""
    if len(observed) != code.length:
        raise DimensionError(f"expected {code.length} observed bits, got {len(observed)}")
    if code.message_bits > MAX_MESSAGE_BITS:
        raise FeasibilityError(f"brute force limited to {MAX_MESSAGE_BITS} message bits")
    p_e = channel_error(code.q) if p_e is None else p_e
    if not 0 < p_e < 1:
        raise DomainError(f"block error probability must lie in (0, 1), got {p_e}")
    obs = block_values(code, observed)
    mismatches = (code.codeword_blocks != obs[None, :]).sum(axis=1)
    log_match = math.log(1 - p_e)
    log_miss = math.log(p_e / (code.q - 1))
    scores = (code.block_count - mismatches) * log_match + mismatches * log_miss
    best = int(np.argmax(scores))
    return BitString.from_int(best, code.message_bits)
