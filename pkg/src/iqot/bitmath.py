"""Bit strings, non-degenerate linear functions and finite distributions.

Bit strings are stored most-significant bit first: ``BitString.from_int(6, 3)``
is ``110`` and ``to_int`` inverts it. Entropies are in bits (log base 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Hashable, Iterable, Iterator, Mapping

import numpy as np

from .errors import DimensionError, DomainError, FeasibilityError

PROB_TOL = 1e-9


@dataclass(frozen=True)
class BitString:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise DomainError(f"bits must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_int(cls, value: int, length: int) -> BitString:
        if length < 0 or value < 0 or value >> length:
            raise DomainError(f"{value} does not fit in {length} bits")
        return cls(tuple((value >> (length - 1 - i)) & 1 for i in range(length)))

    @classmethod
    def from_str(cls, text: str) -> BitString:
        return cls(tuple(int(c) for c in text))

    @classmethod
    def zeros(cls, length: int) -> BitString:
        return cls((0,) * length)

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> BitString:
        return cls(tuple(int(b) for b in rng.integers(0, 2, size=length)))

    @classmethod
    def from_hex(cls, text: str, length: int) -> BitString:
        return cls.from_int(int(text, 16) if text else 0, length)

    @property
    def length(self) -> int:
        return len(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return BitString(self.bits[item])
        return self.bits[item]

    def __xor__(self, other: BitString) -> BitString:
        if len(self) != len(other):
            raise DimensionError(f"xor of lengths {len(self)} and {len(other)}")
        return BitString(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def __add__(self, other: BitString) -> BitString:
        return BitString(self.bits + other.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    def __repr__(self) -> str:
        return f"BitString('{self}')"

    def to_int(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    def hex(self) -> str:
        """MSB-first hex, left-padded to ceil(length / 4) digits."""
        width = max(1, -(-len(self) // 4))
        return format(self.to_int(), f"0{width}x") if len(self) else ""

    def is_zero(self) -> bool:
        return not any(self.bits)

    def blocks(self, size: int) -> list[BitString]:
        if size <= 0 or len(self) % size:
            raise DimensionError(f"length {len(self)} is not a multiple of {size}")
        return [self[i : i + size] for i in range(0, len(self), size)]


def xor_all(strings: Iterable[BitString], length: int) -> BitString:
    """XOR of any number of strings; the empty XOR is the zero string."""
    acc = BitString.zeros(length)
    for s in strings:
        acc = acc ^ s
    return acc


def inner_product(a: BitString, b: BitString) -> int:
    if len(a) != len(b):
        raise DimensionError(f"inner product of lengths {len(a)} and {len(b)}")
    return sum(x & y for x, y in zip(a.bits, b.bits)) & 1


@dataclass(frozen=True)
class NdlFunction:
    """beta(s0, s1) = <u0, s0> xor <u1, s1> with u0, u1 both nonzero."""

    u0: BitString
    u1: BitString

    def __post_init__(self):
        if len(self.u0) != len(self.u1):
            raise DimensionError("u0 and u1 must have equal length")
        if self.u0.is_zero() or self.u1.is_zero():
            raise DomainError("non-degenerate linear function needs nonzero u0, u1")

    @classmethod
    def unchecked(cls, u0: BitString, u1: BitString) -> NdlFunction:
        """Build without the non-degeneracy check (test instances only)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "u0", u0)
        object.__setattr__(obj, "u1", u1)
        return obj

    @property
    def length(self) -> int:
        return len(self.u0)

    def __call__(self, s0: BitString, s1: BitString) -> int:
        return ndlf_eval(self, s0, s1)


def ndlf_eval(beta: NdlFunction, s0: BitString, s1: BitString) -> int:
    return inner_product(beta.u0, s0) ^ inner_product(beta.u1, s1)


def enumerate_ndlfs(length: int) -> Iterator[NdlFunction]:
    """All (2^length - 1)^2 non-degenerate linear functions on length-bit inputs."""
    for a in range(1, 1 << length):
        for b in range(1, 1 << length):
            yield NdlFunction(BitString.from_int(a, length), BitString.from_int(b, length))


def _parity_table(u: int, length: int) -> np.ndarray:
    x = np.arange(1 << length, dtype=np.int64) & u
    parity = np.zeros_like(x)
    while x.any():
        parity ^= x & 1
        x >>= 1
    return parity.astype(np.uint8)


def verify_two_balanced(beta: NdlFunction, max_length: int = 12) -> bool:
    """Exhaustively check that beta(s0, .) and beta(., s1) are balanced."""
    n = beta.length
    if n > max_length:
        raise FeasibilityError(f"exhaustive 2-balance check limited to length {max_length}")
    p0 = _parity_table(beta.u0.to_int(), n)
    p1 = _parity_table(beta.u1.to_int(), n)
    table = p0[:, None] ^ p1[None, :]
    half = (1 << n) // 2
    zeros_per_row = (table == 0).sum(axis=1)
    zeros_per_col = (table == 0).sum(axis=0)
    return bool((zeros_per_row == half).all() and (zeros_per_col == half).all())


class FiniteDistribution:
    """Immutable probability mass function on a finite set of hashable outcomes."""

    __slots__ = ("_mass", "_support")

    def __init__(self, mass: Mapping[Hashable, float], normalized_tol: float = PROB_TOL):
        clean = {}
        for outcome, p in mass.items():
            p = float(p)
            if p < -normalized_tol:
                raise DomainError(f"negative mass {p} at {outcome!r}")
            if p > 0:
                clean[outcome] = clean.get(outcome, 0.0) + p
        total = math.fsum(clean.values())
        if abs(total - 1.0) > normalized_tol:
            raise DomainError(f"masses sum to {total}, not 1")
        self._mass = MappingProxyType(clean)
        self._support = None

    @classmethod
    def uniform(cls, outcomes: Iterable[Hashable]) -> FiniteDistribution:
        outcomes = list(outcomes)
        if not outcomes:
            raise DomainError("uniform distribution over an empty set")
        return cls({o: 1.0 / len(outcomes) for o in outcomes})

    @classmethod
    def point(cls, outcome: Hashable) -> FiniteDistribution:
        return cls({outcome: 1.0})

    @classmethod
    def from_counts(cls, counts: Mapping[Hashable, int]) -> FiniteDistribution:
        total = sum(counts.values())
        return cls({o: c / total for o, c in counts.items()})

    @property
    def mass(self) -> Mapping[Hashable, float]:
        return self._mass

    @property
    def support(self) -> frozenset:
        if self._support is None:
            self._support = frozenset(self._mass)
        return self._support

    def __getitem__(self, outcome) -> float:
        return self._mass.get(outcome, 0.0)

    def __len__(self) -> int:
        return len(self._mass)

    def __repr__(self) -> str:
        return f"FiniteDistribution({dict(self._mass)!r})"

    def items(self):
        return self._mass.items()

    def probability(self, event: Callable[[Hashable], bool]) -> float:
        return math.fsum(p for o, p in self._mass.items() if event(o))

    def map(self, fn: Callable[[Hashable], Hashable]) -> FiniteDistribution:
        """Push-forward of the distribution through ``fn``."""
        out: dict = {}
        for o, p in self._mass.items():
            key = fn(o)
            out[key] = out.get(key, 0.0) + p
        return FiniteDistribution(out)

    def product(self, other: FiniteDistribution) -> FiniteDistribution:
        return FiniteDistribution(
            {(a, b): p * q for a, p in self._mass.items() for b, q in other._mass.items()}
        )


def statistical_distance(p: FiniteDistribution, q: FiniteDistribution) -> float:
    """l1 distance sum_x |P(x) - Q(x)|, in [0, 2] (no factor 1/2)."""
    keys = p.support | q.support
    return math.fsum(abs(p[x] - q[x]) for x in keys)


def min_entropy(p: FiniteDistribution) -> float:
    if not len(p):
        raise DomainError("min-entropy of an empty distribution")
    return -math.log2(max(p.mass.values()))


def conditional_min_entropy(p_xy: FiniteDistribution) -> float:
    """min over (x, y) with P(y) > 0 of -log2 P(x | y); outcomes are (x, y) pairs."""
    marginal: dict = {}
    for (x, y), pr in p_xy.items():
        marginal[y] = marginal.get(y, 0.0) + pr
    if not marginal or min(marginal.values()) <= 0:
        raise DomainError("degenerate conditioning marginal")
    worst = max(pr / marginal[y] for (x, y), pr in p_xy.items())
    return -math.log2(worst)


def smoothing_cap(p: FiniteDistribution, eps: float) -> float:
    """Smallest cap lam with sum_x max(P(x) - lam, 0) <= eps."""
    if not 0 <= eps < 1:
        raise DomainError(f"smoothing parameter must be in [0, 1), got {eps}")
    if not len(p):
        raise DomainError("smoothing an empty distribution")
    atoms = sorted(p.mass.values(), reverse=True)
    prefix = 0.0
    for m, atom in enumerate(atoms, start=1):
        prefix += atom
        lam = (prefix - eps) / m
        nxt = atoms[m] if m < len(atoms) else 0.0
        if lam >= nxt - 1e-15:
            return min(lam, atoms[0])
    raise AssertionError("unreachable: the last segment always admits a cap")


def smoothed_min_entropy(p: FiniteDistribution, eps: float) -> float:
    """Min-entropy after capping the largest atoms so at most eps mass is removed.

    The capped mass is not renormalised.
    """
    return -math.log2(smoothing_cap(p, eps))
