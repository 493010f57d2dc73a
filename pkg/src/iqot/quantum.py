"""Isolated qubits prepared in one of two conjugate bases.

Only basis states of the computational and Hadamard bases are ever prepared, so
a classical simulation is exact: measuring in the preparation basis returns the
prepared bit and measuring in the other basis returns a fair coin. The register
exposes single-cell measurement only and never reveals a preparation value
without consuming the cell.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Sequence

import numpy as np

from .bitmath import BitString
from .errors import BoundsError, DimensionError, StateError


class Basis(IntEnum):
    COMPUTATIONAL = 0
    HADAMARD = 1

    @classmethod
    def parse(cls, value) -> Basis:
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("computational", "c", "z", "0"):
                return cls.COMPUTATIONAL
            if key in ("hadamard", "h", "x", "1"):
                return cls.HADAMARD
            raise ValueError(f"unknown basis {value!r}")
        return cls(int(value))


class QubitRegister:
    """A batch of isolated qubits owned by one sub-protocol session."""

    __slots__ = ("_bases", "_values", "_measured", "session_tag")

    def __init__(self, values: BitString, bases: Sequence[Basis], session_tag: str = ""):
        if len(values) != len(bases):
            raise DimensionError(f"{len(values)} values but {len(bases)} bases")
        self._values = tuple(values.bits)
        self._bases = tuple(Basis(b) for b in bases)
        self._measured = [False] * len(values)
        self.session_tag = session_tag

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        done = sum(self._measured)
        return f"QubitRegister({len(self)} cells, {done} measured, tag={self.session_tag!r})"

    def is_measured(self, index: int) -> bool:
        self._check_index(index)
        return self._measured[index]

    def unmeasured(self) -> list[int]:
        return [i for i, m in enumerate(self._measured) if not m]

    def measure(self, index: int, basis: Basis, rng: np.random.Generator) -> int:
        self._check_index(index)
        if self._measured[index]:
            raise StateError(f"qubit {index} has already been measured")
        self._measured[index] = True
        if Basis(basis) == self._bases[index]:
            return self._values[index]
        return int(rng.integers(0, 2))

    def _check_index(self, index: int):
        if not 0 <= index < len(self._values):
            raise BoundsError(f"qubit index {index} outside 0..{len(self._values) - 1}")


def prepare(values: BitString, bases: Sequence[Basis], session_tag: str = "") -> QubitRegister:
    return QubitRegister(values, bases, session_tag)


def measure(reg: QubitRegister, index: int, basis: Basis, rng: np.random.Generator) -> int:
    return reg.measure(index, basis, rng)


def assert_all_measured(reg: QubitRegister) -> bool:
    return not reg.unmeasured()
