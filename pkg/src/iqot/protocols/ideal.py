"""Ideal functionalities used as drop-in replacements for real sub-protocols.

Sender-randomised functionalities draw their fresh strings from the sender's
stream, so a composition bound to an ideal kROT and one where Alice samples the
same strings herself consume identical randomness.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..bitmath import BitString
from ..errors import BoundsError, DimensionError


def ideal_rot(rng: np.random.Generator, width: int, d: int):
    """Fresh uniform (A0, A1) for Alice and A_d for Bob."""
    a0 = BitString.random(width, rng)
    a1 = BitString.random(width, rng)
    return (a0, a1), (a1 if d else a0)


def ideal_ot(a0: BitString, a1: BitString, d: int) -> BitString:
    if len(a0) != len(a1):
        raise DimensionError("OT inputs must have equal length")
    return a1 if d else a0


def ideal_kot(xs: Sequence[BitString], d: int) -> BitString:
    if not 1 <= d <= len(xs):
        raise BoundsError(f"choice {d} outside 1..{len(xs)}")
    return xs[d - 1]


def ideal_krot(
    rng: np.random.Generator, width: int, k: int, d: int, bob_fixed: BitString | None = None
):
    """Fresh S_1..S_k for Alice, S_d for Bob.

    A dishonest Bob may fix his own S_d via ``bob_fixed``; the remaining strings
    are still sampled uniformly.
    """
    if not 1 <= d <= k:
        raise BoundsError(f"choice {d} outside 1..{k}")
    strings = [BitString.random(width, rng) for _ in range(k)]
    if bob_fixed is not None:
        if len(bob_fixed) != width:
            raise DimensionError("fixed string has the wrong width")
        strings[d - 1] = bob_fixed
    return strings, strings[d - 1]
