"""Compositions built on ROT: 1-2 OT, the k-OT chain, sROT and identification."""

from __future__ import annotations

from typing import Sequence

from ..bitmath import BitString, xor_all
from ..errors import BoundsError, DimensionError, DomainError
from ..hashing import eval_index_hash, index_hash_bits, sample_hash
from .engine import Session, SessionConfig, SessionResult, SessionRngs, _is_pow2, run_session
from .ideal import ideal_kot, ideal_krot, ideal_ot
from .rot import rot


def ot_from_rot(session: Session, a0: BitString, a1: BitString, d: int) -> BitString:
    if len(a0) != len(a1):
        raise DimensionError("OT inputs must have equal length")
    with session.subprotocol("ot"):
        (s0, s1), s_d = rot(session, d)
        if len(s0) != len(a0):
            raise DimensionError(f"ROT binding delivers {len(s0)}-bit strings, inputs have {len(a0)}")
        y0, y1 = s0 ^ a0, s1 ^ a1
        session.send("alice", "Y0", y0)
        session.send("alice", "Y1", y1)
        return (y1 if d else y0) ^ s_d


def ot(session: Session, a0: BitString, a1: BitString, d: int) -> BitString:
    if "ot" in session.cfg.ideal:
        session.ideal("ot", len(a0))
        return ideal_ot(a0, a1, d)
    return ot_from_rot(session, a0, a1, d)


def kot_chain(session: Session, xs: Sequence[BitString], d: int) -> BitString:
    """1-out-of-k OT from a chain of 1-2 OTs.

    The ``"k-1"`` variant folds the last two messages into one final OT with
    inputs (X_{k-1} xor B_{k-2}, X_k xor B_{k-2}).
    """
    k = len(xs)
    if k < 2:
        raise DomainError("k-OT needs at least two messages")
    if not 1 <= d <= k:
        raise BoundsError(f"choice {d} outside 1..{k}")
    width = len(xs[0])
    if any(len(x) != width for x in xs):
        raise DimensionError("all k-OT messages must have equal length")
    rng = session.rngs.alice
    short = session.cfg.kot_variant == "k-1"
    n_ots = k - 1 if short else k
    n_masks = k - 2 if short else k
    with session.subprotocol("kot"):
        masks = [BitString.random(width, rng) for _ in range(n_masks)]
        zero = BitString.zeros(width)
        received = []
        for i in range(1, n_ots + 1):
            prev = masks[i - 2] if i >= 2 else zero
            if short and i == n_ots:
                pair = (xs[k - 2] ^ prev, xs[k - 1] ^ prev)
                choice = int(d == k)
            else:
                pair = (masks[i - 1] ^ prev, xs[i - 1] ^ prev)
                choice = int(i == d)
            received.append(ot(session, pair[0], pair[1], choice))
        session.record("kot", {"received": received, "masks": masks})
        last = min(d, n_ots)
        return xor_all(received[: last - 1], width) ^ received[last - 1]


def kot(session: Session, xs: Sequence[BitString], d: int) -> BitString:
    if "kot" in session.cfg.ideal:
        session.ideal("kot", len(xs[0]))
        return ideal_kot(xs, d)
    return kot_chain(session, xs, d)


def srot_index_bits(index: int, k: int) -> list[int]:
    """Choice bits D_1..D_{log k} of an index in 1..k; D_1 is least significant."""
    return [((index - 1) >> i) & 1 for i in range(k.bit_length() - 1)]


def srot(session: Session, d: int, k: int | None = None):
    """Sender-randomised 1-out-of-k ROT from log2(k) ROTs."""
    k = session.cfg.k if k is None else k
    if not _is_pow2(k) or k < 2:
        raise DomainError(f"sROT needs k a power of two >= 2, got {k}")
    if not 1 <= d <= k:
        raise BoundsError(f"choice {d} outside 1..{k}")
    with session.subprotocol("srot"):
        pairs, parts = [], []
        for bit in srot_index_bits(d, k):
            pair, part = rot(session, bit)
            pairs.append(pair)
            parts.append(part)
        session.record("srot", {"parts": parts})
        width = len(parts[0])
        strings = [
            xor_all((pairs[i][b] for i, b in enumerate(srot_index_bits(index, k))), width)
            for index in range(1, k + 1)
        ]
        return strings, xor_all(parts, width)


def srot_binding(session: Session, d: int, k: int | None = None):
    cfg = session.cfg
    k = cfg.k if k is None else k
    if "srot" in cfg.ideal:
        session.ideal("srot", cfg.ell)
        return ideal_krot(session.rngs.alice, cfg.ell, k, d)
    return srot(session, d, k)


def identification(session: Session, w_a: int, w_b: int, binding: str = "srot") -> int:
    """Password identification; Bob's bit is 1 iff Alice's reply matches his password."""
    cfg = session.cfg
    k = cfg.k
    for w in (w_a, w_b):
        if not 1 <= w <= k:
            raise BoundsError(f"password {w} outside 1..{k}")
    with session.subprotocol("ident"):
        if binding == "srot":
            strings, s_d = srot_binding(session, w_b, k)
        elif binding == "kot":
            width = cfg.kot_width()
            strings = [BitString.random(width, session.rngs.alice) for _ in range(k)]
            s_d = kot(session, strings, w_b)
        else:
            raise DomainError(f"unknown identification binding {binding!r}")
        h = sample_hash(2, index_hash_bits(k), len(s_d), session.rngs.bob)
        session.send("bob", "h", h)
        z = strings[w_a - 1] ^ eval_index_hash(h, w_a)
        session.send("alice", "z", z)
        return int(z == s_d ^ eval_index_hash(h, w_b))


def run_ot_from_rot(
    cfg: SessionConfig, a0: BitString, a1: BitString, d: int, rngs: SessionRngs | None = None
) -> SessionResult:
    return run_session(cfg, lambda s: (None, ot_from_rot(s, a0, a1, d)), rngs)


def run_kot_chain(
    cfg: SessionConfig, xs: Sequence[BitString], d: int, rngs: SessionRngs | None = None
) -> SessionResult:
    return run_session(cfg, lambda s: (None, kot_chain(s, xs, d)), rngs)


def run_srot(cfg: SessionConfig, d: int, rngs: SessionRngs | None = None) -> SessionResult:
    return run_session(cfg, lambda s: srot(s, d), rngs)


def run_identification(
    cfg: SessionConfig, w_a: int, w_b: int, rngs: SessionRngs | None = None, binding: str = "srot"
) -> SessionResult:
    return run_session(cfg, lambda s: (None, identification(s, w_a, w_b, binding)), rngs)
