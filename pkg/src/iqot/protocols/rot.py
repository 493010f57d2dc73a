"""Leaky string ROT over conjugate-coded qubits and its privacy-amplified version."""

from __future__ import annotations

from typing import Any

from ..bitmath import BitString
from ..codes import encode, ml_decode
from ..hashing import sample_hash
from ..quantum import Basis, prepare
from .engine import (
    HonestBob,
    Session,
    SessionConfig,
    SessionResult,
    SessionRngs,
    Strategy,
    receive_qubits,
    run_session,
)
from .ideal import ideal_rot


def leaky_rot(session: Session, d: int, strategy: Strategy | None = None, messages=None):
    """Alice's (s, t) and the receiver's output for one leaky ROT sub-protocol."""
    cfg = session.cfg
    rng = session.rngs.alice
    strategy = strategy if strategy is not None else HonestBob(d)
    messages = dict(messages or {})
    with session.subprotocol("leaky-rot"):
        s = BitString.random(cfg.ell, rng)
        t = BitString.random(cfg.ell, rng)
        if "leaky" in cfg.ideal:
            session.ideal("leaky", cfg.ell)
            choice = strategy.committed_choice if strategy.committed_choice is not None else d
            value = strategy.ideal_output(t if choice else s, messages)
            session.record("leaky", {"s": s, "t": t, "choice": choice, "ideal": True})
            return s, t, value

        code = cfg.code
        words = (encode(code, s), encode(code, t))
        gammas = [int(g) for g in rng.integers(0, 2, size=cfg.n)]
        bb = cfg.block_bits
        values: list[int] = []
        bases: list[Basis] = []
        for i, gamma in enumerate(gammas):
            values.extend(words[gamma].bits[i * bb : (i + 1) * bb])
            bases.extend([Basis(gamma)] * bb)
        register = prepare(BitString(tuple(values)), bases, session_tag="leaky-rot")
        session.transfer("alice", "bob", register)
        value, view = receive_qubits(session, register, strategy, messages)
        session.record(
            "leaky",
            {
                "s": s,
                "t": t,
                "gammas": gammas,
                "measurements": sorted(
                    (i, int(view.bases[i]), view.outcomes[i]) for i in view.outcomes
                ),
                "ideal": False,
            },
        )
    if isinstance(strategy, HonestBob):
        decoded = ml_decode(code, view.outcome_string())
        if decoded != (t if d else s):
            session.flag("decode-failure")
    return s, t, value


def string_rot(session: Session, d: int, strategy: Strategy | None = None):
    """Privacy-amplified ROT: hashes F, G are fixed and sent before any qubit."""
    cfg = session.cfg
    rng = session.rngs.alice
    strategy = strategy if strategy is not None else HonestBob(d)
    with session.subprotocol("string-rot"):
        F = sample_hash(cfg.r, cfg.ell, cfg.ell_prime, rng)
        G = sample_hash(cfg.r, cfg.ell, cfg.ell_prime, rng)
        session.send("alice", "F", F)
        session.send("alice", "G", G)
        s, t, value = leaky_rot(session, d, strategy, {"F": F, "G": G})
        a0, a1 = F(s), G(t)
        session.record("string-rot", {"F": F, "G": G, "A0": a0, "A1": a1})
    return (a0, a1), value


def rot(session: Session, d: int):
    """ROT binding: the ideal functionality or the real privacy-amplified protocol."""
    cfg = session.cfg
    if "rot" in cfg.ideal:
        session.ideal("rot", cfg.ell)
        return ideal_rot(session.rngs.alice, cfg.ell, d)
    return string_rot(session, d)


def run_leaky_rot(
    cfg: SessionConfig, d: int, rngs: SessionRngs | None = None, bob: Strategy | None = None
) -> SessionResult:
    def body(session):
        s, t, value = leaky_rot(session, d, bob)
        return (s, t), value

    return run_session(cfg, body, rngs)


def run_string_rot(
    cfg: SessionConfig, d: int, rngs: SessionRngs | None = None, bob: Strategy | None = None
) -> SessionResult:
    return run_session(cfg, lambda session: string_rot(session, d, bob), rngs)


def run_rot(cfg: SessionConfig, d: int, rngs: SessionRngs | None = None) -> SessionResult:
    return run_session(cfg, lambda session: rot(session, d), rngs)


def bob_view_messages(result: SessionResult) -> dict[str, Any]:
    return {e.label: e.payload for e in result.transcript.of_kind("message") if e.sender == "alice"}
