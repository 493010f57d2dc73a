from .compose import (
    identification,
    kot,
    kot_chain,
    ot,
    ot_from_rot,
    run_identification,
    run_kot_chain,
    run_ot_from_rot,
    run_srot,
    srot,
    srot_binding,
    srot_index_bits,
)
from .engine import (
    IDEAL_KINDS,
    Event,
    HonestBob,
    Measure,
    Output,
    ReceiverView,
    Send,
    Session,
    SessionConfig,
    SessionResult,
    SessionRngs,
    SingleBasisBob,
    Strategy,
    Transcript,
    party_rng,
    receive_qubits,
    run_session,
)
from .ideal import ideal_kot, ideal_krot, ideal_ot, ideal_rot
from .rot import leaky_rot, rot, run_leaky_rot, run_rot, run_string_rot, string_rot

__all__ = [name for name in dir() if not name.startswith("_")]
