"""Session engine: configuration, seeded randomness, transcripts and boundaries.

Randomness splitting rule: the stream for ``party`` in session ``session_id`` and
trial ``trial_id`` is ``numpy.random.default_rng(SeedSequence(root_seed,
spawn_key=(PARTY_IDS[party], session_id, trial_id)))``. Nothing else in the
engine draws randomness.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Iterator

import numpy as np

from ..bitmath import BitString
from ..codes import LinearCode, code_from_seed, ml_decode
from ..errors import ComposabilityError, DomainError, StateError
from ..hashing import PolyHash
from ..quantum import Basis, QubitRegister, assert_all_measured

PARTY_IDS = {"alice": 0, "bob": 1, "auditor": 2}
IDEAL_KINDS = frozenset({"leaky", "rot", "ot", "kot", "srot"})


def party_rng(root_seed: int, party: str, session_id: int = 0, trial_id: int = 0):
    seq = np.random.SeedSequence(root_seed, spawn_key=(PARTY_IDS[party], session_id, trial_id))
    return np.random.default_rng(seq)


@dataclass
class SessionRngs:
    alice: np.random.Generator
    bob: np.random.Generator

    @classmethod
    def from_seed(cls, root_seed: int, session_id: int = 0, trial_id: int = 0) -> SessionRngs:
        return cls(
            party_rng(root_seed, "alice", session_id, trial_id),
            party_rng(root_seed, "bob", session_id, trial_id),
        )


def _is_pow2(x: int) -> bool:
    return x >= 1 and not x & (x - 1)


@dataclass(frozen=True)
class SessionConfig:
    k: int = 4
    ell: int = 4
    ell_prime: int = 2
    q: int = 4
    n: int = 24
    r: int = 8
    code_seed: int = 0
    seed: int | None = None
    session_id: int = 0
    ideal: frozenset = frozenset()
    kot_variant: str = "k"

    def __post_init__(self):
        object.__setattr__(self, "ideal", frozenset(self.ideal))
        if self.k < 2:
            raise DomainError("k must be >= 2")
        if not 1 <= self.ell_prime <= self.ell:
            raise DomainError("need 1 <= ell_prime <= ell")
        if self.q < 2 or not _is_pow2(self.q):
            raise DomainError("q must be a power of two >= 2")
        if self.r < 1:
            raise DomainError("r must be >= 1")
        if not self.ideal <= IDEAL_KINDS:
            raise DomainError(f"unknown ideal kinds {sorted(self.ideal - IDEAL_KINDS)}")
        if self.kot_variant not in ("k", "k-1"):
            raise DomainError("kot_variant must be 'k' or 'k-1'")

    @property
    def code(self) -> LinearCode:
        return code_from_seed(self.ell, self.n, self.q, self.code_seed)

    @property
    def block_bits(self) -> int:
        return self.q.bit_length() - 1

    def rot_width(self) -> int:
        """String width delivered by the ROT binding."""
        return self.ell if "rot" in self.ideal else self.ell_prime

    def ot_width(self) -> int:
        return self.ell if "ot" in self.ideal else self.rot_width()

    def kot_width(self) -> int:
        return self.ell if "kot" in self.ideal else self.ot_width()

    def srot_width(self) -> int:
        return self.ell if "srot" in self.ideal else self.rot_width()

    def rngs(self) -> SessionRngs:
        if self.seed is None:
            raise DomainError("a root seed is required")
        return SessionRngs.from_seed(self.seed, self.session_id)

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["ideal"] = sorted(self.ideal)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> SessionConfig:
        names = {f.name for f in fields(cls)}
        kwargs = {k: v for k, v in data.items() if k in names}
        if "ideal" in kwargs:
            kwargs["ideal"] = frozenset(kwargs["ideal"])
        return cls(**kwargs)


def encode_payload(value: Any) -> Any:
    if isinstance(value, BitString):
        return {"bits": len(value), "hex": value.hex()}
    if isinstance(value, PolyHash):
        return {"hash": value.to_dict()}
    if isinstance(value, (list, tuple)):
        return [encode_payload(v) for v in value]
    if isinstance(value, dict):
        return {str(k): encode_payload(v) for k, v in value.items()}
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def decode_payload(value: Any) -> Any:
    if isinstance(value, dict):
        if set(value) == {"bits", "hex"}:
            return BitString.from_hex(value["hex"], value["bits"])
        if set(value) == {"hash"}:
            return PolyHash.from_dict(value["hash"])
        return {k: decode_payload(v) for k, v in value.items()}
    if isinstance(value, list):
        return [decode_payload(v) for v in value]
    return value


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str  # message | qubits | ideal | boundary | abort | flag | output
    sender: str
    label: str
    payload: Any = None

    def to_record(self) -> dict:
        return {
            "seq": self.seq,
            "kind": self.kind,
            "sender": self.sender,
            "label": self.label,
            "payload": encode_payload(self.payload),
        }


@dataclass
class Transcript:
    session_id: int
    config: dict
    events: list[Event] = field(default_factory=list)

    def add(self, kind: str, sender: str, label: str, payload: Any = None) -> Event:
        event = Event(len(self.events), kind, sender, label, payload)
        self.events.append(event)
        return event

    def lines(self) -> list[str]:
        head = {"kind": "config", "session_id": self.session_id, "config": self.config}
        rows = [head] + [e.to_record() for e in self.events]
        return [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in rows]

    def dumps(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> Transcript:
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        head, rest = rows[0], rows[1:]
        events = [
            Event(r["seq"], r["kind"], r["sender"], r["label"], decode_payload(r["payload"]))
            for r in rest
        ]
        return cls(head["session_id"], head["config"], events)

    @classmethod
    def read(cls, path) -> Transcript:
        return cls.loads(Path(path).read_text())

    def of_kind(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def prefix_through_first(self, kind: str) -> list[Event]:
        """Events up to and including the first event of ``kind``."""
        for i, e in enumerate(self.events):
            if e.kind == kind:
                return self.events[: i + 1]
        return list(self.events)


# ---------------------------------------------------------------- strategies


@dataclass(frozen=True)
class Measure:
    index: int
    basis: Basis


@dataclass(frozen=True)
class Send:
    label: str
    payload: Any


@dataclass(frozen=True)
class Output:
    value: Any


@dataclass
class ReceiverView:
    """What a qubit receiver knows while it holds a register."""

    code: LinearCode
    messages: dict[str, Any]
    n_qubits: int
    outcomes: dict[int, int] = field(default_factory=dict)
    bases: dict[int, Basis] = field(default_factory=dict)

    @property
    def unmeasured(self) -> list[int]:
        return [i for i in range(self.n_qubits) if i not in self.outcomes]

    def outcome_string(self) -> BitString:
        """Outcomes as a bit string; unmeasured positions read as 0."""
        return BitString(tuple(self.outcomes.get(i, 0) for i in range(self.n_qubits)))


class Strategy:
    """Receiver-side decision rule: ``decide(view)`` returns the next action.

    ``committed_choice`` optionally declares the branch the strategy targets; the
    auditor uses it as the witness choice.
    """

    committed_choice: int | None = None

    def decide(self, view: ReceiverView):
        raise NotImplementedError

    def ideal_output(self, value: BitString, messages: dict[str, Any]):
        """Output when the qubit layer is replaced by an ideal functionality."""
        return value


class SingleBasisBob(Strategy):
    """Measure every qubit in one basis as soon as it arrives, then ML-decode."""

    def __init__(self, basis: Basis):
        self.basis = Basis(basis)
        self.committed_choice = int(self.basis)

    def decide(self, view: ReceiverView):
        pending = view.unmeasured
        if pending:
            return Measure(pending[0], self.basis)
        return Output(ml_decode(view.code, view.outcome_string()))


class HonestBob(SingleBasisBob):
    """Honest receiver: single-basis decoding, then the agreed hash if one was sent."""

    def __init__(self, d: int):
        super().__init__(Basis(d))
        self.d = int(d)

    def _finish(self, decoded: BitString, messages: dict[str, Any]):
        label = "F" if self.d == 0 else "G"
        return messages[label](decoded) if label in messages else decoded

    def decide(self, view: ReceiverView):
        action = super().decide(view)
        if isinstance(action, Output):
            return Output(self._finish(action.value, view.messages))
        return action

    def ideal_output(self, value, messages):
        return self._finish(value, messages)


# ------------------------------------------------------------------- session


@dataclass
class _Frame:
    name: str
    registers: list[tuple[str, QubitRegister]] = field(default_factory=list)


class Session:
    """One protocol run: transcript, audit record and sub-protocol boundaries."""

    def __init__(self, cfg: SessionConfig, rngs: SessionRngs | None = None):
        self.cfg = cfg
        self.rngs = rngs if rngs is not None else cfg.rngs()
        self.transcript = Transcript(cfg.session_id, cfg.to_dict())
        self.flags: list[str] = []
        self.audit: dict[str, list] = {}
        self._stack: list[_Frame] = []
        self._handles = 0

    def record(self, key: str, item: Any) -> None:
        """Audit-only data; never part of any party's transcript view."""
        self.audit.setdefault(key, []).append(item)

    def send(self, sender: str, label: str, payload: Any) -> None:
        self.transcript.add("message", sender, label, payload)

    def ideal(self, kind: str, width: int | None = None) -> None:
        self.transcript.add("ideal", "functionality", kind, {"width": width})

    def transfer(self, sender: str, receiver: str, register: QubitRegister) -> str:
        if not self._stack:
            raise StateError("qubits may only be sent inside a sub-protocol")
        handle = f"q{self._handles}"
        self._handles += 1
        self._stack[-1].registers.append((receiver, register))
        self.transcript.add("qubits", sender, handle, {"count": len(register)})
        return handle

    def flag(self, reason: str) -> None:
        self.flags.append(reason)
        self.transcript.add("flag", "engine", reason)

    def output(self, party: str, value: Any) -> None:
        self.transcript.add("output", party, "output", value)

    @contextmanager
    def subprotocol(self, name: str) -> Iterator[_Frame]:
        frame = _Frame(name)
        self._stack.append(frame)
        try:
            yield frame
        finally:
            self._stack.pop()
        for receiver, reg in frame.registers:
            if not assert_all_measured(reg):
                left = len(reg.unmeasured())
                self.transcript.add("abort", receiver, name, {"unmeasured": left})
                self.flags.append("abort")
                raise ComposabilityError(receiver, name, left)
        self.transcript.add("boundary", "engine", name, {"all_measured": True})


def receive_qubits(
    session: Session,
    register: QubitRegister,
    strategy: Strategy,
    messages: dict[str, Any],
    max_steps: int | None = None,
):
    """Drive a receiver strategy until it outputs; returns (output, view)."""
    view = ReceiverView(session.cfg.code, dict(messages), len(register))
    limit = max_steps if max_steps is not None else 4 * len(register) + 16
    for _ in range(limit):
        action = strategy.decide(view)
        if isinstance(action, Measure):
            outcome = register.measure(action.index, action.basis, session.rngs.bob)
            view.outcomes[action.index] = outcome
            view.bases[action.index] = Basis(action.basis)
        elif isinstance(action, Send):
            session.send("bob", action.label, action.payload)
        elif isinstance(action, Output):
            return action.value, view
        else:
            raise StateError(f"unknown strategy action {action!r}")
    raise StateError("receiver strategy did not produce an output")


@dataclass
class SessionResult:
    alice: Any
    bob: Any
    transcript: Transcript
    flags: list[str]
    audit: dict
    abort: ComposabilityError | None = None

    @property
    def aborted(self) -> bool:
        return self.abort is not None

    @property
    def failed(self) -> bool:
        return bool(self.flags)


def run_session(cfg: SessionConfig, body, rngs: SessionRngs | None = None) -> SessionResult:
    """Run ``body(session) -> (alice_out, bob_out)`` and record party outputs."""
    session = Session(cfg, rngs)
    try:
        alice_out, bob_out = body(session)
    except ComposabilityError as exc:
        return SessionResult(None, None, session.transcript, session.flags, session.audit, exc)
    session.output("alice", alice_out)
    session.output("bob", bob_out)
    return SessionResult(alice_out, bob_out, session.transcript, session.flags, session.audit)
