"""Oblivious transfer and password identification over isolated qubits, simulated exactly."""

from . import adversary, bitmath, codes, hashing, protocols, quantum, verifier
from .bitmath import BitString, FiniteDistribution, NdlFunction
from .errors import (
    AttackInapplicable,
    BoundsError,
    ComposabilityError,
    DimensionError,
    DomainError,
    FeasibilityError,
    IqotError,
    PreconditionError,
    StateError,
)
from .hashing import PolyHash
from .protocols import SessionConfig, Transcript
from .quantum import Basis
from .verifier import SecurityReport

__version__ = "0.1.0"
