"""Exception hierarchy shared by every module of the engine."""


class IqotError(Exception):
    """Base class for all engine errors."""


class DimensionError(IqotError, ValueError):
    """Operands have incompatible lengths or shapes."""


class DomainError(IqotError, ValueError):
    """A parameter lies outside the mathematical domain of an operation."""


class FeasibilityError(IqotError, ValueError):
    """An exhaustive computation was requested beyond its desk-scale bound."""


class StateError(IqotError, RuntimeError):
    """An operation is not allowed in the current object state."""


class BoundsError(IqotError, IndexError):
    """An index is outside the valid range."""


class PreconditionError(IqotError, ValueError):
    """A documented precondition of an audit or check does not hold."""


class ComposabilityError(IqotError):
    """Qubits were left unmeasured at a sub-protocol boundary."""

    def __init__(self, party, boundary, unmeasured):
        self.party = party
        self.boundary = boundary
        self.unmeasured = unmeasured
        super().__init__(
            f"{party} left {unmeasured} qubit(s) unmeasured at boundary {boundary!r}"
        )


class AttackInapplicable(IqotError):
    """The impossibility attack's preconditions are violated.

    ``lemma`` names the violated property: ``"injectivity"`` or
    ``"accepting input existence"``.
    """

    def __init__(self, lemma, detail=""):
        self.lemma = lemma
        self.detail = detail
        msg = f"attack inapplicable: {lemma} violated"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
