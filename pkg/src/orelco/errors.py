"""Exception types shared across the package."""


class OrelcoError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidComplexError(OrelcoError):
    """A combinatorial complex violates one of its structural invariants."""


class NotMorphismError(OrelcoError):
    """A map fails structure preservation; carries a human-readable witness."""

    def __init__(self, witness: str):
        super().__init__(witness)
        self.witness = witness


class NotImmersionError(OrelcoError):
    """An operation required an immersion but the map is not one."""

    def __init__(self, witness: str):
        super().__init__(witness)
        self.witness = witness


class FactorizationError(OrelcoError):
    """Inputs to a factorization do not satisfy its commuting contract."""


class BudgetExhaustedError(OrelcoError):
    """A bounded search ran out of budget before reaching a conclusion."""


class PipelineInvariantError(OrelcoError):
    """A hard invariant of the refinement pipeline was breached.

    Carries a full state dump so the breach can be studied offline.
    """

    def __init__(self, message: str, dump: str = ""):
        super().__init__(message)
        self.dump = dump


class DiagramError(OrelcoError):
    """A disk diagram reached a configuration the reducer cannot handle."""
