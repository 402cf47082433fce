"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all mathematical errors raised by the engine."""


class DescriptorMismatchError(EngineError):
    """Operands live over different ring descriptors."""


class ConventionError(EngineError):
    """Series convention (reduced vs raw) does not match the operation."""


class InsufficientFloorError(EngineError):
    """The Laurent floor in the equivariant parameter is too shallow."""


class TransversalityError(EngineError):
    """The leading block of a factorization problem is singular."""


class UnitError(EngineError):
    """A series expected to be invertible has a non-unit leading term."""


class ExtractionError(EngineError):
    """Instanton extraction failed an integrality or consistency check."""
