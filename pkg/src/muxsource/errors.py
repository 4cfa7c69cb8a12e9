"""Exception types raised by the simulator."""


class MuxSourceError(Exception):
    """Base class for all simulator errors."""


class DomainError(MuxSourceError, ValueError):
    """A parameter lies outside its physical domain."""


class StructuralError(MuxSourceError, ValueError):
    """Inputs have incompatible shapes or break a normalization contract."""


class ConsistencyError(MuxSourceError, RuntimeError):
    """An internal numerical consistency check failed."""


class NotBracketed(MuxSourceError):
    """The target SNR is not crossed inside the search bracket."""


class NonMonotone(MuxSourceError):
    """SNR was found to increase with mean photon number inside the bracket."""
