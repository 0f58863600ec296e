"""Exception types raised by the simulator."""


class RamanFockError(Exception):
    """Base class for all simulator errors."""


class TruncationError(RamanFockError):
    """The truncated Fock space is too small for the requested state or displacement."""


class InfeasiblePreparationError(RamanFockError):
    """The initial field has no amplitude in the selected photon-number subspace."""


class DegenerateOutcomeError(RamanFockError):
    """Conditioning on a measurement branch that has zero probability."""


class IntegratorError(RamanFockError):
    """The numeric propagation failed to converge under step refinement."""


class ConfigError(RamanFockError):
    """Invalid run configuration."""
