"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for domain-level failures (CLI maps these to exit code 1)."""


class InconsistentEvidenceError(EngineError):
    """The observed evidence has probability zero under the model."""


class StateSpaceTooLargeError(EngineError):
    """The joint state space exceeds the cap for exhaustive enumeration."""


class ModelFormatError(EngineError):
    """A model, user-model, or scenario file is malformed or invalid."""
