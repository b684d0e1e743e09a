"""
Exception hierarchy for telapa-lab.
Every module raises one of these typed errors instead of bare exceptions.
"""


class TelapaError(Exception):
    """Base class for all errors raised by the laboratory."""


class ConfigurationError(TelapaError):
    """Invalid task, training, or run configuration."""


class UsageError(TelapaError):
    """An API was called in a state that does not allow it."""


class ShapeError(TelapaError):
    """Tensor or parameter-tree shapes do not line up."""


class NonFiniteError(TelapaError):
    """A parameter or loss became NaN or infinite."""


class EmptyEpisodeError(TelapaError):
    """An episode or episode set has no steps to work with."""


class InsufficientDataError(TelapaError):
    """Not enough valid samples to fit or select anything."""


class StaleDescriptorError(TelapaError):
    """A descriptor was computed under a different embedding version."""

    def __init__(self, expected: int, found: int):
        super().__init__(
            f"Descriptor embedding version {found} does not match archive version {expected}"
        )
        self.expected = expected
        self.found = found


class MalformedTagError(TelapaError):
    """A curriculum tag is outside the A-E alphabet or badly primed."""


class ArtifactError(TelapaError):
    """A run artifact is missing, corrupt, or could not be written."""

    def __init__(self, message: str, path=None):
        if path is not None:
            message = f"{message}: {path}"
        super().__init__(message)
        self.path = path
