class BubforgeError(Exception):
    """Base class for every error raised by bubforge."""


class ValidationError(BubforgeError, ValueError):
    """Input violates a precondition (bad shape, range, spec or setting)."""


class FormatError(ValidationError):
    """A container or image file is malformed, truncated or of unknown version."""


class GenerationError(BubforgeError, RuntimeError):
    """The generator could not produce enough usable bubble patches."""

    def __init__(self, message: str, attempts: int = 0, accepted: int = 0) -> None:
        super().__init__(message)
        self.attempts = attempts
        self.accepted = accepted


class TrainingDivergedError(BubforgeError, RuntimeError):
    """A loss or gradient became non-finite during training."""

    def __init__(
        self, message: str, epoch: int | None = None, step: int | None = None
    ) -> None:
        super().__init__(message)
        self.epoch = epoch
        self.step = step
