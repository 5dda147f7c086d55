class GrandeError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(GrandeError, ValueError):
    pass


class InvariantError(GrandeError, ValueError):
    pass


class ParseError(GrandeError, ValueError):
    pass


class TrainingDivergenceError(GrandeError, RuntimeError):
    def __init__(self, epoch, loss):
        super().__init__(f"non-finite training loss {loss!r} at epoch {epoch}")
        self.epoch = epoch
        self.loss = loss
