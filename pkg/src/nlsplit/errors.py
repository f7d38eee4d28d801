"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its admissible range."""


class InputShapeError(ValueError):
    """An array does not have the length implied by the mode count."""


class DivergenceError(RuntimeError):
    """A time integration produced non-finite values or exploded in mass."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"divergence detected at step {step}")
