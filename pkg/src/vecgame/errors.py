"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed user input: bad dimensions, weights, steps, or files."""


class NumericalError(RuntimeError):
    """A numerical routine failed: iteration caps, degenerate geometry."""
