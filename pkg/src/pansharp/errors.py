"""Exception types shared across the package."""


class FormatError(ValueError):
    """A binary payload (FBANK1, RAWTEN, image file) failed to parse."""


class MetricError(ValueError):
    """A metric's input is degenerate (e.g. zero-variance high-pass plane)."""
