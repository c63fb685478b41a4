class LaneKitError(Exception):
    """Base class for all lanekit errors."""


class InvalidLaneError(LaneKitError, ValueError):
    pass


class LaneFileError(LaneKitError, ValueError):
    """Malformed lane annotation text. ``lineno`` is 1-based."""

    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class DatasetError(LaneKitError):
    """Prediction and ground-truth trees disagree, or a listed file is missing."""
