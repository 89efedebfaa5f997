"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2, ImageIOError -> 3,
ProcessingError (and plain ValueError from validation) -> 4.
"""


class LanepostError(Exception):
    pass


class ConfigError(LanepostError):
    """Bad configuration value, file, or parameter set."""


class ImageIOError(LanepostError):
    """Unreadable or unsupported image file."""

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = str(path)
        self.reason = reason


class FileFormatError(LanepostError):
    """Unreadable or malformed text artifact (lane or truth file)."""

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = str(path)
        self.reason = reason


class ProcessingError(LanepostError):
    """A pipeline stage could not produce a valid result."""


class CalibrationError(ProcessingError):
    """Degenerate point correspondence; no homography exists."""


class ProjectionError(ProcessingError):
    """Point maps to (or too close to) projective infinity."""


class DegenerateGeometryError(ProcessingError):
    """Input geometry outside the operating envelope, e.g. a multi-point
    lane marking whose pixels all share one y value."""
