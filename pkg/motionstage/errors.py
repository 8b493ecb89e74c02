"""Error types.

Every failure the library can signal is a ``MotionStageError`` carrying a
human-readable ``detail``; the CLI maps them to exit codes.
"""

from typing import Optional


class MotionStageError(Exception):
    """Base error with a machine-readable code and a detail message."""

    code = "motionstage_error"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class LengthMismatch(MotionStageError):
    code = "length_mismatch"


class TooShort(MotionStageError):
    code = "too_short"


class BadLength(MotionStageError):
    code = "bad_length"


class IndexOutOfRange(MotionStageError):
    code = "index_out_of_range"


class EmptyInput(MotionStageError):
    code = "empty_input"


class PointOnSurface(MotionStageError):
    code = "point_on_surface"


class BadParams(MotionStageError):
    code = "bad_params"


class OutOfBounds(MotionStageError):
    code = "out_of_bounds"


class FpsMismatch(MotionStageError):
    code = "fps_mismatch"


class MarkerMismatch(MotionStageError):
    code = "marker_mismatch"


class HhiCountMismatch(MotionStageError):
    code = "hhi_count_mismatch"


class DegenerateInterval(MotionStageError):
    code = "degenerate_interval"


class DimensionMismatch(MotionStageError):
    code = "dimension_mismatch"


class EmptyIndex(MotionStageError):
    code = "empty_index"


class InvalidQuery(MotionStageError):
    code = "invalid_query"


class NoWalkableCell(MotionStageError):
    code = "no_walkable_cell"


class Unreachable(MotionStageError):
    code = "unreachable"


class ClientError(MotionStageError):
    code = "client_error"


class GrammarError(MotionStageError):
    """Malformed order text; ``line`` and ``column`` are 1-based."""

    code = "grammar_error"

    def __init__(self, detail: str, line: int, column: int):
        super().__init__(f"{detail} (line {line}, column {column})")
        self.line = line
        self.column = column


class FormatError(MotionStageError):
    """A file did not follow its documented format."""

    code = "format_error"

    def __init__(self, detail: str, path: Optional[str] = None, line: Optional[int] = None):
        where = ""
        if path is not None:
            where = f" in {path}" + (f":{line}" if line is not None else "")
        super().__init__(f"{detail}{where}")
        self.path = path
        self.line = line


class ConfigError(MotionStageError):
    """A configuration file or option could not be turned into a valid configuration."""

    code = "config_error"


class PipelineStageError(MotionStageError):
    """A pipeline stage failed; ``stage`` names it and ``cause`` is the original error."""

    code = "pipeline_stage_error"

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_DOMAIN = 4


def exit_code(exc: MotionStageError) -> int:
    """Process exit status for a failed command."""
    if isinstance(exc, ConfigError):
        return EXIT_USAGE
    if isinstance(exc, (FormatError, GrammarError)):
        return EXIT_FORMAT
    return EXIT_DOMAIN
