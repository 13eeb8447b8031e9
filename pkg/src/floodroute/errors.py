"""Exception hierarchy.

Everything raised on purpose derives from FloodRouteError so callers can
catch one base type; parse/validation failures carry enough context
(path, line numbers) to be actionable.
"""

from __future__ import annotations


class FloodRouteError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FloodRouteError):
    """A domain value or parameter violates its documented bounds."""


class GridIndexError(FloodRouteError):
    """A (row, col) index lies outside the grid."""


class NotCoveredError(FloodRouteError):
    """An elevation provider has no value for the queried point."""


class OutsideFootprintError(NotCoveredError):
    """A point lies outside a grid's footprint."""


class NodataElevationError(NotCoveredError):
    """Elevation at the queried point is a nodata cell."""


class FileAccessError(FloodRouteError):
    """A file could not be opened for reading or writing."""


class FormatError(FloodRouteError):
    """A file or document failed to parse or violated its schema."""

    def __init__(self, message: str, *, path: str | None = None,
                 line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class CsvValidationError(FormatError):
    """One or more CSV rows were invalid; carries per-row diagnostics."""

    def __init__(self, path: str | None, row_errors: list[tuple[int, str]]):
        self.row_errors = list(row_errors)
        detail = "; ".join(f"line {n}: {msg}" for n, msg in self.row_errors)
        super().__init__(f"{len(self.row_errors)} invalid row(s): {detail}",
                         path=path)


class ProviderUnavailableError(FloodRouteError):
    """A remote elevation provider stayed unreachable after retries."""


class ProtocolError(FloodRouteError):
    """A remote elevation provider returned a malformed response."""
