"""RFC 3339 timestamp parsing/formatting (UTC-normalized)."""

from __future__ import annotations

from datetime import datetime, timezone

from .errors import FormatError


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC 3339 timestamp; the offset is required."""
    if not isinstance(value, str):
        raise FormatError(f"timestamp must be a string, got {type(value).__name__}")
    text = value.strip()
    # datetime.fromisoformat on 3.10 does not accept the Z suffix.
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError:
        raise FormatError(f"invalid RFC 3339 timestamp: {value!r}") from None
    if parsed.tzinfo is None:
        raise FormatError(f"timestamp {value!r} lacks a UTC offset")
    return parsed.astimezone(timezone.utc)


def format_rfc3339(dt: datetime) -> str:
    """Format an aware datetime as RFC 3339 in UTC with a Z suffix."""
    if dt.tzinfo is None:
        raise FormatError("naive datetimes cannot be formatted as RFC 3339")
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")
