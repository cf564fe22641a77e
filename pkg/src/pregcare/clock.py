"""Injectable clock so every timestamp in the system is testable."""

from __future__ import annotations

import datetime as dt


def iso(ts: dt.datetime) -> str:
    """Render a UTC datetime as `YYYY-MM-DDTHH:MM:SS[.ffffff]Z`."""
    if ts.tzinfo is not None:
        ts = ts.astimezone(dt.timezone.utc).replace(tzinfo=None)
    return ts.isoformat() + "Z"


def parse_iso(text: str) -> dt.datetime:
    """Parse an ISO-8601 timestamp into a naive UTC datetime."""
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1]
    ts = dt.datetime.fromisoformat(text)
    if ts.tzinfo is not None:
        ts = ts.astimezone(dt.timezone.utc).replace(tzinfo=None)
    return ts


class SystemClock:
    def now(self) -> dt.datetime:
        return dt.datetime.utcnow()

    def today(self) -> dt.date:
        return self.now().date()


class ManualClock:
    """Test clock: starts at a fixed instant, advances only on demand."""

    def __init__(self, start: dt.datetime):
        self._now = start

    def now(self) -> dt.datetime:
        return self._now

    def today(self) -> dt.date:
        return self._now.date()

    def advance(self, seconds: float = 0.0, days: int = 0) -> None:
        self._now += dt.timedelta(seconds=seconds, days=days)

    def set(self, instant: dt.datetime) -> None:
        self._now = instant
