"""Time-expression normalization and anchor comparison.

Surfaces are normalized into one of four anchor shapes: absolute calendar
points (year / year-month / year-month-day), offsets relative to the
document creation time, durations, and an unresolved catch-all.  The
pattern table that drives recognition is plain text and swappable per
locale (see docs/locale-table.md); an English table ships as package data.
"""

from __future__ import annotations

import datetime as dt
import os
import re
from dataclasses import dataclass
from enum import Enum, IntEnum
from importlib import resources
from pathlib import Path
from typing import Union

from .model import TimexType


class Granularity(IntEnum):
    YEAR = 0
    MONTH = 1
    DAY = 2


class TimeUnit(str, Enum):
    DAY = "day"
    WEEK = "week"
    MONTH = "month"
    YEAR = "year"


_MDAYS = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


def _is_leap(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def _days_in_month(year: int, month: int) -> int:
    if month == 2 and _is_leap(year):
        return 29
    return _MDAYS[month - 1]


@dataclass(frozen=True)
class AbsoluteAnchor:
    """A calendar point at year, month, or day granularity."""

    year: int
    month: int | None = None
    day: int | None = None

    def __post_init__(self):
        if not 1 <= self.year <= 9999:
            raise ValueError(f"year {self.year} out of range")
        if self.month is None:
            if self.day is not None:
                raise ValueError("day requires month")
        elif not 1 <= self.month <= 12:
            raise ValueError(f"month {self.month} out of range")
        if self.day is not None and not 1 <= self.day <= _days_in_month(self.year, self.month):
            raise ValueError(f"day {self.day} out of range for {self.year}-{self.month:02d}")

    @property
    def granularity(self) -> Granularity:
        if self.day is not None:
            return Granularity.DAY
        if self.month is not None:
            return Granularity.MONTH
        return Granularity.YEAR

    def iso(self) -> str:
        """Partial ISO form at this anchor's granularity."""
        if self.day is not None:
            return f"{self.year:04d}-{self.month:02d}-{self.day:02d}"
        if self.month is not None:
            return f"{self.year:04d}-{self.month:02d}"
        return f"{self.year:04d}"

    @classmethod
    def from_date(cls, d: dt.date) -> "AbsoluteAnchor":
        return cls(d.year, d.month, d.day)


@dataclass(frozen=True)
class RelativeAnchor:
    """A signed offset from the document creation time (weeks become days)."""

    amount: int
    unit: TimeUnit

    def __post_init__(self):
        if self.unit is TimeUnit.WEEK:
            raise ValueError("relative anchors store weeks as day offsets")


@dataclass(frozen=True)
class DurationAnchor:
    """A length of time with no fixed position."""

    amount: int
    unit: TimeUnit


@dataclass(frozen=True)
class UnresolvedAnchor:
    """A surface the normalizer could not interpret."""

    surface: str


TimeAnchor = Union[AbsoluteAnchor, RelativeAnchor, DurationAnchor, UnresolvedAnchor]


class AnchorOrder(Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def _add_months(base: dt.date, months: int) -> dt.date:
    total = base.year * 12 + (base.month - 1) + months
    year, month0 = divmod(total, 12)
    month = month0 + 1
    day = min(base.day, _days_in_month(year, month))
    return dt.date(year, month, day)


def resolve_anchor(anchor: TimeAnchor, dct: dt.date) -> AbsoluteAnchor | None:
    """Pin an anchor to the calendar; ``None`` when it has no fixed position.

    Relative anchors resolve at day granularity: month and year offsets use
    calendar arithmetic with end-of-month clamping (e.g. one month after
    January 31st is the last day of February).
    """
    if isinstance(anchor, AbsoluteAnchor):
        return anchor
    if isinstance(anchor, RelativeAnchor):
        if anchor.unit is TimeUnit.DAY:
            resolved = dct + dt.timedelta(days=anchor.amount)
        elif anchor.unit is TimeUnit.MONTH:
            resolved = _add_months(dct, anchor.amount)
        else:
            resolved = _add_months(dct, 12 * anchor.amount)
        return AbsoluteAnchor.from_date(resolved)
    return None


def compare_anchors(a: TimeAnchor, b: TimeAnchor, dct: dt.date) -> AnchorOrder:
    """Order two anchors at the coarsest granularity they share.

    Anchors that agree at the shared level but differ in precision (say,
    2021-03 versus 2021-03-10) are incomparable rather than forced into an
    order; durations and unresolved anchors are incomparable to everything.
    """
    ra = resolve_anchor(a, dct)
    rb = resolve_anchor(b, dct)
    if ra is None or rb is None:
        return AnchorOrder.INCOMPARABLE
    level = min(ra.granularity, rb.granularity)
    ta = (ra.year, ra.month, ra.day)[: level + 1]
    tb = (rb.year, rb.month, rb.day)[: level + 1]
    if ta < tb:
        return AnchorOrder.LESS
    if ta > tb:
        return AnchorOrder.GREATER
    if ra.granularity == rb.granularity:
        return AnchorOrder.EQUAL
    return AnchorOrder.INCOMPARABLE


# --------------------------------------------------------------------------
# Locale pattern table


_NUMBER_WORDS = {
    "a": 1, "an": 1, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11,
    "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15, "sixteen": 16,
    "seventeen": 17, "eighteen": 18, "nineteen": 19, "twenty": 20,
}

_MONTH_WORDS = {
    name[:3]: i + 1
    for i, name in enumerate(
        ["january", "february", "march", "april", "may", "june", "july",
         "august", "september", "october", "november", "december"]
    )
}


def _conv_int(raw: str) -> int:
    return int(raw)


def _conv_num(raw: str) -> int:
    raw = raw.lower()
    if raw in _NUMBER_WORDS:
        return _NUMBER_WORDS[raw]
    return int(raw)


def _conv_month(raw: str) -> int:
    key = raw.lower().rstrip(".")[:3]
    if key not in _MONTH_WORDS:
        raise ValueError(f"unknown month name {raw!r}")
    return _MONTH_WORDS[key]


def _conv_unit(raw: str) -> TimeUnit:
    return TimeUnit(raw.lower().rstrip("s"))


_CONVERTERS = {"int": _conv_int, "num": _conv_num, "month": _conv_month, "unit": _conv_unit}
_RULE_KINDS = ("absolute", "relative", "duration")


@dataclass(frozen=True)
class PatternRule:
    kind: str
    regex: re.Pattern
    assigns: tuple[tuple[str, str], ...]


class LocaleTable:
    """An ordered list of regex -> anchor-template rules."""

    def __init__(self, rules: list[PatternRule]):
        self.rules = list(rules)

    @classmethod
    def from_text(cls, text: str, origin: str = "<string>") -> "LocaleTable":
        rules = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"{origin}:{lineno}: expected 3 tab-separated fields, got {len(fields)}")
            kind, pattern, assigns_raw = fields
            if kind not in _RULE_KINDS:
                raise ValueError(f"{origin}:{lineno}: unknown rule kind {kind!r}")
            try:
                regex = re.compile(pattern, re.IGNORECASE)
            except re.error as exc:
                raise ValueError(f"{origin}:{lineno}: bad regex: {exc}") from exc
            assigns = []
            for token in assigns_raw.split():
                field, sep, value = token.partition("=")
                if not sep:
                    raise ValueError(f"{origin}:{lineno}: assignment {token!r} is not field=value")
                assigns.append((field, value))
            rules.append(PatternRule(kind, regex, tuple(assigns)))
        return cls(rules)

    @classmethod
    def from_path(cls, path: str | Path) -> "LocaleTable":
        path = Path(path)
        return cls.from_text(path.read_text(encoding="utf-8"), origin=str(path))


def _eval_assign(value: str, match: re.Match, dct: dt.date):
    if value == "@dct":
        return dct.year
    try:
        return int(value)
    except ValueError:
        pass
    group, sep, conv_name = value.partition(":")
    if group in match.re.groupindex:
        conv = _CONVERTERS[conv_name] if sep else _conv_int
        raw = match.group(group)
        if raw is None:
            raise ValueError(f"group {group!r} did not participate in the match")
        return conv(raw)
    return value  # plain literal, e.g. unit=day


def _apply_rule(rule: PatternRule, match: re.Match, dct: dt.date) -> TimeAnchor:
    fields = {name: _eval_assign(value, match, dct) for name, value in rule.assigns}
    if rule.kind == "absolute":
        return AbsoluteAnchor(year=fields["year"], month=fields.get("month"), day=fields.get("day"))
    amount = fields["amount"]
    unit = fields["unit"] if isinstance(fields["unit"], TimeUnit) else TimeUnit(fields["unit"])
    if rule.kind == "relative":
        sign = fields.get("sign", 1)
        if unit is TimeUnit.WEEK:
            amount, unit = amount * 7, TimeUnit.DAY
        return RelativeAnchor(sign * amount, unit)
    return DurationAnchor(amount, unit)


_default_table: LocaleTable | None = None


def default_locale_table() -> LocaleTable:
    """The packaged English table, loaded once."""
    global _default_table
    if _default_table is None:
        text = resources.files("heart").joinpath("data/locale_en.txt").read_text(encoding="utf-8")
        _default_table = LocaleTable.from_text(text, origin="locale_en.txt")
    return _default_table


def locale_table_from_env() -> LocaleTable:
    """The table named by ``HEART_LOCALE_TABLE``, or the packaged default."""
    path = os.environ.get("HEART_LOCALE_TABLE")
    return LocaleTable.from_path(path) if path else default_locale_table()


#: Rule kinds consulted per timex type; anything else is always unresolved.
_SCOPES = {
    TimexType.DATE: ("absolute", "relative"),
    TimexType.DURATION: ("duration",),
}


def normalize_timex(
    surface: str,
    timex_type: TimexType,
    dct: dt.date,
    table: LocaleTable | None = None,
) -> TimeAnchor:
    """Normalize a time-expression surface into a :class:`TimeAnchor`.

    Total: anything unrecognized (including every set/medical/misc/age/time
    expression) comes back as :class:`UnresolvedAnchor` rather than an error.
    """
    scope = _SCOPES.get(timex_type)
    if scope is None:
        return UnresolvedAnchor(surface)
    table = table or default_locale_table()
    stripped = surface.strip()
    for rule in table.rules:
        if rule.kind not in scope:
            continue
        match = rule.regex.fullmatch(stripped)
        if match is None:
            continue
        try:
            return _apply_rule(rule, match, dct)
        except ValueError:
            continue  # e.g. February 30th: pattern matched, calendar said no
    return UnresolvedAnchor(surface)
