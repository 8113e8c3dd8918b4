"""Semantic domain for the airport parking calculator.

Durations and timestamps are milliseconds (``Wide``) on a fixed proleptic
Gregorian calendar starting 2014-01-01 00:00, with no time zone or DST.
Fees are computed in integer cents and exposed as ``Real`` dollars.

Fee rule, per lot: the stay is rounded up to half hours; within each 24 h
block every full hour costs the hourly rate and a trailing half hour the
half-hour rate, capped at the daily maximum; the sum over each 7-day block
is capped at the weekly maximum.  Non-positive stays cost nothing.
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from importlib import resources
from pathlib import Path

from .errors import EvalError
from .semantics import Domain, register_domain
from .values import Bool, Int, Real, Text, Wide

LOTS = ("short", "economy", "surface", "valet", "garage")
HALF_HOUR_MS = 30 * 60 * 1000
TICKS_PER_DAY = 48
TICKS_PER_WEEK = 7 * TICKS_PER_DAY
EPOCH = dt.datetime(2014, 1, 1)


@dataclass(frozen=True)
class LotRates:
    halfhour: int  # all in cents
    hour: int
    daymax: int
    weekmax: int


@dataclass(frozen=True)
class RateTable:
    lots: dict[str, LotRates]

    def __getitem__(self, lot: str) -> LotRates:
        return self.lots[lot]


_KEY_RE = re.compile(r"(?P<lot>[a-z]+)\.(?P<field>halfhour|hour|daymax|weekmax)\Z")


def parse_rates(text: str) -> RateTable:
    """Read ``<lot>.<field> = <dollars>`` lines (``#`` comments allowed)."""
    raw: dict[str, dict[str, int]] = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            key, sep, value = line.partition(":")
        m = _KEY_RE.match(key.strip())
        if not sep or not m:
            raise ValueError(f"rates line {n}: expected '<lot>.<field> = <dollars>', got {line!r}")
        try:
            cents = Decimal(value.strip()) * 100
        except InvalidOperation:
            raise ValueError(f"rates line {n}: bad amount {value.strip()!r}") from None
        if cents != cents.to_integral_value() or cents < 0:
            raise ValueError(f"rates line {n}: amount must be a non-negative whole number of cents")
        raw.setdefault(m.group("lot"), {})[m.group("field")] = int(cents)
    lots = {}
    for lot, fields in raw.items():
        missing = {"halfhour", "hour", "daymax", "weekmax"} - fields.keys()
        if missing:
            raise ValueError(f"rates for {lot!r} lack {sorted(missing)}")
        lots[lot] = LotRates(**fields)
    return RateTable(lots)


def load_rates(path: str | Path) -> RateTable:
    return parse_rates(Path(path).read_text(encoding="utf-8"))


def default_rates_path() -> Path:
    return Path(str(resources.files("gramtao.corpus").joinpath("rates.cfg")))


def default_rates() -> RateTable:
    return load_rates(default_rates_path())


def fee_cents(rates: RateTable, lot: str, duration_ms: int) -> int:
    if duration_ms <= 0:
        return 0
    r = rates[lot]
    ticks = -(-duration_ms // HALF_HOUR_MS)

    def day(t: int) -> int:
        hours, half = divmod(t, 2)
        return min(hours * r.hour + half * r.halfhour, r.daymax)

    def week(t: int) -> int:
        days, rest = divmod(t, TICKS_PER_DAY)
        return min(days * day(TICKS_PER_DAY) + day(rest), r.weekmax)

    weeks, rest = divmod(ticks, TICKS_PER_WEEK)
    return weeks * week(TICKS_PER_WEEK) + week(rest)


def _need(op: str, value, *kinds):
    if not isinstance(value, kinds):
        names = "/".join(k.__name__ for k in kinds)
        raise EvalError(op, f"expected {names}, got {type(value).__name__}")
    return value.value


def _parse_triple(op: str, text: str) -> tuple[int, int, int]:
    parts = text.split("/")
    if len(parts) != 3 or not all(p.lstrip("-").isdigit() for p in parts):
        raise EvalError(op, f"malformed value {text!r}")
    return int(parts[0]), int(parts[1]), int(parts[2])


def builtin_domain_parking(rates: RateTable | None = None) -> Domain:
    rates = rates if rates is not None else default_rates()
    dom = Domain("parking")

    @dom.operation("time", 2)
    def time(hour, minute):
        h, m = _need("time", hour, Int), _need("time", minute, Int)
        if not 1 <= h <= 12:
            raise EvalError("time", f"hour {h} outside 1..12")
        if not 0 <= m <= 59:
            raise EvalError("time", f"minute {m} outside 0..59")
        return Text(f"{h}/{m}/00")

    @dom.operation("time24Fmt", 2)
    def time24(ampm, t):
        if isinstance(ampm, Text) and ampm.value.lower() in ("am", "pm"):
            pm = ampm.value.lower() == "pm"
        else:
            pm = _need("time24Fmt", ampm, Bool)
        h, m, s = _parse_triple("time24Fmt", _need("time24Fmt", t, Text))
        if not 1 <= h <= 12:
            raise EvalError("time24Fmt", f"hour {h} outside 1..12")
        return Text(f"{h % 12 + (12 if pm else 0)}/{m}/{s:02d}")

    @dom.operation("date", 3)
    def date(month, day, year):
        mo, d, y = (_need("date", v, Int) for v in (month, day, year))
        if not 1 <= mo <= 12:
            raise EvalError("date", f"month {mo} outside 1..12")
        try:
            dt.date(y, mo, d)
        except ValueError as exc:
            raise EvalError("date", str(exc)) from None
        return Text(f"{mo}/{d}/{y}")

    @dom.operation("simpleFmt", 2)
    def simple_fmt(t, date_text):
        h, m, s = _parse_triple("simpleFmt", _need("simpleFmt", t, Text))
        mo, d, y = _parse_triple("simpleFmt", _need("simpleFmt", date_text, Text))
        try:
            stamp = dt.datetime(y, mo, d, h, m, s)
        except ValueError as exc:
            raise EvalError("simpleFmt", str(exc)) from None
        delta = stamp - EPOCH
        return Wide((delta.days * 86400 + delta.seconds) * 1000)

    @dom.operation("sfSub", 2)
    def sf_sub(exit_, entry):
        return Wide(_need("sfSub", exit_, Wide) - _need("sfSub", entry, Wide))

    @dom.operation("price", 2)
    def price(lot, duration):
        name = _need("price", lot, Text)
        if name not in rates.lots:
            raise EvalError("price", f"unknown lot type {name!r}")
        return Real(fee_cents(rates, name, _need("price", duration, Wide)) / 100)

    @dom.operation("priceLog", (1, 2))
    def price_log(first, rest=None):
        """Space-separated ``$D.DD`` list of round results, in script order."""
        head = f"${_need('priceLog', first, Real):.2f}"
        if rest is None:
            return Text(head)
        if isinstance(rest, Real):
            return Text(f"{head} ${rest.value:.2f}")
        return Text(f"{head} {_need('priceLog', rest, Text)}")

    return dom


register_domain("parking", builtin_domain_parking)
