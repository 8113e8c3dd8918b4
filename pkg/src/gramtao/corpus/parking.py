"""Airport parking calculator driven by a small command script.

Standalone: ``python -S parking.py [--rates FILE] [--faults a,b]`` reads a
script on stdin.  Commands, one per line::

    lot <short|economy|surface|valet|garage>
    entry M/D/YYYY H:MM am|pm
    exit  M/D/YYYY H:MM am|pm
    calc                      prints $D.DD for the current settings
    expect <anything>         ignored (the tester's own assertion)

After the last line, if more than one ``calc`` ran, a summary line with all
results separated by spaces is printed.  With no faults this is the
reference calculator (P0); fault flags turn it into P1:

    weekly          garage/surface/economy ignore the weekly maximum
    daily           garage/surface/economy ignore the daily maximum
    negative        garage/surface/economy charge |exit - entry|
    short_daily     short-term ignores the daily maximum
    short_halfhour  short-term charges a trailing half hour as a full hour
    valet_negative  valet charges |exit - entry|
"""

from __future__ import annotations

import datetime as dt
import os
import re
import sys
from dataclasses import dataclass

FAULTS = ("weekly", "daily", "negative", "short_daily", "short_halfhour", "valet_negative")
LOTS = ("short", "economy", "surface", "valet", "garage")
CAPPED_LOTS = ("garage", "surface", "economy")
HALF_HOUR = dt.timedelta(minutes=30)

_STAMP = re.compile(r"(\d{1,2})/(\d{1,2})/(\d{4})\s+(\d{1,2}):(\d{1,2})\s*(am|pm)\Z", re.I)


class ScriptError(Exception):
    pass


@dataclass(frozen=True)
class Rates:
    halfhour: int
    hour: int
    daymax: int
    weekmax: int


def read_rates(path: str) -> dict[str, Rates]:
    fields: dict[str, dict[str, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, amount = line.partition("=")
            lot, _, field = key.strip().partition(".")
            dollars, _, cents = amount.strip().partition(".")
            fields.setdefault(lot, {})[field] = int(dollars) * 100 + int((cents + "00")[:2])
    return {lot: Rates(**f) for lot, f in fields.items()}


def default_rates_file() -> str:
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), "rates.cfg")


def parse_stamp(text: str) -> dt.datetime:
    m = _STAMP.match(text.strip())
    if not m:
        raise ScriptError(f"bad date/time {text.strip()!r}")
    month, day, year, hour, minute = (int(g) for g in m.groups()[:5])
    if not 1 <= hour <= 12 or not 0 <= minute <= 59:
        raise ScriptError(f"bad time {text.strip()!r}")
    hour = hour % 12 + (12 if m.group(6).lower() == "pm" else 0)
    try:
        return dt.datetime(year, month, day, hour, minute)
    except ValueError as exc:
        raise ScriptError(str(exc)) from None


def fee(rates: dict[str, Rates], lot: str, stay: dt.timedelta, faults=frozenset()) -> int:
    """Fee in cents for one stay, with the given fault flags active."""
    r = rates[lot]
    absolute = ("negative" in faults and lot in CAPPED_LOTS) or ("valet_negative" in faults and lot == "valet")
    if stay < dt.timedelta(0):
        if not absolute:
            return 0
        stay = -stay
    day_cap = not (("daily" in faults and lot in CAPPED_LOTS) or ("short_daily" in faults and lot == "short"))
    week_cap = not ("weekly" in faults and lot in CAPPED_LOTS)
    half_rate = r.hour if ("short_halfhour" in faults and lot == "short") else r.halfhour

    halves = -(-stay // HALF_HOUR)
    total = 0
    while halves > 0:
        week_halves = min(halves, 7 * 48)
        halves -= week_halves
        week = 0
        while week_halves > 0:
            day_halves = min(week_halves, 48)
            week_halves -= day_halves
            day = (day_halves // 2) * r.hour + (day_halves % 2) * half_rate
            week += min(day, r.daymax) if day_cap else day
        total += min(week, r.weekmax) if week_cap else week
    return total


def dollars(cents: int) -> str:
    return f"${cents // 100}.{cents % 100:02d}"


def run_script(text: str, rates: dict[str, Rates], faults=frozenset()) -> list[str]:
    """Results of every ``calc`` in order; raises ScriptError on bad input."""
    lot = entry = exit_ = None
    results = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        word = word.lower()
        if word == "lot":
            lot = rest.strip().lower()
            if lot not in rates:
                raise ScriptError(f"line {n}: unknown lot {lot!r}")
        elif word == "entry":
            entry = parse_stamp(rest)
        elif word == "exit":
            exit_ = parse_stamp(rest)
        elif word == "calc":
            if lot is None or entry is None or exit_ is None:
                raise ScriptError(f"line {n}: calc before lot, entry and exit are set")
            results.append(dollars(fee(rates, lot, exit_ - entry, faults)))
        elif word != "expect":
            raise ScriptError(f"line {n}: unknown command {word!r}")
    return results


def respond(text: str, rates: dict[str, Rates], faults=frozenset()) -> tuple[str, int]:
    try:
        results = run_script(text, rates, faults)
    except ScriptError as exc:
        return f"error: {exc}\n", 2
    lines = list(results)
    if len(results) > 1:
        lines.append(" ".join(results))
    return "".join(line + "\n" for line in lines), 0


def main(argv=None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    rates_path = default_rates_file()
    faults: set[str] = set()
    files = []
    while args:
        arg = args.pop(0)
        if arg == "--rates" and args:
            rates_path = args.pop(0)
        elif arg == "--faults" and args:
            faults.update(f for f in args.pop(0).split(",") if f)
        else:
            files.append(arg)
    unknown = faults - set(FAULTS)
    if unknown:
        sys.stderr.write(f"unknown faults: {sorted(unknown)}\n")
        return 2
    text = open(files[0], encoding="utf-8").read() if files else sys.stdin.read()
    out, status = respond(text, read_rates(rates_path), frozenset(faults))
    (sys.stdout if status == 0 else sys.stderr).write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
