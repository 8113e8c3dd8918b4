"""Semantic values produced by valuation functions.

Each kind is its own frozen dataclass so that ``Int(3) != Wide(3)``; the
kinds mirror the domains used by the arithmetic and parking examples
(plain integers, millisecond quantities, prices, strings and flags).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class Int:
    value: int

    def render(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Wide:
    """64-bit quantity with a duration/epoch role (milliseconds)."""

    value: int

    def render(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Real:
    value: float

    def render(self) -> str:
        return repr(float(self.value))


@dataclass(frozen=True)
class Text:
    value: str

    def render(self) -> str:
        return self.value


@dataclass(frozen=True)
class Bool:
    value: bool

    def render(self) -> str:
        return "true" if self.value else "false"


SemValue = Int | Wide | Real | Text | Bool

KIND_NAMES = {Int: "int", Wide: "wide", Real: "real", Text: "text", Bool: "bool"}
_BY_NAME = {v: k for k, v in KIND_NAMES.items()}


def render_text(value: SemValue) -> str:
    """Rendering used when a value is embedded into generated test text.

    Reals are prices in every shipped domain, so they print with two decimals.
    """
    if isinstance(value, Real):
        return f"{value.value:.2f}"
    return value.render()


def kind_name(value: SemValue) -> str:
    return KIND_NAMES[type(value)]


def to_record(value: SemValue | None) -> dict | None:
    if value is None:
        return None
    return {"kind": kind_name(value), "value": value.render()}


def from_record(record: dict | None) -> SemValue | None:
    if record is None:
        return None
    cls = _BY_NAME[record["kind"]]
    raw = record["value"]
    if cls in (Int, Wide):
        return cls(int(raw))
    if cls is Real:
        return Real(float(raw))
    if cls is Bool:
        return Bool(raw == "true")
    return Text(raw)


_INT_RE = re.compile(r"-?\d+\Z")


def constant(token: str) -> SemValue:
    """Value of a constant singleton written in a semantic term."""
    if _INT_RE.match(token):
        return Int(int(token))
    if token in ("true", "false"):
        return Bool(token == "true")
    try:
        return Real(float(token)) if "." in token else Text(token)
    except ValueError:
        return Text(token)
