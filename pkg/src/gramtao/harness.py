"""Running artifacts against systems under test and judging the answers.

Wire protocol: the artifact text plus one newline goes to the SUT's stdin
(or into a temporary file passed as the last argument); the last non-empty
stdout line is the actual result; a nonzero exit status is a crash.
"""

from __future__ import annotations

import math
import os
import re
import subprocess
import sys
import tempfile
import threading
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from importlib import resources
from itertools import product
from pathlib import Path
from typing import Callable, Protocol

from .corpus import arith as corpus_arith
from .corpus import parking as corpus_parking
from .errors import HarnessError
from .semantics import TestArtifact
from .values import Bool, Int, Real, SemValue, Wide, render_text


# --------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Pass:
    failure_class = None


@dataclass(frozen=True)
class OracleMismatch:
    actual: str
    expected: SemValue
    failure_class = "OracleMismatch"


@dataclass(frozen=True)
class SutCrash:
    exit_status: int
    stderr: str = ""
    failure_class = "SutCrash"


@dataclass(frozen=True)
class SutTimeout:
    timeout_ms: int
    failure_class = "SutTimeout"


Verdict = Pass | OracleMismatch | SutCrash | SutTimeout

_INT_RE = re.compile(r"[+-]?\d+\Z")


def consistent(actual: str, expected: SemValue, currency: bool = False) -> bool:
    """Does the SUT's answer agree with the oracle?"""
    actual = actual.strip()
    if isinstance(expected, (Int, Wide)):
        return bool(_INT_RE.match(actual)) and int(actual) == expected.value
    if isinstance(expected, Real):
        text = actual[1:] if currency and actual.startswith("$") else actual
        try:
            got = float(text)
        except ValueError:
            return False
        if not math.isfinite(got):
            return False
        if currency:
            try:
                return Decimal(text).quantize(Decimal("0.01")) == Decimal(f"{expected.value:.2f}")
            except InvalidOperation:
                return False
        return abs(got - expected.value) <= max(1e-9, 1e-9 * abs(expected.value))
    if isinstance(expected, Bool):
        return actual == expected.render()
    return actual == expected.value.strip()


def last_line(stdout: str) -> str:
    for line in reversed(stdout.splitlines()):
        if line.strip():
            return line.strip()
    return ""


def judge(stdout: str, returncode: int, expected: SemValue, currency: bool = False, stderr: str = "") -> Verdict:
    if returncode != 0:
        return SutCrash(returncode, stderr)
    actual = last_line(stdout)
    return Pass() if consistent(actual, expected, currency) else OracleMismatch(actual, expected)


# --------------------------------------------------------------------------
# running external SUTs


@dataclass(frozen=True)
class SutSpec:
    command: tuple[str, ...]
    input_mode: str = "stdin"
    timeout_ms: int = 10_000
    serial: bool = False
    name: str = ""

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")
        if self.input_mode not in ("stdin", "file-arg"):
            raise ValueError(f"unknown input mode {self.input_mode!r}")
        if not self.command:
            raise ValueError("empty SUT command")

    @property
    def label(self) -> str:
        return self.name or " ".join(self.command)


_SERIAL_LOCK = threading.Lock()


def _execute(sut: SutSpec, text: str) -> subprocess.CompletedProcess | None:
    payload = text + "\n"
    cmd = list(sut.command)
    tmp = None
    try:
        if sut.input_mode == "file-arg":
            fd, tmp = tempfile.mkstemp(suffix=".txt", prefix="gramtao-")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(payload)
            cmd.append(tmp)
            payload = ""
        return subprocess.run(cmd, input=payload, capture_output=True, text=True,
                              timeout=sut.timeout_ms / 1000)
    except subprocess.TimeoutExpired:
        return None
    except OSError as exc:
        raise HarnessError(f"cannot run {sut.label!r}: {exc}") from exc
    finally:
        if tmp is not None:
            os.unlink(tmp)


def run_text(sut: SutSpec, text: str, expected: SemValue, currency: bool = False) -> Verdict:
    if sut.serial:
        with _SERIAL_LOCK:
            proc = _execute(sut, text)
    else:
        proc = _execute(sut, text)
    if proc is None:
        return SutTimeout(sut.timeout_ms)
    return judge(proc.stdout, proc.returncode, expected, currency, proc.stderr)


def run_one(sut: SutSpec, artifact: TestArtifact, currency: bool = False) -> Verdict:
    if artifact.oracle is None:
        raise HarnessError(f"artifact has no oracle: {artifact.error}")
    return run_text(sut, artifact.text, artifact.oracle, currency)


# --------------------------------------------------------------------------
# checkers: (text, oracle) -> Verdict


class Checker(Protocol):
    def __call__(self, text: str, oracle: SemValue) -> Verdict: ...


@dataclass
class SutChecker:
    sut: SutSpec
    currency: bool = False

    def __call__(self, text: str, oracle: SemValue) -> Verdict:
        return run_text(self.sut, text, oracle, self.currency)


@dataclass
class FunctionChecker:
    """In-process SUT: ``respond(text) -> (stdout, exit status)``."""

    respond: Callable[[str], tuple[str, int]]
    currency: bool = False
    name: str = ""

    def __call__(self, text: str, oracle: SemValue) -> Verdict:
        stdout, status = self.respond(text + "\n")
        return judge(stdout, status, oracle, self.currency)


@dataclass
class CachingChecker:
    """Memoizes verdicts by (text, oracle); SUTs are pure functions of their input."""

    inner: Callable[[str, SemValue], Verdict]
    cache: dict = field(default_factory=dict)
    calls: int = 0

    def __call__(self, text: str, oracle: SemValue) -> Verdict:
        key = (text, oracle)
        if key not in self.cache:
            self.calls += 1
            self.cache[key] = self.inner(text, oracle)
        return self.cache[key]


# --------------------------------------------------------------------------
# built-in corpus


def corpus_path(name: str) -> Path:
    return Path(str(resources.files("gramtao.corpus").joinpath(name)))


def _script(name: str) -> list[str]:
    return [sys.executable, "-S", str(corpus_path(name))]


def arith_sut(mutant: str, timeout_ms: int = 10_000) -> SutSpec:
    if mutant not in corpus_arith.MUTANTS:
        raise ValueError(f"unknown arithmetic mutant {mutant!r}")
    return SutSpec(tuple(_script("arith.py") + ["--mutant", mutant]), timeout_ms=timeout_ms, name=mutant)


def parking_sut(faults=(), timeout_ms: int = 10_000, rates: str | Path | None = None) -> SutSpec:
    bad = set(faults) - set(corpus_parking.FAULTS)
    if bad:
        raise ValueError(f"unknown parking faults {sorted(bad)}")
    cmd = _script("parking.py")
    if rates is not None:
        cmd += ["--rates", str(rates)]
    if faults:
        cmd += ["--faults", ",".join(faults)]
    name = "P1[" + ",".join(faults) + "]" if faults else "P0"
    return SutSpec(tuple(cmd), timeout_ms=timeout_ms, name=name)


def corpus_mutants() -> list[SutSpec]:
    """M0..M5 arithmetic calculators, then P0 and P1 with every fault on."""
    return [arith_sut(m) for m in corpus_arith.MUTANTS] + [parking_sut(), parking_sut(corpus_parking.FAULTS)]


def arith_checker(mutant: str) -> FunctionChecker:
    """In-process equivalent of ``arith_sut(mutant)``."""
    if mutant not in corpus_arith.MUTANTS:
        raise ValueError(f"unknown arithmetic mutant {mutant!r}")
    return FunctionChecker(lambda text: corpus_arith.respond(text, mutant), name=mutant)


def parking_checker(faults=(), rates: str | Path | None = None, currency: bool = False) -> FunctionChecker:
    table = corpus_parking.read_rates(str(rates) if rates else corpus_parking.default_rates_file())
    active = frozenset(faults)
    return FunctionChecker(lambda text: corpus_parking.respond(text, table, active), currency,
                           name=parking_sut(faults).name)


def resolve_sut(spec: str, timeout_ms: int = 10_000) -> SutSpec:
    """``corpus:M1``, ``corpus:P0``, ``corpus:P1`` or ``corpus:P1:daily,weekly``; else a shell-style command."""
    import shlex

    if spec.startswith("corpus:"):
        name, _, extra = spec[len("corpus:"):].partition(":")
        if name in corpus_arith.MUTANTS:
            return arith_sut(name, timeout_ms)
        if name == "P0":
            return parking_sut((), timeout_ms)
        if name == "P1":
            faults = tuple(f for f in extra.split(",") if f) or corpus_parking.FAULTS
            return parking_sut(faults, timeout_ms)
        raise ValueError(f"unknown corpus SUT {name!r}")
    cmd = shlex.split(spec)
    if not cmd:
        raise ValueError("empty SUT command")
    return SutSpec(tuple(cmd), timeout_ms=timeout_ms, name=spec)


# --------------------------------------------------------------------------
# failure-inducing pattern analysis


def operator_pattern(text: str) -> str:
    """Skeleton of an arithmetic text: digits and whitespace removed."""
    return re.sub(r"[\d\s]+", "", text)


def top_level_pattern(text: str) -> str:
    """Operator sequence outside all parentheses; a parenthesized group counts as an operand."""
    pattern = operator_pattern(text)
    while "(" in pattern:
        collapsed = re.sub(r"\([^()]*\)", "", pattern)
        if collapsed == pattern:
            break
        pattern = collapsed
    return pattern


def _skeleton_texts(pattern: str, operands) -> list[str]:
    slots = pattern.count("#")
    return ["".join(_fill(pattern, combo)) for combo in product(operands, repeat=slots)]


def _fill(pattern: str, combo):
    it = iter(combo)
    for c in pattern:
        yield str(next(it)) if c == "#" else c


def numbered_pattern(pattern: str) -> str:
    """Insert an operand slot ``#`` wherever an operand must stand."""
    out = []
    prev = None
    for c in pattern:
        if prev is None or prev in "+-*/(":
            if c not in "(":
                out.append("#")
        out.append(c)
        prev = c
    if prev is None or prev in "+-*/(":
        out.append("#")
    return "".join(out)


def pattern_fails(pattern: str, mutant: str, operands=range(1, 10)) -> bool:
    """Some operand assignment makes ``mutant`` disagree with the reference."""
    for text in _skeleton_texts(numbered_pattern(pattern), operands):
        try:
            want = corpus_arith.evaluate(text, "M0")
        except corpus_arith.DivByZero:
            continue
        got, _ = corpus_arith.respond(text, mutant)
        if got.strip() != str(want):
            return True
    return False


def two_operator_skeletons() -> list[str]:
    """Every ``a op b op c`` shape: flat, and with either pair parenthesized."""
    shapes = []
    for o1, o2 in product("+-*/", repeat=2):
        shapes += [f"{o1}{o2}", f"({o1}){o2}", f"{o1}({o2})"]
    return shapes


def sweep_patterns(mutant: str, skeletons=None, operands=range(1, 10)) -> set[str]:
    """Skeletons on which ``mutant`` fails for at least one operand choice."""
    skeletons = two_operator_skeletons() if skeletons is None else skeletons
    return {s for s in skeletons if pattern_fails(s, mutant, operands)}


def render_value(value: SemValue | None) -> str:
    return "" if value is None else render_text(value)
