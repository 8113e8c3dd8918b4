import ast
import operator
import re

import pytest

from gramtao import grammar_path
from gramtao.grammar_spec import load_spec, parse_spec


class Undefined(Exception):
    pass


_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
}


def _trunc_div(a, b):
    if b == 0:
        raise Undefined("division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def reference_value(text: str) -> int:
    """Independent evaluator: Python's own expression parser, truncating division,
    every intermediate result confined to 64 bits."""

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.BinOp):
            a, b = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Div):
                return _in_range(_trunc_div(a, b))
            return _in_range(_OPS[type(node.op)](a, b))
        raise ValueError(f"unexpected syntax {ast.dump(node)}")

    return walk(ast.parse(text, mode="eval"))


def _in_range(value):
    if not -(2**63) <= value < 2**63:
        raise Undefined("overflow")
    return value


class _Descent:
    """Second reference: hand-written recursive descent over the token stream."""

    def __init__(self, text):
        self.toks = re.findall(r"\d+|[-+*/()]", text)
        if "".join(self.toks) != re.sub(r"\s+", "", text):
            raise ValueError(f"bad character in {text!r}")
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def eat(self):
        self.i += 1
        return self.toks[self.i - 1]

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.eat()
            value = _in_range(value + self.term() if op == "+" else value - self.term())
        return value

    def term(self):
        value = self.factor()
        while self.peek() in ("*", "/"):
            op = self.eat()
            rhs = self.factor()
            value = _in_range(value * rhs if op == "*" else _trunc_div(value, rhs))
        return value

    def factor(self):
        tok = self.eat()
        if tok == "(":
            value = self.expr()
            if self.eat() != ")":
                raise ValueError("unbalanced parentheses")
            return value
        return int(tok)


def descent_value(text: str) -> int:
    parser = _Descent(text)
    value = parser.expr()
    if parser.peek() is not None:
        raise ValueError(f"trailing input in {text!r}")
    return value


def tick_fee(rates, lot, minutes, daily_cap=True, weekly_cap=True):
    """Fee in cents by walking the stay half hour by half hour."""
    if minutes <= 0:
        return 0
    r = rates[lot]
    ticks = -(-minutes // 30)
    total = week = day = 0
    for t in range(1, ticks + 1):
        day += r.halfhour if t % 2 else r.hour - r.halfhour
        if t % 48 == 0 or t == ticks:
            week += min(day, r.daymax) if daily_cap else day
            day = 0
        if t % 336 == 0 or t == ticks:
            total += min(week, r.weekmax) if weekly_cap else week
            week = 0
    return total


@pytest.fixture(scope="session")
def arith():
    return load_spec(grammar_path("arith"))


@pytest.fixture(scope="session")
def tagged():
    return load_spec(grammar_path("tagged_arith"))


@pytest.fixture(scope="session")
def parking():
    return load_spec(grammar_path("parking"))


STMT_GRAMMAR = """
Program  ::= Def StmtSeq
Def      ::= 'def'
StmtSeq* ::= Stmt
StmtSeq  ::= Stmt StmtSeq
Stmt*    ::= 'skip' ';'
Stmt     ::= 'print' [N] ';'
Stmt     ::= while Cond { StmtSeq }
Cond     ::= 'x' < [N]
[N] ::= 1 .. 9
TAO-reduction: {"default", "directRec", "indirectRec: {StmtSeq}"}
"""


@pytest.fixture(scope="session")
def stmt():
    return parse_spec(STMT_GRAMMAR)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
