"""Integer expression calculators: one correct reference and five faulty variants.

Standalone: runs as ``python -S arith.py --mutant M1`` with the expression
on stdin and prints the result on stdout.  Division truncates toward zero;
dividing by zero prints ``ArithmeticException: / by zero`` and exits 0, the
way a naive calculator reports it.  Malformed input exits 2.

  M0  correct: left-associative, standard precedence
  M1  right-associative within each precedence level
  M2  parentheses dropped before evaluation
  M3  flat right-to-left evaluation, precedence ignored
  M4  ``a - b*c + d`` style chains: the tail after a multiplicative
      subtrahend is grouped under the minus
  M5  a multiplicative right operand followed by ``+``/``-`` swallows the
      rest of the additive chain (``a*b+c`` computed as ``a*(b+c)``)
"""

from __future__ import annotations

import re
import sys

MUTANTS = ("M0", "M1", "M2", "M3", "M4", "M5")
DIV_ZERO = "ArithmeticException: / by zero"

_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


class DivByZero(Exception):
    pass


class Malformed(Exception):
    pass


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        num, sym = m.groups()
        if num is not None:
            tokens.append(int(num))
        elif sym in "+-*/()":
            tokens.append(sym)
        else:
            raise Malformed(f"unexpected character {sym!r}")
        pos = m.end()
    if not tokens:
        raise Malformed("empty input")
    return tokens


def binop(op: str, a: int, b: int) -> int:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        raise DivByZero
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise Malformed("unexpected end of input")
        self.i += 1
        return tok

    def done(self, value):
        if self.i != len(self.toks):
            raise Malformed(f"trailing input at token {self.i}")
        return value

    def atom(self, inner):
        tok = self.take()
        if isinstance(tok, int):
            return tok
        if tok == "(":
            value = inner()
            if self.take() != ")":
                raise Malformed("expected ')'")
            return value
        raise Malformed(f"unexpected {tok!r}")


class Correct(_Parser):
    def run(self):
        return self.done(self.expr())

    def expr(self):
        acc = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            acc = binop(op, acc, self.term())
        return acc

    def term(self):
        acc = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            acc = binop(op, acc, self.factor())
        return acc

    def factor(self):
        return self.atom(self.expr)


class RightAssoc(_Parser):
    def run(self):
        return self.done(self.expr())

    def expr(self):
        left = self.term()
        if self.peek() in ("+", "-"):
            op = self.take()
            return binop(op, left, self.expr())
        return left

    def term(self):
        left = self.atom(self.expr)
        if self.peek() in ("*", "/"):
            op = self.take()
            return binop(op, left, self.term())
        return left


class FlatRightToLeft(_Parser):
    def run(self):
        return self.done(self.chain())

    def chain(self):
        left = self.atom(self.chain)
        if self.peek() in ("+", "-", "*", "/"):
            op = self.take()
            return binop(op, left, self.chain())
        return left


class MinusGroups(Correct):
    def expr(self):
        acc = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            start = self.i
            right = self.term()
            if op == "-" and self._has_mul(start) and self.peek() in ("+", "-"):
                while self.peek() in ("+", "-"):
                    inner = self.take()
                    right = binop(inner, right, self.term())
            acc = binop(op, acc, right)
        return acc

    def _has_mul(self, start):
        depth = 0
        for tok in self.toks[start:self.i]:
            if tok == "(":
                depth += 1
            elif tok == ")":
                depth -= 1
            elif depth == 0 and tok in ("*", "/"):
                return True
        return False


class MulSwallows(Correct):
    def term(self):
        acc = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            right = self.factor()
            if self.peek() in ("+", "-"):
                while self.peek() in ("+", "-"):
                    inner = self.take()
                    right = binop(inner, right, Correct.term(self))
                return binop(op, acc, right)
            acc = binop(op, acc, right)
        return acc


def evaluate(text: str, mutant: str = "M0") -> int:
    """Value of ``text`` under ``mutant``; raises DivByZero or Malformed."""
    tokens = tokenize(text)
    if mutant == "M2":
        tokens = [t for t in tokens if t not in ("(", ")")]
        return Correct(tokens).run()
    cls = {"M0": Correct, "M1": RightAssoc, "M3": FlatRightToLeft, "M4": MinusGroups, "M5": MulSwallows}[mutant]
    return cls(tokens).run()


def respond(text: str, mutant: str = "M0") -> tuple[str, int]:
    """(stdout, exit status) of one invocation."""
    try:
        return f"{evaluate(text, mutant)}\n", 0
    except DivByZero:
        return DIV_ZERO + "\n", 0
    except Malformed as exc:
        return f"error: {exc}\n", 2


def main(argv=None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    mutant = "M0"
    if args[:1] == ["--mutant"] and len(args) >= 2:
        mutant, args = args[1], args[2:]
    if mutant not in MUTANTS:
        sys.stderr.write(f"unknown mutant {mutant}\n")
        return 2
    text = open(args[0], encoding="utf-8").read() if args else sys.stdin.read()
    out, status = respond(text, mutant)
    (sys.stdout if status == 0 else sys.stderr).write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
