"""Exception hierarchy shared by every stage of the pipeline."""


class TaoError(Exception):
    """Base class for all errors raised by gramtao."""


class SpecSyntaxError(TaoError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class UnknownOperation(TaoError):
    def __init__(self, op: str):
        super().__init__(f"unknown semantic operation {op!r}")
        self.op = op


class UnboundSymbol(TaoError):
    def __init__(self, name: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}semantic term names {name!r}, which is not on the right-hand side")
        self.name = name
        self.line = line


class UnboundTag(TaoError):
    def __init__(self, index: int):
        super().__init__(f"tagging variable $[{index}] has no binding in scope")
        self.index = index


class EvalError(TaoError):
    def __init__(self, op: str, reason: str):
        super().__init__(f"{op}: {reason}")
        self.op = op
        self.reason = reason


class GrammarError(TaoError):
    """The grammar is unusable for generation (e.g. not proper)."""


class TextParseError(TaoError):
    """A test text could not be parsed back into a derivation tree."""


class Exhausted(TaoError):
    """Generation ran out of structurally new trees before reaching the count."""

    def __init__(self, trees, attempts: int):
        super().__init__(
            f"no new structure after {attempts} consecutive attempts; {len(trees)} trees generated"
        )
        self.trees = trees
        self.attempts = attempts


class NotFailing(TaoError):
    """GDD was handed a test case that does not fail."""


class HarnessError(TaoError):
    """Infrastructure failure while running a SUT (never a test verdict)."""
