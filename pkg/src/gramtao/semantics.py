"""Valuation of derivation trees.

Every variable node is valued by its production's term: a singleton reads
a child (or a constant), an application calls a named operation of the
grammar's domain, and an un-annotated rule either relays its single
variable/symbolic child or, failing that, takes the text it derives.
Tagged terms (``$[N] : term``) record the node's value so that ``$[N]``
leaves underneath it render that value into the test text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from .derivgen import DerivNode, join_leaves, leaf_texts, yield_text
from .errors import EvalError, UnboundTag, UnknownOperation
from .grammar_spec import GrammarSpec, Singleton, SymbolicTerminal
from .values import INT64_MAX, INT64_MIN, Int, Real, SemValue, Text


@dataclass(frozen=True)
class Operation:
    name: str
    arity: tuple[int, int]
    fn: Callable[..., SemValue]


class Domain:
    """A named registry of semantic operations."""

    def __init__(self, name: str, ops: Sequence[Operation] = ()):
        self.name = name
        self.ops: dict[str, Operation] = {}
        for op in ops:
            self.register(op)

    def register(self, op: Operation) -> None:
        self.ops[op.name] = op

    def operation(self, name: str, arity: int | tuple[int, int]):
        """Decorator registering ``fn`` under ``name``."""
        bounds = (arity, arity) if isinstance(arity, int) else arity

        def deco(fn):
            self.register(Operation(name, bounds, fn))
            return fn

        return deco

    def apply(self, name: str, args: list[SemValue]) -> SemValue:
        op = self.ops.get(name)
        if op is None:
            raise UnknownOperation(name)
        lo, hi = op.arity
        if not lo <= len(args) <= hi:
            raise EvalError(name, f"expected {lo}..{hi} arguments, got {len(args)}")
        return op.fn(*args)

    def __repr__(self) -> str:
        return f"Domain({self.name!r}, ops={sorted(self.ops)})"


# --------------------------------------------------------------------------
# integer arithmetic


def _checked(op: str, result: int) -> Int:
    if not INT64_MIN <= result <= INT64_MAX:
        raise EvalError(op, "64-bit overflow")
    return Int(result)


def _numbers(op: str, a: SemValue, b: SemValue) -> tuple[Any, Any, bool]:
    """Operands of an arithmetic op; Int widens to Real when mixed with Real."""
    if type(a) is Int and type(b) is Int:
        return a.value, b.value, False
    if isinstance(a, (Int, Real)) and isinstance(b, (Int, Real)):
        return float(a.value), float(b.value), True
    raise EvalError(op, f"expected numbers, got {type(a).__name__} and {type(b).__name__}")


def trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def builtin_domain_arith() -> Domain:
    dom = Domain("arith")

    @dom.operation("intAdd", 2)
    def int_add(a, b):
        x, y, real = _numbers("intAdd", a, b)
        return Real(x + y) if real else _checked("intAdd", x + y)

    @dom.operation("intSub", 2)
    def int_sub(a, b):
        x, y, real = _numbers("intSub", a, b)
        return Real(x - y) if real else _checked("intSub", x - y)

    @dom.operation("intMul", 2)
    def int_mul(a, b):
        x, y, real = _numbers("intMul", a, b)
        return Real(x * y) if real else _checked("intMul", x * y)

    @dom.operation("intDiv", 2)
    def int_div(a, b):
        x, y, real = _numbers("intDiv", a, b)
        if y == 0:
            raise EvalError("intDiv", "divide-by-zero")
        return Real(x / y) if real else _checked("intDiv", trunc_div(x, y))

    return dom


_DOMAIN_FACTORIES: dict[str, Callable[[], Domain]] = {"arith": builtin_domain_arith}


def register_domain(name: str, factory: Callable[[], Domain]) -> None:
    _DOMAIN_FACTORIES[name] = factory


def get_domain(name: str) -> Domain:
    if name == "parking" and name not in _DOMAIN_FACTORIES:
        from . import parking  # noqa: F401  registers itself
    return _DOMAIN_FACTORIES[name]()


# --------------------------------------------------------------------------
# tags and evaluation


class TagEnv:
    """Tag bindings, each anchored at the node whose term bound it."""

    def __init__(self):
        self._frames: dict[int, tuple[DerivNode, dict[int, SemValue]]] = {}

    def bind(self, node: DerivNode, index: int, value: SemValue) -> None:
        self._frames.setdefault(id(node), (node, {}))[1][index] = value

    def lookup(self, node: DerivNode, index: int) -> SemValue | None:
        frame = self._frames.get(id(node))
        return frame[1].get(index) if frame else None

    def resolve(self, ancestors: Sequence[DerivNode], index: int) -> SemValue | None:
        for node in reversed(ancestors):
            value = self.lookup(node, index)
            if value is not None:
                return value
        return None

    @property
    def bindings(self) -> list[tuple[DerivNode, int, SemValue]]:
        return [(node, i, v) for node, frame in self._frames.values() for i, v in frame.items()]

    def __len__(self) -> int:
        return len(self._frames)


def _carries(node: DerivNode, index: int) -> bool:
    sem = node.production.sem
    return index == 0 or (sem is not None and sem.tag == index)


class _Evaluator:
    def __init__(self, spec: GrammarSpec, domain: Domain):
        self.spec = spec
        self.domain = domain
        self.values: dict[int, SemValue] = {}
        self.pending: set[int] = set()
        self.tags = TagEnv()

    def walk(self, root: DerivNode) -> SemValue:
        result = self.value(root, ())
        self.walk_from(root, ())
        return result

    def value(self, node: DerivNode, ancestors: tuple[DerivNode, ...]) -> SemValue:
        if isinstance(node.label, SymbolicTerminal):
            return Int(node.value)
        key = id(node)
        if key in self.values:
            return self.values[key]
        if key in self.pending:
            raise EvalError(node.label.name, "value depends on itself")
        self.pending.add(key)
        p = node.production
        kids = list(node.children())
        scope = ancestors + (node,)
        if p.sem is not None:
            result = self.term(p.sem, kids, scope)
        elif p.relay_index is not None:
            result = self.value(kids[p.relay_index], scope)
        else:
            for kid in kids:
                if kid.is_variable:
                    self.walk_from(kid, scope)
            result = Text(join_leaves(leaf_texts(node, _ScopedTags(self), ancestors)))
        self.pending.discard(key)
        self.values[key] = result
        self.tags.bind(node, 0, result)
        if p.sem is not None and p.sem.tag is not None:
            self.tags.bind(node, p.sem.tag, result)
        return result

    def walk_from(self, node: DerivNode, ancestors: tuple[DerivNode, ...]) -> None:
        stack = [(node, ancestors)]
        while stack:
            n, anc = stack.pop()
            if n.is_variable:
                self.value(n, anc)
                inner = anc + (n,)
                stack.extend((c, inner) for c in n.children())

    def term(self, term, kids: list[DerivNode], scope) -> SemValue:
        if isinstance(term, Singleton):
            if term.kind == "constant":
                return term.value
            return self.value(kids[term.ref], scope)
        args = [self.term(a, kids, scope) for a in term.args]
        return self.domain.apply(term.op, args)


class _ScopedTags:
    """Tag lookup during evaluation: a pending ancestor that would carry the tag is a cycle."""

    def __init__(self, ev: _Evaluator):
        self.ev = ev

    def resolve(self, ancestors, index):
        for node in reversed(ancestors):
            if id(node) in self.ev.pending and _carries(node, index):
                raise EvalError(node.label.name, f"$[{index}] is read while its value is computed")
            value = self.ev.tags.lookup(node, index)
            if value is not None:
                return value
        return None


def _domain_for(spec: GrammarSpec, domain: Domain | None) -> Domain:
    if domain is not None:
        return domain
    if spec.domain is not None:
        return spec.domain
    return get_domain(spec.domain_name)


def evaluate(spec: GrammarSpec, tree: DerivNode, domain: Domain | None = None) -> tuple[SemValue, TagEnv]:
    """Value the whole tree; returns the root value (the oracle) and all tag bindings."""
    ev = _Evaluator(spec, _domain_for(spec, domain))
    oracle = ev.walk(tree)
    return oracle, ev.tags


def instant_oracle(spec: GrammarSpec, root: DerivNode, domain: Domain | None = None) -> SemValue:
    """Oracle of a (possibly just spliced) tree, recomputed from scratch."""
    return evaluate(spec, root, domain)[0]


def render(spec: GrammarSpec, root: DerivNode, domain: Domain | None = None) -> tuple[str, SemValue, TagEnv]:
    oracle, tags = evaluate(spec, root, domain)
    return yield_text(root, tags), oracle, tags


# --------------------------------------------------------------------------
# artifacts


@dataclass
class TestArtifact:
    text: str
    oracle: SemValue | None
    tree: DerivNode
    tags: TagEnv | None
    seed_info: Mapping[str, Any] = field(default_factory=dict)
    error: str | None = None

    __test__ = False  # not a pytest class

    @property
    def evaluable(self) -> bool:
        return self.oracle is not None


def make_artifact(spec: GrammarSpec, tree: DerivNode, seed_info: Mapping[str, Any] | None = None,
                  domain: Domain | None = None) -> TestArtifact:
    """Render and value ``tree``; an evaluation error is recorded, not raised.

    When the oracle cannot be computed, tags bound before the failure are
    unavailable, so the text renders with tagging variables left symbolic.
    """
    info = dict(seed_info or {})
    try:
        text, oracle, tags = render(spec, tree, domain)
    except (EvalError, UnboundTag) as exc:
        return TestArtifact(_fallback_text(tree), None, tree, None, info, str(exc))
    return TestArtifact(text, oracle, tree, tags, info)


class _SymbolicTags:
    def resolve(self, ancestors, index):
        return Text(f"$[{index}]")


def _fallback_text(tree: DerivNode) -> str:
    return yield_text(tree, _SymbolicTags())
