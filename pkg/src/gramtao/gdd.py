"""Grammar-directed delta debugging.

A splice rewrites one variable node's (production, first_child) pair so the
node derives something smaller; restoring puts the two saved fields back.
After each splice the text and the oracle are recomputed from the tree and
the checker decides whether the failure (of the same class) survives.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .derivgen import DerivNode, copy_tree, node_count, preorder
from .errors import NotFailing
from .grammar_spec import (
    Default,
    DirectRec,
    GrammarSpec,
    IndirectRec,
    Production,
    ReductionStrategy,
    SymbolicTerminal,
    Variable,
)
from .semantics import Domain, TestArtifact, make_artifact
from .values import SemValue

Checker = Callable[[str, SemValue], object]
DEFAULT_STRATEGIES: tuple[ReductionStrategy, ...] = (Default(), DirectRec())


@dataclass(frozen=True)
class Splice:
    production: Production
    first_child: DerivNode | None


@dataclass(frozen=True)
class ReductionStep:
    strategy: ReductionStrategy
    node_path: int
    before_text: str
    after_text: str
    oracle_after: SemValue | None
    kept: bool
    nodes_before: int
    nodes_after: int
    verdict: str | None = None


@dataclass
class ReductionReport:
    original: TestArtifact
    reduced: TestArtifact
    steps: list[ReductionStep]
    trials: list[ReductionStep] = field(default_factory=list)
    failure_class: str | None = None

    @property
    def ratio(self) -> float:
        if not self.original.text:
            return 0.0
        return 1 - len(self.reduced.text) / len(self.original.text)


# --------------------------------------------------------------------------
# candidate splices


def _shallow(node: DerivNode) -> DerivNode:
    dup = DerivNode(node.label, node.production, node.value)
    dup.first_child = node.first_child
    return dup


def _default_splice(spec: GrammarSpec, node: DerivNode) -> Splice | None:
    target = spec.defaults.get(node.label.name)
    if target is None or target == node.production:
        return None
    kids = list(node.children())
    chosen: list[DerivNode] = []
    pos = 0
    for sym in target.rhs:
        if isinstance(sym, (Variable, SymbolicTerminal)):
            while pos < len(kids) and kids[pos].label != sym:
                pos += 1
            if pos == len(kids):
                return None
            chosen.append(_shallow(kids[pos]))
            pos += 1
        else:
            chosen.append(DerivNode(sym))
    before = node_count(node)
    after = 1 + sum(node_count(c) for c in chosen)
    if after >= before:
        return None
    head = chosen[0]
    for a, b in zip(chosen, chosen[1:]):
        a.next_sibling = b
    chosen[-1].next_sibling = None
    return Splice(target, head)


def _direct_splices(node: DerivNode) -> Iterator[Splice]:
    for kid in node.children():
        if kid.label == node.label:
            yield Splice(kid.production, kid.first_child)


def _indirect_splices(node: DerivNode, whitelist) -> Iterator[Splice]:
    if node.label.name not in whitelist:
        return
    # breadth-first from the grandchildren: shallowest, then leftmost
    todo = deque(grand for kid in node.children() for grand in kid.children())
    while todo:
        d = todo.popleft()
        if not d.is_variable:
            continue
        if d.label == node.label:
            yield Splice(d.production, d.first_child)
        todo.extend(d.children())


def candidate_splices(spec: GrammarSpec, node: DerivNode, strategy: ReductionStrategy) -> list[Splice]:
    """Splices ``strategy`` offers at ``node``, in trial order (empty if not applicable)."""
    if not node.is_variable:
        return []
    if isinstance(strategy, Default):
        s = _default_splice(spec, node)
        return [s] if s is not None else []
    if isinstance(strategy, DirectRec):
        return list(_direct_splices(node))
    if isinstance(strategy, IndirectRec):
        return list(_indirect_splices(node, set(strategy.vars)))
    raise TypeError(f"unknown strategy {strategy!r}")


def reduce_by(spec: GrammarSpec, node: DerivNode, strategy: ReductionStrategy) -> bool:
    return bool(candidate_splices(spec, node, strategy))


def splice(node: DerivNode, s: Splice) -> Splice:
    """Install ``s`` at ``node``; returns what is needed to undo it."""
    saved = Splice(node.production, node.first_child)
    node.production = s.production
    node.first_child = s.first_child
    return saved


restore = splice


# --------------------------------------------------------------------------
# the reduction session


class _Session:
    def __init__(self, spec, root, checker, failure_class, domain, audit):
        self.spec = spec
        self.root = root
        self.checker = checker
        self.failure_class = failure_class
        self.domain = domain
        self.audit = audit
        self.trials: list[ReductionStep] = []
        self.current = make_artifact(spec, root, domain=domain)

    def try_splice(self, strategy, node: DerivNode, path: int, s: Splice) -> bool:
        before_text = self.current.text
        before_nodes = node_count(self.root)
        saved = splice(node, s)
        after = make_artifact(self.spec, self.root, domain=self.domain)
        if self.audit is not None:
            self.audit(self.root)
        verdict = None
        keep = False
        if after.evaluable:
            verdict = getattr(self.checker(after.text, after.oracle), "failure_class", None)
            keep = verdict == self.failure_class
        after_nodes = node_count(self.root)
        self.trials.append(ReductionStep(strategy, path, before_text, after.text, after.oracle, keep,
                                         before_nodes, after_nodes, verdict))
        if keep:
            self.current = after
            return True
        restore(node, saved)
        if self.audit is not None:
            self.audit(self.root)
        return False

    def apply(self, strategy: ReductionStrategy) -> bool:
        """One top-down, depth-first sweep of ``strategy``; True if anything was kept."""
        changed = False
        stack = [self.root]
        path = 0
        while stack:
            node = stack.pop()
            here = path
            path += 1
            if node.is_variable:
                for s in candidate_splices(self.spec, node, strategy):
                    if self.try_splice(strategy, node, here, s):
                        changed = True
                        break
            stack.extend(reversed(list(node.children())))
        return changed


def _resolve_strategies(spec: GrammarSpec, strategies) -> tuple[ReductionStrategy, ...]:
    if strategies:
        return tuple(strategies)
    return tuple(spec.reduction_directives) or DEFAULT_STRATEGIES


def gdd(spec: GrammarSpec, artifact: TestArtifact, checker: Checker, strategies=None,
        domain: Domain | None = None, audit: Callable[[DerivNode], None] | None = None) -> ReductionReport:
    """Shrink a failing artifact until no single splice keeps it failing.

    ``checker(text, oracle)`` returns a verdict whose ``failure_class`` is
    None for a pass.  The input artifact's tree is left untouched.
    ``audit``, if given, sees the root after every splice and every restore.
    """
    if not artifact.evaluable:
        raise NotFailing(f"artifact has no oracle ({artifact.error})")
    first = checker(artifact.text, artifact.oracle)
    failure_class = getattr(first, "failure_class", None)
    if failure_class is None:
        raise NotFailing("the artifact passes; nothing to reduce")
    order = _resolve_strategies(spec, strategies)
    session = _Session(spec, copy_tree(artifact.tree), checker, failure_class, domain, audit)
    while True:
        changed = False
        for strategy in order:
            if session.apply(strategy):
                changed = True
        if not changed:
            break
    reduced = session.current
    reduced.seed_info = dict(artifact.seed_info)
    steps = [t for t in session.trials if t.kept]
    return ReductionReport(artifact, reduced, steps, session.trials, failure_class)


def single_splice_survivors(spec: GrammarSpec, artifact: TestArtifact, checker: Checker, strategies=None,
                            domain: Domain | None = None) -> list[tuple[ReductionStrategy, int, str]]:
    """Every single splice on ``artifact`` that keeps its failure class.

    Empty means the artifact is 1-minimal with respect to ``strategies``.
    The artifact's tree is restored before returning.
    """
    failure_class = getattr(checker(artifact.text, artifact.oracle), "failure_class", None)
    if failure_class is None:
        raise NotFailing("the artifact passes")
    root = artifact.tree
    survivors = []
    for strategy in _resolve_strategies(spec, strategies):
        for path, node in enumerate(list(preorder(root))):
            for s in candidate_splices(spec, node, strategy):
                saved = splice(node, s)
                try:
                    after = make_artifact(spec, root, domain=domain)
                    if after.evaluable:
                        verdict = checker(after.text, after.oracle)
                        if getattr(verdict, "failure_class", None) == failure_class:
                            survivors.append((strategy, path, after.text))
                finally:
                    restore(node, saved)
    return survivors
