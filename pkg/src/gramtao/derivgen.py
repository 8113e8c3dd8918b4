"""Derivation trees and the test generator.

Trees use a first-child/next-sibling layout so that the reducer can swap a
node's whole expansion by rewriting one link and put it back the same way.
"""

from __future__ import annotations

import hashlib
import random
import struct
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterator

from .errors import Exhausted, GrammarError, UnboundTag
from .grammar_spec import (
    GrammarSpec,
    Literal,
    Production,
    Symbol,
    SymbolicTerminal,
    TagRef,
    Variable,
    min_height,
    production_height,
    validate_properness,
)
from .values import render_text


class DerivNode:
    __slots__ = ("label", "production", "value", "first_child", "next_sibling")

    def __init__(self, label: Symbol, production: Production | None = None, value: int | None = None):
        self.label = label
        self.production = production
        self.value = value
        self.first_child: DerivNode | None = None
        self.next_sibling: DerivNode | None = None

    @property
    def is_variable(self) -> bool:
        return isinstance(self.label, Variable)

    def children(self) -> Iterator[DerivNode]:
        node = self.first_child
        while node is not None:
            yield node
            node = node.next_sibling

    def set_children(self, nodes: list[DerivNode]) -> None:
        self.first_child = link_siblings(nodes)

    def __repr__(self) -> str:
        if self.is_variable:
            return f"<{self.label} #{self.production.ordinal}>"
        if isinstance(self.label, SymbolicTerminal):
            return f"<{self.label}={self.value}>"
        return f"<{self.label}>"


def link_siblings(nodes: list[DerivNode]) -> DerivNode | None:
    for a, b in zip(nodes, nodes[1:]):
        a.next_sibling = b
    if nodes:
        nodes[-1].next_sibling = None
        return nodes[0]
    return None


def preorder(root: DerivNode) -> Iterator[DerivNode]:
    yield root
    stack = [root.first_child] if root.first_child is not None else []
    while stack:
        node = stack.pop()
        yield node
        if node.next_sibling is not None:
            stack.append(node.next_sibling)
        if node.first_child is not None:
            stack.append(node.first_child)


def node_count(root: DerivNode) -> int:
    return sum(1 for _ in preorder(root))


def tree_height(root: DerivNode) -> int:
    """Number of variable levels on the longest root-to-leaf path."""
    if not root.is_variable:
        return 0
    return 1 + max((tree_height(c) for c in root.children()), default=0)


def copy_tree(root: DerivNode) -> DerivNode:
    dup = DerivNode(root.label, root.production, root.value)
    dup.set_children([copy_tree(c) for c in root.children()])
    return dup


def productions_used(root: DerivNode) -> set[int]:
    return {n.production.ordinal for n in preorder(root) if n.is_variable}


def check_tree(spec: GrammarSpec, root: DerivNode) -> list[str]:
    """Problems that make ``root`` an invalid derivation; empty when valid."""
    problems = []
    if not (root.is_variable and root.label.name == spec.start):
        problems.append(f"root {root!r} is not the start variable {spec.start}")
    for node in preorder(root):
        if node.is_variable:
            p = node.production
            if p is None or p.lhs != node.label.name or spec.productions[p.ordinal] != p:
                problems.append(f"{node!r} carries a foreign production")
                continue
            labels = [c.label for c in node.children()]
            if labels != list(p.rhs):
                problems.append(f"{node!r} children {labels} do not match {p}")
        else:
            if node.first_child is not None:
                problems.append(f"leaf {node!r} has children")
            if isinstance(node.label, SymbolicTerminal):
                if node.value is None or not node.label.lo <= node.value <= node.label.hi:
                    problems.append(f"{node!r} out of range")
    return problems


# --------------------------------------------------------------------------
# hashing and rendering

_KIND_CODES = {Variable: 0, Literal: 1, SymbolicTerminal: 2, TagRef: 3}


def structural_hash(root: DerivNode) -> int:
    """64-bit digest of a tree's shape and production choices.

    Terminal values are left out, so ``2+3`` and ``7+9`` hash alike.
    """
    pack = struct.Struct("<bi").pack
    data = b"".join(
        pack(_KIND_CODES[type(n.label)], n.production.ordinal if n.production is not None else -1)
        for n in preorder(root)
    )
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def _is_word(c: str) -> bool:
    return c.isascii() and (c.isalnum() or c == "_")


def join_leaves(pieces: list[str]) -> str:
    """Concatenate leaf texts, spacing only between two word characters."""
    out: list[str] = []
    prev = ""
    for piece in pieces:
        if not piece:
            continue
        if prev and _is_word(prev[-1]) and _is_word(piece[0]):
            out.append(" ")
        out.append(piece)
        prev = piece
    return "".join(out)


def leaf_texts(root: DerivNode, tags, ancestors: tuple[DerivNode, ...] = ()) -> list[str]:
    pieces: list[str] = []
    stack: list[tuple[DerivNode, tuple[DerivNode, ...]]] = [(root, ancestors)]
    while stack:
        node, anc = stack.pop()
        label = node.label
        if isinstance(label, Variable):
            inner = anc + (node,)
            stack.extend((c, inner) for c in reversed(list(node.children())))
        elif isinstance(label, Literal):
            pieces.append(label.text)
        elif isinstance(label, SymbolicTerminal):
            pieces.append(str(node.value))
        else:
            value = tags.resolve(anc, label.index) if tags is not None else None
            if value is None:
                raise UnboundTag(label.index)
            pieces.append(render_text(value))
    return pieces


def yield_text(root: DerivNode, tags=None) -> str:
    """Render the test text of a tree; tagging variables come from ``tags``."""
    return join_leaves(leaf_texts(root, tags))


# --------------------------------------------------------------------------
# generation


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    count: int = 100
    depth_budget: int = 12
    max_attempts: int = 1000

    def __post_init__(self):
        if self.count < 0 or self.depth_budget < 1 or self.max_attempts < 1:
            raise ValueError(f"invalid generation config {self}")


class _Builder:
    def __init__(self, spec: GrammarSpec, cfg: GenConfig):
        self.spec = spec
        self.cfg = cfg
        self.heights = min_height(spec)
        self.shortest = {
            var: min(prods, key=lambda p: (production_height(p, self.heights), p.ordinal))
            for var, prods in spec.by_lhs.items()
        }
        self.uses: Counter[int] = Counter()
        self.rng = random.Random()

    def leaf(self, sym: Symbol) -> DerivNode:
        if isinstance(sym, SymbolicTerminal):
            return DerivNode(sym, value=self.rng.randint(sym.lo, sym.hi))
        return DerivNode(sym)

    def node(self, p: Production, children: list[DerivNode]) -> DerivNode:
        self.uses[p.ordinal] += 1
        n = DerivNode(Variable(p.lhs), p)
        n.set_children(children)
        return n

    def shortest_tree(self, var: str) -> DerivNode:
        p = self.shortest[var]
        return self.node(p, [self.shortest_tree(s.name) if isinstance(s, Variable) else self.leaf(s) for s in p.rhs])

    def random_tree(self, var: str, depth: int) -> DerivNode:
        if depth >= self.cfg.depth_budget:
            return self.shortest_tree(var)
        prods = self.spec.by_lhs[var]
        weights = [1.0 / (1 + self.uses[p.ordinal]) for p in prods]
        p = self.rng.choices(prods, weights)[0]
        self.uses[p.ordinal] += 1
        n = DerivNode(Variable(var), p)
        n.set_children(
            [self.random_tree(s.name, depth + 1) if isinstance(s, Variable) else self.leaf(s) for s in p.rhs]
        )
        return n

    def route_to(self, target: str) -> list[tuple[Production, int]]:
        """Shortest chain of (production, rhs position) steps from start to ``target``."""
        back: dict[str, tuple[str, Production, int] | None] = {self.spec.start: None}
        todo = deque([self.spec.start])
        while todo:
            var = todo.popleft()
            if var == target:
                break
            for p in self.spec.by_lhs[var]:
                for i, s in enumerate(p.rhs):
                    if isinstance(s, Variable) and s.name not in back:
                        back[s.name] = (var, p, i)
                        todo.append(s.name)
        steps = []
        var = target
        while back[var] is not None:
            parent, p, i = back[var]
            steps.append((p, i))
            var = parent
        return steps[::-1]

    def covering_tree(self, target: Production) -> DerivNode:
        route = self.route_to(target.lhs)

        def build(k: int) -> DerivNode:
            p, via = (route[k] if k < len(route) else (target, None))
            kids = []
            for i, s in enumerate(p.rhs):
                if i == via:
                    kids.append(build(k + 1))
                elif isinstance(s, Variable):
                    kids.append(self.shortest_tree(s.name))
                else:
                    kids.append(self.leaf(s))
            return self.node(p, kids)

        return build(0)


def _tree_rng_seed(seed: int, draw: int) -> str:
    return f"gramtao:{seed}:{draw}"


def generate(spec: GrammarSpec, cfg: GenConfig) -> list[DerivNode]:
    """Generate up to ``cfg.count`` structurally distinct trees.

    A coverage phase first emits one tree per not-yet-used production; after
    that, productions are drawn with weight ``1/(1+uses)`` and any variable
    reached at ``depth_budget`` is closed off by its shortest derivation.
    Raises :class:`Exhausted` (carrying the trees so far) after
    ``max_attempts`` consecutive duplicates.
    """
    report = validate_properness(spec)
    if not report.proper:
        raise GrammarError("grammar is not proper: " + "; ".join(report.lines()))
    builder = _Builder(spec, cfg)
    if cfg.depth_budget < max(builder.heights.values()):
        raise ValueError(f"depth budget {cfg.depth_budget} is below the grammar's minimal height")

    trees: list[DerivNode] = []
    seen: set[int] = set()
    covered: set[int] = set()
    draw = 0

    def accept(tree: DerivNode) -> bool:
        h = structural_hash(tree)
        if h in seen:
            return False
        seen.add(h)
        trees.append(tree)
        covered.update(productions_used(tree))
        return True

    for p in spec.productions:
        if len(trees) >= cfg.count:
            break
        if p.ordinal in covered:
            continue
        builder.rng.seed(_tree_rng_seed(cfg.seed, draw))
        draw += 1
        accept(builder.covering_tree(p))

    misses = 0
    while len(trees) < cfg.count:
        builder.rng.seed(_tree_rng_seed(cfg.seed, draw))
        draw += 1
        snapshot = builder.uses.copy()
        if accept(builder.random_tree(spec.start, 1)):
            misses = 0
        else:
            builder.uses = snapshot
            misses += 1
            if misses >= cfg.max_attempts:
                raise Exhausted(trees, misses)
    return trees
