"""Recover a derivation tree from test text (Earley, character level).

Used to reduce hand-written or previously reported inputs.  Whitespace is
loose: any run of whitespace may precede a terminal, and whitespace inside a
literal matches any (possibly empty) whitespace run.  Symbolic terminals
match a decimal integer within their range; tag references match a rendered
number or boolean, whose value is recomputed later anyway.
"""

from __future__ import annotations

import re
from collections import defaultdict

from .derivgen import DerivNode, copy_tree
from .errors import TextParseError
from .grammar_spec import GrammarSpec, Literal, SymbolicTerminal, TagRef, Variable

_TAG_VALUE = re.compile(r"\s*(?:-?\d+(?:\.\d+)?|true|false)")


def _literal_regex(text: str) -> re.Pattern:
    parts = [r"\s*" if chunk.isspace() else re.escape(chunk) for chunk in re.split(r"(\s+)", text) if chunk]
    return re.compile(r"\s*" + "".join(parts))


class _Scanner:
    def __init__(self, spec: GrammarSpec, text: str):
        self.text = text
        self.literals: dict[str, re.Pattern] = {}
        for p in spec.productions:
            for s in p.rhs:
                if isinstance(s, Literal) and s.text not in self.literals:
                    self.literals[s.text] = _literal_regex(s.text)
        self.cache: dict[tuple, tuple[int, int | None] | None] = {}

    def scan(self, sym, pos: int) -> tuple[int, int | None] | None:
        """(end, symbolic value) of ``sym`` matched at ``pos``, or None."""
        key = (sym, pos)
        if key in self.cache:
            return self.cache[key]
        result = None
        if isinstance(sym, Literal):
            m = self.literals[sym.text].match(self.text, pos)
            if m:
                result = (m.end(), None)
        elif isinstance(sym, SymbolicTerminal):
            m = re.compile(r"\s*(-?\d+)" if sym.lo < 0 else r"\s*(\d+)").match(self.text, pos)
            if m and sym.lo <= int(m.group(1)) <= sym.hi:
                result = (m.end(), int(m.group(1)))
        elif isinstance(sym, TagRef):
            m = _TAG_VALUE.match(self.text, pos)
            if m:
                result = (m.end(), None)
        self.cache[key] = result
        return result


def parse_text(spec: GrammarSpec, text: str) -> DerivNode:
    """Derivation tree of ``text`` rooted at the start variable.

    Ambiguous texts get the parse that prefers lower production ordinals
    and shorter leftmost spans.  Raises :class:`TextParseError`.
    """
    prods = spec.productions
    scanner = _Scanner(spec, text)
    n = len(text)
    charts: list[list[tuple[int, int, int]]] = [[] for _ in range(n + 1)]
    seen: list[set] = [set() for _ in range(n + 1)]
    done_here: list[set[str]] = [set() for _ in range(n + 1)]  # zero-width completions
    ends: dict[tuple[str, int], set[int]] = defaultdict(set)
    completed: dict[tuple[str, int, int], set[int]] = defaultdict(set)

    def add(k: int, item):
        if item not in seen[k]:
            seen[k].add(item)
            charts[k].append(item)

    for p in spec.by_lhs[spec.start]:
        add(0, (p.ordinal, 0, 0))

    for k in range(n + 1):
        chart = charts[k]
        i = 0
        while i < len(chart):
            pi, dot, origin = chart[i]
            i += 1
            p = prods[pi]
            if dot == len(p.rhs):
                completed[(p.lhs, origin, k)].add(pi)
                ends[(p.lhs, origin)].add(k)
                if origin == k:
                    done_here[k].add(p.lhs)
                for qi, qdot, qorigin in list(charts[origin]):
                    q = prods[qi]
                    if qdot < len(q.rhs) and q.rhs[qdot] == Variable(p.lhs):
                        add(k, (qi, qdot + 1, qorigin))
                continue
            sym = p.rhs[dot]
            if isinstance(sym, Variable):
                for q in spec.by_lhs[sym.name]:
                    add(k, (q.ordinal, 0, k))
                if sym.name in done_here[k]:
                    add(k, (pi, dot + 1, origin))
            else:
                hit = scanner.scan(sym, k)
                if hit is not None:
                    add(hit[0], (pi, dot + 1, origin))

    finals = [k for k in range(n, -1, -1) if completed.get((spec.start, 0, k)) and not text[k:].strip()]
    if not finals:
        reached = max((k for k in range(n + 1) if charts[k]), default=0)
        raise TextParseError(f"text does not derive from {spec.start} (stuck near offset {reached}: "
                             f"{text[reached:reached + 20]!r})")
    tree = _Extractor(spec, scanner, completed, ends).build(spec.start, 0, finals[0])
    if tree is None:
        raise TextParseError("no finite derivation found")
    return copy_tree(tree)


class _Extractor:
    def __init__(self, spec, scanner, completed, ends):
        self.spec = spec
        self.scanner = scanner
        self.completed = completed
        self.ends = ends
        self.memo: dict[tuple[str, int, int], DerivNode | None] = {}
        self.active: set[tuple[str, int, int]] = set()

    def build(self, var: str, i: int, j: int) -> DerivNode | None:
        key = (var, i, j)
        if key in self.memo:
            return self.memo[key]
        if key in self.active:
            return None
        self.active.add(key)
        result = None
        for pi in sorted(self.completed.get(key, ())):
            p = self.spec.productions[pi]
            kids = self.sequence(p.rhs, 0, i, j)
            if kids is not None:
                result = DerivNode(Variable(var), p)
                result.set_children(kids)
                break
        self.active.discard(key)
        self.memo[key] = result
        return result

    def sequence(self, rhs, idx: int, i: int, j: int) -> list[DerivNode] | None:
        if idx == len(rhs):
            return [] if i == j else None
        sym = rhs[idx]
        if isinstance(sym, Variable):
            for mid in sorted(self.ends.get((sym.name, i), ())):
                if mid > j:
                    break
                rest = self.sequence(rhs, idx + 1, mid, j)
                if rest is None:
                    continue
                node = self.build(sym.name, i, mid)
                if node is not None:
                    return [node] + rest
            return None
        hit = self.scanner.scan(sym, i)
        if hit is None or hit[0] > j:
            return None
        rest = self.sequence(rhs, idx + 1, hit[0], j)
        if rest is None:
            return None
        return [DerivNode(sym, value=hit[1])] + rest
