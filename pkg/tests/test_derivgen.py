import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gramtao.derivgen import (
    DerivNode,
    GenConfig,
    check_tree,
    copy_tree,
    generate,
    join_leaves,
    node_count,
    preorder,
    productions_used,
    structural_hash,
    tree_height,
    yield_text,
)
from gramtao.errors import Exhausted, GrammarError, UnboundTag
from gramtao.grammar_spec import Literal, TagRef, min_height, parse_spec
from gramtao.recognize import parse_text
from gramtao.semantics import TagEnv, evaluate
from gramtao.values import Int


def test_hash_ignores_terminal_values(arith):
    assert structural_hash(parse_text(arith, "2+3")) == structural_hash(parse_text(arith, "7+9"))


def test_hash_sees_production_choices(arith):
    assert structural_hash(parse_text(arith, "2+3")) != structural_hash(parse_text(arith, "2*3"))
    assert structural_hash(parse_text(arith, "2+3")) != structural_hash(parse_text(arith, "(2+3)"))


def test_hash_of_copy(arith):
    tree = parse_text(arith, "3*(8-4)/5")
    assert structural_hash(copy_tree(tree)) == structural_hash(tree)


def test_yield_with_tag(tagged):
    tree = parse_text(tagged, "3*(8-4)=12")
    _, tags = evaluate(tagged, tree)
    assert yield_text(tree, tags) == "3*(8-4)=12"


def test_yield_single_leaf():
    assert yield_text(DerivNode(Literal("x"))) == "x"


def test_unbound_tag():
    with pytest.raises(UnboundTag) as info:
        yield_text(DerivNode(TagRef(7)), TagEnv())
    assert info.value.index == 7


@pytest.mark.parametrize(
    "pieces, text",
    [
        (["while", "x", "<", "3", "{"], "while x<3{"),
        (["3", "*", "(", "8", ")"], "3*(8)"),
        (["expect", "24.00", "\n"], "expect 24.00\n"),
        (["a_b", "c"], "a_b c"),
        (["é", "x"], "éx"),
    ],
)
def test_spacing_rule(pieces, text):
    assert join_leaves(pieces) == text


def test_coverage_within_first_nine(arith):
    trees = generate(arith, GenConfig(seed=5, count=9))
    covered = set().union(*(productions_used(t) for t in trees))
    assert covered == set(range(len(arith.productions)))


@pytest.mark.parametrize("seed", [0, 1, 99, 2**40])
def test_coverage_any_seed(arith, seed):
    trees = generate(arith, GenConfig(seed=seed, count=9))
    assert set().union(*(productions_used(t) for t in trees)) == set(range(8))


def test_singleton_language_exhausts():
    spec = parse_spec("S ::= a")
    with pytest.raises(Exhausted) as info:
        generate(spec, GenConfig(count=3, max_attempts=50))
    assert len(info.value.trees) == 1


def test_improper_grammar_refused():
    with pytest.raises(GrammarError):
        generate(parse_spec("S ::= a\nX ::= b"), GenConfig(count=1))


def test_budget_below_min_height_refused(arith):
    with pytest.raises(ValueError):
        generate(arith, GenConfig(count=1, depth_budget=2))


def test_invalid_config():
    with pytest.raises(ValueError):
        GenConfig(count=-1)
    with pytest.raises(ValueError):
        GenConfig(depth_budget=0)


def test_zero_count(arith):
    assert generate(arith, GenConfig(count=0)) == []


def test_generated_trees_are_valid(arith, tagged, parking):
    for spec in (arith, tagged, parking):
        for tree in generate(spec, GenConfig(seed=3, count=60)):
            assert check_tree(spec, tree) == []


def test_check_tree_reports_problems(arith):
    tree = parse_text(arith, "1+2")
    tree.first_child.next_sibling = None  # drop '+' and F
    assert check_tree(arith, tree)
    leaf = parse_text(arith, "5")
    n = next(n for n in preorder(leaf) if n.value is not None)
    n.value = 5000
    assert any("out of range" in p for p in check_tree(arith, leaf))


def test_determinism(arith):
    a = generate(arith, GenConfig(seed=11, count=200))
    b = generate(arith, GenConfig(seed=11, count=200))
    assert [yield_text(t) for t in a] == [yield_text(t) for t in b]
    c = generate(arith, GenConfig(seed=12, count=200))
    assert [yield_text(t) for t in a] != [yield_text(t) for t in c]


def test_structure_without_tags_renders(arith):
    tree = parse_text(arith, "(1)")
    assert node_count(tree) == 9 and tree_height(tree) == 6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**63 - 1), st.integers(6, 8))
def test_distinct_and_bounded(seed, budget):
    spec = parse_spec("E* ::= F\nE ::= E + F\nF* ::= [N]\nF ::= ( E )\n[N] ::= 1 .. 9")
    trees = generate(spec, GenConfig(seed=seed, count=25, depth_budget=budget))
    hashes = {structural_hash(t) for t in trees}
    assert len(hashes) == len(trees) == 25
    limit = budget + max(min_height(spec).values())
    assert all(tree_height(t) <= limit for t in trees)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_coverage_is_monotone(seed):
    spec = parse_spec("S ::= A | B | S S\nA ::= a | a A\nB ::= b")
    trees = generate(spec, GenConfig(seed=seed, count=30))
    sizes = []
    seen = set()
    for t in trees:
        seen |= productions_used(t)
        sizes.append(len(seen))
    assert sizes == sorted(sizes)
    assert sizes[-1] == len(spec.productions)


def test_symbolic_values_within_range(arith):
    for tree in generate(arith, GenConfig(seed=4, count=50)):
        for node in preorder(tree):
            if node.value is not None:
                assert 1 <= node.value <= 1000


def test_evaluation_sees_symbolic_value(arith):
    tree = parse_text(arith, "7")
    assert evaluate(arith, tree)[0] == Int(7)
