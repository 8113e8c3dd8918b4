import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gramtao.errors import SpecSyntaxError, UnboundSymbol, UnknownOperation
from gramtao.grammar_spec import (
    Apply,
    Default,
    DirectRec,
    IndirectRec,
    Literal,
    Singleton,
    SymbolicTerminal,
    TagRef,
    Variable,
    format_spec,
    format_strategies,
    min_height,
    parse_spec,
    parse_strategies,
    quote_literal,
    unquote_literal,
    validate_properness,
)
from gramtao.values import Bool, Int, Text

NUMBERED = """
(1) E ::= F @@ F
(2) E ::= E + F @@ (intAdd E F)
(3) E ::= E - F @@ (intSub E F)
(4) F ::= T @@ T
(5) F ::= F * T @@ (intMul F T)
(6) F ::= F / T @@ (intDiv F T)
(7) T ::= [N] @@ [N]
(8) T ::= (E) @@ E
(9) [N] ::= 1 .. 1000
"""


def test_production_with_application():
    spec = parse_spec("E ::= E + F @@ (intAdd E F)\nE ::= F\nF ::= x")
    p = spec.productions[0]
    assert p.lhs == "E"
    assert p.rhs == (Variable("E"), Literal("+"), Variable("F"))
    assert isinstance(p.sem, Apply) and p.sem.op == "intAdd"
    assert [a.name for a in p.sem.args] == ["E", "F"]
    assert [a.ref for a in p.sem.args] == [0, 2]


def test_symbolic_terminal_class():
    spec = parse_spec(NUMBERED)
    assert spec.terminal_classes == (SymbolicTerminal("N", 1, 1000),)
    assert spec.productions[6].rhs == (SymbolicTerminal("N", 1, 1000),)


def test_decorative_numbers_and_file_order():
    spec = parse_spec(NUMBERED)
    assert [p.ordinal for p in spec.productions] == list(range(8))
    assert spec.start == "E"
    assert str(spec.productions[7]) == "T ::= '(' E ')' @@ E"


def test_tagged_singleton():
    spec = parse_spec("TD ::= E Assert @@ $[1] : E\nAssert ::= '=' $[1]\nE ::= x")
    sem = spec.productions[0].sem
    assert isinstance(sem, Singleton) and sem.name == "E" and sem.tag == 1
    assert spec.productions[1].rhs == (Literal("="), TagRef(1))


@pytest.mark.parametrize("source", ["X ::=", "X ::= @@ 1", "X ::= 'a' | ", "X ::= ''"])
def test_empty_rhs_is_a_syntax_error(source):
    with pytest.raises(SpecSyntaxError):
        parse_spec(source)


def test_syntax_error_carries_line():
    with pytest.raises(SpecSyntaxError) as info:
        parse_spec("S ::= a\n\nthis is not a rule\n")
    assert info.value.line == 3


def test_unknown_operation():
    with pytest.raises(UnknownOperation) as info:
        parse_spec("E ::= E + E @@ (intPow E E)\nE ::= x")
    assert info.value.op == "intPow"


def test_unbound_symbol():
    with pytest.raises(UnboundSymbol) as info:
        parse_spec("E ::= F @@ G\nF ::= x\nG ::= y")
    assert info.value.name == "G"


def test_tag_read_in_term_is_rejected():
    with pytest.raises(UnknownOperation):
        parse_spec("E ::= F @@ (intAdd F $[1])\nF ::= x")


def test_wrong_arity():
    with pytest.raises(SpecSyntaxError):
        parse_spec("E ::= F @@ (intAdd F)\nF ::= x")


def test_bad_range_and_unterminated_quote():
    with pytest.raises(SpecSyntaxError):
        parse_spec("S ::= [N]\n[N] ::= 5 .. 1")
    with pytest.raises(SpecSyntaxError):
        parse_spec("S ::= 'abc\n")


def test_alternation_binds_terms_per_alternative():
    spec = parse_spec("B ::= 'yes' @@ true | 'no' @@ false | 'maybe'")
    assert [p.sem.value for p in spec.productions[:2]] == [Bool(True), Bool(False)]
    assert all(p.sem.kind == "constant" for p in spec.productions[:2])
    assert spec.productions[2].sem is None


def test_continuation_lines_and_multiline_literals():
    spec = parse_spec("S ::= 'line one\nline two' @@ a\n  | 'x' @@ b\n")
    assert [p.rhs[0].text for p in spec.productions] == ["line one\nline two", "x"]
    assert spec.productions[0].sem.value == Text("a")


def test_comments_and_blank_lines():
    spec = parse_spec("# header\n\nS ::= a\n# trailer\n")
    assert len(spec.productions) == 1


def test_repeated_mentions_bind_in_order():
    spec = parse_spec("P ::= N , N @@ (intSub N N)\nN ::= [D] @@ [D]\n[D] ::= 0 .. 9")
    assert [a.ref for a in spec.productions[0].sem.args] == [0, 2]


def test_directives():
    spec = parse_spec('TAO-reduction: {"default", "directRec", "indirectRec: {E,F,T}"}\n' + NUMBERED)
    assert spec.reduction_directives == (Default(), DirectRec(), IndirectRec(("E", "F", "T")))
    assert parse_strategies('{"default", "directRec"}.') == (Default(), DirectRec())
    text = format_strategies(spec.reduction_directives)
    assert text == '{"default", "directRec", "indirectRec: {E,F,T}"}'
    with pytest.raises(ValueError):
        parse_strategies('{"shrink"}')
    with pytest.raises(SpecSyntaxError):
        parse_spec("TAO-domain: nowhere\nS ::= a")


def test_min_height_examples():
    assert min_height(parse_spec(NUMBERED)) == {"T": 1, "F": 2, "E": 3}
    assert min_height(parse_spec("S ::= a")) == {"S": 1}
    assert min_height(parse_spec("S ::= A\nA ::= a")) == {"S": 2, "A": 1}


def test_properness_examples():
    assert validate_properness(parse_spec(NUMBERED)).proper
    assert validate_properness(parse_spec("S ::= S")).unproductive == ["S"]
    report = validate_properness(parse_spec("S ::= a\nX ::= b"))
    assert report.inaccessible == ["X"] and not report.proper
    assert report.lines() == ["inaccessible: X"]


def test_star_on_self_recursive_rule_is_rejected():
    report = validate_properness(parse_spec("E* ::= E + F\nE ::= F\nF ::= x"))
    assert report.proper and not report.ok
    assert "mentions its own variable" in report.bad_defaults[0]


def test_star_on_taller_rule_is_rejected():
    report = validate_properness(parse_spec("S ::= A\nA* ::= B\nA ::= a\nB ::= b"))
    assert report.bad_defaults and "taller" in report.bad_defaults[0]


def test_undefined_tag_is_reported():
    report = validate_properness(parse_spec("S ::= 'x' $[3]"))
    assert report.undefined_tags == [3]


def test_canonical_default_is_lowest_ordinal():
    spec = parse_spec("S ::= A\nA* ::= a\nA* ::= b\nA ::= A a")
    assert spec.defaults["A"].ordinal == 1


def test_literal_quoting_round_trip():
    for text in ["a", "it's", "back\\slash", "two\nlines\t!"]:
        assert unquote_literal(quote_literal(text)) == text


def test_pretty_print_round_trip_on_shipped_grammars(arith, tagged, parking):
    for spec in (arith, tagged, parking):
        again = parse_spec(format_spec(spec))
        assert again == spec


# ---------------------------------------------------------------------------
# random small grammars

VARS = ["A", "B", "C"]
TERMS = ["a", "b"]


@st.composite
def small_grammars(draw):
    """Rules as {var: [alternatives]}; every variable gets a terminal-only alternative."""
    rules = {}
    for var in VARS:
        alts = [[draw(st.sampled_from(TERMS))]]
        for _ in range(draw(st.integers(0, 2))):
            alts.append(draw(st.lists(st.sampled_from(VARS + TERMS), min_size=1, max_size=3)))
        rules[var] = alts
    return rules


def _split_source(rules):
    return "\n".join(f"{v} ::= {' '.join(alt)}" for v, alts in rules.items() for alt in alts)


def _joined_source(rules):
    return "\n".join(f"{v} ::= " + " | ".join(" ".join(alt) for alt in alts) for v, alts in rules.items())


def _sentences(spec, k):
    """All terminal strings of at most k tokens (brute-force over sentential forms)."""
    out = set()
    seen = set()
    todo = [(Variable(spec.start),)]
    while todo:
        form = todo.pop()
        if form in seen or len(form) > k:
            continue
        seen.add(form)
        idx = next((i for i, s in enumerate(form) if isinstance(s, Variable)), None)
        if idx is None:
            out.add(tuple(s.text for s in form))
            continue
        for p in spec.by_lhs[form[idx].name]:
            todo.append(form[:idx] + p.rhs + form[idx + 1:])
    return out


@settings(max_examples=60, deadline=None)
@given(small_grammars(), st.integers(1, 6))
def test_alternation_splitting_preserves_language(rules, k):
    split = parse_spec(_split_source(rules))
    joined = parse_spec(_joined_source(rules))
    assert [p.rhs for p in split.productions] == [p.rhs for p in joined.productions]
    assert _sentences(split, k) == _sentences(joined, k)


@settings(max_examples=60, deadline=None)
@given(small_grammars(), st.data())
def test_round_trip_random_grammars(rules, data):
    stars = {v: data.draw(st.booleans()) for v in VARS}
    lines = []
    for v, alts in rules.items():
        for i, alt in enumerate(alts):
            star = "*" if i == 0 and stars[v] else ""
            lines.append(f"{v}{star} ::= {' '.join(alt)}")
    spec = parse_spec("\n".join(lines))
    assert parse_spec(format_spec(spec)) == spec


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=2, max_size=2).map(sorted))
def test_symbolic_range_round_trip(bounds):
    lo, hi = bounds
    spec = parse_spec(f"S ::= [K] @@ [K]\n[K] ::= {lo} .. {hi}")
    assert spec.terminal_classes == (SymbolicTerminal("K", lo, hi),)
    assert parse_spec(format_spec(spec)) == spec


def test_constant_kinds():
    spec = parse_spec("S ::= a @@ 42 | b @@ 'hello world' | c @@ 2.5")
    assert spec.productions[0].sem.value == Int(42)
    assert spec.productions[1].sem.value == Text("hello world")
    assert parse_spec(format_spec(spec)) == spec
