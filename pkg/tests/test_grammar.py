import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefixgram import (
    BOOLEAN,
    LOGREAL,
    Rule,
    WeightedGrammar,
    derivation_weight,
    derivation_yield,
    grammar_stats,
    leaf,
    node,
    parse_grammar_text,
    total_weights,
)
from prefixgram.errors import (
    EmptyGrammar,
    GrammarSyntaxError,
    PrefixGramError,
    UnknownRule,
    WeightParseError,
)
from prefixgram.grammar import DerivationTree, kleene_iterates
from prefixgram.oracle import enumerate_trees

from conftest import G1_TEXT


def test_read_g1(G1):
    assert len(G1.rules) == 2 and G1.size == 5 and G1.start == "S"
    assert G1.weight_of("S", ("S", "S")) == 0.3


def test_duplicate_rules_are_consolidated():
    G = parse_grammar_text(G1_TEXT + "0.2: S -> a\n")
    assert len(G.rules) == 2
    assert abs(G.rule("S", ("a",)).weight - 0.9) < 1e-15


def test_missing_weight_is_a_syntax_error_on_line_1():
    with pytest.raises(SyntaxError) as e:
        parse_grammar_text("x -> y")
    assert e.value.lineno == 1


def test_syntax_error_reports_the_offending_line():
    with pytest.raises(GrammarSyntaxError) as e:
        parse_grammar_text("# header\n0.5: S -> a\n\n0.5 S a\n")
    assert e.value.lineno == 4


@pytest.mark.parametrize("text", ["", "# only a comment\n\n", "start: S\n"])
def test_empty_grammar(text):
    with pytest.raises(EmptyGrammar):
        parse_grammar_text(text)


def test_bad_weight_carries_line_number():
    with pytest.raises(WeightParseError) as e:
        parse_grammar_text("0.5: S -> a\nfoo: S -> b\n")
    assert e.value.lineno == 2
    with pytest.raises(WeightParseError):
        parse_grammar_text("0.5: S -> a\n", BOOLEAN)


def test_start_directive_and_epsilon_forms():
    G = parse_grammar_text("start: T\n1.0: S -> a\n0.5: T -> S ε\n0.5: T ->\n")
    assert G.start == "T"
    assert G.has_rule("T", ("S",)) and G.has_rule("T", ())
    H = parse_grammar_text("0.5: S → a  # unicode arrow\n")
    assert H.has_rule("S", ("a",))
    with pytest.raises(GrammarSyntaxError):
        parse_grammar_text("start: S\nstart: T\n1: S -> a\n")


def test_grammar_stats():
    G1 = parse_grammar_text(G1_TEXT)
    assert grammar_stats(G1) == grammar_stats(G1)
    s = grammar_stats(G1)
    assert (s.size, s.rule_count, s.nonterminal_count, s.terminal_count) == (5, 2, 1, 1)
    eps = grammar_stats(parse_grammar_text("1.0: S -> ε"))
    assert (eps.size, eps.rule_count) == (1, 1)


def test_g2_size_by_recount(G2):
    # (1+2) + (1+1) + (1+1) = 7
    s = G2.stats()
    assert s.size == sum(1 + len(r.rhs) for r in G2.rules) == 7
    assert (s.rule_count, s.nonterminal_count, s.terminal_count) == (3, 2, 2)


def test_terminals_and_nonterminals_are_disjoint(G2):
    assert G2.nonterminals == {"S", "B"} and G2.terminals == {"a", "b"}
    assert G2.start in G2.nonterminals
    with pytest.raises(PrefixGramError):
        WeightedGrammar([Rule("S", ("a",), 1.0)], "S", terminals={"S"})


def test_bad_symbol_names():
    with pytest.raises(PrefixGramError):
        WeightedGrammar([Rule("S", ("->",), 1.0)], "S")
    with pytest.raises(PrefixGramError):
        WeightedGrammar([Rule("S", ("a b",), 1.0)], "S")


def test_yields(G1, G3):
    assert derivation_yield(leaf("a")) == ("a",)
    Sa = node(G1, "S", leaf("a"))
    assert derivation_yield(node(G1, "S", Sa, Sa)) == ("a", "a")
    empty = node(G3, "S")
    assert derivation_yield(empty) == ()
    assert derivation_yield(node(G3, "S", leaf("("), empty, leaf(")"))) == ("(", ")")


def test_tree_weights(G1):
    Sa = node(G1, "S", leaf("a"))
    assert derivation_weight(G1, Sa) == 0.7
    assert abs(derivation_weight(G1, node(G1, "S", Sa, Sa)) - 0.147) < 1e-15
    left = node(G1, "S", node(G1, "S", Sa, Sa), Sa)
    assert abs(derivation_weight(G1, left) - 0.3 ** 2 * 0.7 ** 3) < 1e-15
    assert abs(0.3 ** 2 * 0.7 ** 3 - 0.03087) < 1e-15


def test_tree_with_foreign_rule_is_rejected(G1, G2):
    t = node(G2, "S", leaf("b"))
    with pytest.raises(UnknownRule):
        derivation_weight(G1, t)
    with pytest.raises(UnknownRule):
        node(G1, "S", leaf("b"))


def test_tree_weight_is_multiplicative_over_subtrees(G1):
    for t, w in enumerate_trees(G1, "S", 4).trees:
        expect = t.rule.weight
        for c in t.children:
            expect *= derivation_weight(G1, c)
        assert abs(w - expect) <= 1e-15


def test_totals_g1(G1):
    tw = total_weights(G1)
    assert tw.converged and abs(tw.Z["S"] - 1.0) <= 1e-9 and tw.Z["a"] == 1.0
    # independent check: 200 sweeps of z <- 0.3 z^2 + 0.7 from 0
    z = 0.0
    for _ in range(200):
        z = 0.3 * z * z + 0.7
    assert abs(tw.Z["S"] - z) <= 1e-9


def test_totals_supercritical():
    G = parse_grammar_text("0.7: S -> S S\n0.3: S -> a\n")
    tw = total_weights(G)
    assert tw.converged and abs(tw.Z["S"] - 3 / 7) <= 1e-6


def test_totals_satisfy_their_equations(G2):
    tw = total_weights(G2)
    for X in G2.nonterminals:
        rhs = sum(r.weight * __import__("math").prod(tw.Z[s] for s in r.rhs)
                  for r in G2.rules_for(X))
        assert abs(tw.Z[X] - rhs) <= 1e-12


def test_totals_nonconvergence_is_reported_not_raised():
    G = parse_grammar_text("0.6: S -> S S\n0.6: S -> a\n")
    tw = total_weights(G, max_iter=50)
    assert not tw.converged and tw.iterations <= 50
    with pytest.raises(ValueError):
        total_weights(G, max_iter=0)


def test_totals_boolean_and_logreal(G3):
    assert total_weights(G3).Z["S"] is True
    G = parse_grammar_text(G1_TEXT, LOGREAL)
    tw = total_weights(G)
    assert tw.converged and LOGREAL.approx_eq(tw.Z["S"], 0.0)


def test_kleene_iterates_are_monotone(transform_suite):
    for G in transform_suite[:50]:
        prev = None
        for h, Z in enumerate(kleene_iterates(G)):
            if prev is not None:
                assert all(Z[X] >= prev[X] - 1e-15 for X in G.nonterminals)
            prev = Z
            if h == 30:
                break


def test_tight_pcfg_totals_are_one():
    G = parse_grammar_text("0.5: S -> A B\n0.5: S -> a\n0.4: A -> a A\n0.6: A -> b\n1.0: B -> b\n")
    tw = total_weights(G)
    assert all(abs(tw.Z[X] - 1.0) <= 1e-6 for X in G.nonterminals)


def test_serialization_round_trip(transform_suite):
    for G in transform_suite[:50] + [parse_grammar_text(G1_TEXT)]:
        H = parse_grammar_text(G.to_text())
        assert H.to_text() == G.to_text()
        hs, gs = H.stats(), G.stats()
        assert (hs.size, hs.rule_count, hs.nonterminal_count) == (gs.size, gs.rule_count, gs.nonterminal_count)
        # alphabet symbols that no rule mentions are not written out
        used = {s for r in G.rules for s in r.rhs} & G.terminals
        assert H.terminals == used
        assert [(r.lhs, r.rhs, r.weight) for r in H.rules] == [(r.lhs, r.rhs, r.weight) for r in G.rules]


def test_rule_order_is_canonical():
    a = WeightedGrammar([Rule("S", ("b",), 0.5), Rule("A", ("a",), 1.0), Rule("S", ("A",), 0.5)], "S")
    b = WeightedGrammar([Rule("S", ("A",), 0.5), Rule("S", ("b",), 0.5), Rule("A", ("a",), 1.0)], "S")
    assert a == b and a.to_text() == b.to_text()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("SAB"), st.lists(st.sampled_from("SABab"), max_size=3),
                          st.floats(min_value=0.01, max_value=1.0)), min_size=1, max_size=8))
def test_text_round_trip_property(triples):
    G = WeightedGrammar([Rule(l, tuple(r), w) for l, r, w in triples], triples[0][0])
    H = parse_grammar_text(G.to_text())
    assert H.to_text() == G.to_text()
    assert {(r.lhs, r.rhs): r.weight for r in H.rules} == {(r.lhs, r.rhs): r.weight for r in G.rules}
