import random

import pytest
from hypothesis import given, settings, strategies as st

from prefixgram import (
    BOOLEAN,
    WeightedAutomaton,
    next_token_lattice,
    wfsa_weight,
)
from prefixgram.errors import PrefixGramError, UnknownTerminal


def test_empty_prefix_lattice():
    A = next_token_lattice("", {"a": 1.0, "b": 1.0}, {"a", "b"})
    assert len(A.states) == 2
    assert wfsa_weight(A, "a") == 1.0 and wfsa_weight(A, "b") == 1.0
    assert wfsa_weight(A, "") == 0.0 and wfsa_weight(A, "a a") == 0.0


def test_single_symbol_alphabet():
    A = next_token_lattice("a", {"a": 0.5}, {"a"})
    assert len(A.states) == 3
    assert wfsa_weight(A, "a a") == 0.5
    assert wfsa_weight(A, "a") == 0.0


def test_reads_theta_off_last_arc():
    A = next_token_lattice("a", {"a": 2.0, "b": 3.0}, {"a", "b"})
    assert wfsa_weight(A, "a b") == 3.0
    assert wfsa_weight(A, "b b") == 0.0


def test_final_weight_zero_before_last_state():
    A = next_token_lattice("a", {"a": 1.0}, {"a"})
    assert wfsa_weight(A, "a") == 0
    assert wfsa_weight(A, "a a") == 1


def test_parallel_arcs_add():
    A = WeightedAutomaton(states=(0, 1), transitions=((0, "a", 0.2, 1), (0, "a", 0.3, 1)),
                          initial={0: 1.0}, final={1: 1.0}, alphabet=frozenset({"a"}))
    assert abs(wfsa_weight(A, "a") - 0.5) < 1e-15


def test_missing_theta_is_zero():
    A = next_token_lattice("", {"a": 1.0}, {"a", "b"})
    assert wfsa_weight(A, "b") == 0.0


def test_unknown_terminal():
    with pytest.raises(UnknownTerminal):
        next_token_lattice("c", {"a": 1.0}, {"a"})
    with pytest.raises(UnknownTerminal):
        WeightedAutomaton(states=(0, 1), transitions=((0, "z", 1.0, 1),),
                          initial={0: 1.0}, final={1: 1.0}, alphabet=frozenset({"a"}))


def test_cycles_rejected():
    with pytest.raises(PrefixGramError):
        WeightedAutomaton(states=(0, 1), transitions=((0, "a", 1.0, 1), (1, "a", 1.0, 0)),
                          initial={0: 1.0}, final={1: 1.0}, alphabet=frozenset({"a"}))


def test_boolean_lattice():
    A = next_token_lattice("a", {"a": True, "b": False}, {"a", "b"}, BOOLEAN)
    assert wfsa_weight(A, "a a") is True and wfsa_weight(A, "a b") is False


words = st.lists(st.sampled_from("abc"), max_size=5)
thetas = st.fixed_dictionaries({s: st.floats(0, 10) for s in "abc"})


@settings(max_examples=100, deadline=None)
@given(words, thetas)
def test_lattice_mass_equals_theta_sum(x, theta):
    A = next_token_lattice(x, theta, {"a", "b", "c"})
    total = sum(wfsa_weight(A, x + [s]) for s in "abc")
    assert abs(total - sum(theta.values())) <= 1e-12 * (1 + sum(theta.values()))


@settings(max_examples=100, deadline=None)
@given(words, thetas, words)
def test_lattice_rejects_wrong_lengths(x, theta, s):
    A = next_token_lattice(x, theta, {"a", "b", "c"})
    if len(s) != len(x) + 1:
        assert wfsa_weight(A, s) == 0
