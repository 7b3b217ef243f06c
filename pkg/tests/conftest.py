import pytest

from prefixgram import BOOLEAN, parse_grammar_text, random_suite
from prefixgram.oracle import all_strings

G1_TEXT = """\
0.3: S -> S S
0.7: S -> a
"""

G2_TEXT = """\
0.6: S -> a B
0.4: S -> b
1.0: B -> b
"""

G3_TEXT = """\
1: S -> ( S )
1: S ->
"""


@pytest.fixture
def G1():
    return parse_grammar_text(G1_TEXT)


@pytest.fixture
def G2():
    return parse_grammar_text(G2_TEXT)


@pytest.fixture
def G3():
    return parse_grammar_text(G3_TEXT, BOOLEAN)


@pytest.fixture(scope="session")
def prefix_suite():
    return random_suite(200, seed=0, max_weight=0.5)


@pytest.fixture(scope="session")
def transform_suite():
    return random_suite(200, seed=1, max_weight=0.9)


@pytest.fixture(scope="session")
def short_strings():
    return all_strings(("a", "b"), 4)
