"""Backend dispatch, prefix parsing and the explicit-theta lattice evaluators."""
from __future__ import annotations

from typing import Any, Mapping, Sequence

from .cky import ParseResult, cky_lattice_forward, incr_cky
from .earley import earley, earley_lattice_forward
from .errors import UnknownTerminal
from .grammar import WeightedGrammar
from .prefix import PrefixGrammar, eos_augment, prefix_grammar
from .semiring import OpCounter
from .transforms import ensure_ctf

BACKENDS = ("cky", "earley")


def _tokens(x) -> tuple:
    return tuple(x.split()) if isinstance(x, str) else tuple(x)


def _as_grammar(G) -> WeightedGrammar:
    return G.grammar if isinstance(G, PrefixGrammar) else G


def parse(G: WeightedGrammar, x, backend: str = "cky", cached=None,
          count_ops: bool = False) -> ParseResult:
    """``w_G(x)`` with the chosen backend."""
    G = _as_grammar(G)
    if backend == "cky":
        return incr_cky(G, x, cached, count_ops)
    if backend == "earley":
        return earley(G, x, cached, count_ops)
    raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")


def prefix_grammar_of(G: WeightedGrammar, eos: bool = False) -> PrefixGrammar:
    """``prefix_grammar(ensure_ctf(G))`` (of the EOS-augmented grammar if asked), memoized on ``G``."""
    key = "prefix_eos" if eos else "prefix"
    if key not in G._memo:
        base = eos_augment(G) if eos else G
        G._memo[key] = prefix_grammar(ensure_ctf(base))
    return G._memo[key]


def prefix_parse(G: WeightedGrammar, x, backend: str = "cky", cached=None,
                 count_ops: bool = False) -> ParseResult:
    """Prefix weight of ``x``: ordinary parsing of ``x`` under the prefix grammar."""
    return parse(prefix_grammar_of(G).grammar, x, backend, cached, count_ops)


def _check_theta(G: WeightedGrammar, x: tuple, theta: Mapping[str, Any] | None):
    for sym in list(x) + list(theta or ()):
        if sym not in G.terminals:
            raise UnknownTerminal(f"symbol {sym!r} is not in the alphabet")


def cky_lattice_value(G, x: Sequence[str] | str, theta: Mapping[str, Any] | None = None,
                      state=None, counter: OpCounter | None = None):
    """``sum_sigma w_G(x sigma) * theta_sigma`` by one CKY lattice pass.

    Applied to a prefix grammar this is the aggregation ``Z_x(theta)``.
    ``theta`` defaults to all ones; when ``counter`` is given the pass's
    semiring operations are tallied into it.
    """
    G = _as_grammar(G)
    x = _tokens(x)
    _check_theta(G, x, theta)
    state = incr_cky(G, x, state).state
    sr = G.semiring if counter is None else G.semiring.counted(counter)[0]
    return cky_lattice_forward(state, theta, sr)


def earley_lattice_value(G, x: Sequence[str] | str, theta: Mapping[str, Any] | None = None,
                         state=None, counter: OpCounter | None = None):
    """Earley counterpart of :func:`cky_lattice_value`."""
    G = _as_grammar(G)
    x = _tokens(x)
    _check_theta(G, x, theta)
    state = earley(G, x, state).state
    sr = G.semiring if counter is None else G.semiring.counted(counter)[0]
    return earley_lattice_forward(state, theta, sr)
