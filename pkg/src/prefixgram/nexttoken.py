"""Next-token weight vectors by reverse-mode differentiation of the lattice parsers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .cky import cky_next_token_backward, incr_cky
from .earley import earley, earley_next_token_backward
from .errors import PrefixGramError, UnknownTerminal, ZeroPrefixMass
from .grammar import WeightedGrammar
from .parse import _tokens, prefix_grammar_of, prefix_parse
from .prefix import EOS
from .semiring import OpCounter


@dataclass(frozen=True)
class NextTokenVector:
    """``weights[sigma]`` is the prefix weight of ``x sigma``; ``eos_weight`` is ``w(x)``."""

    weights: dict
    eos_weight: Any = None
    state: Any = field(default=None, repr=False, compare=False)

    def __getitem__(self, sym):
        if sym == EOS and self.eos_weight is not None:
            return self.eos_weight
        return self.weights[sym]

    def items(self):
        out = sorted(self.weights.items())
        if self.eos_weight is not None:
            out.append((EOS, self.eos_weight))
        return out

    def __iter__(self):
        return (k for k, _ in self.items())

    def __len__(self):
        return len(self.weights) + (self.eos_weight is not None)


def _next_token(G: WeightedGrammar, x, eos: bool, backend: str, state, counter):
    x = _tokens(x)
    for sym in x:
        if sym not in G.terminals:
            raise UnknownTerminal(f"symbol {sym!r} is not in the alphabet")
    P = prefix_grammar_of(G, eos=eos).grammar
    alphabet = sorted(G.terminals) + ([EOS] if eos else [])
    if backend == "cky":
        parse_fn, backward = incr_cky, cky_next_token_backward
    elif backend == "earley":
        parse_fn, backward = earley, earley_next_token_backward
    else:
        raise ValueError(f"unknown backend {backend!r}")
    # a state for another grammar or a non-prefix input is ignored
    state = parse_fn(P, x, state).state
    sr = P.semiring if counter is None else P.semiring.counted(counter)[0]
    J = backward(state, alphabet, sr)
    eos_weight = J.pop(EOS) if eos else None
    return NextTokenVector(J, eos_weight, state)


def next_token_cky(G: WeightedGrammar, x, eos: bool = False, state=None,
                   counter: OpCounter | None = None) -> NextTokenVector:
    """All one-token extension weights of ``x`` from one backward CKY sweep.

    ``state`` may be a CKY state of the prefix grammar for a prefix of ``x``
    (for instance ``v.state`` of an earlier vector); ``counter`` tallies the
    semiring operations of the backward sweep only.
    """
    return _next_token(G, x, eos, "cky", state, counter)


def next_token_earley(G: WeightedGrammar, x, eos: bool = False, state=None,
                      counter: OpCounter | None = None) -> NextTokenVector:
    return _next_token(G, x, eos, "earley", state, counter)


def next_token(G: WeightedGrammar, x, backend: str = "cky", eos: bool = False) -> NextTokenVector:
    return _next_token(G, x, eos, backend, None, None)


@dataclass(frozen=True)
class ConditionalDistribution:
    probs: dict

    def __getitem__(self, sym):
        return self.probs[sym]

    def items(self):
        return self.probs.items()


def conditional_distribution(G: WeightedGrammar, x, backend: str = "cky") -> ConditionalDistribution:
    """``p(sigma | x)`` over the alphabet plus ``<EOS>``."""
    sr = G.semiring
    if sr.name not in ("real", "logreal"):
        raise PrefixGramError("conditional distributions need the real or log-real semiring")
    mass = sr.to_real(prefix_parse(G, x, backend).weight)
    if mass <= 0:
        raise ZeroPrefixMass(f"prefix {' '.join(_tokens(x)) or 'ε'!r} has zero prefix weight")
    v = next_token(G, x, backend, eos=True)
    probs = {sym: sr.to_real(w) / mass for sym, w in v.items()}
    return ConditionalDistribution(probs)
