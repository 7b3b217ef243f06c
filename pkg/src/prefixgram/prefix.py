"""Prefix grammars: grammars whose language is the prefix language of another.

Two constructions are provided.  :func:`prefix_grammar` is the compact one:
for each rule ``X -> x1 ... xK`` and border position ``k`` it adds a primed
rule ``X' -> x1 ... x(k-1) xk'`` whose weight absorbs the total weights of
the symbols after the border.  :func:`compose_prefix` builds the same
language by composing the grammar with a two-state copy/erase transducer and
needs no total weights.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import EosCollision, SymbolCollision, TotalsNotConverged
from .grammar import Rule, TotalWeights, WeightedGrammar, total_weights
from .lattice import WeightedTransducer
from .transforms import eliminate_dead_rules

PRIME = "′"
PREFIX_START = "◃"
EOS = "<EOS>"
EOS_START = "″"
COPY, ERASE = "c", "e"


@dataclass(frozen=True)
class PrefixGrammar:
    grammar: WeightedGrammar
    prime_map: dict
    totals_used: TotalWeights
    source: WeightedGrammar

    @property
    def start(self) -> str:
        return self.grammar.start


def prefix_grammar(G: WeightedGrammar, totals: TotalWeights | None = None) -> PrefixGrammar:
    sr = G.semiring
    if totals is None:
        totals = total_weights(G)
    if not totals.converged:
        raise TotalsNotConverged(
            f"total weights did not converge after {totals.iterations} iterations")
    Z = totals.Z

    prime = {t: t for t in G.terminals}
    prime.update({X: X + PRIME for X in G.nonterminals})
    start = G.start + PREFIX_START
    clash = sorted(({prime[X] for X in G.nonterminals} | {start}) & set(G.symbols))
    if clash:
        raise SymbolCollision(f"reserved prefix-grammar names already in use: {clash}")

    primed = []
    for r in G.rules:
        for k in range(1, r.arity + 1):
            w = r.weight
            for s in r.rhs[k:]:
                w = sr.mul(w, Z[s])
            if sr.is_zero(w):
                continue
            primed.append(Rule(prime[r.lhs], r.rhs[:k - 1] + (prime[r.rhs[k - 1]],), w))

    # A primed nonterminal without rules derives nothing; drop rules ending in one.
    while True:
        alive = {r.lhs for r in primed} | set(G.terminals)
        kept = [r for r in primed if r.rhs[-1] in alive]
        if len(kept) == len(primed):
            break
        primed = kept

    rules = list(G.rules) + [
        Rule(start, (prime[G.start],), sr.one),
        Rule(start, (), Z[G.start]),
    ] + primed
    out = WeightedGrammar(
        rules, start, sr,
        nonterminals=set(G.nonterminals) | {prime[X] for X in G.nonterminals} | {start},
        terminals=G.terminals,
    )
    return PrefixGrammar(out, prime, totals, G)


def prefix_transducer(alphabet, semiring=None) -> WeightedTransducer:
    """Two-state transducer relating each string to each of its prefixes."""
    from .semiring import REAL
    sr = semiring or REAL
    alphabet = sorted(alphabet)
    if not alphabet:
        raise ValueError("alphabet must be non-empty")
    one = sr.one
    arcs = []
    for a in alphabet:
        arcs.append((COPY, a, a, one, COPY))
        arcs.append((COPY, a, a, one, ERASE))
        arcs.append((ERASE, a, "", one, ERASE))
    return WeightedTransducer(
        states=(COPY, ERASE),
        transitions=tuple(arcs),
        initial={COPY: one, ERASE: one},
        final={COPY: sr.zero, ERASE: one},
        input_alphabet=frozenset(alphabet),
        output_alphabet=frozenset(alphabet),
        semiring=sr,
    )


def _tri(s, X, t):
    return f"⟨{s},{X},{t}⟩"


def compose_prefix(G: WeightedGrammar, totals: TotalWeights | None = None) -> WeightedGrammar:
    """Prefix grammar obtained by composing ``G`` with the prefix transducer.

    ``totals`` is accepted for interface parity with :func:`prefix_grammar`
    and is not used: the erase-state copies of the grammar derive the total
    weights themselves.
    """
    sr = G.semiring
    one = sr.one
    start = G.start + PREFIX_START
    names = {_tri(s, X, t) for X in G.symbols for s, t in ((COPY, COPY), (COPY, ERASE), (ERASE, ERASE))}
    if start in G.symbols or names & set(G.symbols):
        raise SymbolCollision("reserved composition names already in use")

    rules = [
        Rule(start, (_tri(COPY, G.start, ERASE),), one),
        Rule(start, (_tri(ERASE, G.start, ERASE),), one),
    ]
    for r in G.rules:
        rules.append(Rule(_tri(COPY, r.lhs, COPY), tuple(_tri(COPY, s, COPY) for s in r.rhs), r.weight))
        rules.append(Rule(_tri(ERASE, r.lhs, ERASE), tuple(_tri(ERASE, s, ERASE) for s in r.rhs), r.weight))
        for k in range(r.arity):
            rhs = (tuple(_tri(COPY, s, COPY) for s in r.rhs[:k])
                   + (_tri(COPY, r.rhs[k], ERASE),)
                   + tuple(_tri(ERASE, s, ERASE) for s in r.rhs[k + 1:]))
            rules.append(Rule(_tri(COPY, r.lhs, ERASE), rhs, r.weight))
    for a in sorted(G.terminals):
        rules.append(Rule(_tri(COPY, a, COPY), (a,), one))
        rules.append(Rule(_tri(COPY, a, ERASE), (a,), one))
        rules.append(Rule(_tri(ERASE, a, ERASE), (), one))
    nts = {_tri(s, X, t) for X in G.symbols for s, t in ((COPY, COPY), (COPY, ERASE), (ERASE, ERASE))}
    out = WeightedGrammar(rules, start, sr, nonterminals=nts | {start}, terminals=G.terminals)
    return eliminate_dead_rules(out)


def eos_augment(G: WeightedGrammar, eos: str = EOS) -> WeightedGrammar:
    """Add ``S'' -> S <EOS>`` so that ``w(x <EOS>) = w(x)`` with ``S''`` the new start."""
    if eos in G.symbols:
        raise EosCollision(f"end-of-string token {eos!r} already occurs in the grammar")
    start = G.start + EOS_START
    if start in G.symbols:
        raise SymbolCollision(f"reserved start name {start!r} already in use")
    rules = list(G.rules) + [Rule(start, (G.start, eos), G.semiring.one)]
    return WeightedGrammar(rules, start, G.semiring,
                           nonterminals=set(G.nonterminals) | {start},
                           terminals=set(G.terminals) | {eos})
