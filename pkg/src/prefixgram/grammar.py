"""Weighted context-free grammars: data model, text format, trees, totals."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

from .errors import (
    EmptyGrammar,
    GrammarSyntaxError,
    PrefixGramError,
    UnknownRule,
    WeightParseError,
)
from .semiring import REAL, Semiring

EPSILON_TOKENS = ("ε",)
ARROWS = ("->", "→")


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: tuple[str, ...]
    weight: Any

    @property
    def arity(self) -> int:
        return len(self.rhs)

    @property
    def size(self) -> int:
        return 1 + len(self.rhs)

    def __str__(self):
        return f"{self.weight}: {self.lhs} -> {' '.join(self.rhs)}".rstrip()


@dataclass(frozen=True)
class GrammarStats:
    size: int
    rule_count: int
    nonterminal_count: int
    terminal_count: int


def _check_symbol(name: str):
    if not isinstance(name, str) or not name or any(c.isspace() for c in name) or name in ARROWS:
        raise PrefixGramError(f"invalid symbol name {name!r}")


class WeightedGrammar:
    """An immutable WCFG ``<N, Sigma, S, R>`` over a commutative semiring.

    Duplicate ``(lhs, rhs)`` rules are consolidated by adding their weights.
    Nonterminals are the left-hand sides plus anything passed explicitly in
    ``nonterminals`` (and the start symbol); every other right-hand-side
    symbol is a terminal.  ``terminals`` may list extra alphabet symbols that
    no rule mentions, which keeps the alphabet stable across transformations.

    Symbols are interned to dense integer ids in sorted name order and rules
    are stored sorted by ``(lhs id, rhs ids)``, so two grammars with the same
    rules are stored identically regardless of construction order.
    """

    def __init__(self, rules: Iterable[Rule | tuple], start: str,
                 semiring: Semiring = REAL, nonterminals: Iterable[str] = (),
                 terminals: Iterable[str] = ()):
        self.semiring = semiring
        merged: dict[tuple, Any] = {}
        for r in rules:
            if not isinstance(r, Rule):
                lhs, rhs, w = r
                r = Rule(lhs, tuple(rhs), w)
            key = (r.lhs, tuple(r.rhs))
            if key in merged:
                merged[key] = semiring.add(merged[key], r.weight)
            else:
                merged[key] = r.weight

        nts = {lhs for lhs, _ in merged} | set(nonterminals) | {start}
        syms = set(nts)
        for _, rhs in merged:
            syms.update(rhs)
        syms.update(terminals)
        for s in syms:
            _check_symbol(s)
        declared_terms = set(terminals)
        if declared_terms & nts:
            raise PrefixGramError(
                f"symbols declared terminal but used as nonterminal: {sorted(declared_terms & nts)}")

        self.start = start
        self.nonterminals = frozenset(nts)
        self.terminals = frozenset(syms - nts)
        self.symbols = tuple(sorted(syms))
        self.symbol_id = {s: i for i, s in enumerate(self.symbols)}
        sid = self.symbol_id
        self.rules = tuple(
            Rule(lhs, rhs, w)
            for (lhs, rhs), w in sorted(merged.items(),
                                        key=lambda kv: (sid[kv[0][0]], [sid[s] for s in kv[0][1]]))
        )
        by_lhs = defaultdict(list)
        for r in self.rules:
            by_lhs[r.lhs].append(r)
        self._by_lhs = dict(by_lhs)
        self._index = {(r.lhs, r.rhs): r for r in self.rules}
        # per-grammar caches for preprocessing pipelines and prefix states
        self._memo: dict = {}

    # -- queries --------------------------------------------------------

    def rules_for(self, lhs: str) -> list[Rule]:
        return self._by_lhs.get(lhs, [])

    def rule(self, lhs: str, rhs: Sequence[str]) -> Rule:
        try:
            return self._index[(lhs, tuple(rhs))]
        except KeyError:
            raise UnknownRule(f"no rule {lhs} -> {' '.join(rhs)}") from None

    def has_rule(self, lhs: str, rhs: Sequence[str]) -> bool:
        return (lhs, tuple(rhs)) in self._index

    def is_terminal(self, sym: str) -> bool:
        return sym in self.terminals

    @property
    def size(self) -> int:
        return sum(r.size for r in self.rules)

    def stats(self) -> GrammarStats:
        return grammar_stats(self)

    def weight_of(self, lhs: str, rhs: Sequence[str]):
        r = self._index.get((lhs, tuple(rhs)))
        return self.semiring.zero if r is None else r.weight

    def replace(self, rules=None, start=None, nonterminals=None, terminals=None,
                keep_alphabet=True) -> "WeightedGrammar":
        """A new grammar sharing this one's semiring (and alphabet by default)."""
        rules = list(self.rules if rules is None else rules)
        start = self.start if start is None else start
        rules = [r if isinstance(r, Rule) else Rule(r[0], tuple(r[1]), r[2]) for r in rules]
        lhss = {r.lhs for r in rules} | {start}
        used = set(lhss)
        for r in rules:
            used.update(r.rhs)
        nts = set(self.nonterminals if nonterminals is None else nonterminals) & used
        terms = set(terminals or ())
        if keep_alphabet:
            terms |= self.terminals
        return WeightedGrammar(rules, start, self.semiring, nonterminals=nts,
                               terminals=terms - nts - lhss)

    # -- text -------------------------------------------------------------

    def to_text(self) -> str:
        fmt = self.semiring.format_weight
        lines = [f"start: {self.start}"]
        for r in self.rules:
            rhs = " ".join(r.rhs)
            lines.append(f"{fmt(r.weight)}: {r.lhs} ->{' ' + rhs if rhs else ''}")
        return "\n".join(lines) + "\n"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        s = self.stats()
        return (f"<WeightedGrammar start={self.start!r} rules={s.rule_count} size={s.size} "
                f"semiring={self.semiring.name}>")

    def __eq__(self, other):
        if not isinstance(other, WeightedGrammar):
            return NotImplemented
        return (self.start == other.start and self.rules == other.rules
                and self.nonterminals == other.nonterminals
                and self.terminals == other.terminals
                and self.semiring.name == other.semiring.name)

    __hash__ = None


def grammar_stats(G: WeightedGrammar) -> GrammarStats:
    return GrammarStats(
        size=G.size,
        rule_count=len(G.rules),
        nonterminal_count=len(G.nonterminals),
        terminal_count=len(G.terminals),
    )


# -- text format ----------------------------------------------------------

def parse_grammar_text(text: str, semiring: Semiring = REAL) -> WeightedGrammar:
    """Read the line-oriented grammar format::

        # comment
        start: S
        0.3: S -> S S
        0.7: S -> a
        1.0: A ->            # empty right-hand side (or write ε)
    """
    rules = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise GrammarSyntaxError("expected '<weight>: <lhs> -> <rhs>'", lineno)
        head = head.strip()
        if head == "start":
            if start is not None:
                raise GrammarSyntaxError("duplicate start directive", lineno)
            toks = rest.split()
            if len(toks) != 1:
                raise GrammarSyntaxError("start directive takes exactly one symbol", lineno)
            start = toks[0]
            continue
        if not head or any(c.isspace() for c in head):
            raise GrammarSyntaxError(f"bad weight field {head!r}", lineno)
        toks = rest.split()
        if len(toks) < 2 or toks[1] not in ARROWS:
            raise GrammarSyntaxError("expected '<lhs> -> <rhs>' after the weight", lineno)
        lhs = toks[0]
        rhs = tuple(t for t in toks[2:] if t not in EPSILON_TOKENS)
        for t in (lhs,) + rhs:
            if t in ARROWS:
                raise GrammarSyntaxError("misplaced arrow in rule", lineno)
        try:
            w = semiring.parse_weight(head)
        except WeightParseError as e:
            raise WeightParseError(str(e), lineno) from None
        rules.append(Rule(lhs, rhs, w))
    if not rules:
        raise EmptyGrammar("grammar text contains no rules")
    if start is None:
        start = rules[0].lhs
    return WeightedGrammar(rules, start, semiring)


def load_grammar(path, semiring: Semiring = REAL) -> WeightedGrammar:
    with open(path, encoding="utf-8") as f:
        return parse_grammar_text(f.read(), semiring)


# -- derivation trees -----------------------------------------------------

@dataclass(frozen=True)
class DerivationTree:
    root: str
    children: tuple["DerivationTree", ...] = ()
    rule: Rule | None = None

    @property
    def is_leaf(self) -> bool:
        return self.rule is None

    @property
    def height(self) -> int:
        if self.rule is None:
            return 0
        return 1 + max((c.height for c in self.children), default=0)

    def __str__(self):
        if self.rule is None:
            return self.root
        return f"({self.root} {' '.join(map(str, self.children))})".replace(" )", ")")


def leaf(symbol: str) -> DerivationTree:
    return DerivationTree(symbol)


def node(G: WeightedGrammar, lhs: str, *children: DerivationTree) -> DerivationTree:
    """Build an internal node, looking up the connecting rule in ``G``."""
    rhs = tuple(c.root for c in children)
    return DerivationTree(lhs, tuple(children), G.rule(lhs, rhs))


def derivation_yield(t: DerivationTree) -> tuple[str, ...]:
    out: list[str] = []
    stack = [t]
    while stack:
        n = stack.pop()
        if n.rule is None:
            if not n.children:
                out.append(n.root)
            continue
        stack.extend(reversed(n.children))
    return tuple(out)


def derivation_weight(G: WeightedGrammar, t: DerivationTree):
    sr = G.semiring
    if t.rule is None:
        return sr.one
    rhs = tuple(c.root for c in t.children)
    if rhs != t.rule.rhs or t.rule.lhs != t.root:
        raise UnknownRule(f"children of {t.root} do not match its rule {t.rule}")
    w = G.rule(t.root, rhs).weight
    for c in t.children:
        w = sr.mul(w, derivation_weight(G, c))
    return w


# -- total weights ----------------------------------------------------------

@dataclass
class TotalWeights:
    Z: dict[str, Any]
    converged: bool
    iterations: int
    semiring: Semiring = field(default=REAL, repr=False)

    def __getitem__(self, sym):
        return self.Z[sym]


def kleene_iterates(G: WeightedGrammar) -> Iterator[dict[str, Any]]:
    """Yield Z^1, Z^2, ...: Z^h is the total weight of trees of height <= h."""
    sr = G.semiring
    Z = {X: sr.zero for X in G.nonterminals}
    for t in G.terminals:
        Z[t] = sr.one
    rules = G.rules
    while True:
        new = {t: sr.one for t in G.terminals}
        for X in G.nonterminals:
            new[X] = sr.zero
        for r in rules:
            w = r.weight
            for s in r.rhs:
                w = sr.mul(w, Z[s])
            new[r.lhs] = sr.add(new[r.lhs], w)
        Z = new
        yield Z


def total_weights(G: WeightedGrammar, tol: float = 1e-12, max_iter: int = 10_000) -> TotalWeights:
    """Least solution of the total-weight equations by Kleene iteration from zero."""
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    sr = G.semiring
    prev = {X: sr.zero for X in G.nonterminals}
    converged = False
    it = 0
    Z = dict(prev)
    for it, Z in enumerate(kleene_iterates(G), 1):
        delta = max((sr.distance(Z[X], prev[X]) for X in G.nonterminals), default=0.0)
        if not sr.exact and any(not math.isfinite(sr.to_real(Z[X])) for X in G.nonterminals):
            break
        if delta <= tol:
            converged = True
            break
        if it >= max_iter:
            break
        prev = Z
    for t in G.terminals:
        Z[t] = sr.one
    return TotalWeights(dict(Z), converged, it, sr)
