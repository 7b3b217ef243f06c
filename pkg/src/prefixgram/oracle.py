"""Reference semantics by brute force, independent of every parser.

:func:`enumerate_trees` lists derivation trees explicitly.  The weight
oracles sum the same height-bounded forests but aggregate trees by an
abstract yield (the exact yield when it has at most ``L`` symbols, otherwise
just its first ``L`` symbols), which is all a string or prefix query of
length at most ``L`` can observe.  Sums are taken over real images of the
weights and mapped back, which is exact for the boolean semiring too since
no cancellation can occur among nonnegative terms.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import ForestTooLarge
from .grammar import (
    DerivationTree,
    Rule,
    WeightedGrammar,
    derivation_weight,
    derivation_yield,
    kleene_iterates,
    total_weights,
)
from .semiring import REAL, Semiring

DEFAULT_CAP = 10 ** 6
DEFAULT_HEIGHT = 25


@dataclass(frozen=True)
class WeightedForest:
    trees: list
    truncated: bool
    height_bound: int

    def __len__(self):
        return len(self.trees)


def _generating(G: WeightedGrammar) -> set:
    gen = set(G.terminals)
    changed = True
    while changed:
        changed = False
        for r in G.rules:
            if r.lhs not in gen and all(s in gen for s in r.rhs):
                gen.add(r.lhs)
                changed = True
    return gen


def enumerate_trees(G: WeightedGrammar, root: str | None = None, max_height: int = 3,
                    cap: int = DEFAULT_CAP) -> WeightedForest:
    """All derivation trees of ``root`` with height at most ``max_height``.

    Terminal leaves have height 0 and a rule node is one above its tallest
    child.  ``truncated`` says whether some generating nonterminal was
    needed below the height budget, i.e. whether taller trees exist.
    """
    if max_height < 1:
        raise ValueError("max_height must be at least 1")
    root = G.start if root is None else root
    gen = _generating(G)
    memo: dict = {}
    truncated = False

    def trees(sym, budget):
        nonlocal truncated
        if sym in G.terminals:
            return [DerivationTree(sym)]
        if budget == 0:
            if sym in gen:
                truncated = True
            return []
        key = (sym, budget)
        if key in memo:
            return memo[key]
        out = []
        for r in G.rules_for(sym):
            parts = [trees(s, budget - 1) for s in r.rhs]
            n = 1
            for p in parts:
                n *= len(p)
            if len(out) + n > cap:
                raise ForestTooLarge(f"more than {cap} trees of height <= {max_height}")
            for kids in itertools.product(*parts):
                out.append(DerivationTree(sym, tuple(kids), r))
        memo[key] = out
        return out

    ts = trees(root, max_height)
    return WeightedForest([(t, derivation_weight(G, t)) for t in ts], truncated, max_height)


class _YieldClasses:
    """Abstract yields over an alphabet for queries of length at most ``L``."""

    def __init__(self, alphabet: Sequence[str], L: int):
        self.alphabet = tuple(sorted(alphabet))
        self.L = L
        exact = [s for n in range(L + 1) for s in itertools.product(self.alphabet, repeat=n)]
        longs = list(itertools.product(self.alphabet, repeat=L))
        self.keys = [("exact", s) for s in exact] + [("long", s) for s in longs]
        self.index = {k: i for i, k in enumerate(self.keys)}
        n = len(self.keys)
        table = np.empty((n, n), dtype=np.intp)
        for i, (ka, sa) in enumerate(self.keys):
            for j, (kb, sb) in enumerate(self.keys):
                table[i, j] = self.index[self._concat(ka, sa, kb, sb)]
        self.concat = table.ravel()
        self.size = n

    def _concat(self, ka, sa, kb, sb):
        if ka == "long":
            return ("long", sa)
        s = sa + sb
        if kb == "exact" and len(s) <= self.L:
            return ("exact", s)
        return ("long", s[:self.L])

    def onehot(self, sym):
        v = np.zeros(self.size)
        v[self.index[("exact", (sym,))]] = 1.0
        return v

    def empty(self):
        v = np.zeros(self.size)
        v[self.index[("exact", ())]] = 1.0
        return v

    def times(self, u, v):
        return np.bincount(self.concat, weights=np.outer(u, v).ravel(), minlength=self.size)


def _yield_table(G: WeightedGrammar, L: int, max_height: int, alphabet):
    key = ("oracle", L, max_height, tuple(sorted(alphabet)))
    if key in G._memo:
        return G._memo[key]
    C = _YieldClasses(alphabet, L)
    sr = G.semiring
    term = {t: C.onehot(t) for t in G.terminals}
    D = {X: np.zeros(C.size) for X in G.nonterminals}
    rules = [(r.lhs, r.rhs, sr.to_real(r.weight)) for r in G.rules]
    for _ in range(max_height):
        new = {X: np.zeros(C.size) for X in G.nonterminals}
        for lhs, rhs, w in rules:
            if w == 0:
                continue
            acc = C.empty()
            for s in rhs:
                acc = C.times(acc, term[s] if s in term else D[s])
                if not acc.any():
                    break
            new[lhs] += w * acc
        D = new
    G._memo[key] = (C, D)
    return C, D


def _query(G, x):
    x = tuple(x.split()) if isinstance(x, str) else tuple(x)
    # one table per grammar serves every query of length <= 4
    return x, set(G.terminals) or {"a"}, max(len(x), 4)


def _back(sr: Semiring, value: float):
    if sr.exact:
        return sr.from_real(value > 0)
    return sr.from_real(float(value))


def oracle_weight(G: WeightedGrammar, x, max_height: int = DEFAULT_HEIGHT, root: str | None = None):
    """Total weight of trees of height ``<= max_height`` whose yield is ``x``."""
    x, alpha, L = _query(G, x)
    if any(s not in G.terminals for s in x):
        return G.semiring.zero
    C, D = _yield_table(G, L, max_height, alpha)
    root = G.start if root is None else root
    return _back(G.semiring, D[root][C.index[("exact", x)]])


def oracle_prefix_weight(G: WeightedGrammar, x, max_height: int = DEFAULT_HEIGHT,
                         root: str | None = None):
    """Total weight of trees of height ``<= max_height`` whose yield starts with ``x``."""
    x, alpha, L = _query(G, x)
    if any(s not in G.terminals for s in x):
        return G.semiring.zero
    C, D = _yield_table(G, L, max_height, alpha)
    root = G.start if root is None else root
    v = D[root]
    n = len(x)
    total = 0.0
    for (kind, s), i in C.index.items():
        if s[:n] == x and (kind == "long" or len(s) >= n):
            total += v[i]
    return _back(G.semiring, total)


def forest_weight(forest: WeightedForest, x, semiring: Semiring = REAL, prefix: bool = False):
    """Sum over an explicit forest; the cross-check for the aggregated oracles."""
    x = tuple(x.split()) if isinstance(x, str) else tuple(x)
    total = semiring.zero
    for t, w in forest.trees:
        y = derivation_yield(t)
        if (y[:len(x)] == x) if prefix else (y == x):
            total = semiring.add(total, w)
    return total


# -- random grammar suite -----------------------------------------------------

SUITE_ALPHABET = ("a", "b")
SUITE_NONTERMINALS = ("S", "A", "B", "C")


def all_strings(alphabet=SUITE_ALPHABET, max_len: int = 4) -> list[tuple]:
    return [s for n in range(max_len + 1) for s in itertools.product(alphabet, repeat=n)]


def random_grammar(rng: random.Random, max_weight: float = 0.5, max_nonterminals: int = 4,
                   max_rules: int = 8, max_arity: int = 3,
                   alphabet=SUITE_ALPHABET) -> WeightedGrammar:
    """One unfiltered random grammar; see :func:`random_suite` for the accepted ones."""
    n_nt = rng.randint(1, max_nonterminals)
    nts = SUITE_NONTERMINALS[:n_nt]
    symbols = list(nts) + list(alphabet)
    n_rules = rng.randint(max(1, n_nt), max_rules)
    rules, seen = [], set()
    for k in range(n_rules):
        lhs = nts[k] if k < n_nt else rng.choice(nts)
        # redraw repeats so consolidation cannot push a weight past max_weight
        while True:
            arity = rng.randint(0, max_arity)
            rhs = tuple(rng.choice(symbols) for _ in range(arity))
            if (lhs, rhs) not in seen:
                break
        seen.add((lhs, rhs))
        w = round(rng.uniform(0.05, max_weight), 3)
        rules.append(Rule(lhs, rhs, w))
    return WeightedGrammar(rules, "S", REAL, nonterminals=nts, terminals=alphabet)


def suite_accepts(G: WeightedGrammar, tail_height: int = DEFAULT_HEIGHT) -> bool:
    """Totals converge to 1e-10 within 60 sweeps, the height-``tail_height``
    totals are within 1e-9 of them, and the start symbol generates something."""
    tw = total_weights(G, tol=1e-10, max_iter=60)
    if not tw.converged or tw.Z[G.start] <= 0:
        return False
    for h, Zh in enumerate(kleene_iterates(G), 1):
        if h == tail_height:
            return all(abs(tw.Z[X] - Zh[X]) <= 1e-9 for X in G.nonterminals)
    return False  # pragma: no cover


def random_suite(n: int = 200, seed: int = 0, max_weight: float = 0.5, **kw) -> list[WeightedGrammar]:
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        G = random_grammar(rng, max_weight=max_weight, **kw)
        if suite_accepts(G):
            out.append(G)
    return out
