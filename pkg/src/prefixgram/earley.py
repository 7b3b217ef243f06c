"""Earley parsing on suffix items ``<i, X/alpha>``, its lattice pass and the gradient sweep.

An item records only the unmatched suffix ``alpha`` of some rule for ``X``,
so rules sharing a suffix share an item.  Suffixes are interned once per
grammar as integer *tails*; ``tail_next[t]`` is the tail after consuming the
first symbol of ``t`` and ``done[X]`` is the completed tail ``X/eps``.
"""
from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .cky import ParseResult
from .grammar import WeightedGrammar
from .semiring import Semiring
from .transforms import (
    ensure_ctf,
    ensure_nullary_free,
    ensure_unary_cycle_free,
)


@dataclass(frozen=True)
class EarleyTables:
    grammar: WeightedGrammar
    tail_lhs: tuple       # tail id -> X
    tail_first: tuple     # tail id -> first symbol or None when complete
    tail_next: tuple      # tail id -> tail id after the first symbol, or -1
    done: dict            # X -> completed tail id
    rule_items: dict      # X -> [(tail id, w)] for the full right-hand sides
    start_null: Any
    left_corners: dict    # Y -> reflexive-transitive left-corner closure (tuple of nonterminals)
    rank: dict            # X -> position such that X -> Y unary implies rank[Y] < rank[X]
    terminals: frozenset


def earley_preprocess(G: WeightedGrammar) -> WeightedGrammar:
    return ensure_unary_cycle_free(ensure_nullary_free(ensure_ctf(G)))


def earley_tables(G: WeightedGrammar) -> EarleyTables:
    memo = G._memo
    if "earley" in memo:
        return memo["earley"]
    H = earley_preprocess(G)
    sr = H.semiring
    lhs, first, nxt = [], [], []
    ids: dict = {}

    def intern(X, alpha):
        key = (X, alpha)
        if key in ids:
            return ids[key]
        rest = intern(X, alpha[1:]) if alpha else -1
        t = len(lhs)
        ids[key] = t
        lhs.append(X)
        first.append(alpha[0] if alpha else None)
        nxt.append(rest)
        return t

    rule_items = defaultdict(list)
    start_null = sr.zero
    for r in H.rules:
        if r.arity == 0:
            start_null = r.weight
            continue
        rule_items[r.lhs].append((intern(r.lhs, r.rhs), r.weight))
    done = {X: intern(X, ()) for X in H.nonterminals}

    corner = defaultdict(set)
    for r in H.rules:
        if r.arity and r.rhs[0] in H.nonterminals:
            corner[r.lhs].add(r.rhs[0])
    closure = {}
    for Y in H.nonterminals:
        seen = {Y}
        stack = [Y]
        while stack:
            for Z in corner[stack.pop()]:
                if Z not in seen:
                    seen.add(Z)
                    stack.append(Z)
        closure[Y] = tuple(sorted(seen))

    # unary graph is acyclic after preprocessing; order children before parents
    children = defaultdict(set)
    for r in H.rules:
        if r.arity == 1 and r.rhs[0] in H.nonterminals:
            children[r.lhs].add(r.rhs[0])
    rank: dict = {}
    for root in sorted(H.nonterminals):
        if root in rank:
            continue
        stack = [(root, iter(sorted(children[root])))]
        visiting = {root}
        while stack:
            X, it = stack[-1]
            for Y in it:
                if Y not in rank and Y not in visiting:
                    visiting.add(Y)
                    stack.append((Y, iter(sorted(children[Y]))))
                    break
            else:
                stack.pop()
                rank[X] = len(rank)

    T = EarleyTables(H, tuple(lhs), tuple(first), tuple(nxt), done, dict(rule_items),
                     start_null, closure, rank, H.terminals)
    memo["earley"] = T
    return T


@dataclass(frozen=True)
class EarleyState:
    """Inside columns ``beta_k[(i, tail)]`` and waiting dictionaries ``W_k[sym] -> [(i, tail)]``."""

    grammar: WeightedGrammar
    input: tuple
    inside: tuple
    waiting: tuple

    def weight(self):
        T = earley_tables(self.grammar)
        sr = self.grammar.semiring
        k = len(self.input)
        if k == 0:
            return T.start_null
        return self.inside[k].get((0, T.done[self.grammar.start]), sr.zero)


def _predict(T: EarleyTables, k: int, beta: dict, W: dict, sr: Semiring):
    need = set()
    for sym in list(W):
        if sym in T.left_corners:
            need.update(T.left_corners[sym])
    for X in sorted(need):
        for t, w in T.rule_items.get(X, ()):
            key = (k, t)
            if key in beta:
                beta[key] = sr.add(beta[key], w)
            else:
                beta[key] = w
                W[T.tail_first[t]].append(key)


def _column(T: EarleyTables, k: int, tok: str, inside: list, waiting: list, sr: Semiring):
    beta: dict = {}
    W: dict = defaultdict(list)
    heap: list = []
    popped: set = set()
    first, nxt, tlhs, rank = T.tail_first, T.tail_next, T.tail_lhs, T.rank
    add, mul = sr.add, sr.mul

    def update(i, t, v):
        key = (i, t)
        if key in beta:
            if first[t] is None and key in popped:
                raise AssertionError(f"completed item {key} updated after it was popped")
            beta[key] = add(beta[key], v)
            return
        beta[key] = v
        s = first[t]
        if s is None:
            heapq.heappush(heap, (k - i, rank[tlhs[t]], i, t))
        else:
            W[s].append(key)

    prev = inside[k - 1]
    for i, t in waiting[k - 1].get(tok, ()):
        update(i, nxt[t], prev[(i, t)])
    while heap:
        _, _, j, t = heapq.heappop(heap)
        key = (j, t)
        if key in popped:
            raise AssertionError(f"completed item {key} popped twice")
        popped.add(key)
        wy = beta[key]
        Y = tlhs[t]
        bj = inside[j]
        for i, u in waiting[j].get(Y, ()):
            update(i, nxt[u], mul(bj[(i, u)], wy))
    _predict(T, k, beta, W, sr)
    return beta, dict(W)


def earley(G: WeightedGrammar, x: Sequence[str] | str, cached: EarleyState | None = None,
           count_ops: bool = False) -> ParseResult:
    if isinstance(x, str):
        x = x.split()
    x = tuple(x)
    T = earley_tables(G)
    H = T.grammar
    sr, counter = (H.semiring.counted() if count_ops else (H.semiring, None))
    if cached is not None and cached.grammar is H and cached.input == x[:len(cached.input)]:
        inside, waiting = list(cached.inside), list(cached.waiting)
    else:
        beta0: dict = {}
        W0: dict = defaultdict(list)
        # the start rule S -> eps is never attached (S is not on any right-hand side)
        W0[H.start]  # seed the left-corner closure of the start symbol
        _predict(T, 0, beta0, W0, sr)
        W0 = {s: v for s, v in W0.items() if v}
        inside, waiting = [beta0], [W0]
    for k in range(len(inside), len(x) + 1):
        beta, W = _column(T, k, x[k - 1], inside, waiting, sr)
        inside.append(beta)
        waiting.append(W)
    state = EarleyState(H, x, tuple(inside), tuple(waiting))
    return ParseResult(state.weight(), state, counter.count if counter else None)


def _theta_get(theta, sym, sr):
    if theta is None:
        return sr.one
    return theta.get(sym, sr.zero)


def earley_lattice_forward(state: EarleyState, theta: Mapping[str, Any] | None, sr: Semiring):
    """Forward values ``z(i, X/eps)`` for one more lattice column; returns ``z(0, S)``.

    Only items with exactly one symbol left can complete after a single
    token, so Scan and Attach are restricted to those and Predict is skipped.
    """
    T = earley_tables(state.grammar)
    N = len(state.input)
    first, nxt, tlhs, rank = T.tail_first, T.tail_next, T.tail_lhs, T.rank
    add, mul = sr.add, sr.mul
    inside, waiting = state.inside, state.waiting
    z: dict = {}
    heap: list = []

    def push(i, X, v):
        key = (i, X)
        if key in z:
            z[key] = add(z[key], v)
        else:
            z[key] = v
            heapq.heappush(heap, (N + 1 - i, rank[X], i, X))

    WN, bN = waiting[N], inside[N]
    for sym in sorted(set(WN) & T.terminals):
        th = _theta_get(theta, sym, sr)
        for i, t in WN[sym]:
            if first[nxt[t]] is None:
                push(i, tlhs[t], mul(bN[(i, t)], th))
    while heap:
        _, _, j, Y = heapq.heappop(heap)
        zy = z[(j, Y)]
        bj = inside[j]
        for i, u in waiting[j].get(Y, ()):
            if first[nxt[u]] is None:
                push(i, tlhs[u], mul(bj[(i, u)], zy))
    return z.get((0, state.grammar.start), sr.zero)


def earley_next_token_backward(state: EarleyState, alphabet, sr: Semiring) -> dict:
    """Gradient of :func:`earley_lattice_forward` with respect to ``theta``.

    ``dz(j, Y) = sum over <i, X/Y> in W_j[Y] of beta_j(i, X/Y) * dz(i, X)``
    with ``dz(0, S) = 1``.  The needed ``(j, Y)`` are collected from the scan
    items first and then evaluated parents-first, which is the order a
    memoized recursion would finish them in.
    """
    T = earley_tables(state.grammar)
    N = len(state.input)
    first, nxt, tlhs, rank = T.tail_first, T.tail_next, T.tail_lhs, T.rank
    add, mul = sr.add, sr.mul
    inside, waiting = state.inside, state.waiting
    S = state.grammar.start

    WN, bN = waiting[N], inside[N]
    scans = []
    for sym in sorted(set(WN) & set(alphabet)):
        for i, t in WN[sym]:
            if first[nxt[t]] is None:
                scans.append((sym, i, t))

    needed = set()
    stack = [(i, tlhs[t]) for _, i, t in scans]
    while stack:
        node = stack.pop()
        if node in needed:
            continue
        needed.add(node)
        j, Y = node
        if node == (0, S):
            continue
        for i, u in waiting[j].get(Y, ()):
            if first[nxt[u]] is None:
                stack.append((i, tlhs[u]))

    dz: dict = {}
    for j, Y in sorted(needed, key=lambda n: (n[0], -rank[n[1]])):
        if (j, Y) == (0, S):
            dz[(j, Y)] = sr.one
            continue
        acc = None
        bj = inside[j]
        for i, u in waiting[j].get(Y, ()):
            if first[nxt[u]] is not None:
                continue
            d = dz.get((i, tlhs[u]))
            if d is None:
                continue
            v = mul(bj[(i, u)], d)
            acc = v if acc is None else add(acc, v)
        if acc is not None:
            dz[(j, Y)] = acc

    J = {a: sr.zero for a in alphabet}
    for sym, i, t in scans:
        d = dz.get((i, tlhs[t]))
        if d is None:
            continue
        J[sym] = add(J[sym], mul(bN[(i, t)], d))
    return J
