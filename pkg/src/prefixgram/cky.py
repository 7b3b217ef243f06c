"""Incremental CKY over CNF grammars, its next-token lattice pass and the gradient sweep.

Column ``N`` of the chart is a dict mapping a start position ``i`` to a
dict ``X -> beta_N(i, X)``; entries that were never touched are zero.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .grammar import WeightedGrammar
from .semiring import OpCounter, Semiring
from .transforms import ensure_cnf, is_cnf


@dataclass(frozen=True)
class CkyTables:
    """Rule indexes of a CNF grammar used by the inner loops."""

    grammar: WeightedGrammar
    start_null: Any
    preterm: dict        # terminal -> [(X, w)]
    by_left: dict        # Y -> [(X, Z, w)]


def cky_tables(G: WeightedGrammar) -> CkyTables:
    """CNF conversion plus rule indexes, memoized on ``G``."""
    memo = G._memo
    if "cky" not in memo:
        H = G if is_cnf(G) else ensure_cnf(G)
        sr = H.semiring
        preterm = defaultdict(list)
        by_left = defaultdict(list)
        start_null = sr.zero
        for r in H.rules:
            if r.arity == 0:
                start_null = r.weight
            elif r.arity == 1:
                preterm[r.rhs[0]].append((r.lhs, r.weight))
            else:
                by_left[r.rhs[0]].append((r.lhs, r.rhs[1], r.weight))
        memo["cky"] = CkyTables(H, start_null, dict(preterm), dict(by_left))
    return memo["cky"]


@dataclass(frozen=True)
class CkyState:
    grammar: WeightedGrammar
    input: tuple
    columns: tuple

    def weight(self, semiring: Semiring | None = None):
        sr = semiring or self.grammar.semiring
        return self.columns[-1].get(0, {}).get(self.grammar.start, sr.zero)


@dataclass(frozen=True)
class ParseResult:
    weight: Any
    state: Any
    op_count: int | None = None


def _cky_column(T: CkyTables, columns: list, tok: str, sr: Semiring) -> dict:
    N = len(columns)
    col: dict = {N - 1: dict(T.preterm.get(tok, ()))}
    by_left = T.by_left
    add, mul = sr.add, sr.mul
    for i in range(N - 2, -1, -1):
        cell: dict = {}
        for j in range(i + 1, N):
            left = columns[j].get(i)
            right = col.get(j)
            if not left or not right:
                continue
            for Y, wy in left.items():
                for X, Z, w in by_left.get(Y, ()):
                    wz = right.get(Z)
                    if wz is None:
                        continue
                    v = mul(mul(w, wy), wz)
                    cell[X] = add(cell[X], v) if X in cell else v
        if cell:
            col[i] = cell
    return col


def incr_cky(G: WeightedGrammar, x: Sequence[str] | str, cached: CkyState | None = None,
             count_ops: bool = False) -> ParseResult:
    """Inside weight ``w_G(x)``; reuses the columns of ``cached`` when it covers a prefix of ``x``."""
    if isinstance(x, str):
        x = x.split()
    x = tuple(x)
    T = cky_tables(G)
    H = T.grammar
    sr, counter = (H.semiring.counted() if count_ops else (H.semiring, None))
    if cached is not None and cached.grammar is H and cached.input == x[:len(cached.input)]:
        columns = list(cached.columns)
    else:
        columns = [{0: {H.start: T.start_null}} if not sr.is_zero(T.start_null) else {}]
    for tok in x[len(columns) - 1:]:
        columns.append(_cky_column(T, columns, tok, sr))
    state = CkyState(H, x, tuple(columns))
    return ParseResult(state.weight(), state, counter.count if counter else None)


def _theta_get(theta, sym, sr):
    if theta is None:
        return sr.one
    return theta.get(sym, sr.zero)


def cky_lattice_forward(state: CkyState, theta: Mapping[str, Any] | None, sr: Semiring):
    """Forward values over the next-token lattice; returns ``z(0, S)``.

    ``theta=None`` stands for the all-ones parameter vector.
    """
    T = cky_tables(state.grammar)
    cols = state.columns
    N = len(state.input)
    add, mul = sr.add, sr.mul
    z: dict = {N: {}}
    zN = z[N]
    for tok, pairs in T.preterm.items():
        th = _theta_get(theta, tok, sr)
        for X, w in pairs:
            v = mul(w, th)
            zN[X] = add(zN[X], v) if X in zN else v
    for i in range(N - 1, -1, -1):
        zi: dict = {}
        for j in range(i + 1, N + 1):
            left = cols[j].get(i)
            right = z.get(j)
            if not left or not right:
                continue
            for Y, wy in left.items():
                for X, Z, w in T.by_left.get(Y, ()):
                    wz = right.get(Z)
                    if wz is None:
                        continue
                    v = mul(mul(w, wy), wz)
                    zi[X] = add(zi[X], v) if X in zi else v
        z[i] = zi
    return z[0].get(state.grammar.start, sr.zero)


def _forward_support(state: CkyState, T: CkyTables) -> list:
    """Which ``(j, Z)`` carry a forward value: control flow only, no arithmetic."""
    cols = state.columns
    N = len(state.input)
    sup = [set() for _ in range(N + 1)]
    for pairs in T.preterm.values():
        for X, _ in pairs:
            sup[N].add(X)
    for i in range(N - 1, -1, -1):
        for j in range(i + 1, N + 1):
            left = cols[j].get(i)
            if not left or not sup[j]:
                continue
            for Y in left:
                for X, Z, _ in T.by_left.get(Y, ()):
                    if Z in sup[j]:
                        sup[i].add(X)
    return sup


def cky_next_token_backward(state: CkyState, alphabet, sr: Semiring) -> dict:
    """Reverse sweep of :func:`cky_lattice_forward`: ``J(sigma) = d z(0,S) / d theta_sigma``.

    The sweep visits exactly the operations the forward pass performs, in
    reverse; the support sets give it the forward pass's control flow.
    """
    T = cky_tables(state.grammar)
    cols = state.columns
    N = len(state.input)
    add, mul = sr.add, sr.mul
    sup = _forward_support(state, T)
    dz = [dict() for _ in range(N + 1)]
    if state.grammar.start in sup[0]:
        dz[0][state.grammar.start] = sr.one
    for i in range(N):
        di = dz[i]
        if not di:
            continue
        for j in range(i + 1, N + 1):
            left = cols[j].get(i)
            if not left:
                continue
            sj, dj = sup[j], dz[j]
            for Y, wy in left.items():
                for X, Z, w in T.by_left.get(Y, ()):
                    if Z not in sj:
                        continue
                    dx = di.get(X)
                    if dx is None:
                        continue
                    v = mul(mul(w, wy), dx)
                    dj[Z] = add(dj[Z], v) if Z in dj else v
    J = {a: sr.zero for a in alphabet}
    dN = dz[N]
    for tok, pairs in T.preterm.items():
        if tok not in J:
            continue
        for X, w in pairs:
            d = dN.get(X)
            if d is None:
                continue
            J[tok] = add(J[tok], mul(w, d))
    return J
