"""Semantics-preserving grammar transformations and their size bounds.

Every transformation maps a :class:`WeightedGrammar` to a new grammar with
the same weighted language and the same terminal alphabet.  When the input
already has the target form, the input object itself is returned.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

from .errors import PreconditionViolated, TotalsNotConverged
from .grammar import GrammarStats, Rule, WeightedGrammar, grammar_stats, total_weights


def _fresh(base: str, taken: set[str]) -> str:
    name, k = base, 0
    while name in taken:
        k += 1
        name = f"{base}~{k}"
    taken.add(name)
    return name


def _generating(G: WeightedGrammar) -> set[str]:
    gen = set(G.terminals)
    changed = True
    while changed:
        changed = False
        for r in G.rules:
            if r.lhs not in gen and all(s in gen for s in r.rhs):
                gen.add(r.lhs)
                changed = True
    return gen


def _trim(G: WeightedGrammar) -> WeightedGrammar:
    """Drop rules that mention symbols deriving no string at all."""
    gen = _generating(G)
    kept = [r for r in G.rules if r.lhs in gen and all(s in gen for s in r.rhs)]
    if len(kept) == len(G.rules):
        return G
    return G.replace(kept)


# -- dead rules -------------------------------------------------------------

def eliminate_dead_rules(G: WeightedGrammar) -> WeightedGrammar:
    """Keep only rules whose symbols are all generating and reachable from the start."""
    gen = _generating(G)
    useful = [r for r in G.rules if r.lhs in gen and all(s in gen for s in r.rhs)]
    by_lhs: dict[str, list[Rule]] = {}
    for r in useful:
        by_lhs.setdefault(r.lhs, []).append(r)
    reach = {G.start}
    stack = [G.start]
    while stack:
        X = stack.pop()
        for r in by_lhs.get(X, ()):
            for s in r.rhs:
                if s not in reach:
                    reach.add(s)
                    stack.append(s)
    kept = [r for r in useful if r.lhs in reach]
    if len(kept) == len(G.rules) and G.nonterminals <= reach:
        return G
    return G.replace(kept, nonterminals=(G.nonterminals & reach) | {G.start})


# -- binarization -----------------------------------------------------------

def ensure_ctf(G: WeightedGrammar) -> WeightedGrammar:
    """Right-branching binarization: every rule gets arity at most two."""
    if all(r.arity <= 2 for r in G.rules):
        return G
    one = G.semiring.one
    taken = set(G.symbols)
    rules = []
    for idx, r in enumerate(G.rules):
        if r.arity <= 2:
            rules.append(r)
            continue
        lhs, w = r.lhs, r.weight
        for k in range(r.arity - 2):
            new = _fresh(f"{r.lhs}@{idx}.{k + 1}", taken)
            rules.append(Rule(lhs, (r.rhs[k], new), w))
            lhs, w = new, one
        rules.append(Rule(lhs, r.rhs[-2:], w))
    return G.replace(rules)


def is_ctf(G: WeightedGrammar) -> bool:
    return all(r.arity <= 2 for r in G.rules)


# -- nullary removal --------------------------------------------------------

def null_weights(G: WeightedGrammar) -> dict:
    """Total weight of the empty-yield derivations of each nonterminal."""
    N = G.nonterminals
    null_rules = [r for r in G.rules if all(s in N for s in r.rhs)]
    if not any(r.arity == 0 for r in null_rules):
        return {X: G.semiring.zero for X in N}
    sub = WeightedGrammar(null_rules, G.start, G.semiring, nonterminals=N)
    tot = total_weights(sub)
    if not tot.converged:
        raise TotalsNotConverged("null weights did not converge")
    return {X: tot.Z[X] for X in N}


def ensure_nullary_free(G: WeightedGrammar) -> WeightedGrammar:
    """Remove empty rules; only a start rule ``S -> ε`` may remain.

    Requires canonical two-form so each rule spawns at most three variants.
    """
    if not is_ctf(G):
        raise PreconditionViolated("nullary removal requires a grammar in canonical two-form")
    sr = G.semiring
    if not any(r.arity == 0 for r in G.rules):
        return G
    if (all(r.arity > 0 for r in G.rules if r.lhs != G.start)
            and not any(G.start in r.rhs for r in G.rules)):
        return G  # only start nullary rules, and the start never recurs
    n = null_weights(G)
    rules = []
    for r in G.rules:
        if r.arity == 0:
            continue
        slots = [i for i, s in enumerate(r.rhs) if s in n and not sr.is_zero(n[s])]
        for mask in product((False, True), repeat=len(slots)):
            dropped = {i for i, m in zip(slots, mask) if m}
            kept = tuple(s for i, s in enumerate(r.rhs) if i not in dropped)
            if not kept:
                continue
            w = r.weight
            for i in sorted(dropped):
                w = sr.mul(w, n[r.rhs[i]])
            rules.append(Rule(r.lhs, kept, w))
    start = G.start
    n_start = n[G.start]
    if not sr.is_zero(n_start):
        if any(G.start in r.rhs for r in rules):
            start = _fresh(f"{G.start}@0", set(G.symbols))
            rules.append(Rule(start, (G.start,), sr.one))
            rules.append(Rule(start, (), n_start))
        else:
            rules.append(Rule(G.start, (), n_start))
    return _trim(G.replace(rules, start=start, nonterminals=G.nonterminals | {start}))


# -- unary closure ------------------------------------------------------------

def _closure(sr, nodes, A: dict) -> dict:
    """Reflexive-transitive closure of a sparse weight matrix (Lehmann)."""
    A = dict(A)
    for k in nodes:
        s = sr.star(A.get((k, k), sr.zero))
        col = [(i, w) for (i, j), w in A.items() if j == k]
        row = [(j, w) for (i, j), w in A.items() if i == k]
        if not col or not row:
            continue
        new = dict(A)
        for i, aik in col:
            left = sr.mul(aik, s)
            for j, akj in row:
                new[i, j] = sr.add(new.get((i, j), sr.zero), sr.mul(left, akj))
        A = new
    for k in nodes:
        A[k, k] = sr.add(A.get((k, k), sr.zero), sr.one)
    return A


def _unary_edges(G: WeightedGrammar) -> dict:
    return {(r.lhs, r.rhs[0]): r.weight
            for r in G.rules if r.arity == 1 and r.rhs[0] in G.nonterminals}


def ensure_unary_free(G: WeightedGrammar) -> WeightedGrammar:
    """Fold every chain of unary nonterminal rules ``X -> Y`` into its endpoints."""
    sr = G.semiring
    edges = _unary_edges(G)
    if not edges:
        return G
    nodes = sorted({x for e in edges for x in e}, key=G.symbol_id.__getitem__)
    U = _closure(sr, nodes, edges)
    reach: dict[str, list] = {}
    for (X, Y), w in U.items():
        if not sr.is_zero(w):
            reach.setdefault(X, []).append((Y, w))
    rules = []
    for X in sorted(G.nonterminals, key=G.symbol_id.__getitem__):
        targets = reach.get(X, [(X, sr.one)])
        for Y, u in targets:
            for r in G.rules_for(Y):
                if r.arity == 1 and r.rhs[0] in G.nonterminals:
                    continue
                rules.append(Rule(X, r.rhs, sr.mul(u, r.weight)))
    return _trim(G.replace(rules, nonterminals=G.nonterminals))


def _sccs(nodes, succ) -> list[list[str]]:
    """Tarjan's algorithm, iterative."""
    index, low, on, stack, out = {}, {}, set(), [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
                if w in on:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def ensure_unary_cycle_free(G: WeightedGrammar) -> WeightedGrammar:
    """Break unary cycles by splitting each cyclic nonterminal ``X`` in two.

    ``X`` keeps only unary rules ``X -> Y@nc`` weighted by the closure of the
    cycle's unary weights; ``X@nc`` takes over the rules of ``X`` that leave
    the cycle.
    """
    sr = G.semiring
    edges = _unary_edges(G)
    if not edges:
        return G
    succ: dict[str, list[str]] = {}
    for (X, Y) in edges:
        succ.setdefault(X, []).append(Y)
    nodes = sorted({x for e in edges for x in e}, key=G.symbol_id.__getitem__)
    comp_of = {}
    cyclic = []
    for comp in _sccs(nodes, succ):
        if len(comp) > 1 or (comp[0], comp[0]) in edges:
            comp = sorted(comp, key=G.symbol_id.__getitem__)
            cyclic.append(comp)
            for X in comp:
                comp_of[X] = len(cyclic) - 1
    if not cyclic:
        return G
    taken = set(G.symbols)
    nc = {X: _fresh(f"{X}@nc", taken) for comp in cyclic for X in comp}
    rules = []
    for r in G.rules:
        c = comp_of.get(r.lhs)
        if c is None:
            rules.append(r)
        elif r.arity == 1 and comp_of.get(r.rhs[0]) == c:
            continue
        else:
            rules.append(Rule(nc[r.lhs], r.rhs, r.weight))
    for ci, comp in enumerate(cyclic):
        members = set(comp)
        sub = {(X, Y): w for (X, Y), w in edges.items() if X in members and Y in members}
        U = _closure(sr, comp, sub)
        for (X, Y), u in sorted(U.items(), key=lambda kv: (G.symbol_id[kv[0][0]], G.symbol_id[kv[0][1]])):
            if not sr.is_zero(u):
                rules.append(Rule(X, (nc[Y],), u))
    return _trim(G.replace(rules, nonterminals=G.nonterminals | set(nc.values())))


def has_unary_cycle(G: WeightedGrammar) -> bool:
    edges = _unary_edges(G)
    succ: dict[str, list[str]] = {}
    for (X, Y) in edges:
        succ.setdefault(X, []).append(Y)
    nodes = sorted({x for e in edges for x in e})
    return any(len(c) > 1 or (c[0], c[0]) in edges for c in _sccs(nodes, succ))


# -- terminal separation ------------------------------------------------------

def ensure_terminal_sep(G: WeightedGrammar) -> WeightedGrammar:
    """Lift terminals out of rules of arity two or more into preterminal rules."""
    targets = [r for r in G.rules if r.arity >= 2 and any(s in G.terminals for s in r.rhs)]
    if not targets:
        return G
    taken = set(G.symbols)
    pre: dict[str, str] = {}
    rules = []
    for r in G.rules:
        if r.arity < 2:
            rules.append(r)
            continue
        rhs = []
        for s in r.rhs:
            if s in G.terminals:
                if s not in pre:
                    pre[s] = _fresh(f"A_{s}", taken)
                s = pre[s]
            rhs.append(s)
        rules.append(Rule(r.lhs, tuple(rhs), r.weight))
    for t, X in pre.items():
        rules.append(Rule(X, (t,), G.semiring.one))
    return G.replace(rules)


# -- CNF ----------------------------------------------------------------------

def ensure_cnf(G: WeightedGrammar) -> WeightedGrammar:
    """Binarize, remove nullary rules, fold unary chains, separate terminals."""
    return ensure_terminal_sep(ensure_unary_free(ensure_nullary_free(ensure_ctf(G))))


def is_cnf(G: WeightedGrammar) -> bool:
    for r in G.rules:
        if r.arity == 2:
            if not all(s in G.nonterminals for s in r.rhs):
                return False
        elif r.arity == 1:
            if r.rhs[0] not in G.terminals:
                return False
        elif r.arity == 0:
            if r.lhs != G.start or any(G.start in q.rhs for q in G.rules):
                return False
        else:
            return False
    return True


# -- reports and size bounds --------------------------------------------------

@dataclass(frozen=True)
class TransformReport:
    name: str
    input_stats: GrammarStats
    output_stats: GrammarStats
    bound: int

    @property
    def within_bound(self) -> bool:
        return self.output_stats.size <= self.bound

    CSV_HEADER = ("name,input_size,input_rules,input_nonterminals,input_terminals,"
                  "output_size,output_rules,output_nonterminals,output_terminals,bound")

    def csv_row(self) -> str:
        i, o = self.input_stats, self.output_stats
        return ",".join(map(str, (self.name, i.size, i.rule_count, i.nonterminal_count,
                                  i.terminal_count, o.size, o.rule_count, o.nonterminal_count,
                                  o.terminal_count, self.bound)))


def _prefix_bound(G: WeightedGrammar) -> int:
    if is_ctf(G):
        return (8 * G.size) // 3 + 3
    return G.size + 3 + sum(k + 1 for r in G.rules for k in range(1, r.arity + 1))


def size_bound(name: str, G: WeightedGrammar) -> int:
    """Worst-case output size of transformation ``name`` applied to ``G``."""
    s = grammar_stats(G)
    size, N, R, T = s.size, s.nonterminal_count, s.rule_count, s.terminal_count
    if name == "deadrules":
        return size
    if name == "ctf":
        return 3 * size
    if name == "nullary":
        return (7 * size) // 3 + 3
    if name == "unary":
        return N * size
    if name == "unarycycle":
        return size + 2 * N * N
    if name == "termsep":
        return size + 2 * T
    if name == "cnf":
        return (N + size - R + 1) * (7 * size + 3) + 2 * T
    if name == "prefix":
        return _prefix_bound(G)
    if name == "eos":
        return size + 3
    raise KeyError(name)


def _prefix_step(G):
    from .prefix import prefix_grammar
    return prefix_grammar(G).grammar


def _eos_step(G):
    from .prefix import eos_augment
    return eos_augment(G)


TRANSFORMS: dict[str, Callable[[WeightedGrammar], WeightedGrammar]] = {
    "deadrules": eliminate_dead_rules,
    "ctf": ensure_ctf,
    "nullary": ensure_nullary_free,
    "unary": ensure_unary_free,
    "unarycycle": ensure_unary_cycle_free,
    "termsep": ensure_terminal_sep,
    "cnf": ensure_cnf,
    "prefix": _prefix_step,
    "eos": _eos_step,
}


def apply_transform(name: str, G: WeightedGrammar) -> tuple[WeightedGrammar, TransformReport]:
    try:
        fn = TRANSFORMS[name]
    except KeyError:
        raise ValueError(f"unknown transformation {name!r}; choose from {sorted(TRANSFORMS)}") from None
    out = fn(G)
    return out, TransformReport(name, grammar_stats(G), grammar_stats(out), size_bound(name, G))


def run_pipeline(G: WeightedGrammar, steps) -> tuple[WeightedGrammar, list[TransformReport]]:
    reports = []
    for name in steps:
        G, rep = apply_transform(name, G)
        reports.append(rep)
    return G, reports
