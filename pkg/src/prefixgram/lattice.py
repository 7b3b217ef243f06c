"""Acyclic weighted automata, transducers and the next-token lattice."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Hashable, Mapping, Sequence

from .errors import PrefixGramError, UnknownTerminal
from .semiring import REAL, Semiring


def _topo_order(states, arcs) -> list | None:
    succ = defaultdict(list)
    indeg = {q: 0 for q in states}
    for src, dst in arcs:
        succ[src].append(dst)
        indeg[dst] += 1
    order = [q for q in states if indeg[q] == 0]
    head = 0
    while head < len(order):
        q = order[head]
        head += 1
        for r in succ[q]:
            indeg[r] -= 1
            if indeg[r] == 0:
                order.append(r)
    return order if len(order) == len(indeg) else None


@dataclass(frozen=True)
class WeightedAutomaton:
    """Acyclic WFSA without epsilon arcs; states are kept in topological order.

    ``transitions`` holds ``(source, label, weight, target)`` tuples.
    """

    states: tuple
    transitions: tuple
    initial: Mapping[Hashable, Any]
    final: Mapping[Hashable, Any]
    alphabet: frozenset
    semiring: Semiring = REAL

    def __post_init__(self):
        for src, label, _, dst in self.transitions:
            if label not in self.alphabet:
                raise UnknownTerminal(f"transition label {label!r} is not in the alphabet")
            if src not in self.states or dst not in self.states:
                raise PrefixGramError(f"transition {src!r} -> {dst!r} uses an undeclared state")
        order = _topo_order(self.states, [(s, d) for s, _, _, d in self.transitions])
        if order is None:
            raise PrefixGramError("automaton is cyclic")
        object.__setattr__(self, "states", tuple(order))


def wfsa_weight(A: WeightedAutomaton, s: Sequence[str] | str) -> Any:
    """Sum over accepting paths labelled ``s`` of initial * arcs * final."""
    if isinstance(s, str):
        s = s.split()
    sr = A.semiring
    out = defaultdict(list)
    for src, label, w, dst in A.transitions:
        out[(src, label)].append((w, dst))
    current = {q: w for q, w in A.initial.items() if not sr.is_zero(w)}
    for sym in s:
        nxt: dict = {}
        for q, v in current.items():
            for w, dst in out.get((q, sym), ()):
                u = sr.mul(v, w)
                nxt[dst] = sr.add(nxt[dst], u) if dst in nxt else u
        current = nxt
        if not current:
            return sr.zero
    total = sr.zero
    for q, v in current.items():
        f = A.final.get(q, sr.zero)
        total = sr.add(total, sr.mul(v, f))
    return total


def next_token_lattice(x: Sequence[str] | str, theta: Mapping[str, Any], alphabet,
                       semiring: Semiring = REAL) -> WeightedAutomaton:
    """Chain reading ``x`` with weight one, then one parallel arc ``sigma/theta[sigma]`` per symbol."""
    if isinstance(x, str):
        x = x.split()
    alphabet = frozenset(alphabet)
    for sym in list(x) + list(theta):
        if sym not in alphabet:
            raise UnknownTerminal(f"symbol {sym!r} is not in the alphabet")
    sr = semiring
    n = len(x)
    arcs = [(k, sym, sr.one, k + 1) for k, sym in enumerate(x)]
    arcs += [(n, sym, theta.get(sym, sr.zero), n + 1) for sym in sorted(alphabet)]
    return WeightedAutomaton(
        states=tuple(range(n + 2)),
        transitions=tuple(arcs),
        initial={0: sr.one},
        final={n + 1: sr.one},
        alphabet=alphabet,
        semiring=sr,
    )


@dataclass(frozen=True)
class WeightedTransducer:
    """WFST with ``(source, input, output, weight, target)`` arcs; ``""`` is epsilon."""

    states: tuple
    transitions: tuple
    initial: Mapping[Hashable, Any]
    final: Mapping[Hashable, Any]
    input_alphabet: frozenset
    output_alphabet: frozenset
    semiring: Semiring = REAL

    def __post_init__(self):
        for src, a, b, _, dst in self.transitions:
            if a and a not in self.input_alphabet:
                raise UnknownTerminal(f"input label {a!r} is not in the alphabet")
            if b and b not in self.output_alphabet:
                raise UnknownTerminal(f"output label {b!r} is not in the alphabet")


def transducer_weight(T: WeightedTransducer, inp: Sequence[str] | str,
                      out: Sequence[str] | str) -> Any:
    """Weight ``T(inp, out)``: path sum over paths reading ``inp`` and writing ``out``.

    Configurations are ``(state, i, j)`` with ``i``/``j`` consumed lengths.
    Epsilon-input cycles are not supported (the prefix transducer has none).
    """
    if isinstance(inp, str):
        inp = inp.split()
    if isinstance(out, str):
        out = out.split()
    sr = T.semiring
    arcs = defaultdict(list)
    for src, a, b, w, dst in T.transitions:
        arcs[src].append((a, b, w, dst))
    frontier = {(q, 0, 0): w for q, w in T.initial.items() if not sr.is_zero(w)}
    total = sr.zero
    # every arc consumes at least one input or output symbol, so i + j
    # strictly increases and a breadth-first sweep by i + j is exact
    for _ in range(len(inp) + len(out) + 1):
        nxt: dict = {}
        for (q, i, j), v in frontier.items():
            if i == len(inp) and j == len(out):
                total = sr.add(total, sr.mul(v, T.final.get(q, sr.zero)))
            for a, b, w, dst in arcs[q]:
                if not a and not b:
                    raise PrefixGramError("epsilon:epsilon arcs are not supported")
                ni, nj = i + (1 if a else 0), j + (1 if b else 0)
                if a and (i >= len(inp) or inp[i] != a):
                    continue
                if b and (j >= len(out) or out[j] != b):
                    continue
                key = (dst, ni, nj)
                u = sr.mul(v, w)
                nxt[key] = sr.add(nxt[key], u) if key in nxt else u
        frontier = nxt
        if not frontier:
            break
    return total
