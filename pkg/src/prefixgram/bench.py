"""Per-prefix timing and operation counts, and the log-log power-law fit."""
from __future__ import annotations

import csv
import math
import random
import sys
import time
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .errors import InsufficientData, NonPositiveValue
from .grammar import Rule, WeightedGrammar, load_grammar
from .nexttoken import next_token_cky, next_token_earley
from .parse import parse, prefix_parse
from .semiring import REAL, OpCounter, Semiring

ALGOS = ("parse", "prefix", "next-token")
CSV_HEADER = ("n", "algo", "backend", "seconds", "ops")


@dataclass(frozen=True)
class BenchRecord:
    n: int
    algo: str
    backend: str
    seconds: float
    ops: int | None = None

    def row(self):
        return [self.n, self.algo, self.backend, repr(self.seconds),
                "" if self.ops is None else self.ops]


@dataclass(frozen=True)
class PowerLawFit:
    a: float
    b: float
    r_squared: float

    def __call__(self, n):
        return self.a * n ** self.b


def fit_power_law(records: Iterable) -> PowerLawFit:
    """Least squares of ``log r = log a + b log n`` over points with ``n >= 1``.

    ``records`` holds ``(n, value)`` pairs or :class:`BenchRecord` objects
    (whose ``seconds`` is the value).
    """
    pts = []
    for r in records:
        n, v = (r.n, r.seconds) if isinstance(r, BenchRecord) else r
        if n < 1:
            continue
        if not v > 0:
            raise NonPositiveValue(f"power-law fit needs positive values, got {v!r} at n={n}")
        pts.append((n, v))
    if len({n for n, _ in pts}) < 2:
        raise InsufficientData("power-law fit needs at least two distinct n >= 1")
    lx = np.log([n for n, _ in pts])
    ly = np.log([v for _, v in pts])
    A = np.column_stack([np.ones_like(lx), lx])
    (log_a, b), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (log_a + b * lx)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - float(np.sum(resid ** 2)) / ss_tot)
    return PowerLawFit(float(math.exp(log_a)), float(b), min(1.0, r2))


def synthetic_ambiguous_grammar(semiring: Semiring = REAL) -> WeightedGrammar:
    """A fully ambiguous CNF grammar: every split of every span is a parse."""
    rules = [
        Rule("S", ("S", "S"), 0.4),
        Rule("S", ("a",), 0.3),
        Rule("S", ("b",), 0.3),
    ]
    return WeightedGrammar(rules, "S", semiring)


def run_once(G: WeightedGrammar, x: tuple, algo: str, backend: str, count_ops: bool = False):
    """One measured unit of work; returns its semiring op count when asked."""
    if algo == "parse":
        return parse(G, x, backend, count_ops=count_ops).op_count
    if algo == "prefix":
        return prefix_parse(G, x, backend, count_ops=count_ops).op_count
    if algo == "next-token":
        # the inside pass of the prefix grammar plus the backward sweep
        res = prefix_parse(G, x, backend, count_ops=count_ops)
        counter = OpCounter() if count_ops else None
        fn = next_token_cky if backend == "cky" else next_token_earley
        fn(G, x, state=res.state, counter=counter)
        return res.op_count + counter.count if count_ops else None
    raise ValueError(f"unknown algo {algo!r}; choose from {ALGOS}")


def _bench_worker(job):
    text, sr_name, strings, algo, backend, repeats, count_ops, seed = job
    from .grammar import parse_grammar_text
    from .semiring import SEMIRINGS
    G = parse_grammar_text(text, SEMIRINGS[sr_name])
    return bench_strings(G, strings, algo, backend, repeats, count_ops, seed)


def bench_strings(G: WeightedGrammar, strings, algo: str, backend: str, repeats: int = 3,
                  count_ops: bool = False, seed: int | None = None,
                  jobs: int = 1) -> list[BenchRecord]:
    """Best-of-``repeats`` wall time for every prefix of every string.

    With ``jobs > 1`` whole strings are farmed out to worker processes; each
    measurement still runs on a single core.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    if jobs > 1 and len(strings) > 1:
        from concurrent.futures import ProcessPoolExecutor
        text, name = G.to_text(), G.semiring.name
        work = [(text, name, [s], algo, backend, repeats, count_ops, seed) for s in strings]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return [r for recs in pool.map(_bench_worker, work) for r in recs]
    run_once(G, (), algo, backend)  # builds and memoizes the preprocessed grammars
    jobs = [tuple(s[:k]) for s in strings for k in range(len(s) + 1)]
    order = list(range(len(jobs)))
    if seed is not None:
        random.Random(seed).shuffle(order)
    out: list = [None] * len(jobs)
    clock = time.perf_counter
    for idx in order:
        x = jobs[idx]
        best = math.inf
        for _ in range(repeats):
            t0 = clock()
            run_once(G, x, algo, backend)
            best = min(best, clock() - t0)
        ops = run_once(G, x, algo, backend, count_ops=True) if count_ops else None
        out[idx] = BenchRecord(len(x), algo, backend, max(best, 1e-9), ops)
    return out


def write_csv(records, stream: TextIO = sys.stdout) -> PowerLawFit | None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())
    try:
        fit = fit_power_law(records)
    except (InsufficientData, NonPositiveValue) as e:
        stream.write(f"# fit unavailable: {e}\n")
        return None
    stream.write(f"# fit a={fit.a!r} b={fit.b!r} r2={fit.r_squared!r}\n")
    return fit


def read_strings(path) -> list[tuple]:
    """One whitespace-tokenized string per line; blank lines are skipped."""
    with open(path, encoding="utf-8") as f:
        return [tuple(line.split()) for line in f if line.strip()]


def run_bench(grammar_path, strings_path, algo: str = "parse", backend: str = "cky",
              repeats: int = 3, semiring: Semiring = REAL, count_ops: bool = False,
              stream: TextIO = sys.stdout, seed: int | None = None,
              jobs: int = 1) -> list[BenchRecord]:
    """Benchmark from files and write the CSV (plus the fit line) to ``stream``."""
    G = load_grammar(grammar_path, semiring)
    strings = read_strings(strings_path)
    records = bench_strings(G, strings, algo, backend, repeats, count_ops, seed, jobs)
    write_csv(records, stream)
    return records
