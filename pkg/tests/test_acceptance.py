"""Acceptance criteria 1-11, one PASS/FAIL line each."""
import io
import itertools
import random
import time

import pytest

from prefixgram import (
    OpCounter,
    apply_transform,
    cky_lattice_value,
    compose_prefix,
    conditional_distribution,
    earley_lattice_value,
    ensure_ctf,
    is_ctf,
    next_token_cky,
    next_token_earley,
    oracle_prefix_weight,
    oracle_weight,
    parse_grammar_text,
    prefix_grammar,
    prefix_parse,
    total_weights,
)
from prefixgram.bench import fit_power_law, synthetic_ambiguous_grammar
from prefixgram.cli import build_parser, run
from prefixgram.parse import parse, prefix_grammar_of

from conftest import G1_TEXT
from test_nexttoken import _tight_pcfgs

BACKENDS = ("cky", "earley")
SYNTHETIC_N = (8, 16, 32, 64)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, f"criterion {n}: {detail}"
    return emit


def _synthetic_input(N, seed=0):
    rng = random.Random(seed + N)
    return tuple(rng.choice("ab") for _ in range(N))


def test_c01_prefix_correctness(prefix_suite, short_strings, report):
    t0 = time.perf_counter()
    worst = 0.0
    for G in prefix_suite:
        for x in short_strings:
            o = oracle_prefix_weight(G, x)
            for b in BACKENDS:
                worst = max(worst, abs(prefix_parse(G, x, b).weight - o))
    dt = time.perf_counter() - t0
    report(1, worst <= 1e-7 and dt < 60,
           f"prefix parse vs oracle: max err {worst:.2e} (tol 1e-7), {dt:.1f}s (< 60s)")


def test_c02_size_bound(prefix_suite, G1, report):
    over = 0
    for G in prefix_suite:
        H = ensure_ctf(G)
        assert is_ctf(H)
        if prefix_grammar(H).grammar.size > 8 * H.size / 3 + 3:
            over += 1
    g1 = prefix_grammar(G1).grammar.size
    report(2, over == 0 and g1 == 15,
           f"{over} of {len(prefix_suite)} over (8/3)|G|+3; |prefix(G1)| = {g1} (want 15)")


def test_c03_construction_agreement(prefix_suite, short_strings, report):
    worst = 0.0
    for G in prefix_suite:
        P = prefix_grammar(ensure_ctf(G)).grammar
        C = compose_prefix(G)
        for x in short_strings:
            worst = max(worst, abs(parse(P, x, "earley").weight - parse(C, x, "earley").weight))
    report(3, worst <= 1e-9, f"transducer vs direct prefix grammar: max err {worst:.2e} (tol 1e-9)")


PINNED = [
    ("G1", "", {"a": 1.0}), ("G1", "a", {"a": 0.3}), ("G1", "a a", {"a": 0.153}),
    ("G2", "", {"a": 0.6, "b": 0.4}), ("G2", "a", {"a": 0.0, "b": 0.6}),
    ("G2", "b", {"a": 0.0, "b": 0.0}),
]


def test_c04_next_token(prefix_suite, short_strings, G1, G2, report):
    worst = 0.0
    for G in prefix_suite:
        for x in short_strings:
            vc, ve = next_token_cky(G, x), next_token_earley(G, x)
            for s in ("a", "b"):
                naive = prefix_parse(G, x + (s,)).weight
                worst = max(worst, abs(vc[s] - naive), abs(ve[s] - naive))
    grammars = {"G1": G1, "G2": G2}
    pinned_err = 0.0
    for g, x, want in PINNED:
        for fn in (next_token_cky, next_token_earley):
            v = fn(grammars[g], x)
            assert v.weights.keys() == want.keys()
            pinned_err = max(pinned_err, max(abs(v[k] - w) for k, w in want.items()))
    report(4, worst <= 1e-8 and pinned_err <= 1e-9,
           f"AD vs naive: max err {worst:.2e} (tol 1e-8); pinned vectors max err {pinned_err:.1e}")


def _op_ratio(G, x):
    P = prefix_grammar_of(G)
    worst = 0.0
    for fn, lat in ((next_token_cky, cky_lattice_value), (next_token_earley, earley_lattice_value)):
        state = fn(G, x).state
        fwd, bwd = OpCounter(), OpCounter()
        lat(P, x, state=state, counter=fwd)
        fn(G, x, state=state, counter=bwd)
        if bwd.count > 4 * fwd.count:
            return float("inf")
        if fwd.count:
            worst = max(worst, bwd.count / fwd.count)
    return worst


def test_c05_meta_theorem(prefix_suite, short_strings, report):
    worst = 0.0
    for G in prefix_suite:
        for x in short_strings:
            worst = max(worst, _op_ratio(G, x))
    syn = synthetic_ambiguous_grammar()
    worst_syn = max(_op_ratio(syn, _synthetic_input(N)) for N in SYNTHETIC_N)
    report(5, worst <= 4 and worst_syn <= 4,
           f"backward/forward ops: suite max {worst:.2f}, synthetic N={SYNTHETIC_N} max {worst_syn:.2f} (<= 4)")


def test_c06_runtime_shape(report):
    G = synthetic_ambiguous_grammar()
    Ns = [4, 8, 16, 32, 64]
    parts = []
    ok = True
    for b in BACKENDS:
        p_pts, q_pts = [], []
        for N in Ns:
            x = _synthetic_input(N)
            p_pts.append((N, parse(G, x, b, count_ops=True).op_count))
            q_pts.append((N, prefix_parse(G, x, b, count_ops=True).op_count))
        bp, bq = fit_power_law(p_pts).b, fit_power_law(q_pts).b
        ratios = [q / p for (_, p), (_, q) in zip(p_pts, q_pts)]
        spread = max(ratios) / min(ratios)
        ok &= abs(bp - bq) < 0.3 and spread < 2
        parts.append(f"{b}: b_parse={bp:.3f} b_prefix={bq:.3f} ratio spread {spread:.2f}")
    report(6, ok, "; ".join(parts) + " (|db| < 0.3, spread < 2)")


STEPS = ["deadrules", "ctf", "nullary", "unary", "unarycycle", "termsep", "cnf", "prefix", "eos"]


def test_c07_transformations(transform_suite, short_strings, report):
    violations, worst = 0, 0.0
    for G in transform_suite:
        oracle = {x: oracle_weight(G, x) for x in short_strings}
        for name in STEPS:
            src = ensure_ctf(G) if name == "nullary" else G
            H, rep = apply_transform(name, src)
            violations += not rep.within_bound
            for x in short_strings:
                if name == "prefix":
                    want, query = oracle_prefix_weight(G, x), x
                elif name == "eos":
                    want, query = oracle[x], x + ("<EOS>",)
                else:
                    want, query = oracle[x], x
                for b in BACKENDS:
                    worst = max(worst, abs(parse(H, query, b).weight - want))
    report(7, violations == 0 and worst <= 1e-8,
           f"{violations} bound violations over {len(transform_suite) * len(STEPS)} reports; "
           f"language max err {worst:.2e} (tol 1e-8)")


def test_c08_totals(G1, report):
    z1 = total_weights(G1).Z["S"]
    sup = total_weights(parse_grammar_text("0.7: S -> S S\n0.3: S -> a\n"))
    z2 = sup.Z["S"]
    terminals_one = sup.Z["a"] == 1 and total_weights(G1).Z["a"] == 1
    report(8, abs(z1 - 1) <= 1e-9 and abs(z2 - 3 / 7) <= 1e-6 and terminals_one,
           f"Z_G1(S)={z1:.12f}, supercritical Z(S)={z2:.9f} (3/7), terminals one: {terminals_one}")


def test_c09_factorization(prefix_suite, short_strings, report):
    pcfgs = _tight_pcfgs(prefix_suite, 25)
    mass_err = chain_err = 0.0
    for G in pcfgs:
        for x in short_strings:
            if prefix_parse(G, x).weight > 1e-12:
                d = conditional_distribution(G, x)
                mass_err = max(mass_err, abs(sum(p for _, p in d.items()) - 1))
            w = parse(G, x).weight
            if w > 0:
                prod = 1.0
                for k in range(len(x)):
                    prod *= conditional_distribution(G, x[:k])[x[k]]
                prod *= conditional_distribution(G, x)["<EOS>"]
                chain_err = max(chain_err, abs(prod - w))
    report(9, len(pcfgs) >= 10 and mass_err <= 1e-7 and chain_err <= 1e-7,
           f"{len(pcfgs)} PCFGs: mass err {mass_err:.2e}, chain-rule err {chain_err:.2e} (tol 1e-7)")


def test_c10_finite_differences(prefix_suite, report):
    rng = random.Random(10)
    h = 1e-4
    worst = 0.0
    for _ in range(50):
        G = rng.choice(prefix_suite)
        x = tuple(rng.choice("ab") for _ in range(rng.randint(0, 4)))
        s = rng.choice("ab")
        P = prefix_grammar_of(G)
        theta = {"a": rng.uniform(0.1, 2), "b": rng.uniform(0.1, 2)}
        up, down = dict(theta), dict(theta)
        up[s] += h
        down[s] -= h
        for lat, fn in ((cky_lattice_value, next_token_cky), (earley_lattice_value, next_token_earley)):
            fd = (lat(P, x, up) - lat(P, x, down)) / (2 * h)
            worst = max(worst, abs(fd - fn(G, x)[s]))
    report(10, worst <= 1e-5, f"AD vs central differences on 50 triples: max err {worst:.2e} (tol 1e-5)")


def _cli(argv):
    out = io.StringIO()
    code = run(build_parser().parse_args(argv), out, io.StringIO())
    assert code == 0
    return out.getvalue()


def test_c11_cli_round_trip(tmp_path, report):
    grammars = {"g1": G1_TEXT, "g4": "0.2: S -> S S a\n0.3: S -> b\n0.25: S -> A\n0.4: A -> a A\n0.1: A ->\n"}
    strings = tmp_path / "strings.txt"
    strings.write_text("\n".join(" ".join(x) for n in range(5) for x in itertools.product("ab", repeat=n)) + "\n")
    mismatches, total = 0, 0
    for name, text in grammars.items():
        g = tmp_path / f"{name}.txt"
        g.write_text(text)
        emitted = _cli(["transform", "--grammar", str(g), "--pipeline", "ctf,prefix"])
        gp = tmp_path / f"{name}_prefix.txt"
        gp.write_text(emitted)
        for b in BACKENDS:
            via_file = _cli(["parse", "--grammar", str(gp), "--strings", str(strings), "--backend", b])
            in_process = _cli(["prefix", "--grammar", str(g), "--strings", str(strings), "--backend", b])
            a, c = via_file.splitlines(), in_process.splitlines()
            total += len(c)
            mismatches += sum(u != v for u, v in zip(a, c)) + abs(len(a) - len(c))
    report(11, mismatches == 0, f"{mismatches} of {total} printed values differ after the file round trip")
