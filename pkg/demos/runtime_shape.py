"""Parsing and prefix parsing scale the same way.

Fits r(N) = a N^b to semiring operation counts of parsing and prefix parsing
on a fully ambiguous grammar; the exponents match and the overhead of the
prefix grammar is a constant factor.

    python3 demos/runtime_shape.py
"""
import random

from prefixgram import fit_power_law, parse, prefix_parse
from prefixgram.bench import synthetic_ambiguous_grammar


def main():
    G = synthetic_ambiguous_grammar()
    rng = random.Random(0)
    for backend in ("cky", "earley"):
        plain, pref = [], []
        for N in (4, 8, 16, 32, 64):
            x = [rng.choice("ab") for _ in range(N)]
            plain.append((N, parse(G, x, backend, count_ops=True).op_count))
            pref.append((N, prefix_parse(G, x, backend, count_ops=True).op_count))
        f1, f2 = fit_power_law(plain), fit_power_law(pref)
        ratios = ", ".join(f"{q / p:.2f}" for (_, p), (_, q) in zip(plain, pref))
        print(f"{backend:>6}: parse b={f1.b:.3f}  prefix b={f2.b:.3f}  ops ratio per N: {ratios}")


if __name__ == "__main__":
    main()
