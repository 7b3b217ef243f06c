"""Prefix weights two ways: brute-force tree sums and the prefix grammar.

    python3 demos/prefix_probability.py
"""
from pathlib import Path

from prefixgram import load_grammar, oracle_prefix_weight, prefix_grammar, prefix_parse

HERE = Path(__file__).parent


def main():
    G = load_grammar(HERE / "grammars" / "g1.txt")
    P = prefix_grammar(G)
    print("prefix grammar of g1 (size %d, original %d):" % (P.grammar.size, G.size))
    print(P.grammar.to_text())

    print(f"{'prefix':<12}{'cky':>10}{'earley':>10}{'trees<=60':>12}")
    for x in ["", "a", "a a", "a a a", "a a a a"]:
        cky = prefix_parse(G, x, "cky").weight
        ear = prefix_parse(G, x, "earley").weight
        ref = oracle_prefix_weight(G, x, 60)
        print(f"{x or 'ε':<12}{cky:>10.6f}{ear:>10.6f}{ref:>12.6f}")


if __name__ == "__main__":
    main()
