"""Grammar-constrained decoding: which tokens may come next, and how likely.

A single backward pass over the parse chart gives the prefix weight of every
one-token extension at once; dividing by the prefix weight gives the
conditional next-token distribution, and its support is the decoding mask.

    python3 demos/next_token_masking.py
"""
from pathlib import Path

from prefixgram import BOOLEAN, Rule, WeightedGrammar, conditional_distribution, load_grammar, next_token

HERE = Path(__file__).parent


def main():
    G = load_grammar(HERE / "grammars" / "arith.txt")
    # the same rules over the boolean semiring compute the mask directly
    B = WeightedGrammar([Rule(r.lhs, r.rhs, True) for r in G.rules], G.start, BOOLEAN)
    for prefix in ["", "(", "( n", "n +", "( n + n )"]:
        dist = conditional_distribution(G, prefix)
        mask = next_token(B, prefix, eos=True)
        allowed = [tok for tok, ok in mask.items() if ok]
        shown = "  ".join(f"{tok}:{p:.3f}" for tok, p in dist.items() if p > 0)
        print(f"{prefix or 'ε':<12} allowed={allowed}")
        print(f"{'':<12} {shown}")


if __name__ == "__main__":
    main()
