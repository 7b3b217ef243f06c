"""Left-to-right parsing that reuses the chart of the previous prefix.

Each call only fills one new chart column; the operation counts show the
per-token work staying below a parse from scratch.

    python3 demos/incremental_parsing.py
"""
from prefixgram import next_token_earley, prefix_parse
from prefixgram.bench import synthetic_ambiguous_grammar


def main():
    G = synthetic_ambiguous_grammar()
    text = "a b b a b a a b".split()
    state = None
    print(f"{'n':>3}{'step ops':>10}{'scratch ops':>13}{'prefix weight':>16}  next")
    for n in range(len(text) + 1):
        x = text[:n]
        step = prefix_parse(G, x, "earley", cached=state, count_ops=True)
        scratch = prefix_parse(G, x, "earley", count_ops=True)
        v = next_token_earley(G, x, state=step.state)
        state = step.state
        probs = " ".join(f"{t}={w:.3g}" for t, w in v.items())
        print(f"{n:>3}{step.op_count:>10}{scratch.op_count:>13}{step.weight:>16.6g}  {probs}")


if __name__ == "__main__":
    main()
