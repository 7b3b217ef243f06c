"""Semiring-generic weighted CFGs with prefix parsing by grammar transformation.

The prefix grammar of ``G`` generates every prefix of every string of ``G``
with the total weight of its completions, so any ordinary parser computes
prefix weights.  Next-token weight vectors come from one reverse sweep over
a lattice parse of the prefix grammar.
"""
from .errors import *  # noqa: F401,F403
from .semiring import BOOLEAN, LOGREAL, REAL, OpCounter, Semiring, get_semiring, semiring_star
from .grammar import (
    DerivationTree,
    GrammarStats,
    Rule,
    TotalWeights,
    WeightedGrammar,
    derivation_weight,
    derivation_yield,
    grammar_stats,
    leaf,
    load_grammar,
    node,
    parse_grammar_text,
    total_weights,
)
from .transforms import (
    TransformReport,
    apply_transform,
    eliminate_dead_rules,
    ensure_cnf,
    ensure_ctf,
    ensure_nullary_free,
    ensure_terminal_sep,
    ensure_unary_cycle_free,
    ensure_unary_free,
    has_unary_cycle,
    is_cnf,
    is_ctf,
    run_pipeline,
    size_bound,
)
from .lattice import (
    WeightedAutomaton,
    WeightedTransducer,
    next_token_lattice,
    transducer_weight,
    wfsa_weight,
)
from .prefix import (
    EOS,
    PrefixGrammar,
    compose_prefix,
    eos_augment,
    prefix_grammar,
    prefix_transducer,
)
from .cky import CkyState, ParseResult, incr_cky
from .earley import EarleyState, earley
from .parse import cky_lattice_value, earley_lattice_value, parse, prefix_parse
from .nexttoken import (
    ConditionalDistribution,
    NextTokenVector,
    conditional_distribution,
    next_token,
    next_token_cky,
    next_token_earley,
)
from .oracle import (
    WeightedForest,
    enumerate_trees,
    forest_weight,
    oracle_prefix_weight,
    oracle_weight,
    random_suite,
)
from .bench import BenchRecord, PowerLawFit, fit_power_law, run_bench

__version__ = "0.1.0"
