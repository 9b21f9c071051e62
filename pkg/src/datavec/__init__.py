"""Permutation sums of finitely supported data vectors over Z^d.

A data vector maps finitely many data values to integer tuples. The
central question is whether a target x equals v1∘θ1 + ... + vn∘θn for
base vectors vi and data permutations θi. The package decides it exactly
(an integer program over histograms with bounded support), decides it in
polynomial time for reversible base sets (subgroup membership), and
applies both to unordered data Petri nets and data blind counter
automata.
"""

from .core import (DataValue, DataVector, DimensionError, DomainError, FiniteInjection, apply_injection, data,
                   datum, equalize, lift, rotate, swap, vec_add, vec_neg, vec_sum, vector, weight)
from .expressibility import (ContractError, Decision, ExpressibilityInstance, PermutationSumWitness,
                             WitnessError, build_ilp, fast_is_permutation_sum, is_permutation_sum,
                             support_bound, synthesize_reversible_witness, verify_witness)
from .histogram import Histogram, HistogramError, decompose, validate
from .reversibility import (NotReversibleError, ReversibleSet, certify, is_reversible_in, is_reversible_set,
                            reversal_witness)

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "DataValue",
    "DataVector",
    "Decision",
    "DimensionError",
    "DomainError",
    "ExpressibilityInstance",
    "FiniteInjection",
    "Histogram",
    "HistogramError",
    "NotReversibleError",
    "PermutationSumWitness",
    "ReversibleSet",
    "WitnessError",
    "apply_injection",
    "build_ilp",
    "certify",
    "data",
    "datum",
    "decompose",
    "equalize",
    "fast_is_permutation_sum",
    "is_permutation_sum",
    "is_reversible_in",
    "is_reversible_set",
    "lift",
    "reversal_witness",
    "rotate",
    "support_bound",
    "swap",
    "synthesize_reversible_witness",
    "validate",
    "vec_add",
    "vec_neg",
    "vec_sum",
    "vector",
    "verify_witness",
    "weight",
]
