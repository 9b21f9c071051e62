"""Reversibility of data vectors within a set, decided on weights alone.

A member v of V is reversible in V when -v is a permutation sum of V.
That happens exactly when -weight(v) is a nonnegative rational
combination of the weights of V, which is one exact LP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .core import DataVector, rotation, weight
from .expressibility import ContractError, PermutationSumWitness
from .linalg import LinearSystem, lp_feasible


class NotReversibleError(ContractError):
    """A reversal witness was requested for a vector that is not reversible."""


def _index_of(v: DataVector, V: Sequence[DataVector]) -> int:
    for i, u in enumerate(V):
        if u == v:
            return i
    raise ValueError("v is not a member of V")


def weight_multipliers(target: Tuple[int, ...], weights: Sequence[Tuple[int, ...]]) -> Optional[List[Fraction]]:
    """λ >= 0 with Σ λ_i·weights[i] = target, or None."""
    d = len(target)
    system = LinearSystem(len(weights))
    for c in range(d):
        system.add_row({i: w[c] for i, w in enumerate(weights) if w[c]}, "=", target[c])
    return lp_feasible(system)


def is_reversible_in(v: DataVector, V: Sequence[DataVector]) -> bool:
    _index_of(v, V)
    w = weight(v)
    if not any(w):
        return True
    return weight_multipliers(tuple(-c for c in w), [weight(u) for u in V]) is not None


def integer_multiplicities(v: DataVector, V: Sequence[DataVector]) -> Optional[List[int]]:
    """Counts n_j >= 0 with Σ n_j·weight(V[j]) = -weight(v), from the scaled LP solution.

    With p the lcm of the denominators of λ, -weight(v) = Σ pλ_j·weight(V[j]) + (p-1)·weight(v).
    """
    i0 = _index_of(v, V)
    w = weight(v)
    if not any(w):
        return [0] * len(V)
    lam = weight_multipliers(tuple(-c for c in w), [weight(u) for u in V])
    if lam is None:
        return None
    p = 1
    for q in lam:
        p = p * q.denominator // math.gcd(p, q.denominator)
    counts = [int(q * p) for q in lam]
    counts[i0] += p - 1
    return counts


def reversal_witness(v: DataVector, V: Sequence[DataVector]) -> PermutationSumWitness:
    """Explicit witness that -v is a permutation sum of V.

    With S the union of the supports involved and n_j from
    `integer_multiplicities`, -v equals the sum of the |S|-1 non-trivial
    rotations of v plus, for each of the n_j copies of V[j], the sum of
    all |S| rotations of V[j].
    """
    i0 = _index_of(v, V)
    counts = integer_multiplicities(v, V)
    if counts is None:
        raise NotReversibleError("-weight(v) is not a nonnegative combination of the weights of V")
    S = set(v.support)
    for j, n in enumerate(counts):
        if n:
            S |= V[j].support
    S = sorted(S)
    terms = []
    for i in range(1, len(S)):
        terms.append((i0, rotation(S, i).restrict(v.support)))
    for j, n in enumerate(counts):
        u = V[j]
        if not n or not u:
            continue
        for _ in range(n):
            for i in range(len(S)):
                terms.append((j, rotation(S, i).restrict(u.support)))
    return PermutationSumWitness(terms)


@dataclass
class ReversibleSet:
    """Proof token that every member of `vectors` is reversible in it.

    Reversal witnesses are built on first use and cached.
    """

    vectors: Tuple[DataVector, ...]
    _reversals: Dict[int, PermutationSumWitness] = field(default_factory=dict, repr=False)

    def reversal(self, i: int) -> PermutationSumWitness:
        w = self._reversals.get(i)
        if w is None:
            w = reversal_witness(self.vectors[i], self.vectors)
            self._reversals[i] = w
        return w


@dataclass
class ReversibilityReport:
    vectors: Tuple[DataVector, ...]
    verdicts: List[bool]

    @property
    def reversible(self) -> bool:
        return all(self.verdicts)

    def __bool__(self) -> bool:
        return self.reversible

    @property
    def culprits(self) -> List[int]:
        return [i for i, ok in enumerate(self.verdicts) if not ok]

    def certificate(self) -> ReversibleSet:
        if not self.reversible:
            raise NotReversibleError(f"members {self.culprits} are not reversible")
        return ReversibleSet(self.vectors)


def is_reversible_set(V: Sequence[DataVector]) -> ReversibilityReport:
    """Per-member verdicts; members with equal weights share one LP.

    Two shortcuts avoid most LPs. A weight whose negation is also a member
    weight is settled directly. When the LP writes -w_i as Σ λ_k·w_k, every
    w_j with λ_j > 0 is reversible as well, since
    -w_j = (w_i + Σ_{k≠j} λ_k·w_k) / λ_j.
    """
    V = tuple(V)
    weights = [weight(u) for u in V]
    present = set(weights)
    cache: Dict[Tuple[int, ...], bool] = {}
    verdicts = []
    for w in weights:
        if w not in cache:
            neg = tuple(-c for c in w)
            if not any(w) or neg in present:
                cache[w] = True
            else:
                lam = weight_multipliers(neg, weights)
                cache[w] = lam is not None
                if lam is not None:
                    for q, u in zip(lam, weights):
                        if q > 0:
                            cache[u] = True
        verdicts.append(cache[w])
    return ReversibilityReport(V, verdicts)


def certify(V: Sequence[DataVector]) -> ReversibleSet:
    """The proof token required by the fast path; raises if V is not reversible."""
    return is_reversible_set(V).certificate()
