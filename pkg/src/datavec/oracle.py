"""Brute-force ground truth: bounded enumeration of permutation sums.

Only the data values of supp(x) are distinguished. Every other pool
value is an interchangeable fresh value, so partial sums are stored up to
renaming of fresh values: the fresh part of a partial sum is renamed onto
the first pool fresh values, ordered by the tuple each carries. Sums of up
to k terms are found by meeting in the middle, pairing partial sums of
ceil(t/2) and floor(t/2) terms.

A YES comes with a witness. The oracle never reports a true NO.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .core import DataValue, DataVector, FiniteInjection, apply_injection, data, fresh_values, weight
from .expressibility import ExpressibilityInstance, PermutationSumWitness, support_bound

YES = "YES"
NO_UP_TO_BUDGET = "NO_UP_TO_BUDGET"


class OracleCapExceeded(RuntimeError):
    """The enumeration would store more partial sums than the configured cap."""


@dataclass(frozen=True)
class OracleBudget:
    """At most `max_terms` terms, injections into `pool`."""

    max_terms: int
    pool: Tuple[DataValue, ...]
    state_cap: int = 200_000

    @classmethod
    def for_instance(cls, inst: ExpressibilityInstance, max_terms: int, pool_size: Optional[int] = None,
                     state_cap: int = 200_000) -> "OracleBudget":
        """Pool = supp(x) ∪ supports of V, padded with fresh values to `pool_size`.

        The default size is the support bound of the instance.
        """
        base = set(inst.x.support) | inst.base_support()
        size = support_bound(inst) if pool_size is None else pool_size
        pool = sorted(base) + fresh_values(base, max(size - len(base), 0))
        return cls(max_terms, tuple(pool), state_cap)

    def check(self, inst: ExpressibilityInstance) -> None:
        if self.max_terms < 0:
            raise ValueError("max_terms must be nonnegative")
        if not set(inst.x.support) <= set(self.pool):
            raise ValueError("the pool must contain supp(x)")


@dataclass
class OracleResult:
    answer: str
    witness: Optional[PermutationSumWitness] = None
    states: int = 0

    def __bool__(self) -> bool:
        return self.answer == YES


def canonical_injections(source: Sequence[DataValue], existing: Sequence[DataValue],
                         new: Sequence[DataValue]) -> Iterator[FiniteInjection]:
    """Injections of `source` into `existing` ∪ `new`, one per choice up to renaming of `new`.

    Values of `new` are interchangeable, so the sources sent there receive
    new[0], new[1], ... in source order.
    """
    source = sorted(source)
    chosen: List[DataValue] = []

    def go(k: int, taken: set, fresh_used: int) -> Iterator[FiniteInjection]:
        if k == len(source):
            yield FiniteInjection(zip(source, chosen))
            return
        for b in existing:
            if b not in taken:
                chosen.append(b)
                taken.add(b)
                yield from go(k + 1, taken, fresh_used)
                taken.discard(b)
                chosen.pop()
        if fresh_used < len(new):
            chosen.append(new[fresh_used])
            yield from go(k + 1, taken, fresh_used + 1)
            chosen.pop()

    yield from go(0, set(), 0)


def naive_injections(source: Sequence[DataValue], pool: Sequence[DataValue]) -> Iterator[FiniteInjection]:
    source = sorted(source)
    for images in itertools.permutations(pool, len(source)):
        yield FiniteInjection(zip(source, images))


class _Canon:
    def __init__(self, distinguished, fresh: Sequence[DataValue]) -> None:
        self.distinguished = frozenset(distinguished)
        self.fresh = list(fresh)

    def __call__(self, s: DataVector) -> Optional[Tuple[DataVector, FiniteInjection]]:
        """(canonical form, renaming onto it), or None if s has too many fresh values."""
        loose = [a for a in s.support if a not in self.distinguished]
        if len(loose) > len(self.fresh):
            return None
        loose.sort(key=lambda a: (s[a], a))
        rho = FiniteInjection(zip(loose, self.fresh))
        whole = FiniteInjection({a: rho.get(a, a) for a in s.support})
        return apply_injection(s, whole), rho

    def used(self, s: DataVector) -> int:
        return sum(1 for a in s.support if a not in self.distinguished)


def oracle_decide(inst: ExpressibilityInstance, budget: OracleBudget) -> OracleResult:
    """Search all sums of at most `budget.max_terms` terms with images in the pool."""
    budget.check(inst)
    d = inst.d
    k = budget.max_terms
    x = inst.x
    distinguished = sorted(x.support)
    fresh = [a for a in budget.pool if a not in x.support]
    canon = _Canon(distinguished, fresh)
    bases = [(i, sorted(v.support)) for i, v in enumerate(inst.V) if v]
    zero = DataVector.zero(d)

    levels: List[Dict[DataVector, PermutationSumWitness]] = [{zero: PermutationSumWitness()}]
    total = 1

    def lookup(a: int) -> Optional[PermutationSumWitness]:
        # sums of t = 2a-1 or 2a terms, split into a + (t - a)
        for s, ws in levels[a].items():
            c = canon(x - s)
            if c is None:
                continue
            key, rho = c
            for b in (a - 1, a):
                if b < 0 or a + b > k or b >= len(levels):
                    continue
                wb = levels[b].get(key)
                if wb is not None:
                    return ws + wb.rename(rho.inverse())
        return None

    if not x and not inst.exact:
        return OracleResult(YES, PermutationSumWitness(), total)
    half = (k + 1) // 2
    for a in range(0, half + 1):
        if a > 0:
            nxt: Dict[DataVector, PermutationSumWitness] = {}
            for s, ws in levels[a - 1].items():
                m = canon.used(s)
                existing = distinguished + fresh[:m]
                for i, src in bases:
                    v = inst.V[i]
                    for pi in canonical_injections(src, existing, fresh[m:]):
                        c = canon(s + apply_injection(v, pi))
                        if c is None:
                            continue
                        key, rho = c
                        if key in nxt:
                            continue
                        nxt[key] = PermutationSumWitness(ws.terms + ((i, pi),)).rename(rho)
                        total += 1
                        if total > budget.state_cap:
                            raise OracleCapExceeded(f"more than {budget.state_cap} partial sums")
            levels.append(nxt)
        w = lookup(a)
        if w is not None and _exact_ok(inst, w):
            return OracleResult(YES, w, total)
    return OracleResult(NO_UP_TO_BUDGET, None, total)


def _exact_ok(inst: ExpressibilityInstance, w: PermutationSumWitness) -> bool:
    counts = w.counts()
    return all(counts.get(i, 0) == c for i, c in inst.exact)


# -- random instances -----------------------------------------------------

def random_vector(rng: random.Random, d: int, names: Sequence[DataValue], max_support: int,
                  lo: int = -2, hi: int = 2) -> DataVector:
    """Support size uniform in 1..max_support over `names`, entries uniform in [lo, hi], never all zero."""
    size = rng.randint(1, max_support)
    entries = {}
    for a in rng.sample(list(names), size):
        t = tuple(0 for _ in range(d))
        while not any(t):
            t = tuple(rng.randint(lo, hi) for _ in range(d))
        entries[a] = t
    return DataVector(d, entries)


def random_instance(seed: int, dims: Sequence[int] = (1, 2), sizes: Sequence[int] = (1, 3),
                    max_support: int = 3, lo: int = -2, hi: int = 2, planted: float = 0.6,
                    max_terms: int = 4) -> ExpressibilityInstance:
    """Deterministic random instance.

    d is uniform in `dims`, |V| uniform in the range `sizes`, each vector
    from `random_vector` over six names. With probability `planted` the
    target is a sum of 1..max_terms random renamings of members of V,
    redrawn until it fits the same support and entry limits; otherwise it
    is a random vector (possibly empty) like the members.
    """
    rng = random.Random(seed)
    names = data(*(f"n{i}" for i in range(6)))
    d = rng.choice(list(dims))
    V = [random_vector(rng, d, names, max_support, lo, hi) for _ in range(rng.randint(sizes[0], sizes[1]))]
    if rng.random() < planted:
        for _ in range(50):
            x = DataVector.zero(d)
            for _ in range(rng.randint(1, max_terms)):
                v = rng.choice(V)
                src = sorted(v.support)
                pi = FiniteInjection(zip(src, rng.sample(list(names), len(src))))
                x = x + apply_injection(v, pi)
            if len(x) <= max_support and all(lo <= c <= hi for t in x.values() for c in t):
                return ExpressibilityInstance(V, x)
    if rng.random() < 0.1:
        return ExpressibilityInstance(V, DataVector.zero(d))
    return ExpressibilityInstance(V, random_vector(rng, d, names, max_support, lo, hi))


def random_reversible_instance(seed: int, dims: Sequence[int] = (1, 2), sizes: Sequence[int] = (1, 3),
                               max_support: int = 3, lo: int = -2, hi: int = 2) -> ExpressibilityInstance:
    """Like `random_instance`, with V made reversible.

    Every member whose weight is nonzero gets its negation, renamed by a
    random permutation of the names, appended to V.
    """
    inst = random_instance(seed, dims, sizes, max_support, lo, hi)
    rng = random.Random(seed ^ 0x5EED)
    names = data(*(f"n{i}" for i in range(6)))
    V = list(inst.V)
    for v in inst.V:
        if any(weight(v)):
            src = sorted(v.support)
            pi = FiniteInjection(zip(src, rng.sample(list(names), len(src))))
            V.append(apply_injection(-v, pi))
    return ExpressibilityInstance(V, inst.x)
