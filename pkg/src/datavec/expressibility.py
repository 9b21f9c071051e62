"""Deciding whether a target vector is a permutation sum of base vectors.

The general procedure encodes one histogram per base vector as a
nonnegative integer program over a column set whose size is bounded in
terms of the supports involved, solves it exactly, and decomposes the
recovered histograms into injections to produce a witness.

When the base set is reversible (every member's inverse is itself a
permutation sum) the question reduces to two subgroup-membership tests,
and a witness can be assembled from rotations, swaps and the reversal
witnesses of the members.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import (TYPE_CHECKING, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence,
                    Tuple)

from . import histogram as hist
from .core import (DataValue, DataVector, DimensionError, DomainError, FiniteInjection, apply_injection,
                   fresh_values, injection_from_json, injection_to_json, rotation, swap,
                   vec_sum, vector_from_json, vector_to_json, weight)
from .linalg import (IlpInstance, LinearSystem, SearchLimitExceeded, SolverStats, SubgroupOracle,
                     coefficient_bounds, cone_combination, ilp_feasible, is_whole_lattice,
                     lattice_basis)

if TYPE_CHECKING:
    from .reversibility import ReversibleSet

log = logging.getLogger(__name__)


class WitnessError(ValueError):
    """A witness term does not fit the base vector it refers to."""


class ContractError(ValueError):
    """A procedure was called without its required precondition."""


@dataclass(frozen=True)
class ExpressibilityInstance:
    """Base vectors V (duplicates allowed) and a target x of one dimension.

    `exact` optionally pins how many copies of some base vectors must be
    used; an unpinned base vector may be used any number of times.
    """

    V: Tuple[DataVector, ...]
    x: DataVector
    exact: Tuple[Tuple[int, int], ...] = ()

    def __init__(self, V: Iterable[DataVector], x: DataVector,
                 exact: Mapping[int, int] | Iterable[Tuple[int, int]] = ()) -> None:
        V = tuple(V)
        for v in V:
            if v.d != x.d:
                raise DimensionError(f"base vector of dimension {v.d} vs target of dimension {x.d}")
        pins = dict(exact.items() if isinstance(exact, Mapping) else exact)
        for i, c in pins.items():
            if not 0 <= i < len(V) or c < 0:
                raise ValueError(f"bad pinned count {c} for base vector {i}")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "exact", tuple(sorted(pins.items())))

    @property
    def d(self) -> int:
        return self.x.d

    @property
    def pinned(self) -> Dict[int, int]:
        return dict(self.exact)

    def base_support(self) -> frozenset:
        out = set()
        for v in self.V:
            out |= v.support
        return frozenset(out)


Term = Tuple[int, FiniteInjection]


@dataclass(frozen=True)
class PermutationSumWitness:
    """Terms (i, π) standing for the sum of V[i]∘π⁻¹."""

    terms: Tuple[Term, ...] = ()

    def __init__(self, terms: Iterable[Term] = ()) -> None:
        object.__setattr__(self, "terms", tuple((int(i), FiniteInjection(p)) for i, p in terms))

    def __add__(self, other: "PermutationSumWitness") -> "PermutationSumWitness":
        return PermutationSumWitness(self.terms + other.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def value(self, V: Sequence[DataVector], d: int) -> DataVector:
        return vec_sum((apply_injection(V[i], p) for i, p in self.terms), d)

    def data_used(self) -> frozenset:
        """Every data value some injection maps to."""
        out = set()
        for _, p in self.terms:
            out |= p.image
        return frozenset(out)

    def counts(self) -> Dict[int, int]:
        c: Dict[int, int] = {}
        for i, _ in self.terms:
            c[i] = c.get(i, 0) + 1
        return c

    def rename(self, perm: FiniteInjection) -> "PermutationSumWitness":
        """Witness for value∘θ⁻¹, θ the permutation extending `perm`."""
        return PermutationSumWitness((i, p.then(perm)) for i, p in self.terms)


def repeat(w: PermutationSumWitness, k: int) -> PermutationSumWitness:
    return PermutationSumWitness(w.terms * k)


def identity_term(i: int, v: DataVector) -> PermutationSumWitness:
    if not v:
        return PermutationSumWitness()
    return PermutationSumWitness([(i, FiniteInjection.identity(v.support))])


# -- support bound and the integer program --------------------------------

def support_bound(inst: ExpressibilityInstance) -> int:
    """|supp x| + 1 + Σ_v (2|supp v| - 1); zero base vectors contribute nothing."""
    return len(inst.x) + 1 + sum(max(2 * len(v) - 1, 0) for v in inst.V)


class Legend(NamedTuple):
    columns: Tuple[DataValue, ...]
    fresh: Tuple[DataValue, ...]
    hvars: Dict[Tuple[int, DataValue, DataValue], int]
    nvars: Dict[int, int]
    names: List[str]


def build_ilp(inst: ExpressibilityInstance, fresh: Optional[int] = None,
              columns: Optional[Iterable[DataValue]] = None) -> Tuple[IlpInstance, Legend]:
    """Integer program whose solutions are histograms H_v with Σ⟨v,H_v⟩ = x.

    Columns are supp(x) plus `fresh` new data values; by default enough of
    them that the column count equals the support bound. Fresh columns are
    interchangeable, so their total column sums are required to be
    non-increasing in id order. Passing `columns` fixes the column set
    instead, which models a finite data domain.
    """
    x_cols = sorted(inst.x.support)
    if columns is not None:
        columns = set(columns)
        if not inst.x.support <= columns:
            raise DomainError("the column set must contain supp(x)")
        new = sorted(columns - inst.x.support)
    else:
        if fresh is None:
            fresh = support_bound(inst) - len(inst.x)
        new = fresh_values(set(x_cols) | inst.base_support(), fresh)
    columns = tuple(x_cols + new)
    d = inst.d
    names: List[str] = []
    hvars: Dict[Tuple[int, DataValue, DataValue], int] = {}
    nvars: Dict[int, int] = {}
    active = [i for i, v in enumerate(inst.V) if v]
    for i in active:
        nvars[i] = len(names)
        names.append(f"n[{i}]")
        for a in sorted(inst.V[i].support):
            for b in columns:
                hvars[(i, a, b)] = len(names)
                names.append(f"H[{i}][{a},{b}]")
    system = LinearSystem(len(names), names=names)
    for i in active:
        v = inst.V[i]
        for a in sorted(v.support):
            row = {hvars[(i, a, b)]: 1 for b in columns}
            row[nvars[i]] = -1
            system.add_row(row, "=", 0)
        for b in columns:
            row = {hvars[(i, a, b)]: 1 for a in v.support}
            row[nvars[i]] = -1
            system.add_row(row, "<=", 0)
    for b in columns:
        target = inst.x[b]
        for k in range(d):
            row = {}
            for i in active:
                v = inst.V[i]
                for a in v.support:
                    c = v[a][k]
                    if c:
                        row[hvars[(i, a, b)]] = c
            system.add_row(row, "=", target[k])
    for i, c in inst.exact:
        if i in nvars:
            system.add_row({nvars[i]: 1}, "=", c)
    for b1, b2 in zip(new, new[1:]):
        row: Dict[int, int] = {}
        for i in active:
            for a in inst.V[i].support:
                row[hvars[(i, a, b1)]] = 1
                row[hvars[(i, a, b2)]] = -1
        if row:
            system.add_row(row, ">=", 0)
    return IlpInstance(system), Legend(columns, tuple(new), hvars, nvars, names)


def witness_from_solution(inst: ExpressibilityInstance, legend: Legend,
                          solution: Sequence[int]) -> PermutationSumWitness:
    """Decompose each recovered histogram into simple ones and read off injections."""
    terms: List[Term] = []
    for i, nv in sorted(legend.nvars.items()):
        if solution[nv] == 0:
            continue
        v = inst.V[i]
        cells = {(a, b): solution[j] for (k, a, b), j in legend.hvars.items() if k == i and solution[j]}
        h = hist.validate(v.support, cells)
        for part in hist.decompose(h):
            terms.append((i, hist.injection_from_simple(part)))
    return PermutationSumWitness(terms)


@dataclass
class Decision:
    """Outcome of a decision procedure, with a witness on YES."""

    answer: bool
    witness: Optional[PermutationSumWitness] = None
    stats: SolverStats = field(default_factory=SolverStats)
    reason: str = ""

    def __bool__(self) -> bool:
        return self.answer


def _fresh_schedule(limit: int) -> List[int]:
    steps = [0]
    k = 1
    while k < limit:
        steps.append(k)
        k *= 2
    if limit not in steps:
        steps.append(limit)
    return steps


def weight_combination(inst: ExpressibilityInstance, node_limit: Optional[int] = None) -> Optional[List[int]]:
    """Multiplicities n_v >= 0 with Σ n_v·weight(v) = weight(x), or None.

    Honours pinned counts. Necessary for expressibility, since every
    permuted copy of v has the weight of v.
    """
    d = inst.d
    k = len(inst.V)
    w = [weight(v) for v in inst.V]
    target = weight(inst.x)
    system = LinearSystem(k)
    for c in range(d):
        system.add_row({i: w[i][c] for i in range(k) if w[i][c]}, "=", target[c])
    for i, c in inst.exact:
        system.add_row({i: 1}, "=", c)
    return ilp_feasible(IlpInstance(system), node_limit=node_limit)


def _value_combination_exists(values: Sequence[Tuple[int, ...]], target: Tuple[int, ...],
                              node_limit: int) -> bool:
    k = len(values)
    system = LinearSystem(k)
    for c in range(len(target)):
        system.add_row({i: values[i][c] for i in range(k) if values[i][c]}, "=", target[c])
    try:
        return ilp_feasible(IlpInstance(system), node_limit=node_limit) is not None
    except SearchLimitExceeded:
        return True


def necessary_conditions(inst: ExpressibilityInstance, node_limit: int = 300) -> Optional[str]:
    """Cheap sound refutations; returns a reason string when x is certainly not expressible.

    Two necessary conditions: weight(x) is a nonnegative integer
    combination of the weights of V, and every value x(β) is a nonnegative
    integer combination of the values occurring in V. Searches that exceed
    `node_limit` are treated as passing.
    """
    try:
        if weight_combination(inst, node_limit=node_limit) is None:
            return "weight(x) is not a nonnegative combination of the weights of V"
    except SearchLimitExceeded:
        pass
    values = sorted({t for v in inst.V for t in v.values()})
    for b, t in inst.x.items():
        if not values or not _value_combination_exists(values, t, node_limit):
            return f"x({b}) is not a nonnegative combination of values of V"
    return None


def reversible_core(inst: ExpressibilityInstance) -> List[int]:
    """Indices of the unpinned nonzero members that are reversible among the unpinned members.

    These are exactly the members that occur with positive multiplicity
    in some zero-weight combination, so the returned members form a
    reversible set on their own, and in every solution the multiplicities
    of the other members are bounded.
    """
    pinned = inst.pinned
    free = [i for i, v in enumerate(inst.V) if v and i not in pinned]
    weights = [weight(inst.V[i]) for i in free]
    verdict: Dict[Tuple[int, ...], bool] = {}
    out = []
    for i, w in zip(free, weights):
        if w not in verdict:
            verdict[w] = not any(w) or cone_combination(tuple(-c for c in w), weights) is not None
        if verdict[w]:
            out.append(i)
    return out


class CoreLegend(NamedTuple):
    columns: Tuple[DataValue, ...]
    fresh: Tuple[DataValue, ...]
    hvars: Dict[Tuple[int, DataValue, DataValue], int]
    nvars: Dict[int, int]
    core: Tuple[int, ...]


def _hadamard_bound(columns: Sequence[Sequence[int]], rows: int) -> int:
    """Upper bound on every coordinate of every vertex of {A·y = b, y >= 0}; columns include b."""
    sq = sorted((max(sum(c * c for c in col), 1) for col in columns), reverse=True)[:rows]
    prod = 1
    for q in sq:
        prod *= q
    return math.isqrt(prod) + 1


def build_core_ilp(inst: ExpressibilityInstance, core: Sequence[int],
                   fresh: Optional[int] = None) -> Tuple[IlpInstance, CoreLegend]:
    """Mixed program equivalent to the one of `build_ilp`, with the reversible core folded away.

    Members outside `core` keep their histograms. A permutation sum of
    the core (a reversible set) is any vector whose weight lies in the
    subgroup generated by the core's weights and whose values lie in the
    subgroup generated by the core's values, so the core contributes
    integer lattice coordinates: one block for the weight residual and one
    per column. The core's multiplicities enter only as continuous cone
    coefficients of the weight residual, which bound every other
    multiplicity; with that, every integer variable is bounded and branch
    and bound terminates.
    """
    d = inst.d
    V = inst.V
    core = tuple(sorted(core))
    coreset = set(core)
    pinned = inst.pinned
    bound = support_bound(inst)
    if fresh is None:
        fresh = bound - len(inst.x)
    x_cols = sorted(inst.x.support)
    new = fresh_values(set(x_cols) | inst.base_support(), fresh)
    columns = tuple(x_cols + new)
    outer = [i for i, v in enumerate(V) if v and i not in coreset]

    names: List[str] = []
    lower: List[int] = []
    continuous = set()

    def var(name: str, lo: int = 0) -> int:
        names.append(name)
        lower.append(lo)
        return len(names) - 1

    hvars: Dict[Tuple[int, DataValue, DataValue], int] = {}
    nvars: Dict[int, int] = {}
    for i in outer:
        nvars[i] = var(f"n[{i}]")
        for a in sorted(V[i].support):
            for b in columns:
                hvars[(i, a, b)] = var(f"H[{i}][{a},{b}]")

    # bounds on the outer multiplicities, from the weight cone
    wx = weight(inst.x)
    rhs = list(wx)
    for i, c in pinned.items():
        rhs = [r - c * t for r, t in zip(rhs, weight(V[i]))]
    free_cols = [weight(V[i]) for i in outer if i not in pinned] + [weight(V[i]) for i in core]
    nmax = {i: pinned[i] if i in pinned else _hadamard_bound(free_cols + [rhs], d) for i in outer}

    rows: List[Tuple[Dict[int, int], str, int]] = []
    for i in outer:
        v = V[i]
        for a in sorted(v.support):
            row = {hvars[(i, a, b)]: 1 for b in columns}
            row[nvars[i]] = -1
            rows.append((row, "=", 0))
        for b in columns:
            row = {hvars[(i, a, b)]: 1 for a in v.support}
            row[nvars[i]] = -1
            rows.append((row, "<=", 0))
    for i, c in pinned.items():
        if i in nvars:
            rows.append(({nvars[i]: 1}, "=", c))

    # values: x(β) - y(β) in the subgroup generated by the core's values
    vB, vpiv = lattice_basis([t for _, _, t in value_generators([V[i] for i in core])], d)
    values_free = is_whole_lattice(vB, vpiv, d)
    span = [abs(t) for t in [0] * d]
    for k in range(d):
        span[k] = sum(max(abs(V[i][a][k]) for a in V[i].support) * nmax[i] for i in outer)
    if not values_free:
        for b in columns:
            zb = []
            if vpiv:
                zbounds = coefficient_bounds(vB, vpiv, [abs(inst.x[b][k]) + span[k] for k in range(d)])
                zb = [var(f"z[{b}][{j}]", -zbounds[j]) for j in range(len(vpiv))]
            for k in range(d):
                row = {}
                for i in outer:
                    for a in V[i].support:
                        c = V[i][a][k]
                        if c:
                            row[hvars[(i, a, b)]] = c
                for j, zj in enumerate(zb):
                    if vB[k][j]:
                        row[zj] = vB[k][j]
                rows.append((row, "=", inst.x[b][k]))

    # weight: weight(x) - weight(y) is a nonnegative combination, and a lattice point, of core weights
    if core:
        mv = []
        for i in core:
            mv.append(var(f"m[{i}]"))
            continuous.add(mv[-1])
        wB, wpiv = lattice_basis([weight(V[i]) for i in core], d)
        wspan = [abs(wx[k]) + sum(abs(weight(V[i])[k]) * nmax[i] for i in outer) for k in range(d)]
        zw = []
        if not is_whole_lattice(wB, wpiv, d) and wpiv:
            zbounds = coefficient_bounds(wB, wpiv, wspan)
            zw = [var(f"zw[{j}]", -zbounds[j]) for j in range(len(wpiv))]
        whole = is_whole_lattice(wB, wpiv, d)
        for k in range(d):
            base = {nvars[i]: weight(V[i])[k] for i in outer if weight(V[i])[k]}
            cone = dict(base)
            for i, m in zip(core, mv):
                if weight(V[i])[k]:
                    cone[m] = weight(V[i])[k]
            rows.append((cone, "=", wx[k]))
            if not whole:
                lat = dict(base)
                for j, zj in enumerate(zw):
                    if wB[k][j]:
                        lat[zj] = wB[k][j]
                rows.append((lat, "=", wx[k]))

    for b1, b2 in zip(new, new[1:]):
        row: Dict[int, int] = {}
        for i in outer:
            for a in V[i].support:
                row[hvars[(i, a, b1)]] = 1
                row[hvars[(i, a, b2)]] = -1
        if row:
            rows.append((row, ">=", 0))

    system = LinearSystem(len(names), names=names,
                          lower=[Fraction(q) for q in lower] if any(lower) else None)
    for row, rel, b in rows:
        system.add_row(row, rel, b)
    return (IlpInstance(system, continuous=frozenset(continuous)),
            CoreLegend(columns, tuple(new), hvars, nvars, core))


def compress_witness(inst: ExpressibilityInstance, w: PermutationSumWitness) -> PermutationSumWitness:
    """Same value and multiplicities, with at most support_bound(inst) data values in the images.

    Each base vector's terms are summed into one histogram; while there
    are too many columns, two columns outside supp(x) that are not big
    (column sum at most half the degree) in any histogram are merged, and
    the histograms are decomposed again.
    """
    bound = support_bound(inst)
    cells: Dict[int, Dict[Tuple[DataValue, DataValue], int]] = {}
    degree: Dict[int, int] = {}
    for i, p in w.terms:
        h = cells.setdefault(i, {})
        degree[i] = degree.get(i, 0) + 1
        for a, b in p.items():
            h[(a, b)] = h.get((a, b), 0) + 1
    cols = set()
    for h in cells.values():
        cols |= {b for _, b in h}
    if len(cols) <= bound:
        return w
    while len(cols) > bound:
        colsum: Dict[Tuple[int, DataValue], int] = {}
        for i, h in cells.items():
            for (a, b), c in h.items():
                colsum[(i, b)] = colsum.get((i, b), 0) + c
        small = [b for b in sorted(cols) if b not in inst.x.support
                 and all(2 * colsum.get((i, b), 0) <= degree[i] for i in cells)]
        if len(small) < 2:
            raise AssertionError("column merging found no mergeable pair")
        b1, b2 = small[0], small[1]
        for h in cells.values():
            for (a, b), c in list(h.items()):
                if b == b2:
                    del h[(a, b)]
                    h[(a, b1)] = h.get((a, b1), 0) + c
        cols.discard(b2)
    terms: List[Term] = []
    for i in sorted(cells):
        hh = hist.validate(inst.V[i].support, cells[i])
        for part in hist.decompose(hh):
            terms.append((i, hist.injection_from_simple(part)))
    return PermutationSumWitness(terms)


def _core_witness(inst: ExpressibilityInstance, legend: CoreLegend, solution: Sequence) -> PermutationSumWitness:
    from .reversibility import ReversibleSet

    outer = witness_from_solution(inst, legend, solution)
    if not legend.core:
        return outer
    rest = inst.x - outer.value(inst.V, inst.d)
    sub = ExpressibilityInstance([inst.V[i] for i in legend.core], rest)
    inner = synthesize_reversible_witness(sub, ReversibleSet(sub.V))
    remapped = PermutationSumWitness((legend.core[i], p) for i, p in inner.terms)
    return compress_witness(inst, outer + remapped)


def _direct_witness(inst: ExpressibilityInstance, fresh: int, full: int, stats: SolverStats,
                    node_limit: int = 25, max_vars: int = 60) -> Optional[PermutationSumWitness]:
    """Try small histogram programs of `build_ilp` under a node limit; None if it gives up.

    Witnesses found this way tend to be much shorter than synthesized ones.
    """
    for f in sorted({fresh, full}):
        if sum(len(v) for v in inst.V) * (len(inst.x) + f) > max_vars:
            break
        ilp, legend = build_ilp(inst, f)
        try:
            sol = ilp_feasible(ilp, stats, node_limit=node_limit)
        except SearchLimitExceeded:
            continue
        if sol is not None:
            return witness_from_solution(inst, legend, sol)
    return None


def is_permutation_sum(inst: ExpressibilityInstance, stats: Optional[SolverStats] = None,
                       incremental: bool = True, literal: bool = False,
                       node_limit: Optional[int] = None) -> Decision:
    """Decide whether x is a permutation sum of V and produce a witness on YES.

    By default the mixed program of `build_core_ilp` is solved; it is
    feasible exactly when the integer program of `build_ilp` is, and all
    of its integer variables are bounded. With `literal` the program of
    `build_ilp` is solved directly; its relaxation is unbounded whenever
    some weights of V cancel, and branch and bound may then run for an
    impractically long time (bound it with `node_limit`).

    Cheap necessary conditions are tried first. With `incremental` the
    program is first solved with fewer fresh columns: a solution there is
    also a solution with all of them, so only a NO needs the full size.
    Witnesses use at most support_bound(inst) data values.
    """
    stats = stats if stats is not None else SolverStats()
    if not inst.x and not any(c for _, c in inst.exact):
        return Decision(True, PermutationSumWitness(), stats, "empty sum")
    reason = necessary_conditions(inst)
    if reason is not None:
        return Decision(False, None, stats, reason)
    full = support_bound(inst) - len(inst.x)
    schedule = _fresh_schedule(full) if incremental else [full]
    core = [] if literal else reversible_core(inst)
    for fresh in schedule:
        if literal:
            ilp, legend = build_ilp(inst, fresh)
        else:
            ilp, legend = build_core_ilp(inst, core, fresh)
        sol = ilp_feasible(ilp, stats, node_limit=node_limit)
        log.debug("fresh=%d vars=%d rows=%d feasible=%s", fresh, ilp.system.nvars,
                  len(ilp.system.rows), sol is not None)
        if sol is not None:
            if literal:
                w = witness_from_solution(inst, legend, sol)
            else:
                w = _direct_witness(inst, fresh, full, stats) or _core_witness(inst, legend, sol)
            return Decision(True, w, stats, f"feasible with {fresh} fresh columns")
    return Decision(False, None, stats, "infeasible with the full column set")


def is_permutation_sum_over(inst: ExpressibilityInstance, domain: Iterable[DataValue],
                            stats: Optional[SolverStats] = None) -> Decision:
    """Exact decision when the data domain is the finite set `domain`.

    Permutations of a finite domain are histograms whose columns lie in
    it, so the histogram program with exactly those columns decides the
    question. Base vectors whose support exceeds the domain cannot be used.
    """
    stats = stats if stats is not None else SolverStats()
    domain = set(domain)
    if not inst.x.support <= domain:
        return Decision(False, stats=stats, reason="supp(x) lies outside the domain")
    usable = [i for i, v in enumerate(inst.V) if len(v) <= len(domain)]
    sub = ExpressibilityInstance([inst.V[i] for i in usable], inst.x,
                                 {usable.index(i): c for i, c in inst.exact if i in usable})
    if any(c and i not in usable for i, c in inst.exact):
        return Decision(False, stats=stats, reason="a pinned base vector does not fit the domain")
    ilp, legend = build_ilp(sub, columns=domain)
    sol = ilp_feasible(ilp, stats)
    if sol is None:
        return Decision(False, stats=stats, reason="no histograms over the domain")
    w = witness_from_solution(sub, legend, sol)
    return Decision(True, PermutationSumWitness((usable[i], p) for i, p in w.terms), stats)


def verify_witness(inst: ExpressibilityInstance, w: PermutationSumWitness) -> bool:
    """True iff the terms sum to x exactly (and match any pinned counts)."""
    return first_mismatch(inst, w) is None


def first_mismatch(inst: ExpressibilityInstance, w: PermutationSumWitness) -> Optional[str]:
    for i, p in w.terms:
        if not 0 <= i < len(inst.V):
            raise WitnessError(f"term refers to base vector {i}, but there are {len(inst.V)}")
        if p.domain != inst.V[i].support:
            raise WitnessError(f"injection domain {sorted(map(str, p.domain))} differs from the "
                               f"support of base vector {i}")
    got = w.value(inst.V, inst.d)
    if got != inst.x:
        diff = got - inst.x
        b = min(diff.support)
        return f"at {b}: witness gives {got[b]}, target is {inst.x[b]}"
    counts = w.counts()
    for i, c in inst.exact:
        if counts.get(i, 0) != c:
            return f"base vector {i} used {counts.get(i, 0)} times, {c} required"
    return None


# -- reversible fast path -------------------------------------------------

def _check_certificate(inst: ExpressibilityInstance, cert: "ReversibleSet") -> None:
    if cert is None or getattr(cert, "vectors", None) != inst.V:
        raise ContractError("the fast path needs a reversibility certificate for exactly this V")
    if inst.exact:
        raise ContractError("the fast path does not support pinned counts")


def value_generators(V: Sequence[DataVector]) -> List[Tuple[int, DataValue, Tuple[int, ...]]]:
    """One (base index, datum, value) per distinct nonzero value occurring in V."""
    seen = {}
    for i, v in enumerate(V):
        for a, t in v.items():
            if t not in seen:
                seen[t] = (i, a, t)
    return [seen[t] for t in sorted(seen)]


def fast_is_permutation_sum(inst: ExpressibilityInstance, cert: "ReversibleSet") -> bool:
    """Decide expressibility over a reversible V with two subgroup tests.

    x is a permutation sum iff weight(x) lies in the subgroup generated by
    the weights of V and each x(α) lies in the subgroup generated by the
    values of V. Assumes an infinite domain, so a datum outside every
    support always exists.
    """
    _check_certificate(inst, cert)
    if not inst.x:
        return True
    d = inst.d
    weights = SubgroupOracle([weight(v) for v in inst.V], d)
    if weight(inst.x) not in weights:
        return False
    values = SubgroupOracle([t for _, _, t in value_generators(inst.V)], d)
    return all(t in values for t in inst.x.values())


def _negate(w: PermutationSumWitness, cert: "ReversibleSet") -> PermutationSumWitness:
    """Witness for the inverse of w's value, via the members' reversal witnesses."""
    out: List[Term] = []
    for i, p in w.terms:
        out.extend(cert.reversal(i).rename(p).terms)
    return PermutationSumWitness(out)


def _scaled(w: PermutationSumWitness, z: int, cert: "ReversibleSet") -> PermutationSumWitness:
    if z >= 0:
        return repeat(w, z)
    return repeat(_negate(w, cert), -z)


def _equalize(w: PermutationSumWitness, S: Iterable[DataValue]) -> PermutationSumWitness:
    S = sorted(set(S))
    out = PermutationSumWitness()
    for i in range(len(S)):
        out = out + w.rename(rotation(S, i))
    return out


def synthesize_reversible_witness(inst: ExpressibilityInstance, cert: "ReversibleSet") -> PermutationSumWitness:
    """Build an explicit witness for a YES instance over a reversible V.

    With δ outside every support, x is written as
    Σ_{α∈supp x} ([α↦x(α)] - [δ↦x(α)]) + [δ↦weight(x)]; each summand is
    produced from rotations, swaps and reversal witnesses.
    """
    _check_certificate(inst, cert)
    if not fast_is_permutation_sum(inst, cert):
        raise ContractError("x is not a permutation sum of V")
    V = inst.V
    d = inst.d
    if not inst.x:
        return PermutationSumWitness()
    T = inst.base_support()
    delta, = fresh_values(T | inst.x.support, 1)
    out = PermutationSumWitness()

    # [α↦g] - [δ↦g] for every α in supp x
    gens = value_generators(V)
    values = SubgroupOracle([t for _, _, t in gens], d)
    anchor = min(T)
    for alpha, g in inst.x.items():
        z = values.coefficients(g)
        # x' with x'(anchor) = g and support inside T
        xw = PermutationSumWitness()
        for (i, a, _), zi in zip(gens, z):
            if zi == 0:
                continue
            s = swap(anchor, a)
            term = PermutationSumWitness([(i, FiniteInjection.identity(V[i].support).then(s))])
            xw = xw + _scaled(term, zi, cert)
        # y = x' - x'∘swap(anchor, δ) = [anchor↦g] - [δ↦g]
        yw = xw + _negate(xw.rename(swap(anchor, delta)), cert)
        out = out + yw.rename(FiniteInjection({anchor: alpha, delta: delta}))

    # [δ↦weight(x)]
    g = weight(inst.x)
    if any(g):
        wgen = SubgroupOracle([weight(v) for v in V], d)
        z = wgen.coefficients(g)
        yw = PermutationSumWitness()
        for i, zi in enumerate(z):
            if zi:
                yw = yw + _scaled(identity_term(i, V[i]), zi, cert)
        S = yw.value(V, d).support
        # R_{S∪{δ}}(y) - R_S(y) = [δ↦weight(y)]
        out = out + _equalize(yw, S | {delta}) + _negate(_equalize(yw, S), cert)
    return out


# -- JSON -----------------------------------------------------------------

def instance_from_json(obj: Mapping) -> ExpressibilityInstance:
    d = obj.get("d")
    V = [vector_from_json(v, d) for v in obj.get("V", [])]
    if "x" not in obj:
        raise ValueError("instance has no target vector 'x'")
    x = vector_from_json(obj["x"], d)
    return ExpressibilityInstance(V, x)


def instance_to_json(inst: ExpressibilityInstance) -> dict:
    return {"d": inst.d, "V": [vector_to_json(v) for v in inst.V], "x": vector_to_json(inst.x)}


def witness_to_json(w: PermutationSumWitness) -> dict:
    return {"terms": [{"base": i, "map": injection_to_json(p)} for i, p in w.terms]}


def witness_from_json(obj: Mapping) -> PermutationSumWitness:
    return PermutationSumWitness((int(t["base"]), injection_from_json(t["map"])) for t in obj["terms"])
