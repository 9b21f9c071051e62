"""Nonnegative integer feasibility by branch and bound on exact LP relaxations.

Search is complete. Without caller-supplied upper bounds every variable is
capped by the classical bound on minimal solutions of integer programs,
n·(m·a+1)^(2m+1) for m equations in n nonnegative unknowns with largest
absolute coefficient a; a feasible system always has a solution inside the
caps, so exhausting the capped tree proves infeasibility.

Caps are enforced lazily: they only enter an LP once a relaxation
violates them. Before branching, the equality rows are checked for an
integer (possibly negative) solution with a Hermite normal form, which
settles parity-type obstructions that LP branching would only discover by
exhausting the caps.

Variables flagged continuous are never branched on and never capped. The
caps argument above covers pure integer programs only, so mixed programs
terminate when their constraints bound the integer variables.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence

from .hnf import subgroup_member
from .simplex import LinearSystem, SolverStats, _phase_one

log = logging.getLogger(__name__)


class SearchLimitExceeded(RuntimeError):
    """Raised when branch and bound exceeds a caller-imposed node limit."""


@dataclass
class IlpInstance:
    system: LinearSystem
    upper: Optional[List[Optional[int]]] = None
    continuous: FrozenSet[int] = frozenset()

    def __post_init__(self) -> None:
        self.continuous = frozenset(self.continuous)
        for j in self.continuous:
            if not 0 <= j < self.system.nvars:
                raise ValueError(f"continuous variable index {j} out of range")
        if self.upper is not None:
            if len(self.upper) != self.system.nvars:
                raise ValueError("upper bounds must cover every variable")
            for u in self.upper:
                if u is not None and (int(u) != u or u < 0):
                    raise ValueError("upper bounds must be nonnegative integers")


def _integer_rows(system: LinearSystem):
    """Rows scaled to integer coefficients, in equation form with slacks counted."""
    out = []
    for row, rel, b in zip(system.rows, system.relations, system.rhs):
        den = 1
        for c in list(row.values()) + [b]:
            den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
        out.append(({j: int(Fraction(c) * den) for j, c in row.items()}, rel, int(Fraction(b) * den)))
    return out


def minimal_solution_cap(system: LinearSystem) -> int:
    """Cap on every entry of some solution, if any nonnegative integer one exists.

    Computed on the equation form (one slack per inequality, variables
    shifted to their lower bounds).
    """
    rows = _integer_rows(system)
    m = max(len(rows), 1)
    n = system.nvars + sum(1 for _, rel, _ in rows if rel != "=")
    a = 1
    lower = [math.ceil(system.lower_bound(j)) for j in range(system.nvars)]
    for coeffs, _, b in rows:
        shifted = b - sum(c * lower[j] for j, c in coeffs.items())
        a = max([a, abs(shifted)] + [abs(c) for c in coeffs.values()])
    return n * (m * a + 1) ** (2 * m + 1)


def lattice_feasible(system: LinearSystem, continuous: FrozenSet[int] = frozenset()) -> bool:
    """Do the equality rows have an integer solution (signs unconstrained)?

    Rows mentioning a continuous variable are left out.
    """
    eq = [(coeffs, b) for coeffs, rel, b in _integer_rows(system)
          if rel == "=" and not continuous.intersection(coeffs)]
    if not eq:
        return True
    used = sorted({j for coeffs, _ in eq for j in coeffs})
    for coeffs, b in eq:
        if not coeffs and b:
            return False
    lower = {j: math.ceil(system.lower_bound(j)) for j in used}
    gens = [[coeffs.get(j, 0) for coeffs, _ in eq] for j in used]
    target = [b - sum(c * lower[j] for j, c in coeffs.items()) for coeffs, b in eq]
    if not gens:
        return not any(target)
    return subgroup_member(target, gens) is not None


def ilp_feasible(inst: IlpInstance, stats: Optional[SolverStats] = None,
                 node_limit: Optional[int] = None) -> Optional[List[int]]:
    """Return an integer solution of the instance, or None if there is none.

    Depth-first branch and bound: branch on the most fractional variable
    (lowest index on ties) and explore the floor branch first.
    """
    system = inst.system
    n = system.nvars
    stats = stats if stats is not None else SolverStats()
    cont = inst.continuous
    if not lattice_feasible(system, cont):
        log.debug("equality rows have no integer solution")
        return None

    if inst.upper is not None and all(u is not None for u in inst.upper):
        caps = [int(u) for u in inst.upper]
    else:
        default = minimal_solution_cap(system)
        lows = [math.ceil(system.lower_bound(j)) for j in range(n)]
        caps = [int(inst.upper[j]) if inst.upper is not None and inst.upper[j] is not None
                else None if j in cont else lows[j] + default for j in range(n)]
    lower0 = {j: math.ceil(system.lower_bound(j)) for j in range(n)
              if j not in cont and system.lower_bound(j) != math.ceil(system.lower_bound(j))}
    explicit = {j: caps[j] for j in range(n)
                if inst.upper is not None and inst.upper[j] is not None}

    base_lo = [math.ceil(system.lower_bound(j)) for j in range(n)]
    stack = [(lower0, explicit)]
    nodes = 0
    while stack:
        lo, hi = stack.pop()
        stats.nodes += 1
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise SearchLimitExceeded(f"more than {node_limit} branch-and-bound nodes")
        if any(j not in cont and lo.get(j, base_lo[j]) > hi[j] for j in hi):
            continue
        sol = _phase_one(_with_lower(system, lo), hi, stats)
        if sol is None:
            continue
        over = {j: caps[j] for j in range(n)
                if j not in hi and caps[j] is not None and sol[j] > caps[j]}
        if over:
            hi = dict(hi)
            hi.update(over)
            stack.append((lo, hi))
            continue
        branch = None
        best = None
        for j in range(n):
            q = sol[j]
            if q.denominator != 1 and j not in cont:
                # distance of the fractional part from 1/2, doubled
                dist = abs(2 * (q - math.floor(q)) - 1)
                if best is None or dist < best:
                    best, branch = dist, j
        if branch is None:
            return [Fraction(int(q.numerator), int(q.denominator)) if j in cont else int(q)
                    for j, q in enumerate(sol)]
        q = sol[branch]
        fl = int(math.floor(q))
        up_lo = dict(lo)
        up_lo[branch] = fl + 1
        if caps[branch] is None or up_lo[branch] <= caps[branch]:
            stack.append((up_lo, hi))
        down_hi = dict(hi)
        down_hi[branch] = fl
        stack.append((lo, down_hi))
    return None


def _with_lower(system: LinearSystem, lo: Dict[int, int]) -> LinearSystem:
    if not lo:
        return system
    lower = [system.lower_bound(j) for j in range(system.nvars)]
    for j, v in lo.items():
        lower[j] = max(lower[j], Fraction(v))
    return LinearSystem(system.nvars, system.rows, system.rhs, system.relations, lower)


def solution_ok(inst: IlpInstance, x: Sequence) -> bool:
    if any(int(v) != v for j, v in enumerate(x) if j not in inst.continuous):
        return False
    if inst.upper is not None:
        if any(u is not None and v > u for v, u in zip(x, inst.upper)):
            return False
    return inst.system.satisfied_by([Fraction(v) for v in x])
