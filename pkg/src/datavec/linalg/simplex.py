"""Exact LP feasibility by the simplex method over the rationals.

Only feasibility is needed, so the solver runs the first (auxiliary)
phase: minimise the sum of artificial variables. The second phase would
optimise a zero objective and is a no-op.

Entering columns follow the largest-coefficient rule until a run of
degenerate pivots, after which Bland's rule takes over for the rest of
the solve; Bland's rule cannot cycle, so the solve terminates.

Rows are stored sparsely as dicts; arithmetic uses gmpy2 rationals when
available and `fractions.Fraction` otherwise. Results are returned as
`Fraction`s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

RELATIONS = ("=", "<=", ">=")

# consecutive degenerate pivots tolerated before switching to Bland's rule
BLAND_AFTER = 50


@dataclass
class SolverStats:
    lp_calls: int = 0
    pivots: int = 0
    nodes: int = 0

    def as_dict(self) -> dict:
        return {"lp_calls": self.lp_calls, "pivots": self.pivots, "nodes": self.nodes}


@dataclass
class LinearSystem:
    """Rows ``Σ A[i][j]·x_j (rel_i) b_i`` over variables with lower bounds.

    Rows are sparse mappings from variable index to coefficient. Variables
    are bounded below by `lower` (default 0) and unbounded above.
    """

    nvars: int
    rows: List[Dict[int, Fraction]] = field(default_factory=list)
    rhs: List[Fraction] = field(default_factory=list)
    relations: List[str] = field(default_factory=list)
    lower: Optional[List[Fraction]] = None
    names: Optional[List[str]] = None

    def __post_init__(self) -> None:
        if not (len(self.rows) == len(self.rhs) == len(self.relations)):
            raise ValueError("rows, rhs and relations must have equal length")
        for rel in self.relations:
            if rel not in RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
        for row in self.rows:
            for j in row:
                if not 0 <= j < self.nvars:
                    raise ValueError(f"variable index {j} out of range")
        if self.lower is not None and len(self.lower) != self.nvars:
            raise ValueError("lower bounds must cover every variable")

    @classmethod
    def dense(cls, A: Sequence[Sequence], b: Sequence, relations: Sequence[str] | str = "=",
              lower: Optional[Sequence] = None) -> "LinearSystem":
        n = len(A[0]) if A else 0
        if isinstance(relations, str):
            relations = [relations] * len(A)
        rows = [{j: Fraction(c) for j, c in enumerate(r) if c} for r in A]
        return cls(n, rows, [Fraction(x) for x in b], list(relations),
                   None if lower is None else [Fraction(x) for x in lower])

    def add_row(self, coeffs: Mapping[int, object], rel: str, b) -> int:
        if rel not in RELATIONS:
            raise ValueError(f"unknown relation {rel!r}")
        self.rows.append({j: Fraction(c) for j, c in coeffs.items() if c})
        self.relations.append(rel)
        self.rhs.append(Fraction(b))
        return len(self.rows) - 1

    def lower_bound(self, j: int) -> Fraction:
        return Fraction(0) if self.lower is None else self.lower[j]

    def satisfied_by(self, x: Sequence) -> bool:
        if len(x) != self.nvars:
            return False
        for j in range(self.nvars):
            if x[j] < self.lower_bound(j):
                return False
        for row, rel, b in zip(self.rows, self.relations, self.rhs):
            lhs = sum(Fraction(c) * x[j] for j, c in row.items())
            if rel == "=" and lhs != b or rel == "<=" and lhs > b or rel == ">=" and lhs < b:
                return False
        return True

    def to_text(self) -> str:
        """Plain-text dump: one row per line, dense coefficients as p/q."""
        lines = []
        for row, rel, b in zip(self.rows, self.relations, self.rhs):
            coeffs = " ".join(_qstr(row.get(j, 0)) for j in range(self.nvars))
            lines.append(f"{coeffs} {rel} {_qstr(b)}")
        if self.lower is not None:
            lines.append("lower " + " ".join(_qstr(x) for x in self.lower))
        return "\n".join(lines) + ("\n" if lines else "")


def _qstr(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def lp_feasible(system: LinearSystem, upper: Optional[Mapping[int, object]] = None,
                stats: Optional[SolverStats] = None) -> Optional[List[Fraction]]:
    """Return a rational point satisfying every row and bound, or None.

    `upper` optionally bounds variables from above. The point returned is
    a basic feasible solution and is the same for identical inputs.
    """
    sol = _phase_one(system, upper or {}, stats)
    if sol is None:
        return None
    return [Fraction(int(q.numerator), int(q.denominator)) for q in sol]


def _phase_one(system: LinearSystem, upper: Mapping[int, object],
               stats: Optional[SolverStats]) -> Optional[list]:
    if stats is not None:
        stats.lp_calls += 1
    n = system.nvars
    lower = [_Q(system.lower_bound(j)) for j in range(n)]

    # shifted rows: y = x - lower >= 0
    rows: List[Dict[int, object]] = []
    rhs: List[object] = []
    rels: List[str] = []
    for row, rel, b in zip(system.rows, system.relations, system.rhs):
        r = {j: _Q(c) for j, c in row.items()}
        bb = _Q(b) - sum((c * lower[j] for j, c in r.items()), _Q(0))
        rows.append(r)
        rhs.append(bb)
        rels.append(rel)
    for j, u in sorted(upper.items()):
        cap = _Q(u) - lower[j]
        if cap < 0:
            return None
        rows.append({j: _Q(1)})
        rhs.append(cap)
        rels.append("<=")

    m = len(rows)
    nxt = n
    basis: List[int] = [-1] * m
    artificial_start = None
    # slack / surplus columns
    for i in range(m):
        if rels[i] == "<=":
            rows[i][nxt] = _Q(1)
        elif rels[i] == ">=":
            rows[i][nxt] = _Q(-1)
        else:
            continue
        slack = nxt
        nxt += 1
        if rhs[i] < 0:
            rows[i] = {j: -c for j, c in rows[i].items()}
            rhs[i] = -rhs[i]
        if rows[i][slack] == 1:
            basis[i] = slack
    for i in range(m):
        if basis[i] >= 0:
            continue
        if rhs[i] < 0:
            rows[i] = {j: -c for j, c in rows[i].items()}
            rhs[i] = -rhs[i]
        if not rows[i]:
            if rhs[i] != 0:
                return None
            # empty row 0 = 0: keep a zero artificial to hold the basis slot
        if artificial_start is None:
            artificial_start = nxt
        rows[i][nxt] = _Q(1)
        basis[i] = nxt
        nxt += 1
    if artificial_start is None:
        artificial_start = nxt

    # reduced costs of the auxiliary objective: minimise Σ artificials
    cost: Dict[int, object] = {}
    value = _Q(0)
    for i in range(m):
        if basis[i] >= artificial_start:
            value += rhs[i]
            for j, c in rows[i].items():
                if j < artificial_start:
                    cost[j] = cost.get(j, 0) - c
    cost = {j: c for j, c in cost.items() if c != 0}

    pivots = 0
    degenerate = 0
    while value > 0:
        if degenerate < BLAND_AFTER:
            # largest coefficient rule, lowest index on ties
            enter = None
            best_c = 0
            for j, c in cost.items():
                if c < best_c or (c == best_c and c < 0 and j < enter):
                    enter, best_c = j, c
        else:
            enter = min((j for j, c in cost.items() if c < 0), default=None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = rows[i].get(enter)
            if a is not None and a > 0:
                ratio = rhs[i] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            # cannot happen in phase one: the objective is bounded below
            raise ArithmeticError("unbounded auxiliary problem")
        r = best[1]
        degenerate = degenerate + 1 if rhs[r] == 0 else 0
        piv = rows[r][enter]
        prow = {j: c / piv for j, c in rows[r].items()}
        leaving = basis[r]
        if leaving >= artificial_start:
            prow.pop(leaving, None)
        prhs = rhs[r] / piv
        rows[r] = prow
        rhs[r] = prhs
        basis[r] = enter
        for i in range(m):
            if i == r:
                continue
            row = rows[i]
            f = row.get(enter)
            if f is None:
                continue
            for j, c in prow.items():
                nv = row.get(j, 0) - f * c
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
            rhs[i] -= f * prhs
        f = cost.get(enter)
        if f is not None:
            for j, c in prow.items():
                if j >= artificial_start:
                    continue
                nv = cost.get(j, 0) - f * c
                if nv:
                    cost[j] = nv
                else:
                    cost.pop(j, None)
            value += f * prhs
        pivots += 1

    if stats is not None:
        stats.pivots += pivots
    if value != 0:
        return None
    sol = list(lower)
    for i in range(m):
        j = basis[i]
        if j < n:
            sol[j] = lower[j] + rhs[i]
    return sol


def cone_combination(target: Sequence, generators: Sequence[Sequence]) -> Optional[List[Fraction]]:
    """λ >= 0 with Σ λ_i·generators[i] = target, or None."""
    system = LinearSystem(len(generators))
    for c in range(len(target)):
        system.add_row({i: g[c] for i, g in enumerate(generators) if g[c]}, "=", target[c])
    return lp_feasible(system)
