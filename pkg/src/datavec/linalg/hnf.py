"""Column Hermite normal form and membership in finitely generated subgroups of Z^d."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

Matrix = List[List[int]]


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(A))]


def det(M: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1]


def _col_combine(M: Matrix, p: int, j: int, a: int, b: int, c: int, d: int) -> None:
    """Replace columns (p, j) by (a*col_p + c*col_j, b*col_p + d*col_j)."""
    for row in M:
        x, y = row[p], row[j]
        row[p] = a * x + c * y
        row[j] = b * x + d * y


def hnf(M: Sequence[Sequence[int]], transform: bool = True) -> Tuple[Matrix, Optional[Matrix]]:
    """Column-style Hermite normal form.

    Returns (H, U) with M·U = H, U unimodular and H lower triangular in the
    echelon sense: pivots move strictly right going down, pivots are
    positive, entries left of a pivot are reduced into [0, pivot), and the
    columns after the last pivot are zero.
    """
    H = [list(map(int, r)) for r in M]
    m = len(H)
    n = len(H[0]) if m else 0
    U = identity(n) if transform else None
    p = 0
    for i in range(m):
        if p >= n:
            break
        row = H[i]
        for j in range(p + 1, n):
            if row[j] == 0:
                continue
            a, b = row[p], row[j]
            g, s, t = xgcd(a, b)
            # [[s, -b/g], [t, a/g]] has determinant 1
            _col_combine(H, p, j, s, -b // g, t, a // g)
            if U is not None:
                _col_combine(U, p, j, s, -b // g, t, a // g)
        if row[p] == 0:
            continue
        if row[p] < 0:
            for r in H:
                r[p] = -r[p]
            if U is not None:
                for r in U:
                    r[p] = -r[p]
        piv = row[p]
        for k in range(p):
            q = row[k] // piv
            if q:
                for r in H:
                    r[k] -= q * r[p]
                if U is not None:
                    for r in U:
                        r[k] -= q * r[p]
        p += 1
    return H, U


def solve_hnf(H: Matrix, target: Sequence[int]) -> Optional[List[int]]:
    """Solve H·y = target for integer y, H in the form produced by `hnf`."""
    m = len(H)
    n = len(H[0]) if m else 0
    y = [0] * n
    p = 0
    for i in range(m):
        acc = target[i] - sum(H[i][k] * y[k] for k in range(min(p, n)))
        if p < n and H[i][p] != 0:
            q, r = divmod(acc, H[i][p])
            if r:
                return None
            y[p] = q
            p += 1
        elif acc != 0:
            return None
    return y


def subgroup_member(target: Sequence[int], generators: Sequence[Sequence[int]]) -> Optional[List[int]]:
    """Integers z with Σ z_i·generators[i] = target, or None if there are none."""
    d = len(target)
    for g in generators:
        if len(g) != d:
            raise ValueError(f"generator {tuple(g)} does not have dimension {d}")
    if not any(target):
        return [0] * len(generators)
    if not generators:
        return None
    M = [[g[i] for g in generators] for i in range(d)]
    H, U = hnf(M)
    y = solve_hnf(H, target)
    if y is None:
        return None
    k = len(generators)
    return [sum(U[i][j] * y[j] for j in range(k)) for i in range(k)]


class SubgroupOracle:
    """One HNF of the generators, many membership queries."""

    def __init__(self, generators: Sequence[Sequence[int]], d: int) -> None:
        self.generators = [tuple(g) for g in generators]
        self.d = d
        for g in self.generators:
            if len(g) != d:
                raise ValueError(f"generator {g} does not have dimension {d}")
        if self.generators:
            M = [[g[i] for g in self.generators] for i in range(d)]
            self._H, self._U = hnf(M)
        else:
            self._H, self._U = None, None

    def coefficients(self, target: Sequence[int]) -> Optional[List[int]]:
        if len(target) != self.d:
            raise ValueError(f"target {tuple(target)} does not have dimension {self.d}")
        k = len(self.generators)
        if not any(target):
            return [0] * k
        if self._H is None:
            return None
        y = solve_hnf(self._H, target)
        if y is None:
            return None
        return [sum(self._U[i][j] * y[j] for j in range(k)) for i in range(k)]

    def __contains__(self, target: Sequence[int]) -> bool:
        return self.coefficients(target) is not None


def lattice_basis(generators: Sequence[Sequence[int]], d: int) -> Tuple[Matrix, List[int]]:
    """Basis of the subgroup generated by `generators`, as HNF columns.

    Returns (B, pivots): B is d x r with the r nonzero HNF columns, and
    pivots[j] is the row of the leading entry of column j.
    """
    if not generators:
        return [[] for _ in range(d)], []
    M = [[g[i] for g in generators] for i in range(d)]
    H, _ = hnf(M, transform=False)
    r = 0
    pivots = []
    for i in range(d):
        if r < len(H[i]) and H[i][r] != 0:
            pivots.append(i)
            r += 1
    return [row[:r] for row in H], pivots


def is_whole_lattice(B: Matrix, pivots: Sequence[int], d: int) -> bool:
    """Does the basis generate all of Z^d?"""
    return len(pivots) == d and all(B[p][j] == 1 for j, p in enumerate(pivots))


def coefficient_bounds(B: Matrix, pivots: Sequence[int], bounds: Sequence[int]) -> List[int]:
    """Bounds on |z_j| over all integer z with |(B·z)_i| <= bounds[i] for every row i."""
    out: List[int] = []
    for j, p in enumerate(pivots):
        acc = bounds[p] + sum(abs(B[p][i]) * out[i] for i in range(j))
        out.append(acc // B[p][j] + 1)
    return out
