"""Histograms over a finite row set and their decomposition into simple ones.

A histogram of degree n assigns nonnegative integers to (row, column)
pairs so that every row sums to n and every column sums to at most n.
Degree-1 histograms are exactly finite injections. Every histogram of
degree n is a sum of n simple histograms; `decompose` finds such a sum by
repeatedly peeling off a simple histogram that covers all saturated
columns, found with two Hall matchings merged along alternating paths.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, Hashable, Iterable, List, Mapping, Sequence, Tuple

from .core import DataValue, DataVector, DomainError, FiniteInjection

Cell = Tuple[DataValue, DataValue]


class HistogramError(ValueError):
    """Raised when a table violates one of the histogram conditions."""


class MatchingError(ValueError):
    pass


class Histogram:
    __slots__ = ("rows", "entries", "degree")

    def __init__(self, rows: Tuple[DataValue, ...], entries: Dict[Cell, int], degree: int) -> None:
        # use validate(); this constructor trusts its arguments
        self.rows = rows
        self.entries = entries
        self.degree = degree

    def __getitem__(self, cell: Cell) -> int:
        return self.entries.get(cell, 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Histogram):
            return NotImplemented
        return (set(self.rows) == set(other.rows) and self.entries == other.entries
                and self.degree == other.degree)

    def __hash__(self) -> int:
        return hash((frozenset(self.rows), frozenset(self.entries.items()), self.degree))

    def __repr__(self) -> str:
        cells = ", ".join(f"({a},{b}):{k}" for (a, b), k in sorted(self.entries.items()))
        return f"Histogram(degree={self.degree}, rows={[str(r) for r in self.rows]}, {{{cells}}})"

    def __add__(self, other: "Histogram") -> "Histogram":
        return hist_add(self, other)

    def column_sums(self) -> Dict[DataValue, int]:
        sums: Dict[DataValue, int] = defaultdict(int)
        for (_, b), k in self.entries.items():
            sums[b] += k
        return dict(sums)

    @property
    def support(self) -> frozenset:
        return frozenset(self.column_sums())

    @property
    def is_simple(self) -> bool:
        return self.degree == 1

    def columns(self) -> List[DataValue]:
        return sorted(self.support)

    def le(self, other: "Histogram") -> bool:
        return all(k <= other[c] for c, k in self.entries.items())

    def __sub__(self, other: "Histogram") -> "Histogram":
        if set(self.rows) != set(other.rows):
            raise HistogramError("row sets differ")
        out = dict(self.entries)
        for c, k in other.entries.items():
            r = out.get(c, 0) - k
            if r < 0:
                raise HistogramError(f"negative entry at {c}")
            if r:
                out[c] = r
            else:
                out.pop(c, None)
        return validate(self.rows, out)


def validate(rows: Iterable[DataValue], entries: Mapping[Cell, int] | Iterable) -> Histogram:
    """Check both histogram conditions and return the histogram with its degree."""
    rows = tuple(sorted(set(rows)))
    if not rows:
        raise HistogramError("histogram needs a nonempty row set")
    items = entries.items() if isinstance(entries, Mapping) else ((
        (a, b), k) for a, b, k in entries)
    clean: Dict[Cell, int] = {}
    for (a, b), k in items:
        k = int(k)
        if k < 0:
            raise HistogramError(f"negative entry {k} at ({a},{b})")
        if a not in rows:
            raise HistogramError(f"entry row {a} is not in the row set")
        if k:
            clean[(a, b)] = clean.get((a, b), 0) + k
    row_sums = {a: 0 for a in rows}
    for (a, _), k in clean.items():
        row_sums[a] += k
    n = row_sums[rows[0]]
    for a in rows:
        if row_sums[a] != n:
            raise HistogramError(
                f"row sums differ: row {rows[0]} sums to {n}, row {a} sums to {row_sums[a]}")
    h = Histogram(rows, clean, n)
    for b, s in sorted(h.column_sums().items()):
        if s > n:
            raise HistogramError(f"column {b} sums to {s}, exceeding the degree {n}")
    return h


def empty(rows: Iterable[DataValue]) -> Histogram:
    """The degree-0 histogram over `rows`."""
    return validate(rows, {})


def hist_add(h1: Histogram, h2: Histogram) -> Histogram:
    if set(h1.rows) != set(h2.rows):
        raise HistogramError("cannot add histograms over different row sets")
    out = dict(h1.entries)
    for c, k in h2.entries.items():
        out[c] = out.get(c, 0) + k
    return Histogram(h1.rows, out, h1.degree + h2.degree)


def hist_sum(parts: Sequence[Histogram], rows: Iterable[DataValue]) -> Histogram:
    acc = empty(rows)
    for p in parts:
        acc = hist_add(acc, p)
    return acc


def eval_hist(v: DataVector, h: Histogram) -> DataVector:
    """The vector β ↦ Σ_α v(α)·H(α,β); rows of H must be the support of v."""
    if set(h.rows) != v.support:
        raise DomainError("histogram rows must equal the support of the vector")
    acc: Dict[DataValue, List[int]] = {}
    for (a, b), k in h.entries.items():
        t = v[a]
        cur = acc.setdefault(b, [0] * v.d)
        for i, x in enumerate(t):
            cur[i] += k * x
    return DataVector(v.d, acc)


def histogram_from_injection(pi: FiniteInjection) -> Histogram:
    if len(pi) == 0:
        raise HistogramError("injection with empty domain has no histogram")
    return validate(pi.domain, {(a, pi[a]): 1 for a in pi})


def injection_from_simple(h: Histogram) -> FiniteInjection:
    if h.degree != 1:
        raise HistogramError(f"histogram has degree {h.degree}, not 1")
    return FiniteInjection({a: b for (a, b) in h.entries})


# -- matchings ------------------------------------------------------------

def max_bipartite_matching(left: Sequence[Hashable], right: Sequence[Hashable],
                           edges: Iterable[Tuple[Hashable, Hashable]]) -> Dict:
    """Maximum-cardinality matching by augmenting paths (Kuhn's algorithm).

    Left nodes are tried in the given order and neighbours are scanned in
    the order of `right`, so the result is deterministic. Left and right
    live in separate namespaces even when they share labels. Returns a
    dict from matched left nodes to right nodes.
    """
    rank = {r: i for i, r in enumerate(right)}
    adj: Dict[Hashable, List[Hashable]] = {l: [] for l in left}
    for l, r in edges:
        if l in adj and r in rank:
            adj[l].append(r)
    for l in adj:
        adj[l] = sorted(set(adj[l]), key=rank.__getitem__)

    match_r: Dict[Hashable, Hashable] = {}

    def augment(l, seen) -> bool:
        # iterative DFS would only matter for graphs far larger than ours
        for r in adj[l]:
            if r in seen:
                continue
            seen.add(r)
            if r not in match_r or augment(match_r[r], seen):
                match_r[r] = l
                return True
        return False

    for l in left:
        augment(l, set())
    return {l: r for r, l in match_r.items()}


def _check_matching(m: Mapping, edges: set, cover: Iterable, side: str) -> None:
    if len(set(m.values())) != len(m):
        raise MatchingError(f"{side} matching uses a right node twice")
    for l, r in m.items():
        if (l, r) not in edges:
            raise MatchingError(f"{side} matching uses ({l},{r}) which is not a graph edge")


def combine_matchings(m_left: Mapping, m_right: Mapping, edges: Iterable[Tuple],
                      left_cover: Iterable, right_cover: Iterable) -> Dict:
    """Merge a matching of `left_cover` and one of `right_cover` into a
    matching of both.

    Both matchings are left->right dicts. The union of two matchings splits
    into alternating paths and cycles; cycles and paths with an even number
    of nodes have perfect matchings, and a path with an odd number of nodes
    always has an endpoint outside the covers, which is the one left out.
    """
    edges = set(edges)
    L = set(left_cover)
    R = set(right_cover)
    _check_matching(m_left, edges, L, "left")
    _check_matching(m_right, edges, R, "right")
    if not L <= set(m_left):
        raise MatchingError("left matching does not cover the left set")
    if not R <= set(m_right.values()):
        raise MatchingError("right matching does not cover the right set")

    # nodes are tagged to keep the two sides apart
    adj: Dict[Tuple[str, Hashable], List[Tuple[str, Hashable]]] = defaultdict(list)
    union = _ordered(set(m_left.items()) | set(m_right.items()))
    for l, r in union:
        adj[("L", l)].append(("R", r))
        adj[("R", r)].append(("L", l))
    required = {("L", l) for l in L} | {("R", r) for r in R}

    result: Dict = {}
    seen = set()

    def take(path):
        for a, b in path:
            l, r = (a, b) if a[0] == "L" else (b, a)
            result[l[1]] = r[1]

    for start in _ordered(adj):
        if start in seen:
            continue
        # collect the component
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        ends = [u for u in comp if len(adj[u]) == 1]
        if not ends:
            # cycle: alternate edges starting anywhere
            nodes = _walk(comp[0], adj, cycle=True)
            take([(nodes[i], nodes[i + 1]) for i in range(0, len(nodes), 2)])
            continue
        nodes = _walk(_ordered(ends)[0], adj, cycle=False)
        if len(nodes) % 2 == 0:
            take([(nodes[i], nodes[i + 1]) for i in range(0, len(nodes), 2)])
        else:
            if nodes[0] not in required:
                nodes = nodes[1:]
            elif nodes[-1] not in required:
                nodes = nodes[:-1]
            else:
                raise MatchingError("odd path with both endpoints required; inputs are not matchings")
            take([(nodes[i], nodes[i + 1]) for i in range(0, len(nodes), 2)])
    return result


def _ordered(items) -> list:
    try:
        return sorted(items)
    except TypeError:
        return sorted(items, key=repr)


def _walk(start, adj, cycle: bool) -> list:
    nodes = [start]
    prev = None
    cur = start
    while True:
        nxt = [w for w in adj[cur] if w != prev]
        if not nxt:
            break
        w = nxt[0]
        if cycle and w == start:
            break
        if w in nodes:
            break
        nodes.append(w)
        prev, cur = cur, w
    return nodes


# -- decomposition --------------------------------------------------------

def extract_simple(h: Histogram) -> Tuple[Histogram, Histogram]:
    """Split off a simple X ≤ H covering every saturated column.

    Returns (X, H - X); the remainder is a histogram of degree n-1.
    """
    if h.degree < 1:
        raise HistogramError("cannot extract a simple histogram from degree 0")
    rows = list(h.rows)
    cols = h.columns()
    edges = sorted(h.entries)
    sums = h.column_sums()
    saturated = [b for b in cols if sums[b] == h.degree]
    m_rows = max_bipartite_matching(rows, cols, edges)
    if len(m_rows) != len(rows):
        raise HistogramError("no matching of the rows; the input is not a histogram")
    m_sat = max_bipartite_matching(saturated, rows, [(b, a) for a, b in edges])
    if len(m_sat) != len(saturated):
        raise HistogramError("no matching of the saturated columns; the input is not a histogram")
    m_sat_lr = {a: b for b, a in m_sat.items()}
    merged = combine_matchings(m_rows, m_sat_lr, edges, rows, saturated)
    x = Histogram(h.rows, {(a, merged[a]): 1 for a in rows}, 1)
    return x, h - x


def decompose(h: Histogram) -> List[Histogram]:
    """Write H as a list of degree(H) simple histograms summing to H."""
    parts = []
    while h.degree > 0:
        x, h = extract_simple(h)
        parts.append(x)
    return parts


# -- JSON -----------------------------------------------------------------

def histogram_to_json(h: Histogram) -> dict:
    return {
        "rows": [str(a) for a in h.rows],
        "entries": [[str(a), str(b), k] for (a, b), k in sorted(h.entries.items())],
    }


def histogram_from_json(obj: Mapping) -> Histogram:
    from .core import datum

    rows = [datum(str(a)) for a in obj["rows"]]
    triples = []
    for item in obj.get("entries", []):
        if len(item) != 3:
            raise HistogramError(f"histogram entry {item!r} is not [row, column, count]")
        a, b, k = item
        if not isinstance(k, int):
            raise HistogramError(f"histogram entry count {k!r} is not an integer")
        triples.append((datum(str(a)), datum(str(b)), k))
    return validate(rows, triples)
