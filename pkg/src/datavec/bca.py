"""Unordered data blind counter automata: model, steps and reachability.

Edges add data vectors, renamed by arbitrary permutations, to a store
that is never tested. Reachability from (q0, x0) to (qf, xf) is reduced
to expressibility: a run consists of a short skeleton walk visiting a set
S of states plus a multiset of cycles through S. Cycles are recognised
through |Q| auxiliary counters that every edge (p, q) moves from p to q;
a multiset of edges is a union of cycles exactly when those counters
balance.

The guessed instantiations of the skeleton's labels are not enumerated.
Each skeleton edge becomes a base vector used exactly once (its label
padded with zero auxiliary coordinates), so the integer program chooses
their renamings along with those of the cycle edges. An `enumerate`
mode that instantiates the skeleton explicitly is available for
cross-checking.
"""

from __future__ import annotations

import logging
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .core import DataValue, DataVector, FiniteInjection, apply_injection, datum, fresh_values
from .expressibility import Decision, ExpressibilityInstance, is_permutation_sum
from .linalg import SolverStats
from .oracle import canonical_injections
from .syntax import Cursor, ParseError

log = logging.getLogger(__name__)

YES = "YES"
NO = "NO"
NO_UP_TO_BOUND = "NO_UP_TO_BOUND"
INCONCLUSIVE_CAPPED = "INCONCLUSIVE_CAPPED"


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    label: DataVector


@dataclass(frozen=True)
class Bca:
    """States Q, edges (listed in order; the index is the edge id) and label dimension k."""

    states: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    k: int
    aux_datum: Optional[DataValue] = None

    def __post_init__(self) -> None:
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state")
        for e in self.edges:
            if e.source not in self.states or e.target not in self.states:
                raise ValueError(f"edge {e.source} -> {e.target} uses an undeclared state")
            if e.label.d != self.k:
                raise ValueError(f"label of dimension {e.label.d}, expected {self.k}")

    def outgoing(self, q: str) -> List[int]:
        return [i for i, e in enumerate(self.edges) if e.source == q]


@dataclass(frozen=True)
class Configuration:
    state: str
    vector: DataVector


def parse_bca(text: str) -> Bca:
    """Parse `state q0 qf;` and `edge q0 -> q1 label {α: [1, 0]};`; optional `dim k;`."""
    cur = Cursor(text)
    states: List[str] = []
    raw_edges = []
    k: Optional[int] = None
    while not cur.at_end():
        tok = cur.next()
        if tok.kind != "name":
            raise ParseError(f"expected a declaration, found {tok.text!r}", tok.line)
        if tok.text in ("state", "states"):
            for name in cur.names_until(";"):
                if name.text in states:
                    raise ParseError(f"duplicate state {name.text!r}", name.line)
                states.append(name.text)
        elif tok.text == "dim":
            line = cur.line
            k = cur.integer()
            if k < 1:
                raise ParseError("dimension must be positive", line)
            cur.expect(";")
        elif tok.text == "edge":
            src = cur.expect("name")
            cur.expect("->")
            dst = cur.expect("name")
            for s in (src, dst):
                if s.text not in states:
                    raise ParseError(f"undeclared state {s.text!r}", s.line)
            entries: Dict[str, List[int]] = {}
            if cur.accept("name", "label"):
                cur.expect("{")
                if not cur.accept("}"):
                    while True:
                        a = cur.expect("name")
                        cur.expect(":")
                        cur.expect("[")
                        vals = [cur.integer()]
                        while cur.accept(","):
                            vals.append(cur.integer())
                        cur.expect("]")
                        if a.text in entries:
                            raise ParseError(f"datum {a.text!r} listed twice", a.line)
                        entries[a.text] = vals
                        if cur.accept("}"):
                            break
                        cur.expect(",")
            cur.expect(";")
            raw_edges.append((src, dst, entries))
        else:
            raise ParseError(f"unknown declaration {tok.text!r}", tok.line)
    dims = {len(v) for _, _, ent in raw_edges for v in ent.values()}
    if k is None:
        k = dims.pop() if len(dims) == 1 else (1 if not dims else None)
        if k is None:
            raise ParseError("labels have different dimensions")
    edges = []
    for src, dst, ent in raw_edges:
        for a, v in ent.items():
            if len(v) != k:
                raise ParseError(f"label entry {a!r} has dimension {len(v)}, expected {k}", src.line)
        edges.append(Edge(src.text, dst.text, DataVector(k, {datum(a): v for a, v in ent.items()})))
    return Bca(tuple(states), tuple(edges), k)


def format_bca(a: Bca) -> str:
    lines = ["state " + " ".join(a.states) + ";", f"dim {a.k};"]
    for e in a.edges:
        lab = ", ".join(f"{x}: [{', '.join(map(str, t))}]" for x, t in e.label.items())
        lines.append(f"edge {e.source} -> {e.target} label {{{lab}}};")
    return "\n".join(lines) + "\n"


# -- semantics ------------------------------------------------------------

def step(a: Bca, c: Configuration, e: int, theta: FiniteInjection) -> Configuration:
    """(q, f) --e--> (q', f + L(e)∘θ⁻¹)."""
    edge = a.edges[e]
    if edge.source != c.state:
        raise ValueError(f"edge {e} starts in {edge.source}, not in {c.state}")
    return Configuration(edge.target, c.vector + apply_injection(edge.label, theta))


def augment_counters(a: Bca, avoid: Sequence[DataValue] = ()) -> Bca:
    """Add one auxiliary coordinate per state; edge (p, q) moves one unit from p to q at datum c.

    c is a single fresh datum, outside every label support and `avoid`.
    """
    used = set(avoid)
    for e in a.edges:
        used |= e.label.support
    c, = fresh_values(used, 1)
    n = len(a.states)
    edges = []
    for e in a.edges:
        entries = {x: tuple(t) + (0,) * n for x, t in e.label.items()}
        aux = [0] * n
        aux[a.states.index(e.target)] += 1
        aux[a.states.index(e.source)] -= 1
        if any(aux):
            entries[c] = (0,) * a.k + tuple(aux)
        edges.append(Edge(e.source, e.target, DataVector(a.k + n, entries)))
    return Bca(a.states, tuple(edges), a.k + n, c)


# -- skeletons ------------------------------------------------------------

@dataclass(frozen=True)
class SkeletonPath:
    states: Tuple[str, ...]
    edges: Tuple[int, ...]
    instantiation: Optional[Tuple[FiniteInjection, ...]] = None

    @property
    def visited(self) -> frozenset:
        return frozenset(self.states)

    def __len__(self) -> int:
        return len(self.edges)


def _removable_loop(states: Sequence[str]) -> bool:
    """Does the walk contain a closed sub-walk whose removal keeps the visited set?"""
    n = len(states)
    for i in range(n):
        for j in range(i + 1, n):
            if states[i] != states[j]:
                continue
            outside = Counter(states[:i + 1]) + Counter(states[j + 1:])
            if all(outside[q] for q in states[i + 1:j + 1]):
                return True
    return False


def skeleton_paths(a: Bca, q0: str, qf: str, minimal: bool = False,
                   max_length: Optional[int] = None) -> Iterator[SkeletonPath]:
    """Walks from q0 to qf of length at most |Q|² (or `max_length`), shortest first.

    With `minimal`, walks containing a closed sub-walk that can be cut
    without losing a visited state are skipped; such a sub-walk can
    always be taken by the cycle part instead.
    """
    limit = len(a.states) ** 2 if max_length is None else max_length
    layer = [((q0,), ())]
    for length in range(limit + 1):
        nxt = []
        for states, edges in layer:
            if minimal and _removable_loop(states):
                continue
            if states[-1] == qf:
                yield SkeletonPath(states, edges)
            if length < limit:
                for e in a.outgoing(states[-1]):
                    nxt.append((states + (a.edges[e].target,), edges + (e,)))
        layer = nxt


def instantiations(a: Bca, path: SkeletonPath, distinguished: Sequence[DataValue],
                   pool: Sequence[DataValue]) -> Iterator[SkeletonPath]:
    """The path with every combination of canonical injections of its labels.

    Images lie in `distinguished` plus fresh values from `pool`, fresh
    values being introduced in ascending order across the whole path.
    """
    def go(k: int, used_fresh: int, chosen: List[FiniteInjection]) -> Iterator[SkeletonPath]:
        if k == len(path.edges):
            yield SkeletonPath(path.states, path.edges, tuple(chosen))
            return
        label = a.edges[path.edges[k]].label
        existing = list(distinguished) + list(pool[:used_fresh])
        for pi in canonical_injections(sorted(label.support), existing, pool[used_fresh:]):
            new = sum(1 for b in pi.image if b in pool[used_fresh:])
            chosen.append(pi)
            yield from go(k + 1, used_fresh + new, chosen)
            chosen.pop()

    yield from go(0, 0, [])


def skeletons(a: Bca, q0: str, qf: str, x0: Optional[DataVector] = None, xf: Optional[DataVector] = None,
              minimal: bool = False) -> Iterator[SkeletonPath]:
    """Skeleton walks paired with canonical instantiations.

    Images lie in supp(x0) ∪ supp(xf) plus a fresh pool with as many
    values as the labels along the walk have support entries in total.
    """
    zero = DataVector.zero(a.k)
    x0 = zero if x0 is None else x0
    xf = zero if xf is None else xf
    dist = sorted(x0.support | xf.support)
    for path in skeleton_paths(a, q0, qf, minimal=minimal):
        size = sum(len(a.edges[e].label) for e in path.edges)
        pool = fresh_values(set(dist) | {b for e in a.edges for b in e.label.support}, size)
        yield from instantiations(a, path, dist, pool)


# -- reachability ---------------------------------------------------------

@dataclass
class ReachResult:
    answer: str
    skeleton: Optional[SkeletonPath] = None
    decision: Optional[Decision] = None
    skeletons_tried: int = 0
    stats: SolverStats = field(default_factory=SolverStats)

    def __bool__(self) -> bool:
        return self.answer == YES


def _pad(v: DataVector, d: int) -> DataVector:
    return v.pad(d)


def folded_instance(a: Bca, aug: Bca, path: SkeletonPath, x0: DataVector, xf: DataVector) -> ExpressibilityInstance:
    """Skeleton labels (zero auxiliary part, used exactly as often as the walk takes them)
    and augmented labels of edges leaving the visited states (any number of times)."""
    d = aug.k
    V: List[DataVector] = []
    pins: Dict[int, int] = {}
    for e, c in sorted(Counter(path.edges).items()):
        lab = a.edges[e].label
        if lab:
            pins[len(V)] = c
            V.append(_pad(lab, d))
    for e, edge in enumerate(aug.edges):
        if edge.source in path.visited and edge.label:
            V.append(edge.label)
    return ExpressibilityInstance(V, _pad(xf - x0, d), pins)


def _residual_instance(a: Bca, aug: Bca, path: SkeletonPath, x0: DataVector,
                       xf: DataVector) -> ExpressibilityInstance:
    d = aug.k
    rest = xf - x0
    for e, pi in zip(path.edges, path.instantiation):
        rest = rest - apply_injection(a.edges[e].label, pi)
    V = [edge.label for edge in aug.edges if edge.source in path.visited and edge.label]
    return ExpressibilityInstance(V, _pad(rest, d))


def reachable(a: Bca, c0: Configuration, cf: Configuration, cap: int = 10_000,
              method: str = "fold", stats: Optional[SolverStats] = None) -> ReachResult:
    """Decide (q0, x0) ->* (qf, xf).

    `cap` bounds the number of skeletons (or, with method "enumerate",
    instantiated skeletons) examined; reaching it without a YES gives
    INCONCLUSIVE_CAPPED.
    """
    if c0.vector.d != a.k or cf.vector.d != a.k:
        raise ValueError("configuration dimension differs from the automaton's")
    stats = stats if stats is not None else SolverStats()
    x0, xf = c0.vector, cf.vector
    aug = augment_counters(a, avoid=x0.support | xf.support)
    tried = 0
    if method == "fold":
        candidates = skeleton_paths(a, c0.state, cf.state, minimal=True)
    elif method == "enumerate":
        candidates = skeletons(a, c0.state, cf.state, x0, xf, minimal=True)
    else:
        raise ValueError(f"unknown method {method!r}")
    seen = set()
    for path in candidates:
        if method == "fold":
            key = (path.visited, tuple(sorted(Counter(path.edges).items())))
            if key in seen:
                continue
            seen.add(key)
            inst = folded_instance(a, aug, path, x0, xf)
        else:
            inst = _residual_instance(a, aug, path, x0, xf)
        if tried >= cap:
            return ReachResult(INCONCLUSIVE_CAPPED, None, None, tried, stats)
        tried += 1
        dec = is_permutation_sum(inst, stats)
        log.debug("skeleton %s: %s", path.states, dec.answer)
        if dec.answer:
            return ReachResult(YES, path, dec, tried, stats)
    return ReachResult(NO, None, None, tried, stats)


# -- breadth-first oracle -------------------------------------------------

class StateSpaceExceeded(RuntimeError):
    pass


@dataclass
class BfsResult:
    answer: str
    depth: Optional[int] = None
    explored: int = 0

    def __bool__(self) -> bool:
        return self.answer == YES


def bfs_oracle(a: Bca, c0: Configuration, cf: Configuration, value_bound: int, fresh_bound: int,
               cap: int = 200_000) -> BfsResult:
    """Breadth-first search over bounded configurations.

    Entries stay within [-value_bound, value_bound]; besides supp(x0) ∪
    supp(xf) at most `fresh_bound` data values occur in a configuration.
    Fresh values are named canonically (ordered by the tuple they carry),
    which is sound because steps are invariant under renaming them.
    """
    x0, xf = c0.vector, cf.vector
    dist = sorted(x0.support | xf.support)
    distset = set(dist)
    taken = set(dist) | {b for e in a.edges for b in e.label.support}
    pool = fresh_values(taken, fresh_bound)
    # vectors are kept as tuples of (datum, entries) sorted by datum
    moves: Dict[Tuple[int, int], List[List[Tuple[DataValue, Tuple[int, ...]]]]] = {}

    def moves_for(e: int, used: int):
        key = (e, used)
        if key not in moves:
            label = a.edges[e].label
            moves[key] = [[(pi[b], t) for b, t in label.items()]
                          for pi in canonical_injections(sorted(label.support), dist + pool[:used], pool[used:])]
        return moves[key]

    def canon(entries: Dict[DataValue, Tuple[int, ...]]):
        loose = [b for b in entries if b not in distset]
        if len(loose) > fresh_bound:
            return None
        if loose:
            loose.sort(key=lambda b: (entries[b], b))
            entries = {**{b: t for b, t in entries.items() if b in distset},
                       **{p: entries[b] for b, p in zip(loose, pool)}}
        return tuple(sorted(entries.items()))

    start = (c0.state, canon(dict(x0.items())))
    goal = (cf.state, tuple(sorted(xf.items())))
    if start[1] is None:
        raise ValueError("the initial vector uses more fresh values than allowed")
    if start == goal:
        return BfsResult(YES, 0, 1)
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        (q, v), depth = frontier.popleft()
        used = sum(1 for b, _ in v if b not in distset)
        for e in a.outgoing(q):
            target = a.edges[e].target
            for move in moves_for(e, used):
                w = dict(v)
                ok = True
                for b, t in move:
                    old = w.get(b)
                    new = t if old is None else tuple(x + y for x, y in zip(old, t))
                    if any(abs(c) > value_bound for c in new):
                        ok = False
                        break
                    if any(new):
                        w[b] = new
                    else:
                        w.pop(b, None)
                if not ok:
                    continue
                cw = canon(w)
                if cw is None:
                    continue
                node = (target, cw)
                if node in seen:
                    continue
                if node == goal:
                    return BfsResult(YES, depth + 1, len(seen))
                seen.add(node)
                if len(seen) > cap:
                    raise StateSpaceExceeded(f"more than {cap} configurations")
                frontier.append((node, depth + 1))
    return BfsResult(NO_UP_TO_BOUND, None, len(seen))


# -- random automata ------------------------------------------------------

def random_bca(seed: int, max_states: int = 3, max_k: int = 2, max_edges: int = 4,
               names: Sequence[str] = ("u", "w"), lo: int = -1, hi: int = 1) -> Bca:
    """States uniform in 1..max_states, k in 1..max_k, 1..max_edges random edges.

    Labels have support of size 0..len(names) with entries uniform in [lo, hi].
    """
    rng = random.Random(seed)
    states = tuple(f"q{i}" for i in range(rng.randint(1, max_states)))
    k = rng.randint(1, max_k)
    data = [datum(x) for x in names]
    edges = []
    for _ in range(rng.randint(1, max_edges)):
        src, dst = rng.choice(states), rng.choice(states)
        entries = {}
        for x in rng.sample(data, rng.randint(0, len(data))):
            entries[x] = tuple(rng.randint(lo, hi) for _ in range(k))
        edges.append(Edge(src, dst, DataVector(k, entries)))
    return Bca(states, tuple(edges), k)


def random_run(a: Bca, c0: Configuration, steps: int, seed: int,
               names: Sequence[str] = ("a", "b", "c")) -> Configuration:
    """Follow up to `steps` random edges with random injections into `names`."""
    rng = random.Random(seed)
    pool = [datum(x) for x in names]
    c = c0
    for _ in range(steps):
        out = a.outgoing(c.state)
        if not out:
            break
        e = rng.choice(out)
        src = sorted(a.edges[e].label.support)
        c = step(a, c, e, FiniteInjection(zip(src, rng.sample(pool, len(src)))))
    return c
