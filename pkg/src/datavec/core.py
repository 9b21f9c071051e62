"""Data values, integer tuples, data vectors and finite injections.

A data vector maps finitely many data values to nonzero tuples in Z^d.
Permutations of the (countably infinite) domain are never materialised:
every permutation is carried by a finite injection defined on the support
of the vector it acts on.
"""

from __future__ import annotations

import functools
import threading
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

IntTuple = Tuple[int, ...]


class DimensionError(ValueError):
    """Raised when vectors or tuples of different dimensions are combined."""


class DomainError(ValueError):
    """Raised when an injection does not cover the support it is applied to."""


@functools.total_ordering
@dataclass(frozen=True, eq=False)
class DataValue:
    id: int
    name: str = field(default="", compare=False)

    def __hash__(self) -> int:
        # ids are small distinct ints, so hashing the id alone is exact and cheap
        return hash(self.id)

    def __eq__(self, other: object) -> bool:
        if other.__class__ is DataValue:
            return self.id == other.id
        return NotImplemented

    def __lt__(self, other: "DataValue") -> bool:
        return self.id < other.id

    def __str__(self) -> str:
        return self.name or f"_{self.id}"

    def __repr__(self) -> str:
        return f"DataValue({self.id}, {self.name!r})"


class Interner:
    """Thread-safe map between display names and stable integer ids."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._by_name: Dict[str, DataValue] = {}
        self._by_id: Dict[int, DataValue] = {}
        self._next = 0

    def intern(self, name: str) -> DataValue:
        with self._lock:
            value = self._by_name.get(name)
            if value is None:
                while self._next in self._by_id:
                    self._next += 1
                value = DataValue(self._next, name)
                self._by_name[name] = value
                self._by_id[value.id] = value
                self._next += 1
            return value

    def by_id(self, ident: int) -> DataValue:
        """Return the value with id `ident`, creating a placeholder if needed."""
        if ident < 0:
            raise ValueError("data value ids are nonnegative")
        with self._lock:
            value = self._by_id.get(ident)
            if value is None:
                name = f"_{ident}"
                # a placeholder name might already be taken by a real value
                if name in self._by_name:
                    name = f"_{ident}'"
                value = DataValue(ident, name)
                self._by_id[ident] = value
                self._by_name[name] = value
            return value

    def __contains__(self, name: str) -> bool:
        return name in self._by_name


DOMAIN = Interner()


def datum(name: str) -> DataValue:
    """Intern `name` in the global domain."""
    return DOMAIN.intern(name)


def data(*names: str) -> Tuple[DataValue, ...]:
    return tuple(DOMAIN.intern(n) for n in names)


def fresh_values(used: Iterable[DataValue], count: int) -> list:
    """The `count` smallest-id data values not in `used`."""
    taken = {v.id for v in used}
    out = []
    ident = 0
    while len(out) < count:
        if ident not in taken:
            out.append(DOMAIN.by_id(ident))
        ident += 1
    return out


# -- tuples ---------------------------------------------------------------

def zero(d: int) -> IntTuple:
    return (0,) * d


def is_zero(t: IntTuple) -> bool:
    return not any(t)


def tadd(a: IntTuple, b: IntTuple) -> IntTuple:
    if len(a) != len(b):
        raise DimensionError(f"tuple dimensions differ: {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def tneg(a: IntTuple) -> IntTuple:
    return tuple(-x for x in a)


def tscale(k: int, a: IntTuple) -> IntTuple:
    return tuple(k * x for x in a)


def tsum(items: Iterable[IntTuple], d: int) -> IntTuple:
    acc = [0] * d
    for t in items:
        if len(t) != d:
            raise DimensionError(f"tuple dimensions differ: {len(t)} vs {d}")
        for i, x in enumerate(t):
            acc[i] += x
    return tuple(acc)


# -- finite injections ----------------------------------------------------

class FiniteInjection(Mapping[DataValue, DataValue]):
    """An injective map between finite sets of data values."""

    __slots__ = ("_map", "_hash")

    def __init__(self, pairs: Mapping[DataValue, DataValue] | Iterable = ()) -> None:
        m = dict(pairs)
        if len(set(m.values())) != len(m):
            raise ValueError("map is not injective")
        self._map = m
        self._hash: Optional[int] = None

    @classmethod
    def identity(cls, domain: Iterable[DataValue]) -> "FiniteInjection":
        return cls({a: a for a in domain})

    def __getitem__(self, key: DataValue) -> DataValue:
        return self._map[key]

    def __iter__(self) -> Iterator[DataValue]:
        return iter(sorted(self._map))

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FiniteInjection):
            return self._map == other._map
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{a}->{self._map[a]}" for a in sorted(self._map))
        return f"FiniteInjection({{{body}}})"

    @property
    def domain(self) -> frozenset:
        return frozenset(self._map)

    @property
    def image(self) -> frozenset:
        return frozenset(self._map.values())

    def inverse(self) -> "FiniteInjection":
        return FiniteInjection({b: a for a, b in self._map.items()})

    def restrict(self, domain: Iterable[DataValue]) -> "FiniteInjection":
        return FiniteInjection({a: self._map[a] for a in domain})

    def total(self, a: DataValue) -> DataValue:
        """Apply as the permutation of the domain that the injection extends.

        The extension is the one built in the proof that injections and
        permutations express the same vectors: values in the image but
        outside the domain are sent, in id order, to values in the domain
        but outside the image; everything else is fixed.
        """
        if a in self._map:
            return self._map[a]
        back = self._back_map()
        return back.get(a, a)

    def _back_map(self) -> Dict[DataValue, DataValue]:
        dom = set(self._map)
        img = set(self._map.values())
        return dict(zip(sorted(img - dom), sorted(dom - img)))

    def then(self, outer: "FiniteInjection") -> "FiniteInjection":
        """The injection a -> outer.total(self[a]) (apply self, then outer)."""
        return FiniteInjection({a: outer.total(b) for a, b in self._map.items()})


def swap(a: DataValue, b: DataValue) -> FiniteInjection:
    if a == b:
        return FiniteInjection({a: a})
    return FiniteInjection({a: b, b: a})


def rotation(S: Iterable[DataValue], i: int = 1) -> FiniteInjection:
    """The i-fold rotation of S: each value goes to its i-th successor in id order."""
    order = sorted(set(S))
    n = len(order)
    if n == 0:
        return FiniteInjection()
    return FiniteInjection({a: order[(k + i) % n] for k, a in enumerate(order)})


# -- data vectors ---------------------------------------------------------

class DataVector:
    """A finitely supported map from data values to Z^d.

    Stored sparsely: zero tuples are never kept, so the stored keys are the
    support. Instances are immutable.
    """

    __slots__ = ("d", "_entries", "_hash")

    def __init__(self, d: int, entries: Mapping[DataValue, Sequence[int]] | Iterable = ()) -> None:
        if d < 1:
            raise DimensionError("dimension must be at least 1")
        self.d = d
        clean: Dict[DataValue, IntTuple] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for key, val in items:
            t = tuple(int(x) for x in val)
            if len(t) != d:
                raise DimensionError(f"entry {key} has dimension {len(t)}, expected {d}")
            if any(t):
                clean[key] = t
        self._entries = clean
        self._hash: Optional[int] = None

    @classmethod
    def _raw(cls, d: int, entries: Dict[DataValue, IntTuple]) -> "DataVector":
        v = cls.__new__(cls)
        v.d = d
        v._entries = entries
        v._hash = None
        return v

    @classmethod
    def zero(cls, d: int) -> "DataVector":
        return cls._raw(d, {})

    def __getitem__(self, a: DataValue) -> IntTuple:
        return self._entries.get(a, (0,) * self.d)

    def items(self):
        return sorted(self._entries.items())

    def values(self):
        return [t for _, t in self.items()]

    @property
    def support(self) -> frozenset:
        return frozenset(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, DataVector):
            return self.d == other.d and self._entries == other._entries
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.d, frozenset(self._entries.items())))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{a}:{_fmt(t)}" for a, t in self.items())
        return f"DataVector(d={self.d}, {{{body}}})"

    def __add__(self, other: "DataVector") -> "DataVector":
        return vec_add(self, other)

    def __neg__(self) -> "DataVector":
        return vec_neg(self)

    def __sub__(self, other: "DataVector") -> "DataVector":
        return vec_add(self, vec_neg(other))

    def __rmul__(self, k: int) -> "DataVector":
        return self.scale(k)

    def scale(self, k: int) -> "DataVector":
        if k == 0:
            return DataVector.zero(self.d)
        return DataVector._raw(self.d, {a: tscale(k, t) for a, t in self._entries.items()})

    def sorted_values(self) -> Tuple[IntTuple, ...]:
        """The multiset of nonzero values; equal for vectors equal up to renaming."""
        return tuple(sorted(self._entries.values()))

    def pad(self, d: int) -> "DataVector":
        """Embed into a larger dimension by appending zero coordinates."""
        extra = (0,) * (d - self.d)
        return DataVector._raw(d, {a: t + extra for a, t in self._entries.items()})


def _fmt(t: IntTuple) -> str:
    return str(t[0]) if len(t) == 1 else "(" + ",".join(map(str, t)) + ")"


def vector(d: int, **entries) -> DataVector:
    """Shorthand: ``vector(1, a=[1], b=[-1])`` with names interned globally."""
    return DataVector(d, {datum(k): (v if isinstance(v, (list, tuple)) else [v]) for k, v in entries.items()})


def vec_add(v: DataVector, w: DataVector) -> DataVector:
    if v.d != w.d:
        raise DimensionError(f"vector dimensions differ: {v.d} vs {w.d}")
    out = dict(v._entries)
    for a, t in w._entries.items():
        s = out.get(a)
        if s is None:
            out[a] = t
        else:
            r = tuple(x + y for x, y in zip(s, t))
            if any(r):
                out[a] = r
            else:
                del out[a]
    return DataVector._raw(v.d, out)


def vec_sum(vectors: Iterable[DataVector], d: int) -> DataVector:
    acc: Dict[DataValue, list] = {}
    for v in vectors:
        if v.d != d:
            raise DimensionError(f"vector dimensions differ: {v.d} vs {d}")
        for a, t in v._entries.items():
            cur = acc.get(a)
            if cur is None:
                acc[a] = list(t)
            else:
                for i, x in enumerate(t):
                    cur[i] += x
    return DataVector._raw(d, {a: tuple(t) for a, t in acc.items() if any(t)})


def vec_neg(v: DataVector) -> DataVector:
    return DataVector._raw(v.d, {a: tneg(t) for a, t in v._entries.items()})


def weight(v: DataVector) -> IntTuple:
    """Sum of all values of `v`: a single tuple, invariant under renaming."""
    return tsum(v._entries.values(), v.d)


def apply_injection(v: DataVector, pi: Mapping[DataValue, DataValue]) -> DataVector:
    """The vector v∘π⁻¹: the value at π(a) is v(a), zero off the image of π."""
    out = {}
    for a, t in v._entries.items():
        try:
            out[pi[a]] = t
        except KeyError:
            raise DomainError(f"injection does not cover support value {a}") from None
    if len(out) != len(v._entries):
        raise ValueError("map is not injective on the support")
    return DataVector._raw(v.d, out)


def _check_within(v: DataVector, S: frozenset) -> None:
    missing = v.support - S
    if missing:
        raise DomainError(f"support not contained in S: {sorted(missing)}")


def rotate(v: DataVector, S: Iterable[DataValue], i: int) -> DataVector:
    S = frozenset(S)
    _check_within(v, S)
    if not S:
        return v
    return apply_injection(v, rotation(S, i))


def equalize(v: DataVector, S: Iterable[DataValue]) -> DataVector:
    """Sum of all |S| rotations of v over S; every value in S gets weight(v)."""
    S = frozenset(S)
    _check_within(v, S)
    return vec_sum((rotate(v, S, i) for i in range(len(S))), v.d)


def lift(g: Sequence[int], a: DataValue) -> DataVector:
    """The vector with value g at a and zero elsewhere."""
    return DataVector(len(g), {a: g})


# -- JSON -----------------------------------------------------------------

def vector_to_json(v: DataVector) -> dict:
    return {"d": v.d, "entries": {str(a): list(t) for a, t in v.items()}}


def vector_from_json(obj: Mapping, d: Optional[int] = None) -> DataVector:
    if "entries" in obj:
        entries = obj["entries"]
        d = obj.get("d", d)
    else:
        entries = obj
    if d is None:
        lengths = {len(t) for t in entries.values()}
        if len(lengths) != 1:
            raise DimensionError("cannot infer dimension of vector")
        d = lengths.pop()
    if not isinstance(entries, Mapping):
        raise ValueError("vector entries must be an object")
    return DataVector(int(d), {datum(str(k)): list(t) for k, t in entries.items()})


def injection_to_json(pi: FiniteInjection) -> dict:
    return {str(a): str(pi[a]) for a in pi}


def injection_from_json(obj: Mapping) -> FiniteInjection:
    return FiniteInjection({datum(str(a)): datum(str(b)) for a, b in obj.items()})
