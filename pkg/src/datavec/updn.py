"""Unordered data Petri nets: model, firing, displacements and the state equation.

Tokens carry data values that can only be compared for equality. A
transition's flows are multisets of variables; firing instantiates the
variables by an injective mode. The displacement of a transition is a
data vector over its variables (treated as data values), one coordinate
per place, and every firing adds a renamed copy of it to the marking.
Hence a reachable marking differs from the initial one by a permutation
sum of displacements, which is what `state_equation` checks.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .core import (DataValue, DataVector, DimensionError, FiniteInjection, datum,
                   fresh_values)
from .expressibility import (Decision, ExpressibilityInstance, PermutationSumWitness,
                             fast_is_permutation_sum, is_permutation_sum,
                             synthesize_reversible_witness)
from .linalg import SolverStats
from .reversibility import ReversibilityReport, is_reversible_set
from .syntax import Cursor, ParseError

Flow = Dict[str, Counter]  # place -> multiset of variable names


@dataclass(frozen=True)
class Transition:
    name: str
    pre: Tuple[Tuple[str, Tuple[Tuple[str, int], ...]], ...]
    post: Tuple[Tuple[str, Tuple[Tuple[str, int], ...]], ...]

    def inputs(self, place: str) -> Counter:
        return Counter(dict(dict(self.pre).get(place, ())))

    def outputs(self, place: str) -> Counter:
        return Counter(dict(dict(self.post).get(place, ())))

    @property
    def variables(self) -> Tuple[str, ...]:
        names = set()
        for _, flow in self.pre + self.post:
            names.update(x for x, _ in flow)
        return tuple(sorted(names))


def _freeze(flow: Mapping[str, Counter]) -> Tuple:
    return tuple(sorted((p, tuple(sorted((x, c) for x, c in ms.items() if c))) for p, ms in flow.items()
                        if any(ms.values())))


@dataclass(frozen=True)
class Updn:
    places: Tuple[str, ...]
    transitions: Tuple[Transition, ...]

    def __post_init__(self) -> None:
        if len(set(self.places)) != len(self.places):
            raise ValueError("duplicate place")
        names = [t.name for t in self.transitions]
        if len(set(names)) != len(names):
            raise ValueError("duplicate transition")
        for t in self.transitions:
            for p, _ in t.pre + t.post:
                if p not in self.places:
                    raise ValueError(f"transition {t.name} uses undeclared place {p}")

    @classmethod
    def build(cls, places: Sequence[str], transitions: Mapping[str, Tuple[Mapping, Mapping]]) -> "Updn":
        """Convenience constructor: transitions maps a name to (pre, post), each place -> variable list."""
        ts = []
        for name, (pre, post) in transitions.items():
            ts.append(Transition(name, _freeze({p: Counter(xs) for p, xs in pre.items()}),
                                 _freeze({p: Counter(xs) for p, xs in post.items()})))
        return cls(tuple(places), tuple(ts))

    @property
    def d(self) -> int:
        return len(self.places)

    @property
    def variables(self) -> Tuple[str, ...]:
        out = set()
        for t in self.transitions:
            out.update(t.variables)
        return tuple(sorted(out))

    def transition(self, name: str) -> Transition:
        for t in self.transitions:
            if t.name == name:
                return t
        raise KeyError(f"unknown transition {name!r}")


def parse_updn(text: str) -> Updn:
    """Parse `places p q;` and `trans t { in p: x x; out q: y; }` declarations.

    An optional `vars x y;` declaration restricts the variables flows may use.
    """
    cur = Cursor(text)
    places: List[str] = []
    declared_vars: Optional[set] = None
    transitions: List[Transition] = []
    seen_trans = set()
    while not cur.at_end():
        tok = cur.next()
        if tok.kind != "name":
            raise ParseError(f"expected a declaration, found {tok.text!r}", tok.line)
        if tok.text == "places":
            for name in cur.names_until(";"):
                if name.text in places:
                    raise ParseError(f"duplicate place {name.text!r}", name.line)
                places.append(name.text)
        elif tok.text == "vars":
            declared_vars = declared_vars or set()
            for name in cur.names_until(";"):
                declared_vars.add(name.text)
        elif tok.text == "trans":
            name = cur.expect("name")
            if name.text in seen_trans:
                raise ParseError(f"duplicate transition {name.text!r}", name.line)
            seen_trans.add(name.text)
            cur.expect("{")
            pre: Dict[str, Counter] = {}
            post: Dict[str, Counter] = {}
            while not cur.accept("}"):
                kw = cur.next("'in', 'out' or '}'")
                if kw.kind != "name" or kw.text not in ("in", "out"):
                    raise ParseError(f"expected 'in', 'out' or '}}', found {kw.text!r}", kw.line)
                place = cur.expect("name")
                if place.text not in places:
                    raise ParseError(f"undeclared place {place.text!r}", place.line)
                cur.expect(":")
                xs = cur.names_until(";")
                for x in xs:
                    if declared_vars is not None and x.text not in declared_vars:
                        raise ParseError(f"undeclared variable {x.text!r}", x.line)
                side = pre if kw.text == "in" else post
                side.setdefault(place.text, Counter()).update(x.text for x in xs)
            transitions.append(Transition(name.text, _freeze(pre), _freeze(post)))
        else:
            raise ParseError(f"unknown declaration {tok.text!r}", tok.line)
    return Updn(tuple(places), tuple(transitions))


def format_updn(net: Updn) -> str:
    lines = ["places " + " ".join(net.places) + ";"]
    for t in net.transitions:
        parts = []
        for kw, flow in (("in", t.pre), ("out", t.post)):
            for p, ms in flow:
                xs = " ".join(x for x, c in ms for _ in range(c))
                parts.append(f"{kw} {p}: {xs};")
        lines.append(f"trans {t.name} {{ " + " ".join(parts) + " }")
    return "\n".join(lines) + "\n"


# -- markings -------------------------------------------------------------

def check_marking(net: Updn, m: DataVector) -> DataVector:
    if m.d != net.d:
        raise DimensionError(f"marking has dimension {m.d}, the net has {net.d} places")
    for a, t in m.items():
        if any(c < 0 for c in t):
            raise ValueError(f"negative token count at {a}")
    return m


def marking(net: Updn, places: Mapping[str, Mapping[str, int]]) -> DataVector:
    """Build a marking from place -> {datum name: count}."""
    entries: Dict[DataValue, List[int]] = {}
    for p, tokens in places.items():
        if p not in net.places:
            raise KeyError(f"unknown place {p!r}")
        k = net.places.index(p)
        for name, c in tokens.items():
            entries.setdefault(datum(name), [0] * net.d)[k] += c
    return check_marking(net, DataVector(net.d, entries))


def parse_marking(net: Updn, text: str) -> DataVector:
    """Parse `p: {a:2, b:1}; q: {}`; unlisted places are empty."""
    cur = Cursor(text)
    places: Dict[str, Dict[str, int]] = {}
    while not cur.at_end():
        p = cur.expect("name")
        if p.text not in net.places:
            raise ParseError(f"unknown place {p.text!r}", p.line)
        if p.text in places:
            raise ParseError(f"place {p.text!r} listed twice", p.line)
        cur.expect(":")
        cur.expect("{")
        tokens: Dict[str, int] = {}
        if not cur.accept("}"):
            while True:
                a = cur.expect("name")
                cur.expect(":")
                line = cur.line
                c = cur.integer()
                if c < 0:
                    raise ParseError("token counts must be nonnegative", line)
                tokens[a.text] = tokens.get(a.text, 0) + c
                if cur.accept("}"):
                    break
                cur.expect(",")
        places[p.text] = tokens
        if not cur.at_end():
            cur.expect(";")
    return marking(net, places)


def format_marking(net: Updn, m: DataVector) -> str:
    parts = []
    for k, p in enumerate(net.places):
        toks = ", ".join(f"{a}:{t[k]}" for a, t in m.items() if t[k])
        parts.append(f"{p}: {{{toks}}}")
    return "; ".join(parts)


# -- semantics ------------------------------------------------------------

def variable(name: str) -> DataValue:
    return datum(name)


def displacement(net: Updn, t: str | Transition) -> DataVector:
    """Δ(t) = F(t,•) - F(•,t) as a vector over the variables of t."""
    if isinstance(t, str):
        t = net.transition(t)
    entries = {}
    for x in t.variables:
        entries[variable(x)] = tuple(t.outputs(p)[x] - t.inputs(p)[x] for p in net.places)
    return DataVector(net.d, entries)


def _mode_image(t: Transition, sigma: Mapping[DataValue, DataValue]) -> Dict[str, DataValue]:
    out = {}
    for x in t.variables:
        try:
            out[x] = sigma[variable(x)]
        except KeyError:
            raise ValueError(f"mode does not cover variable {x} of {t.name}") from None
    if len(set(out.values())) != len(out):
        raise ValueError("mode is not injective")
    return out


def enabled(net: Updn, m: DataVector, t: str | Transition, sigma: Mapping[DataValue, DataValue]) -> bool:
    if isinstance(t, str):
        t = net.transition(t)
    img = _mode_image(t, sigma)
    for k, p in enumerate(net.places):
        for x, c in t.inputs(p).items():
            if m[img[x]][k] < c:
                return False
    return True


class NotEnabled(ValueError):
    pass


def fire(net: Updn, m: DataVector, t: str | Transition, sigma: Mapping[DataValue, DataValue]) -> DataVector:
    """M'(p) = M(p) - σ(F(p,t)) + σ(F(t,p))."""
    if isinstance(t, str):
        t = net.transition(t)
    if not enabled(net, m, t, sigma):
        raise NotEnabled(f"transition {t.name} is not enabled in this mode")
    img = _mode_image(t, sigma)
    entries: Dict[DataValue, List[int]] = {a: list(v) for a, v in m.items()}
    for k, p in enumerate(net.places):
        for x, c in t.inputs(p).items():
            entries[img[x]][k] -= c
        for x, c in t.outputs(p).items():
            entries.setdefault(img[x], [0] * net.d)[k] += c
    return DataVector(net.d, entries)


# -- state equation -------------------------------------------------------

@dataclass
class Step:
    transition: str
    mode: FiniteInjection


@dataclass
class StateEquationResult:
    decision: Decision
    steps: Optional[List[Step]] = None

    @property
    def answer(self) -> bool:
        return self.decision.answer

    def __bool__(self) -> bool:
        return self.answer


def _effects(net: Updn) -> List[DataVector]:
    return [displacement(net, t) for t in net.transitions]


def effects_reversible(net: Updn) -> ReversibilityReport:
    """Reversibility of the set of displacements (not of the net's reachability relation)."""
    return is_reversible_set(_effects(net))


def _steps(net: Updn, w: PermutationSumWitness) -> List[Step]:
    steps = []
    for i, p in w.terms:
        t = net.transitions[i]
        mode = dict(p)
        rest = [variable(x) for x in t.variables if variable(x) not in mode]
        for x, a in zip(rest, fresh_values(set(mode.values()) | set(mode), len(rest))):
            mode[x] = a
        steps.append(Step(t.name, FiniteInjection(mode)))
    return steps


def state_equation(net: Updn, m0: DataVector, m1: DataVector, fast: bool = False,
                   witness: bool = True, stats: Optional[SolverStats] = None) -> StateEquationResult:
    """Is M1 - M0 a permutation sum of the displacements?

    With `fast` the displacements must be reversible (checked here) and
    the polynomial test is used; witnesses are then synthesized, which can
    make them long. Nonnegativity of intermediate markings is not checked.
    """
    check_marking(net, m0)
    check_marking(net, m1)
    inst = ExpressibilityInstance(_effects(net), m1 - m0)
    if fast:
        report = is_reversible_set(inst.V)
        cert = report.certificate()
        ok = fast_is_permutation_sum(inst, cert)
        dec = Decision(ok, reason="subgroup conditions" + ("" if ok else " fail"))
        if ok and witness:
            dec.witness = synthesize_reversible_witness(inst, cert)
    else:
        dec = is_permutation_sum(inst, stats)
        if not witness:
            dec.witness = None
    steps = _steps(net, dec.witness) if dec.witness is not None else None
    return StateEquationResult(dec, steps)


# -- random nets and walks ------------------------------------------------

def random_net(seed: int, max_places: int = 3, max_transitions: int = 3, max_flow: int = 2,
               variables: Sequence[str] = ("x", "y", "z")) -> Updn:
    """Places and transitions uniform in 1..max; each flow a multiset of 0..max_flow variables."""
    rng = random.Random(seed)
    places = [f"p{i}" for i in range(rng.randint(1, max_places))]
    transitions = {}
    for j in range(rng.randint(1, max_transitions)):
        pre = {p: [rng.choice(variables) for _ in range(rng.randint(0, max_flow))] for p in places}
        post = {p: [rng.choice(variables) for _ in range(rng.randint(0, max_flow))] for p in places}
        transitions[f"t{j}"] = (pre, post)
    return Updn.build(places, transitions)


def reversed_net(net: Updn) -> Updn:
    """Add, for every transition t, a transition t_rev with inputs and outputs swapped."""
    extra = [Transition(t.name + "_rev", t.post, t.pre) for t in net.transitions]
    return Updn(net.places, net.transitions + tuple(extra))


def random_marking(net: Updn, seed: int, names: Sequence[str] = ("a", "b", "c", "d"),
                   max_tokens: int = 2) -> DataVector:
    rng = random.Random(seed)
    places = {p: {a: rng.randint(0, max_tokens) for a in names} for p in net.places}
    return marking(net, places)


def enabled_modes(net: Updn, m: DataVector, t: Transition, extra: int = 0) -> List[FiniteInjection]:
    """All modes enabling t whose images lie in supp(M) plus `extra` fresh values, in a fixed order."""
    taken = set(m.support) | {variable(x) for x in net.variables}
    pool = sorted(m.support) + fresh_values(taken, extra)
    xs = [variable(x) for x in t.variables]
    out = []

    def go(k: int, chosen: Dict[DataValue, DataValue]) -> None:
        if k == len(xs):
            if enabled(net, m, t, chosen):
                out.append(FiniteInjection(chosen))
            return
        used = set(chosen.values())
        for a in pool:
            if a not in used:
                chosen[xs[k]] = a
                go(k + 1, chosen)
                del chosen[xs[k]]

    go(0, {})
    return out


def random_walk(net: Updn, m0: DataVector, steps: int, seed: int) -> List[DataVector]:
    """Markings visited by up to `steps` random enabled firings; stops early when nothing is enabled."""
    rng = random.Random(seed)
    out = [m0]
    m = m0
    for _ in range(steps):
        choices = []
        for t in net.transitions:
            for sigma in enabled_modes(net, m, t, extra=len(t.variables)):
                choices.append((t, sigma))
        if not choices:
            break
        t, sigma = rng.choice(choices)
        m = fire(net, m, t, sigma)
        out.append(m)
    return out
