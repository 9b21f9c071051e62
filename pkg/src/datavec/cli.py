"""Command-line front end.

Every subcommand prints one JSON report on stdout and exits with 0 for
YES, 1 for any other decision and 2 for errors (malformed input, contract
violations). Set DATAVEC_LOG=DEBUG (or INFO, WARNING) for diagnostics on
stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

from . import bca as bca_mod
from . import oracle as oracle_mod
from .core import DataVector, datum, vector_from_json
from .expressibility import (ContractError, ExpressibilityInstance, build_ilp,
                             fast_is_permutation_sum, first_mismatch, instance_from_json, instance_to_json,
                             is_permutation_sum, synthesize_reversible_witness, witness_from_json,
                             witness_to_json)
from .histogram import decompose, histogram_from_json, histogram_to_json
from .linalg import SolverStats
from .reversibility import is_reversible_set, reversal_witness
from .syntax import Cursor
from .updn import effects_reversible, parse_marking, parse_updn, state_equation

log = logging.getLogger("datavec")

YES = "YES"
NO = "NO"
DECISIONS = (YES, NO, oracle_mod.NO_UP_TO_BUDGET, bca_mod.INCONCLUSIVE_CAPPED, bca_mod.NO_UP_TO_BOUND)


class UsageError(ValueError):
    pass


@dataclass
class RunReport:
    command: str
    digest: str
    decision: str
    witness: Optional[object] = None
    timing: Optional[float] = None
    stats: Dict[str, int] = field(default_factory=dict)
    details: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.decision not in DECISIONS:
            raise ValueError(f"unknown decision {self.decision!r}")

    def to_json(self, timing: bool = False) -> dict:
        out = {"command": self.command, "digest": self.digest, "decision": self.decision}
        if self.witness is not None:
            out["witness"] = self.witness
        if timing:
            out["timing"] = self.timing
        out["stats"] = self.stats
        out.update(self.details)
        return out

    @property
    def exit_code(self) -> int:
        return 0 if self.decision == YES else 1


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _digest(*texts: str) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()[:16]


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: invalid JSON ({exc})") from None


def _yes(b: bool) -> str:
    return YES if b else NO


def parse_vector_arg(text: str, d: int) -> DataVector:
    """A vector given as JSON (`{"d":..,"entries":..}` or a bare mapping) or as `{α: [1, 0]}`."""
    text = text.strip()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        obj = None
    if isinstance(obj, dict):
        if "entries" not in obj:
            obj = {"d": d, "entries": obj}
        v = vector_from_json(obj, obj.get("d", d))
        if v.d != d:
            raise UsageError(f"vector of dimension {v.d}, expected {d}")
        return v
    cur = Cursor(text)
    cur.expect("{")
    entries = {}
    if not cur.accept("}"):
        while True:
            a = cur.expect("name")
            cur.expect(":")
            cur.expect("[")
            vals = [cur.integer()]
            while cur.accept(","):
                vals.append(cur.integer())
            cur.expect("]")
            if len(vals) != d:
                raise UsageError(f"entry {a.text!r} has dimension {len(vals)}, expected {d}")
            entries[datum(a.text)] = vals
            if cur.accept("}"):
                break
            cur.expect(",")
    if not cur.at_end():
        raise UsageError(f"trailing input after vector {text!r}")
    return DataVector(d, entries)


# -- subcommands ----------------------------------------------------------

def cmd_expressible(args) -> RunReport:
    text = _read(args.instance)
    inst = instance_from_json(_load_json(text, args.instance))
    stats = SolverStats()
    t0 = time.perf_counter()
    details: Dict[str, object] = {}
    if args.fast:
        report = is_reversible_set(inst.V)
        if not report.reversible:
            raise ContractError(f"--fast needs a reversible V; members {report.culprits} are not reversible")
        cert = report.certificate()
        ok = fast_is_permutation_sum(inst, cert)
        witness = synthesize_reversible_witness(inst, cert) if ok and args.witness else None
    else:
        dec = is_permutation_sum(inst, stats)
        ok, witness = dec.answer, dec.witness
        if dec.reason:
            details["reason"] = dec.reason
    elapsed = time.perf_counter() - t0
    return RunReport("expressible", _digest(text), _yes(ok),
                     witness_to_json(witness) if args.witness and witness is not None else None,
                     elapsed, stats.as_dict(), details)


def cmd_reversible(args) -> RunReport:
    text = _read(args.set)
    obj = _load_json(text, args.set)
    d = obj.get("d") if isinstance(obj, dict) else None
    items = obj.get("V", []) if isinstance(obj, dict) else obj
    V = [vector_from_json(v, d) for v in items]
    t0 = time.perf_counter()
    report = is_reversible_set(V)
    details: Dict[str, object] = {"verdicts": report.verdicts, "culprits": report.culprits}
    if args.witness:
        reversals = []
        for i, v in enumerate(V):
            if report.verdicts[i]:
                inst = ExpressibilityInstance(V, -v)
                reversals.append({"member": i, "instance": instance_to_json(inst),
                                  "witness": witness_to_json(reversal_witness(v, V))})
        details["reversals"] = reversals
    return RunReport("reversible", _digest(text), _yes(report.reversible), None,
                     time.perf_counter() - t0, {}, details)


def cmd_hist(args) -> RunReport:
    text = _read(args.histogram)
    t0 = time.perf_counter()
    h = histogram_from_json(_load_json(text, args.histogram))
    parts = decompose(h)
    details = {"degree": h.degree, "parts": [histogram_to_json(p) for p in parts]}
    return RunReport("hist decompose", _digest(text), YES, None, time.perf_counter() - t0, {}, details)


def cmd_verify(args) -> RunReport:
    itext = _read(args.instance)
    wtext = _read(args.witness)
    iobj = _load_json(itext, args.instance)
    wobj = _load_json(wtext, args.witness)
    if isinstance(iobj, dict) and "instance" in iobj:
        iobj = iobj["instance"]
    if isinstance(wobj, dict) and "terms" not in wobj and "witness" in wobj:
        wobj = wobj["witness"]
    inst = instance_from_json(iobj)
    w = witness_from_json(wobj)
    t0 = time.perf_counter()
    problem = first_mismatch(inst, w)
    details = {"terms": len(w)}
    if problem is not None:
        details["mismatch"] = problem
    return RunReport("verify", _digest(itext, wtext), _yes(problem is None), None,
                     time.perf_counter() - t0, {}, details)


def cmd_updn(args) -> RunReport:
    ntext, ftext, ttext = _read(args.net), _read(args.source), _read(args.target)
    net = parse_updn(ntext)
    m0 = parse_marking(net, ftext)
    m1 = parse_marking(net, ttext)
    stats = SolverStats()
    t0 = time.perf_counter()
    if args.fast:
        report = effects_reversible(net)
        if not report.reversible:
            raise ContractError(f"--fast needs reversible transition effects; "
                                f"transitions {[net.transitions[i].name for i in report.culprits]} are not")
    res = state_equation(net, m0, m1, fast=args.fast, witness=args.witness, stats=stats)
    details: Dict[str, object] = {}
    if res.steps is not None:
        details["steps"] = [{"transition": s.transition, "mode": {str(a): str(b) for a, b in s.mode.items()}}
                            for s in res.steps]
    return RunReport("updn check", _digest(ntext, ftext, ttext), _yes(res.answer),
                     witness_to_json(res.decision.witness) if res.decision.witness is not None else None,
                     time.perf_counter() - t0, stats.as_dict(), details)


def cmd_bca(args) -> RunReport:
    text = _read(args.automaton)
    a = bca_mod.parse_bca(text)
    for q in (args.from_state, args.to_state):
        if q not in a.states:
            raise UsageError(f"unknown state {q!r}")
    c0 = bca_mod.Configuration(args.from_state, parse_vector_arg(args.from_vec, a.k))
    cf = bca_mod.Configuration(args.to_state, parse_vector_arg(args.to_vec, a.k))
    digest = _digest(text, args.from_state, args.from_vec, args.to_state, args.to_vec)
    t0 = time.perf_counter()
    if args.oracle:
        res = bca_mod.bfs_oracle(a, c0, cf, args.value_bound, args.fresh_bound, cap=args.state_cap)
        return RunReport("bca reach", digest, res.answer, None, time.perf_counter() - t0, {},
                         {"depth": res.depth, "explored": res.explored})
    stats = SolverStats()
    res = bca_mod.reachable(a, c0, cf, cap=args.cap, method=args.method, stats=stats)
    details: Dict[str, object] = {"skeletons_tried": res.skeletons_tried}
    if res.skeleton is not None:
        details["skeleton"] = {"states": list(res.skeleton.states), "edges": list(res.skeleton.edges)}
    return RunReport("bca reach", digest, res.answer, None, time.perf_counter() - t0, stats.as_dict(), details)


def cmd_oracle(args) -> RunReport:
    text = _read(args.instance)
    inst = instance_from_json(_load_json(text, args.instance))
    budget = oracle_mod.OracleBudget.for_instance(inst, args.depth, args.pool_size, args.state_cap)
    t0 = time.perf_counter()
    res = oracle_mod.oracle_decide(inst, budget)
    return RunReport("oracle", _digest(text, str(args.depth), str(args.pool_size)), res.answer,
                     witness_to_json(res.witness) if res.witness is not None else None,
                     time.perf_counter() - t0, {}, {"states": res.states})


def cmd_ilp_dump(args) -> int:
    inst = instance_from_json(_load_json(_read(args.instance), args.instance))
    ilp, legend = build_ilp(inst)
    sys.stdout.write("# variables: " + " ".join(legend.names) + "\n")
    sys.stdout.write(ilp.system.to_text())
    return 0


# -- argument parsing -----------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="datavec", description="Decision procedures for permutation sums of data vectors.")
    p.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    p.add_argument("--threads", type=int, default=1,
                   help="worker count for independent subproblems (results do not depend on it)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized tooling")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("expressible", help="is x a permutation sum of V?")
    e.add_argument("instance")
    e.add_argument("--fast", action="store_true", help="polynomial test; V must be reversible")
    e.add_argument("--witness", action="store_true", help="include the witness")
    e.set_defaults(run=cmd_expressible)

    r = sub.add_parser("reversible", help="is every member of V reversible in V?")
    r.add_argument("set")
    r.add_argument("--witness", action="store_true", help="include reversal witnesses")
    r.set_defaults(run=cmd_reversible)

    h = sub.add_parser("hist", help="histogram tools")
    hs = h.add_subparsers(dest="hist_command", required=True)
    hd = hs.add_parser("decompose", help="split a histogram into simple histograms")
    hd.add_argument("histogram")
    hd.set_defaults(run=cmd_hist)

    v = sub.add_parser("verify", help="check a witness against an instance")
    v.add_argument("instance")
    v.add_argument("witness")
    v.set_defaults(run=cmd_verify)

    u = sub.add_parser("updn", help="unordered data Petri nets")
    us = u.add_subparsers(dest="updn_command", required=True)
    uc = us.add_parser("check", help="state equation between two markings")
    uc.add_argument("net")
    uc.add_argument("source", metavar="from")
    uc.add_argument("target", metavar="to")
    uc.add_argument("--fast", action="store_true", help="polynomial test; effects must be reversible")
    uc.add_argument("--witness", action="store_true", help="include the witness")
    uc.set_defaults(run=cmd_updn)

    b = sub.add_parser("bca", help="data blind counter automata")
    bs = b.add_subparsers(dest="bca_command", required=True)
    br = bs.add_parser("reach", help="reachability between two configurations")
    br.add_argument("automaton")
    br.add_argument("from_state")
    br.add_argument("from_vec")
    br.add_argument("to_state")
    br.add_argument("to_vec")
    br.add_argument("--method", choices=("fold", "enumerate"), default="fold")
    br.add_argument("--cap", type=int, default=10_000, help="skeleton cap")
    br.add_argument("--oracle", action="store_true", help="bounded breadth-first search instead")
    br.add_argument("--value-bound", type=int, default=5)
    br.add_argument("--fresh-bound", type=int, default=3)
    br.add_argument("--state-cap", type=int, default=200_000)
    br.set_defaults(run=cmd_bca)

    o = sub.add_parser("oracle", help="bounded brute-force search for a permutation sum")
    o.add_argument("instance")
    o.add_argument("--depth", type=int, default=4, help="maximum number of terms")
    o.add_argument("--pool-size", type=int, default=None)
    o.add_argument("--state-cap", type=int, default=200_000)
    o.set_defaults(run=cmd_oracle)

    i = sub.add_parser("ilp", help="integer program tools")
    is_ = i.add_subparsers(dest="ilp_command", required=True)
    idump = is_.add_parser("dump", help="print the integer program as a matrix")
    idump.add_argument("instance")
    idump.set_defaults(run=cmd_ilp_dump)
    return p


def _configure_logging() -> None:
    level = os.environ.get("DATAVEC_LOG")
    if level:
        logging.basicConfig(stream=sys.stderr, level=getattr(logging, level.upper(), logging.INFO),
                            format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be positive")
    try:
        out = args.run(args)
    except (ValueError, KeyError, TypeError, OSError, RuntimeError) as exc:
        # ParseError, HistogramError, ContractError, WitnessError and friends are ValueErrors
        msg = str(exc) if not isinstance(exc, KeyError) else f"missing field {exc}"
        json.dump({"command": args.command, "error": f"{type(exc).__name__}: {msg}"}, sys.stdout)
        sys.stdout.write("\n")
        print(f"error: {msg}", file=sys.stderr)
        return 2
    if isinstance(out, int):
        return out
    json.dump(out.to_json(args.timing), sys.stdout, ensure_ascii=False, sort_keys=False)
    sys.stdout.write("\n")
    return out.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
