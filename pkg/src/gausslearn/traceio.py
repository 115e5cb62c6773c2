"""JSON serialization of simulation traces.

Rational scalars are written as ``"p/q"`` strings so a trace round-trips
exactly; float scalars are plain JSON numbers (``repr`` precision).
"""

from __future__ import annotations

import json
from pathlib import Path

from . import algebra
from .algebra import RATIONAL
from .engine import Round, SimulationTrace, betas_differ
from .graphs import Graph


def _enc(x, backend):
    return algebra.format_scalar(x) if backend == RATIONAL else float(x)


def trace_to_dict(trace: SimulationTrace) -> dict:
    be = trace.backend
    return {
        "graph": {"n": trace.graph.n, "edges": [list(e) for e in trace.graph.edges]},
        "backend": be,
        "rounds": [
            {
                "t": r.t,
                "agents": [
                    {"id": v, "beta": [_enc(x, be) for x in r.betas[v]],
                     "tau_sq": _enc(r.tau_sq[v], be), "dim": r.dims[v]}
                    for v in range(trace.graph.n)
                ],
            }
            for r in trace.rounds
        ],
        "change_log": [sorted(c) for c in trace.change_log],
        "t_converged": trace.t_last_change,
        "t_last_change": trace.t_last_change,
        "t_all_equal": trace.t_all_equal,
    }


def trace_from_dict(doc: dict) -> SimulationTrace:
    """Rebuild a trace; the graph is not validated here (see ``checks``)."""
    be = algebra.check_backend(doc["backend"])
    g = Graph.from_edges(int(doc["graph"]["n"]), [tuple(e) for e in doc["graph"]["edges"]])
    rounds = []
    for r in doc["rounds"]:
        agents = sorted(r["agents"], key=lambda a: a["id"])
        rounds.append(Round(
            int(r["t"]),
            tuple(tuple(algebra.parse_scalar(x, be) for x in a["beta"]) for a in agents),
            tuple(algebra.parse_scalar(a["tau_sq"], be) for a in agents),
            tuple(int(a["dim"]) for a in agents),
        ))
    if "change_log" in doc:
        change_log = [frozenset(c) for c in doc["change_log"]]
    else:
        change_log = [frozenset()] + [
            frozenset(v for v in range(g.n) if betas_differ(a.betas[v], b.betas[v], be))
            for a, b in zip(rounds, rounds[1:])]
    t_last = doc.get("t_converged", doc.get("t_last_change"))
    return SimulationTrace(g, be, rounds, change_log, int(t_last), doc.get("t_all_equal"))


def dumps(trace: SimulationTrace) -> str:
    return json.dumps(trace_to_dict(trace), separators=(",", ":")) + "\n"


def save(trace: SimulationTrace, path) -> None:
    Path(path).write_text(dumps(trace))


def load(path) -> SimulationTrace:
    return trace_from_dict(json.loads(Path(path).read_text()))
