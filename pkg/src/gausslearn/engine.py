"""Synchronous round protocol.

Every round each agent announces its posterior mean, hears the announcements
of its neighbours, and recomputes its estimator from everything it has heard.
Agents are simulated symbolically: only coefficient vectors over the private
signals are tracked, never realized signal values.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

from . import algebra
from .algebra import FLOAT, RATIONAL, CoefVector, SpanBasis
from .errors import ConvergenceBoundError
from .graphs import Graph, check_valid, metrics

CHANGE_ATOL = 1e-12


@dataclass
class AgentState:
    id: int
    span: SpanBasis = field(repr=False)
    beta: CoefVector
    tau_sq: object
    dim: int

    @property
    def basis(self) -> list[CoefVector]:
        return self.span.vectors

    def copy(self) -> "AgentState":
        span = copy.copy(self.span)
        span.vectors = list(self.span.vectors)
        span._pivots = list(self.span._pivots)
        return AgentState(self.id, span, self.beta, self.tau_sq, self.dim)


@dataclass(frozen=True)
class Round:
    t: int
    betas: tuple[CoefVector, ...]
    tau_sq: tuple
    dims: tuple[int, ...]


@dataclass
class SimulationTrace:
    graph: Graph
    backend: str
    rounds: list[Round]
    change_log: list[frozenset[int]]
    t_last_change: int
    t_all_equal: Optional[int]

    @property
    def t_converged(self) -> int:
        return self.t_last_change

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def final(self) -> Round:
        return self.rounds[-1]


def betas_differ(a: CoefVector, b: CoefVector, backend: str) -> bool:
    if backend == RATIONAL:
        return a != b
    return algebra.max_abs_diff(a, b) >= CHANGE_ATOL


def all_equal(betas, backend: str) -> bool:
    return all(not betas_differ(betas[0], b, backend) for b in betas[1:])


def init(g: Graph, backend: str = RATIONAL) -> list[AgentState]:
    """Agent v starts knowing only its own signal: basis ``[e_v]``, variance 1."""
    algebra.check_backend(backend)
    one = algebra.parse_scalar(1, backend)
    states = []
    for v in range(g.n):
        e = algebra.unit_vector(g.n, v, backend)
        span = SpanBasis(g.n, backend)
        span.add(e)
        states.append(AgentState(v, span, e, one, 1))
    return states


def step(states: list[AgentState], g: Graph) -> list[AgentState]:
    """One synchronous round; the input states are left untouched."""
    announced = [s.beta for s in states]
    out = []
    for s in states:
        new = s.copy()
        grew = False
        for u in g.adjacency[s.id]:
            grew |= new.span.add(announced[u])
        if grew:
            # same span => same estimator, so only a grown basis is re-solved
            new.beta, new.tau_sq = new.span.estimator()
            new.dim = len(new.span)
        out.append(new)
    return out


def _snapshot(t: int, states: list[AgentState]) -> Round:
    return Round(t, tuple(s.beta for s in states), tuple(s.tau_sq for s in states),
                 tuple(s.dim for s in states))


def convergence_bound(g: Graph) -> int:
    return 2 * g.n * metrics(g).diameter


def run(g: Graph, backend: str = RATIONAL, max_rounds: Optional[int] = None) -> SimulationTrace:
    """Step until a round changes no estimator.

    ``max_rounds`` defaults to ``2 n d + 1``, one more than the convergence
    bound, which leaves room for the confirming stationary round. Rounds are
    recorded from ``t = 0`` (initial state) through that stationary round.

    Raises ConvergenceBoundError, carrying the partial trace, if no
    stationary round occurs within ``max_rounds`` steps.
    """
    check_valid(g)
    if max_rounds is None:
        max_rounds = convergence_bound(g) + 1
    states = init(g, backend)
    rounds = [_snapshot(0, states)]
    change_log: list[frozenset[int]] = [frozenset()]
    t_all_equal = 0 if all_equal(rounds[0].betas, backend) else None
    t_last = 0
    for t in range(1, max_rounds + 1):
        new = step(states, g)
        changed = frozenset(
            s.id for s, s2 in zip(states, new) if betas_differ(s.beta, s2.beta, backend))
        states = new
        rounds.append(_snapshot(t, states))
        change_log.append(changed)
        if t_all_equal is None and all_equal(rounds[-1].betas, backend):
            t_all_equal = t
        if not changed:
            return SimulationTrace(g, backend, rounds, change_log, t_last, t_all_equal)
        t_last = t
    trace = SimulationTrace(g, backend, rounds, change_log, t_last, t_all_equal)
    raise ConvergenceBoundError(
        f"no fixed point within {max_rounds} rounds (n={g.n}, bound 2nd={convergence_bound(g)})",
        trace)


@dataclass(frozen=True)
class StagnationCounterexample:
    agent: int
    t0: int
    t_violation: int

    def __str__(self):
        return (f"agent {self.agent} unchanged over rounds {self.t0}..+2d but agents "
                f"disagree at round {self.t_violation}")


def check_stagnation_lemma(trace: SimulationTrace, g: Optional[Graph] = None):
    """None if the trace obeys the stagnation lemma, else a counterexample.

    Whenever an agent's estimator stays fixed over rounds ``t0..t0+2d``, all
    agents must hold one common estimator at every recorded round from
    ``t0 + d`` on.
    """
    g = g or trace.graph
    d = metrics(g).diameter
    T = len(trace.rounds) - 1
    equal = [all_equal(r.betas, trace.backend) for r in trace.rounds]
    # first round index from which every later round has all agents equal
    first_bad_after = [None] * (T + 2)
    for t in range(T, -1, -1):
        first_bad_after[t] = t if not equal[t] else first_bad_after[t + 1]
    for u in range(g.n):
        run_len = 0  # consecutive rounds up to t in which u did not change
        for t in range(1, T + 1):
            run_len = 0 if u in trace.change_log[t] else run_len + 1
            if run_len >= 2 * d:
                t0 = t - 2 * d
                bad = first_bad_after[t0 + d]
                if bad is not None:
                    return StagnationCounterexample(u, t0, bad)
        if d == 0 and first_bad_after[0] is not None:
            return StagnationCounterexample(u, 0, first_bad_after[0])
    return None
