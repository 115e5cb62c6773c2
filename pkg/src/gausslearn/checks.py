"""Invariant suite run against a finished simulation trace.

Every check reads only the recorded trace (and its graph), so it can be
applied equally to a fresh run or to a trace loaded from disk.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import algebra
from .algebra import RATIONAL
from .engine import SimulationTrace, all_equal, betas_differ, check_stagnation_lemma
from .graphs import metrics

FLOAT_SLACK = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] {self.name}" + (f": {self.detail}" if self.detail else "")


def _close(a, b, backend) -> bool:
    if backend == RATIONAL:
        return a == b
    return abs(float(a) - float(b)) <= FLOAT_SLACK * max(1.0, abs(float(b)))


def _fail(name, where):
    return CheckResult(name, False, where)


def check_initial_state(trace: SimulationTrace) -> CheckResult:
    name = "initial_state"
    r0 = trace.rounds[0]
    for v, beta in enumerate(r0.betas):
        if betas_differ(beta, algebra.unit_vector(trace.n, v, trace.backend), trace.backend):
            return _fail(name, f"agent {v} does not start at its own signal")
        if r0.dims[v] != 1 or not _close(r0.tau_sq[v], 1, trace.backend):
            return _fail(name, f"agent {v} starts with dim {r0.dims[v]}, tau^2 {r0.tau_sq[v]}")
    return CheckResult(name, True)


def check_unbiased(trace: SimulationTrace) -> CheckResult:
    for r in trace.rounds:
        for v, beta in enumerate(r.betas):
            if len(beta) != trace.n or not algebra.is_unbiased(beta):
                return _fail("unbiasedness", f"round {r.t} agent {v}: coefficient sum "
                                             f"{algebra.format_scalar(sum(beta))}")
    return CheckResult("unbiasedness", True)


def check_variance_identity(trace: SimulationTrace) -> CheckResult:
    for r in trace.rounds:
        for v, beta in enumerate(r.betas):
            if not _close(r.tau_sq[v], algebra.dot(beta, beta), trace.backend):
                return _fail("variance_identity", f"round {r.t} agent {v}: tau^2 != |beta|^2")
    return CheckResult("variance_identity", True)


def check_dimensions(trace: SimulationTrace) -> CheckResult:
    name = "dimension_monotone"
    prev = None
    for r in trace.rounds:
        for v, dim in enumerate(r.dims):
            if not 1 <= dim <= trace.n:
                return _fail(name, f"round {r.t} agent {v}: dim {dim} outside 1..{trace.n}")
            if prev is not None and dim < prev[v]:
                return _fail(name, f"round {r.t} agent {v}: dim fell from {prev[v]} to {dim}")
        prev = r.dims
    return CheckResult(name, True)


def check_variance_monotone(trace: SimulationTrace) -> CheckResult:
    slack = 0 if trace.backend == RATIONAL else FLOAT_SLACK
    for a, b in zip(trace.rounds, trace.rounds[1:]):
        for v in range(trace.n):
            if b.tau_sq[v] > a.tau_sq[v] + slack:
                return _fail("variance_monotone", f"round {b.t} agent {v}: tau^2 increased")
    return CheckResult("variance_monotone", True)


def check_self_weight(trace: SimulationTrace) -> CheckResult:
    n = trace.n
    floor = Fraction(1, n) if trace.backend == RATIONAL else 1.0 / n - FLOAT_SLACK
    worst = None
    for r in trace.rounds:
        for w, beta in enumerate(r.betas):
            if beta[w] < floor:
                return _fail("self_weight", f"round {r.t} agent {w}: own weight "
                                            f"{algebra.format_scalar(beta[w])} < 1/{n}")
            worst = beta[w] if worst is None else min(worst, beta[w])
    return CheckResult("self_weight", True, f"min own weight {float(worst):.6g} >= 1/{n}")


def check_change_implies_growth(trace: SimulationTrace) -> CheckResult:
    name = "change_implies_dimension_growth"
    counts = [0] * trace.n
    for a, b in zip(trace.rounds, trace.rounds[1:]):
        for v in range(trace.n):
            if betas_differ(a.betas[v], b.betas[v], trace.backend):
                counts[v] += 1
                if b.dims[v] <= a.dims[v]:
                    return _fail(name, f"round {b.t} agent {v}: estimator changed at dim {b.dims[v]}")
    if max(counts) > trace.n - 1:
        v = counts.index(max(counts))
        return _fail(name, f"agent {v} changed {counts[v]} times > n-1")
    return CheckResult(name, True, f"max changes per agent {max(counts)} <= n-1={trace.n - 1}")


def check_trace_consistency(trace: SimulationTrace) -> CheckResult:
    name = "trace_consistency"
    if len(trace.change_log) != len(trace.rounds):
        return _fail(name, "change_log and rounds differ in length")
    last = 0
    first_equal = None
    for t, r in enumerate(trace.rounds):
        if r.t != t:
            return _fail(name, f"round index {r.t} at position {t}")
        if t:
            changed = {v for v in range(trace.n)
                       if betas_differ(trace.rounds[t - 1].betas[v], r.betas[v], trace.backend)}
            if changed != set(trace.change_log[t]):
                return _fail(name, f"change_log[{t}] does not match the recorded estimators")
            if changed:
                last = t
        if first_equal is None and all_equal(r.betas, trace.backend):
            first_equal = t
    if trace.change_log[-1]:
        return _fail(name, "trace does not end with a stationary round")
    if last != trace.t_last_change:
        return _fail(name, f"recorded t_last_change {trace.t_last_change} != {last}")
    if first_equal != trace.t_all_equal:
        return _fail(name, f"recorded t_all_equal {trace.t_all_equal} != {first_equal}")
    return CheckResult(name, True)


def check_limit_optimality(trace: SimulationTrace) -> CheckResult:
    n = trace.n
    uniform = algebra.uniform_vector(n, trace.backend)
    fin = trace.final
    for v, beta in enumerate(fin.betas):
        if trace.backend == RATIONAL:
            ok = tuple(beta) == uniform
        else:
            ok = algebra.max_abs_diff(beta, uniform) <= FLOAT_SLACK
        if not ok:
            return _fail("limit_optimality", f"agent {v} final estimator is not the simple average")
        if not _close(fin.tau_sq[v], algebra.parse_scalar(Fraction(1, n), trace.backend),
                      trace.backend):
            return _fail("limit_optimality", f"agent {v} final tau^2 != 1/{n}")
    return CheckResult("limit_optimality", True)


def check_bounds(trace: SimulationTrace) -> list[CheckResult]:
    n, d = trace.n, metrics(trace.graph).diameter
    t = trace.t_last_change
    return [
        CheckResult("bound_2nd", t <= 2 * n * d, f"t_last_change={t} <= 2nd={2 * n * d}"
                    if t <= 2 * n * d else f"t_last_change={t} > 2nd={2 * n * d}"),
        CheckResult("bound_n_squared", t <= n * n, f"t_last_change={t}, n^2={n * n}"),
    ]


def check_stagnation(trace: SimulationTrace) -> CheckResult:
    cex = check_stagnation_lemma(trace)
    return CheckResult("stagnation_lemma", cex is None, str(cex) if cex else "")


def run_all(trace: SimulationTrace) -> list[CheckResult]:
    """Every trace invariant, in a fixed order."""
    results = [
        check_initial_state(trace),
        check_trace_consistency(trace),
        check_unbiased(trace),
        check_variance_identity(trace),
        check_dimensions(trace),
        check_variance_monotone(trace),
        check_self_weight(trace),
        check_change_implies_growth(trace),
        check_limit_optimality(trace),
        *check_bounds(trace),
        check_stagnation(trace),
    ]
    return results
