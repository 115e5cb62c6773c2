"""Ground truth from realized signals, computed without the engine's algebra.

Signals are drawn from numpy's Philox counter-based generator
(``numpy.random.Generator(numpy.random.Philox(seed))``), so a seed fixes the
draws on any platform running the same numpy bit generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .engine import SimulationTrace
from .errors import ParameterError, SingularMatrixError
from .graphs import Graph

DEFAULT_PRIOR_VAR = 1e8
CROSS_TOL = 1e-6
FINAL_MEAN_TOL = 1e-9


@dataclass(frozen=True)
class RealizedWorld:
    s_true: float
    signals: tuple[float, ...]
    sigma: float = 1.0
    seed: int = 0

    @property
    def n(self) -> int:
        return len(self.signals)


def sample_world(s_true: float = 0.0, sigma: float = 1.0, n: int = 1, seed: int = 0) -> RealizedWorld:
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    rng = np.random.Generator(np.random.Philox(seed))
    draws = rng.normal(loc=s_true, scale=sigma, size=n)
    return RealizedWorld(float(s_true), tuple(draws.tolist()), float(sigma), seed)


def posterior_mean_direct(memory: Sequence[Sequence], world: RealizedWorld,
                          prior_var: float = DEFAULT_PRIOR_VAR) -> float:
    """E[S | observed values of the memory estimators] under a Normal(0, prior_var) prior.

    The observed values ``r = A s`` (rows of ``A`` are the memory vectors)
    are rotated onto an orthonormal basis of the row space of ``A`` via SVD,
    giving independent observations ``z = b S + sigma * noise`` with
    ``b = V' 1``. The posterior mean is then the ridge solution
    ``b'z / (b'b + sigma^2 / prior_var)``. Dependent memory rows are harmless.
    """
    if not prior_var > 0:
        raise ParameterError("prior_var must be positive")
    a = np.asarray([[float(x) for x in row] for row in memory], dtype=float)
    if a.ndim != 2 or a.shape[1] != world.n:
        raise ParameterError(f"memory vectors must have length {world.n}")
    r = a @ np.asarray(world.signals)
    u, sv, vt = np.linalg.svd(a, full_matrices=False)
    if sv.size == 0 or sv[0] == 0:
        raise SingularMatrixError("memory spans nothing")
    keep = sv > sv[0] * max(a.shape) * np.finfo(float).eps * 1e3
    z = (u[:, keep].T @ r) / sv[keep]
    b = vt[keep].sum(axis=1)
    precision = b @ b + world.sigma ** 2 / prior_var
    if not precision > 0:
        raise SingularMatrixError("degenerate posterior precision")
    return float(b @ z / precision)


def memory_at(trace: SimulationTrace, w: int, t: int) -> list[tuple]:
    """Everything agent ``w`` has observed when forming its round-``t`` estimator.

    Its own signal plus every neighbour announcement from rounds ``0..t-1``.
    Rebuilt from the trace, independent of the engine's basis bookkeeping.
    """
    n = trace.n
    mem = [tuple(1.0 if j == w else 0.0 for j in range(n))]
    for s in range(t):
        for u in trace.graph.adjacency[w]:
            mem.append(tuple(float(x) for x in trace.rounds[s].betas[u]))
    return mem


@dataclass(frozen=True)
class CrossValidationReport:
    max_deviation: float
    worst_agent: int
    worst_round: int
    final_mean_deviation: float
    tol: float = CROSS_TOL
    final_tol: float = FINAL_MEAN_TOL

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tol and self.final_mean_deviation <= self.final_tol

    def summary(self) -> str:
        return (f"max |engine - oracle| = {self.max_deviation:.3e} "
                f"(agent {self.worst_agent}, round {self.worst_round}); "
                f"final vs signal mean = {self.final_mean_deviation:.3e}")


def cross_validate(trace: SimulationTrace, world: RealizedWorld,
                   prior_var: float = DEFAULT_PRIOR_VAR,
                   rounds: Optional[Sequence[int]] = None) -> CrossValidationReport:
    """Compare the engine's announced values with the direct posterior mean."""
    if world.n != trace.n:
        raise ParameterError(f"world has {world.n} signals, trace has n={trace.n}")
    signals = np.asarray(world.signals)
    worst = (0.0, 0, 0)
    ts = range(len(trace.rounds)) if rounds is None else rounds
    for t in ts:
        betas = np.asarray(trace.rounds[t].betas, dtype=float)
        announced = betas @ signals
        for w in range(trace.n):
            direct = posterior_mean_direct(memory_at(trace, w, t), world, prior_var)
            dev = abs(announced[w] - direct)
            if dev > worst[0]:
                worst = (dev, w, t)
    final = np.asarray(trace.final.betas, dtype=float) @ signals
    final_dev = float(np.max(np.abs(final - signals.mean())))
    return CrossValidationReport(float(worst[0]), worst[1], worst[2], final_dev)
