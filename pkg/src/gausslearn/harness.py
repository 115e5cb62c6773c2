"""Batch sweeps over graph families and seeds, with CSV output."""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import checks, engine, oracle
from .algebra import FLOAT, check_backend
from .errors import ConvergenceBoundError, ParameterError
from .graphs import canonical_family, make_family, metrics

CSV_COLUMNS = ("family", "n", "degree", "d", "d_star", "seed", "t_last_change",
               "t_all_equal", "bound_2nd", "max_dim_step", "invariants_ok")


@dataclass(frozen=True)
class SweepConfig:
    family: str
    n_values: tuple[int, ...]
    degree: Optional[int] = None
    seeds: tuple[int, ...] = (0,)
    backend: str = FLOAT
    out: Optional[str] = None
    workers: int = 1
    s_true: float = 0.0
    deterministic: bool = True

    def __post_init__(self):
        object.__setattr__(self, "family", canonical_family(self.family))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        check_backend(self.backend)
        if not self.n_values:
            raise ParameterError("n_values is empty")
        if len(set(self.seeds)) != len(self.seeds) or not self.seeds:
            raise ParameterError("seeds must be non-empty and distinct")
        for n in self.n_values:
            if n < 1:
                raise ParameterError(f"n must be positive, got {n}")
            if self.family == "regular_random":
                if self.degree is None or not 2 <= self.degree < n or (n * self.degree) % 2:
                    raise ParameterError(
                        f"infeasible regular_random cell n={n}, degree={self.degree}")


@dataclass(frozen=True)
class SweepRow:
    family: str
    n: int
    degree: Optional[int]
    d: int
    d_star: int
    seed: int
    t_last_change: int
    t_all_equal: Optional[int]
    bound_2nd: int
    max_dim_step: int
    invariants_ok: bool
    failures: tuple[str, ...] = field(default=(), compare=False)

    def csv_record(self) -> list:
        return [self.family, self.n, "" if self.degree is None else self.degree, self.d,
                self.d_star, self.seed, self.t_last_change,
                "" if self.t_all_equal is None else self.t_all_equal, self.bound_2nd,
                self.max_dim_step, str(self.invariants_ok).lower()]


def max_dim_step(trace: engine.SimulationTrace) -> int:
    return max((b - a for r0, r1 in zip(trace.rounds, trace.rounds[1:])
                for a, b in zip(r0.dims, r1.dims)), default=0)


def run_cell(family: str, n: int, degree: Optional[int], seed: int, backend: str = FLOAT,
             s_true: float = 0.0) -> SweepRow:
    """Simulate one graph and run the full invariant suite plus the oracle."""
    g = make_family(family, n, degree, seed=seed)
    m = metrics(g)
    failures = []
    try:
        trace = engine.run(g, backend)
    except ConvergenceBoundError as exc:
        trace = exc.trace
        failures.append(f"run: {exc}")
    for c in checks.run_all(trace):
        if not c.ok:
            failures.append(c.line())
    report = oracle.cross_validate(trace, oracle.sample_world(s_true, 1.0, n, seed))
    if not report.ok:
        failures.append("oracle: " + report.summary())
    return SweepRow(
        family=canonical_family(family), n=n,
        degree=degree if canonical_family(family) == "regular_random" else None,
        d=m.diameter, d_star=m.min_degree, seed=seed,
        t_last_change=trace.t_last_change, t_all_equal=trace.t_all_equal,
        bound_2nd=2 * n * m.diameter, max_dim_step=max_dim_step(trace),
        invariants_ok=not failures, failures=tuple(failures))


def _cell_args(config: SweepConfig):
    return [(config.family, n, config.degree, s, config.backend, config.s_true)
            for n in config.n_values for s in config.seeds]


def _run_args(args):
    return run_cell(*args)


def sweep(config: SweepConfig) -> list[SweepRow]:
    """One row per (n, seed) in grid order; writes CSV + JSON sidecar if ``config.out``."""
    args = _cell_args(config)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_run_args, args))  # map preserves submission order
    else:
        rows = [_run_args(a) for a in args]
    if config.out:
        write_csv(rows, config.out, deterministic=config.deterministic)
        write_sidecar(config, config.out)
    return rows


def format_csv(rows: Sequence[SweepRow], deterministic: bool = True) -> str:
    buf = io.StringIO()
    if not deterministic:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.csv_record())
    return buf.getvalue()


def write_csv(rows, path, deterministic: bool = True) -> None:
    Path(path).write_text(format_csv(rows, deterministic))


def write_sidecar(config: SweepConfig, csv_path) -> Path:
    p = Path(str(csv_path) + ".json")
    p.write_text(json.dumps(asdict(config), indent=2, sort_keys=True) + "\n")
    return p


def read_csv(path) -> list[SweepRow]:
    lines = [l for l in Path(path).read_text().splitlines() if not l.startswith("#")]
    rows = []
    for rec in csv.DictReader(lines):
        opt = lambda k: int(rec[k]) if rec[k] != "" else None
        rows.append(SweepRow(rec["family"], int(rec["n"]), opt("degree"), int(rec["d"]),
                             int(rec["d_star"]), int(rec["seed"]), int(rec["t_last_change"]),
                             opt("t_all_equal"), int(rec["bound_2nd"]),
                             int(rec["max_dim_step"]), rec["invariants_ok"] == "true"))
    return rows


@dataclass(frozen=True)
class FamilyReport:
    family: str
    n_values: tuple[int, ...]
    medians: tuple[float, ...]
    slope: float
    intercept: float
    max_t_over_n: float
    max_t_dstar_over_n: float
    max_dim_step_counts: dict

    def lines(self) -> list[str]:
        med = ", ".join(f"n={n}: {m:g}" for n, m in zip(self.n_values, self.medians))
        return [
            f"{self.family}: median t_last_change {med}",
            f"  least-squares slope of median vs n = {self.slope:.4f} (intercept {self.intercept:.3f})",
            f"  max t/n = {self.max_t_over_n:.4f}; max t*d_star/n = {self.max_t_dstar_over_n:.4f}",
            f"  max_dim_step distribution: {self.max_dim_step_counts}",
        ]


def conjecture_report(rows: Sequence[SweepRow]) -> dict[str, FamilyReport]:
    """Linear fit of median convergence time against n, per family.

    Evidence only: no pass/fail verdict is attached.
    """
    out = {}
    for family in sorted({r.family for r in rows}):
        fr = [r for r in rows if r.family == family]
        ns = sorted({r.n for r in fr})
        if len(ns) < 2:
            raise ParameterError(f"family {family} needs rows for at least two distinct n")
        medians = [statistics.median(r.t_last_change for r in fr if r.n == n) for n in ns]
        slope, intercept = np.polyfit(np.asarray(ns, float), np.asarray(medians, float), 1)
        dist: dict[int, int] = {}
        for r in fr:
            dist[r.max_dim_step] = dist.get(r.max_dim_step, 0) + 1
        out[family] = FamilyReport(
            family, tuple(ns), tuple(float(m) for m in medians), float(slope), float(intercept),
            max(r.t_last_change / r.n for r in fr),
            max(r.t_last_change * r.d_star / r.n for r in fr),
            dict(sorted(dist.items())))
    return out
