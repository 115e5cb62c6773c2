import json

import pytest

from gausslearn import harness
from gausslearn.errors import ParameterError
from gausslearn.harness import CSV_COLUMNS, SweepConfig, conjecture_report, sweep


@pytest.fixture(scope="module")
def clique_rows():
    return sweep(SweepConfig("clique", tuple(range(2, 17)), seeds=(0,), backend="rational"))


def test_clique_sweep(clique_rows):
    assert [r.t_last_change for r in clique_rows] == [1] * 15
    assert all(r.invariants_ok for r in clique_rows)


def test_path_sweep_bound():
    rows = sweep(SweepConfig("path", tuple(range(2, 17)), seeds=(0,), backend="rational"))
    for r in rows:
        assert r.t_last_change <= 2 * r.n * (r.n - 1) == r.bound_2nd
        assert r.t_last_change <= r.n ** 2
        assert r.invariants_ok


def test_small_regular_sweep_rows_in_grid_order():
    cfg = SweepConfig("regular_random", (8, 10), degree=3, seeds=(3, 1, 2))
    rows = sweep(cfg)
    assert [(r.n, r.seed) for r in rows] == [(8, 3), (8, 1), (8, 2), (10, 3), (10, 1), (10, 2)]
    assert all(r.invariants_ok and r.degree == 3 and r.d_star == 3 for r in rows)


def test_parallel_matches_serial():
    base = dict(family="regular_random", n_values=(8, 12), degree=3, seeds=(0, 1, 2))
    a = sweep(SweepConfig(**base, workers=1))
    b = sweep(SweepConfig(**base, workers=2))
    assert harness.format_csv(a) == harness.format_csv(b)


def test_csv_and_sidecar(tmp_path):
    out = tmp_path / "s.csv"
    cfg = SweepConfig("star", (3, 5, 7), seeds=(0, 1), out=str(out))
    rows = sweep(cfg)
    first = out.read_bytes()
    assert first.decode().splitlines()[0] == ",".join(CSV_COLUMNS)
    sweep(cfg)
    assert out.read_bytes() == first
    side = json.loads((tmp_path / "s.csv.json").read_text())
    assert side["family"] == "star" and side["n_values"] == [3, 5, 7]
    assert harness.read_csv(out) == rows


def test_timestamp_header_only_when_not_deterministic(tmp_path):
    rows = sweep(SweepConfig("clique", (2, 3)))
    assert harness.format_csv(rows, deterministic=False).startswith("# generated ")
    assert harness.format_csv(rows, deterministic=True).startswith("family,")


def test_star_report():
    rows = sweep(SweepConfig("star", (3, 4, 8, 12)))
    assert [r.t_last_change for r in rows] == [2, 2, 2, 2]
    rep = conjecture_report(rows)["star"]
    assert rep.slope == pytest.approx(0.0, abs=1e-12)


def test_clique_report_ratio_shrinks(clique_rows):
    rep = conjecture_report(clique_rows)["clique"]
    assert rep.max_t_over_n == pytest.approx(0.5)
    ratios = [m / n for n, m in zip(rep.n_values, rep.medians)]
    assert ratios == sorted(ratios, reverse=True)
    assert ratios[-1] == pytest.approx(1 / 16)


def test_report_needs_two_sizes():
    rows = sweep(SweepConfig("clique", (4,)))
    with pytest.raises(ParameterError):
        conjecture_report(rows)


@pytest.mark.parametrize("kw", [
    dict(family="regular_random", n_values=(9,), degree=3),
    dict(family="regular_random", n_values=(8,)),
    dict(family="clique", n_values=(4,), seeds=(1, 1)),
    dict(family="clique", n_values=()),
    dict(family="clique", n_values=(4,), backend="decimal"),
])
def test_config_validation(kw):
    with pytest.raises((ParameterError, ValueError)):
        SweepConfig(**kw)


def test_failing_row_is_flagged(monkeypatch):
    from gausslearn import checks
    real = checks.run_all
    monkeypatch.setattr(checks, "run_all",
                        lambda tr: real(tr) + [checks.CheckResult("injected", False, "x")])
    row = harness.run_cell("clique", 4, None, 0)
    assert not row.invariants_ok
    assert row.failures == ("[FAIL] injected: x",)
