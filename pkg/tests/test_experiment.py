import math
from pathlib import Path

import numpy as np
import pytest

from angsep.analytic import stevens_cdf
from angsep.cli import main
from angsep.config import ExperimentConfig, SweepSpec, default_phi_grid, load_config
from angsep.experiment import (
    ResultRows,
    correlation_report,
    hull_split_report,
    read_results_csv,
    read_summary_csv,
    run_analytic,
    run_chunks,
    run_hull_split,
    run_simulation,
    write_results_csv,
)
from angsep.network import NetworkParams

TWO_PI = 2 * math.pi


def small_config(tmp_path, **kw):
    defaults = dict(
        network=NetworkParams(seed=7),
        n_scenarios=3000,
        output_dir=tmp_path / "out",
        phi_grid=default_phi_grid(16),
    )
    defaults.update(kw)
    return ExperimentConfig(**defaults)


def synthetic_rows(psi, gdop, l_values=None, inside=None):
    n = len(psi)
    psi = np.asarray(psi, float)
    gdop = np.asarray(gdop, float)
    if l_values is None:
        l_values = np.full(n, 4, np.int32)
    if inside is None:
        inside = (psi < math.pi).astype(np.uint8)
    return ResultRows(
        scenario_id=np.arange(n, dtype=np.int64),
        L=np.asarray(l_values, np.int32),
        psi_max=psi,
        gdop_toa=gdop,
        gdop_tdoa=gdop,
        inside_hull=np.asarray(inside, np.uint8),
        degenerate=np.zeros(n, np.uint8),
    )


# -------------------------------------------------------------------- config

def test_default_phi_grid_hits_pi_and_two_pi():
    grid = default_phi_grid(128)
    assert len(grid) == 128
    assert math.pi in grid
    assert grid[-1] == TWO_PI


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(n_scenarios=0)
    with pytest.raises(ValueError):
        ExperimentConfig(l_min=2)
    with pytest.raises(ValueError):
        ExperimentConfig(phi_grid=(0.0, 1.0))
    with pytest.raises(ValueError):
        SweepSpec("alpha", (3.0,))


def test_load_config_toml(tmp_path):
    cfg_file = tmp_path / "exp.toml"
    cfg_file.write_text(
        "\n".join(
            [
                'lambda = 4.6188e-6',
                "f = 0.5",
                "beta_over_gamma_db = -12.0",
                "seed = 99",
                "n_scenarios = 1234",
                "l_min = 4",
                "phi_grid_points = 32",
                "threads = 2",
                'output_dir = "runs"',
                'sweep_name = "f"',
                "sweep_values = [0.1, 0.5, 1.0]",
            ]
        )
    )
    cfg = load_config(str(cfg_file))
    assert cfg.network.lam == 4.6188e-6
    assert cfg.network.f == 0.5
    assert cfg.network.beta_over_gamma_db == -12.0
    assert cfg.network.seed == 99
    assert cfg.n_scenarios == 1234
    assert len(cfg.phi_grid) == 32
    assert cfg.threads == 2
    assert cfg.sweep == SweepSpec("f", (0.1, 0.5, 1.0))
    # CLI overrides win
    cfg2 = load_config(str(cfg_file), seed=1, n_scenarios=50, threads="auto", output_dir="x")
    assert cfg2.network.seed == 1
    assert cfg2.n_scenarios == 50
    assert cfg2.threads >= 1
    assert cfg2.output_dir == Path("x")


def test_load_config_rejects_unknown_keys(tmp_path):
    cfg_file = tmp_path / "bad.toml"
    cfg_file.write_text("not_a_key = 3\n")
    with pytest.raises(ValueError, match="unknown config keys"):
        load_config(str(cfg_file))


# ---------------------------------------------------------------- simulation

def test_run_simulation_outputs(tmp_path):
    cfg = small_config(tmp_path)
    result = run_simulation(cfg)
    assert result.paths["results"].exists()
    assert result.paths["summary"].exists()
    assert result.paths["curves"].exists()

    rows = read_results_csv(result.paths["results"])
    assert len(rows) == len(result.rows)
    assert np.array_equal(rows.scenario_id, result.rows.scenario_id)
    # float round trip through repr is exact
    assert np.array_equal(rows.psi_max, result.rows.psi_max)
    assert np.array_equal(rows.gdop_tdoa, result.rows.gdop_tdoa)

    summary = read_summary_csv(result.paths["summary"])
    pmf_total = sum(v for (name, _), (v, _) in summary.items() if name == "p_n")
    assert pmf_total == pytest.approx(1.0, abs=1e-12)

    # conditioning consistency: summary values equal recomputation from rows
    m = len(rows)
    for phi in cfg.phi_grid:
        got, _ = summary[("p_psi_le_phi", repr(float(phi)))]
        assert got == np.mean(rows.psi_max <= phi)
    got, _ = summary[("p_inside_hull", "")]
    assert got == np.mean(rows.inside_hull == 1)


def test_high_threshold_yields_zero_rows(tmp_path):
    cfg = small_config(tmp_path, network=NetworkParams(seed=7, beta_over_gamma_db=200.0),
                       n_scenarios=300)
    result = run_simulation(cfg)
    assert len(result.rows) == 0
    assert result.summary[("p_n", "0")][0] == 1.0
    assert result.paths["results"].exists()


def test_results_csv_byte_identical_across_runs_and_threads(tmp_path):
    cfg1 = small_config(tmp_path / "a", n_scenarios=9000)
    cfg2 = small_config(tmp_path / "b", n_scenarios=9000, threads=2)
    run_simulation(cfg1)
    run_simulation(cfg1)  # overwrite in place
    b1 = (cfg1.output_dir / "results.csv").read_bytes()
    run_simulation(cfg2)
    b2 = (cfg2.output_dir / "results.csv").read_bytes()
    assert b1 == b2


def test_run_chunks_parallel_matches_serial():
    params = NetworkParams(seed=13)
    c1, r1 = run_chunks(params, 9000, 4, True, threads=1)
    c2, r2 = run_chunks(params, 9000, 4, True, threads=3)
    assert np.array_equal(c1, c2)
    for i in range(7):
        assert np.array_equal(r1[i], r2[i])


# --------------------------------------------------------------- correlation

def test_correlation_report_synthetic_monotone():
    rng = np.random.default_rng(3)
    psi = rng.uniform(0.5, TWO_PI, 5000)
    rows = synthetic_rows(psi, np.exp(psi))
    rep = {b.label: b for b in correlation_report(rows, l_min=4)}
    b4 = rep["L=4"]
    assert b4.spearman == pytest.approx(1.0)
    assert b4.pearson_log_gdop == pytest.approx(1.0, abs=1e-9)
    assert 0 < b4.pearson_gdop < 1.0


def test_correlation_small_bins_unavailable():
    rows = synthetic_rows([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    rep = correlation_report(rows, l_min=4)
    assert all(b.spearman is None for b in rep)
    assert all(b.n < 100 for b in rep)


def test_run_correlation_reuses_results_csv(tmp_path):
    cfg = small_config(tmp_path, n_scenarios=4000)
    run_simulation(cfg)
    report = run_correlation_from(cfg)
    assert (cfg.output_dir / "correlations.csv").exists()
    labels = [b.label for b in report]
    assert labels == ["L=4", "L=5", "L=6", "L>=4"]


def run_correlation_from(cfg):
    from angsep.experiment import run_correlation

    return run_correlation(cfg)


# ------------------------------------------------------------------ analytic

def test_run_analytic_curves(tmp_path):
    cfg = small_config(tmp_path, n_scenarios=2000)
    curves, expected = run_analytic(cfg)
    for L, val in ((3, 0.25), (4, 0.5), (5, 0.6875)):
        grid, F = curves[f"stevens_L{L}"]
        i = list(grid).index(math.pi)
        assert F[i] == pytest.approx(val, rel=1e-12)
    assert any(k.startswith("weighted_") for k in curves)
    assert (cfg.output_dir / "curves.csv").exists()
    assert (cfg.output_dir / "expected_bs.csv").exists()
    phis = [p for p, _ in expected]
    assert all(p < TWO_PI for p in phis)


def test_weighted_curve_with_degenerate_pmf_equals_stevens():
    from angsep.analytic import weighted_cdf

    grid = default_phi_grid(16)
    for phi in grid:
        assert weighted_cdf(phi, {4: 1.0}).value == pytest.approx(
            stevens_cdf(4, phi), rel=1e-12
        )


def test_f_sweep_curves_are_ordered(tmp_path):
    cfg = small_config(
        tmp_path,
        n_scenarios=4000,
        sweep=SweepSpec("f", (0.25, 1.0)),
        phi_grid=default_phi_grid(8),
    )
    curves, _ = run_analytic(cfg)
    _, f_low = curves["weighted_f=0.25"]
    _, f_high = curves["weighted_f=1"]
    assert np.all(f_low >= f_high - 0.02)
    assert f_low[3] > f_high[3]  # strictly better at phi = pi


# ---------------------------------------------------------------- hull split

def test_hull_split_synthetic_half_plane():
    # every bearing set confined to a half plane lies outside the hull
    psi = np.linspace(math.pi + 0.01, TWO_PI - 0.01, 500)
    rows = synthetic_rows(psi, np.linspace(1, 5, 500))
    reports, _ = hull_split_report(rows, l_min=4)
    for r in reports:
        assert r.n_inside == 0
        assert r.n_outside == 500


def test_hull_split_inside_better_than_outside(tmp_path):
    cfg = small_config(tmp_path, n_scenarios=30_000)
    reports, curves = run_hull_split(cfg)
    by_label = {r.label: r for r in reports}
    r = by_label["L>=4"]
    assert r.n_inside > 100 and r.n_outside > 100
    assert r.outside_median > r.inside_median
    assert (cfg.output_dir / "hull_split.csv").exists()
    assert (cfg.output_dir / "hull_curves.csv").exists()
    assert "hull_inside_Lge4" in curves
    assert "hull_outside_Lge4" in curves


def test_hull_split_empty_bin_unavailable():
    rows = synthetic_rows([0.5, 0.6], [1.0, 2.0])
    reports, _ = hull_split_report(rows, l_min=4)
    assert all(r.outside_median is None for r in reports)


# ----------------------------------------------------------------------- CLI

def test_cli_simulate_and_expected_bs(tmp_path, capsys):
    out = tmp_path / "cli"
    rc = main(["simulate", "--scenarios", "500", "--seed", "21", "--out", str(out)])
    assert rc == 0
    assert (out / "results.csv").exists()
    text = capsys.readouterr().out
    assert "wrote" in text

    rc = main(["expected-bs", "--phi", str(math.pi), "--out", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "expected_bs=5.0000" in text


def test_cli_analytic_and_hull(tmp_path, capsys):
    out = tmp_path / "cli2"
    rc = main(["analytic", "--scenarios", "400", "--seed", "21", "--out", str(out)])
    assert rc == 0
    rc = main(["hull-split", "--scenarios", "8000", "--seed", "21", "--out", str(out)])
    assert rc == 0
    capsys.readouterr()


def test_cli_correlate(tmp_path, capsys):
    out = tmp_path / "cli3"
    rc = main(["correlate", "--scenarios", "4000", "--seed", "21", "--out", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "spearman" in text


# ------------------------------------------------------------------- schema

def test_results_schema_version_enforced(tmp_path):
    p = tmp_path / "results.csv"
    p.write_text("scenario_id,L\n1,4\n")
    with pytest.raises(ValueError, match="schema"):
        read_results_csv(p)


def test_write_read_roundtrip_with_infinities(tmp_path):
    rows = synthetic_rows([1.0, 4.0], [math.inf, 2.0])
    p = tmp_path / "results.csv"
    write_results_csv(p, rows)
    back = read_results_csv(p)
    assert math.isinf(back.gdop_tdoa[0])
    assert np.array_equal(back.psi_max, rows.psi_max)
