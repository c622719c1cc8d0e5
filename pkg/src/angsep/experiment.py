"""Monte Carlo orchestration and CSV emission.

Work is split into fixed-size scenario blocks; each block is a pure function
of (params, block range), so any worker count produces the same ordered
output and the CSV files are byte-identical run to run.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .analytic import expected_bs_for_target, stevens_cdf, weighted_cdf
from .config import ExperimentConfig, SweepSpec
from .network import HearabilityTable, NetworkParams
from .stats import DistributionTable, count_nonfinite, ecdf, pearson_r, spearman_rho

SCHEMA_VERSION = "angsep-csv v1"
CHUNK = 4096
TWO_PI = 2.0 * math.pi

RESULTS_HEADER = "scenario_id,L,psi_max,gdop_toa,gdop_tdoa,inside_hull,degenerate_flag"
SUMMARY_HEADER = "statistic,key,value,stderr"
CURVES_HEADER = "curve_id,x,F"

#: curves with fewer source samples than this are not emitted
MIN_CURVE_SAMPLES = 100
#: most per-L empirical CDF curves emitted by one simulation
MAX_L_CURVES = 8
#: ECDF curves are thinned to at most this many points for CSV output
MAX_CURVE_POINTS = 2048


def _fmt(x: float) -> str:
    return repr(float(x))


def _chunk_args(n: int) -> List[Tuple[int, int]]:
    return [(start, min(CHUNK, n - start)) for start in range(0, n, CHUNK)]


def _worker(args):
    params, start, count, l_min, collect_rows, backend = args
    return kernels.run_block(params, start, count, l_min, collect_rows, backend=backend)


def run_chunks(
    params: NetworkParams,
    n_scenarios: int,
    l_min: int,
    collect_rows: bool,
    threads: int = 1,
    backend: Optional[str] = None,
    row_sink=None,
):
    """Run all scenario blocks and merge them in scenario order.

    ``row_sink`` (if given) is called once per block, in order, with that
    block's row arrays; useful for streaming CSV output.
    """
    tasks = _chunk_args(n_scenarios)
    counts_parts = []
    row_parts = []
    if threads <= 1 or len(tasks) == 1:
        results = (
            kernels.run_block(params, s, c, l_min, collect_rows, backend=backend)
            for s, c in tasks
        )
    else:
        pool = ProcessPoolExecutor(max_workers=threads)
        results = pool.map(_worker, [(params, s, c, l_min, collect_rows, backend) for s, c in tasks])
    try:
        for counts, rows in results:
            counts_parts.append(counts)
            row_parts.append(rows)
            if row_sink is not None:
                row_sink(rows)
    finally:
        if threads > 1 and len(tasks) > 1:
            pool.shutdown()
    counts = np.concatenate(counts_parts) if counts_parts else np.empty(0, np.int64)
    merged = tuple(
        np.concatenate([part[i] for part in row_parts]) if row_parts else kernels.empty_rows()[i]
        for i in range(7)
    )
    return counts, merged


@dataclass(frozen=True)
class ResultRows:
    """Column view of the per-scenario result rows (L >= l_min only)."""

    scenario_id: np.ndarray
    L: np.ndarray
    psi_max: np.ndarray
    gdop_toa: np.ndarray
    gdop_tdoa: np.ndarray
    inside_hull: np.ndarray
    degenerate: np.ndarray

    @classmethod
    def from_tuple(cls, rows) -> "ResultRows":
        return cls(*rows)

    def __len__(self):
        return self.scenario_id.size


def write_results_csv(path: Path, rows: ResultRows):
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# {SCHEMA_VERSION} results\n")
        fh.write(RESULTS_HEADER + "\n")
        _append_result_rows(fh, rows)


def _append_result_rows(fh, rows):
    if isinstance(rows, tuple):
        rows = ResultRows.from_tuple(rows)
    for i in range(len(rows)):
        fh.write(
            f"{rows.scenario_id[i]},{rows.L[i]},{_fmt(rows.psi_max[i])},"
            f"{_fmt(rows.gdop_toa[i])},{_fmt(rows.gdop_tdoa[i])},"
            f"{int(rows.inside_hull[i])},{int(rows.degenerate[i])}\n"
        )


def read_results_csv(path: Path) -> ResultRows:
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith(f"# {SCHEMA_VERSION}"):
            raise ValueError(f"unexpected schema line in {path}: {first.strip()!r}")
        header = fh.readline().strip()
        if header != RESULTS_HEADER:
            raise ValueError(f"unexpected results header: {header!r}")
        cols = [[], [], [], [], [], [], []]
        for line in fh:
            parts = line.rstrip("\n").split(",")
            for c, p in zip(cols, parts):
                c.append(p)
    return ResultRows(
        np.asarray(cols[0], np.int64),
        np.asarray(cols[1], np.int32),
        np.asarray(cols[2], np.float64),
        np.asarray(cols[3], np.float64),
        np.asarray(cols[4], np.float64),
        np.asarray(cols[5], np.uint8),
        np.asarray(cols[6], np.uint8),
    )


def write_summary_csv(path: Path, stats: Sequence[Tuple[str, str, float, Optional[float]]]):
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# {SCHEMA_VERSION} summary\n")
        fh.write(SUMMARY_HEADER + "\n")
        for name, key, value, stderr in stats:
            se = "" if stderr is None else _fmt(stderr)
            fh.write(f"{name},{key},{_fmt(value)},{se}\n")


def read_summary_csv(path: Path) -> Dict[Tuple[str, str], Tuple[float, Optional[float]]]:
    out = {}
    with open(path) as fh:
        fh.readline()
        fh.readline()
        for line in fh:
            name, key, value, se = line.rstrip("\n").split(",")
            out[(name, key)] = (float(value), float(se) if se else None)
    return out


def write_curves_csv(path: Path, curves: Dict[str, Tuple[np.ndarray, np.ndarray]]):
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# {SCHEMA_VERSION} curves\n")
        fh.write(CURVES_HEADER + "\n")
        for curve_id, (x, F) in curves.items():
            for xi, fi in zip(x, F):
                fh.write(f"{curve_id},{_fmt(xi)},{_fmt(fi)}\n")


def _thin_table(table: DistributionTable) -> Tuple[np.ndarray, np.ndarray]:
    n = table.x.size
    if n <= MAX_CURVE_POINTS:
        return table.x, table.F
    idx = np.unique(np.linspace(0, n - 1, MAX_CURVE_POINTS).astype(np.int64))
    return table.x[idx], table.F[idx]


def _binom_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n) if n > 0 else math.nan


@dataclass(frozen=True)
class SimulationResult:
    config: ExperimentConfig
    hearability: HearabilityTable
    rows: ResultRows
    summary: Dict[Tuple[str, str], Tuple[float, Optional[float]]]
    paths: Dict[str, Path]


def run_simulation(config: ExperimentConfig, backend: Optional[str] = None, write: bool = True) -> SimulationResult:
    """Sample scenarios, record geometry rows, and emit the CSV outputs."""
    out = config.output_dir
    if write:
        out.mkdir(parents=True, exist_ok=True)
        results_path = out / "results.csv"
        fh = open(results_path, "w", newline="\n")
        fh.write(f"# {SCHEMA_VERSION} results\n")
        fh.write(RESULTS_HEADER + "\n")
        sink = lambda rows: _append_result_rows(fh, rows)
    else:
        fh = None
        sink = None

    try:
        counts, rows_t = run_chunks(
            config.network,
            config.n_scenarios,
            config.l_min,
            collect_rows=True,
            threads=config.threads,
            backend=backend,
            row_sink=sink,
        )
    finally:
        if fh is not None:
            fh.close()

    rows = ResultRows.from_tuple(rows_t)
    hist = np.bincount(counts)
    table = HearabilityTable(counts=hist, n_scenarios=config.n_scenarios)

    n = config.n_scenarios
    m = len(rows)
    stats: List[Tuple[str, str, float, Optional[float]]] = [("n_scenarios", "", float(n), None)]
    for L, c in enumerate(hist):
        p = c / n
        stats.append(("p_n", str(L), p, _binom_se(p, n)))
    p_ge = m / n
    stats.append(("p_n_ge", str(config.l_min), p_ge, _binom_se(p_ge, n)))
    if m > 0:
        for phi in config.phi_grid:
            p = float(np.mean(rows.psi_max <= phi))
            stats.append(("p_psi_le_phi", _fmt(phi), p, _binom_se(p, m)))
        p_in = float(np.mean(rows.inside_hull == 1))
        stats.append(("p_inside_hull", "", p_in, _binom_se(p_in, m)))

    curves: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}
    if m > 0:
        grid = np.asarray(config.phi_grid)
        cond = np.array([np.mean(rows.psi_max <= phi) for phi in grid])
        curves["psi_cdf_conditional"] = (grid, cond)
        emitted = 0
        for L in range(config.l_min, int(rows.L.max()) + 1):
            sel = rows.psi_max[rows.L == L]
            if sel.size >= MIN_CURVE_SAMPLES and emitted < MAX_L_CURVES:
                curves[f"empirical_psi_L{L}"] = _thin_table(ecdf(sel))
                emitted += 1
        edges = config.psi_bin_edges
        for b in range(len(edges) - 1):
            sel = rows.gdop_tdoa[(rows.psi_max > edges[b]) & (rows.psi_max <= edges[b + 1])]
            sel = sel[np.isfinite(sel)]
            if sel.size >= MIN_CURVE_SAMPLES:
                curves[f"gdop_tdoa_cdf_psi_bin{b}"] = _thin_table(ecdf(sel))

    paths: Dict[str, Path] = {}
    if write:
        paths["results"] = out / "results.csv"
        paths["summary"] = out / "summary.csv"
        paths["curves"] = out / "curves.csv"
        write_summary_csv(paths["summary"], stats)
        write_curves_csv(paths["curves"], curves)

    summary = {(s[0], s[1]): (s[2], s[3]) for s in stats}
    return SimulationResult(config=config, hearability=table, rows=rows, summary=summary, paths=paths)


@dataclass(frozen=True)
class CorrelationBin:
    label: str
    n: int
    n_excluded: int
    spearman: Optional[float]
    pearson_gdop: Optional[float]
    pearson_log_gdop: Optional[float]


MIN_BIN_ROWS = 100


def correlation_report(rows: ResultRows, l_min: int = 4) -> List[CorrelationBin]:
    """Correlation of psi_max against the TDOA GDOP, per hearable count bin."""
    bins: List[Tuple[str, np.ndarray]] = []
    for L in (l_min, l_min + 1, l_min + 2):
        bins.append((f"L={L}", rows.L == L))
    bins.append((f"L>={l_min}", rows.L >= l_min))
    out = []
    for label, mask in bins:
        psi = rows.psi_max[mask]
        g = rows.gdop_tdoa[mask]
        n = int(psi.size)
        excl = count_nonfinite(g)
        if n < MIN_BIN_ROWS:
            out.append(CorrelationBin(label, n, excl, None, None, None))
            continue
        out.append(
            CorrelationBin(
                label,
                n,
                excl,
                spearman_rho(psi, g),
                pearson_r(psi, g),
                pearson_r(psi, g, log_transform_y=True),
            )
        )
    return out


def run_correlation(config: ExperimentConfig, backend: Optional[str] = None) -> List[CorrelationBin]:
    """Table of rank/linear correlations; reuses results.csv when present."""
    results_path = config.output_dir / "results.csv"
    if results_path.exists():
        rows = read_results_csv(results_path)
    else:
        _, rows_t = run_chunks(
            config.network, config.n_scenarios, config.l_min,
            collect_rows=True, threads=config.threads, backend=backend,
        )
        rows = ResultRows.from_tuple(rows_t)
    report = correlation_report(rows, config.l_min)
    stats = []
    for b in report:
        stats.append(("n_rows", b.label, float(b.n), None))
        stats.append(("n_infinite_gdop", b.label, float(b.n_excluded), None))
        if b.spearman is not None:
            stats.append(("spearman", b.label, b.spearman, None))
            stats.append(("pearson_gdop", b.label, b.pearson_gdop, None))
            stats.append(("pearson_log_gdop", b.label, b.pearson_log_gdop, None))
    config.output_dir.mkdir(parents=True, exist_ok=True)
    write_summary_csv(config.output_dir / "correlations.csv", stats)
    return report


def run_analytic(config: ExperimentConfig, backend: Optional[str] = None):
    """Analytic CDF curves plus hearability-weighted curves per sweep value."""
    grid = np.asarray(config.phi_grid)
    curves: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}
    for L in range(3, 9):
        curves[f"stevens_L{L}"] = (grid, np.array([stevens_cdf(L, p) for p in grid]))

    sweep = config.sweep or SweepSpec("f", (config.network.f,))
    for value in sweep.values:
        params = sweep.apply(config.network, value)
        table = _hearability(params, config, backend)
        pmf = table.as_pmf()
        F = np.array([weighted_cdf(p, pmf, config.l_min).value for p in grid])
        curves[f"weighted_{sweep.name}={value:g}"] = (grid, F)

    expected = [(phi, expected_bs_for_target(phi)) for phi in grid if phi < TWO_PI]
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    write_curves_csv(out / "curves.csv", curves)
    write_summary_csv(
        out / "expected_bs.csv",
        [("expected_bs", _fmt(phi), val, None) for phi, val in expected],
    )
    return curves, expected


def _hearability(params: NetworkParams, config: ExperimentConfig, backend) -> HearabilityTable:
    counts, _ = run_chunks(
        params, config.n_scenarios, config.l_min,
        collect_rows=False, threads=config.threads, backend=backend,
    )
    hist = np.bincount(counts)
    return HearabilityTable(counts=hist, n_scenarios=config.n_scenarios)


@dataclass(frozen=True)
class HullSplitReport:
    label: str
    n_inside: int
    n_outside: int
    inside_p95: Optional[float]
    inside_median: Optional[float]
    outside_median: Optional[float]


def hull_split_report(rows: ResultRows, l_min: int = 4) -> Tuple[List[HullSplitReport], Dict[str, Tuple[np.ndarray, np.ndarray]]]:
    """GDOP ECDFs conditioned on convex-hull membership, for L=l_min and L>=l_min.

    Degenerate boundary cases are excluded from both sides.
    """
    reports = []
    curves: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}
    ok = rows.degenerate == 0
    for label, mask in ((f"L={l_min}", ok & (rows.L == l_min)), (f"L>={l_min}", ok & (rows.L >= l_min))):
        gin = rows.gdop_tdoa[mask & (rows.inside_hull == 1)]
        gout = rows.gdop_tdoa[mask & (rows.inside_hull == 0)]
        p95 = float(np.quantile(gin, 0.95)) if gin.size else None
        med_in = float(np.median(gin)) if gin.size else None
        med_out = float(np.median(gout)) if gout.size else None
        reports.append(HullSplitReport(label, int(gin.size), int(gout.size), p95, med_in, med_out))
        suffix = label.replace("=", "").replace(">", "ge")
        if gin[np.isfinite(gin)].size >= MIN_CURVE_SAMPLES:
            curves[f"hull_inside_{suffix}"] = _thin_table(ecdf(gin))
        if gout[np.isfinite(gout)].size >= MIN_CURVE_SAMPLES:
            curves[f"hull_outside_{suffix}"] = _thin_table(ecdf(gout))
    return reports, curves


def run_hull_split(config: ExperimentConfig, backend: Optional[str] = None):
    results_path = config.output_dir / "results.csv"
    if results_path.exists():
        rows = read_results_csv(results_path)
    else:
        _, rows_t = run_chunks(
            config.network, config.n_scenarios, config.l_min,
            collect_rows=True, threads=config.threads, backend=backend,
        )
        rows = ResultRows.from_tuple(rows_t)
    reports, curves = hull_split_report(rows, config.l_min)
    stats = []
    for r in reports:
        stats.append(("hull_n_inside", r.label, float(r.n_inside), None))
        stats.append(("hull_n_outside", r.label, float(r.n_outside), None))
        if r.inside_p95 is not None:
            stats.append(("hull_inside_gdop_p95", r.label, r.inside_p95, None))
            stats.append(("hull_inside_gdop_median", r.label, r.inside_median, None))
        if r.outside_median is not None:
            stats.append(("hull_outside_gdop_median", r.label, r.outside_median, None))
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    write_summary_csv(out / "hull_split.csv", stats)
    write_curves_csv(out / "hull_curves.csv", curves)
    return reports, curves
