"""Monte Carlo block runners: compiled kernel with a NumPy fallback.

Both backends draw from the same per-scenario Philox streams through NumPy's
random machinery, so the raw draws are bit-identical; derived metrics agree
to floating-point rounding.  Selection happens at import time and can be
forced with the ANGSEP_BACKEND environment variable ("compiled" or
"python").
"""

from __future__ import annotations

import os
from typing import Optional, Tuple

import numpy as np

from .geometry import geometry_record_from_points
from .network import (
    NetworkParams,
    ScenarioStream,
    draw_scenario_arrays,
    hearable_order,
    link_gains,
    sinr_all,
)

try:
    from . import _speedups
except ImportError:  # pragma: no cover - depends on the build environment
    _speedups = None

_ENV_BACKEND = os.environ.get("ANGSEP_BACKEND", "").strip().lower()
_COMPILED_NAMES = {"compiled", "cython", "c"}
_PYTHON_NAMES = {"python", "reference", "py"}


def compiled_available() -> bool:
    return _speedups is not None


def active_backend() -> str:
    """Backend used by default: "compiled" when built, else "python"."""
    if _ENV_BACKEND in _PYTHON_NAMES:
        return "python"
    if _ENV_BACKEND in _COMPILED_NAMES:
        if _speedups is None:
            raise ImportError(
                "ANGSEP_BACKEND requests the compiled kernel but angsep._speedups "
                "is not built; install with the C extension or unset the variable"
            )
        return "compiled"
    return "compiled" if _speedups is not None else "python"


BlockRows = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def empty_rows() -> BlockRows:
    return (
        np.empty(0, np.int64),
        np.empty(0, np.int32),
        np.empty(0, np.float64),
        np.empty(0, np.float64),
        np.empty(0, np.float64),
        np.empty(0, np.uint8),
        np.empty(0, np.uint8),
    )


def run_block(
    params: NetworkParams,
    start: int,
    n: int,
    l_min: int = 4,
    collect_rows: bool = True,
    backend: Optional[str] = None,
) -> Tuple[np.ndarray, BlockRows]:
    """Evaluate scenarios ``start .. start+n-1``.

    Returns (hearable counts per scenario, row arrays for scenarios with at
    least ``l_min`` hearable BSs).  Row arrays are
    (scenario_id, L, psi_max, gdop_toa, gdop_tdoa, inside_hull, degenerate).
    Output is a pure function of (params, start, n, l_min): independent of
    backend choice up to float rounding, and of any partitioning into
    sub-blocks exactly.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if collect_rows and l_min < 3:
        raise ValueError("row collection needs l_min >= 3 (hull and TDOA need 3 BSs)")
    which = backend or active_backend()
    if which == "compiled":
        if _speedups is None:
            raise ImportError("compiled backend requested but not built")
        return _speedups.run_block(params, start, n, l_min, collect_rows)
    return _run_block_python(params, start, n, l_min, collect_rows)


def _run_block_python(
    params: NetworkParams, start: int, n: int, l_min: int, collect_rows: bool
) -> Tuple[np.ndarray, BlockRows]:
    stream = ScenarioStream()
    counts = np.zeros(n, dtype=np.int64)
    sids, ls, psis, gtoas, gtdoas, insides, degens = [], [], [], [], [], [], []
    threshold = params.threshold_linear
    for j in range(n):
        sid = start + j
        rng = stream.reset(params.seed, sid)
        x, y, shadow, active = draw_scenario_arrays(rng, params)
        w = link_gains(x, y, shadow, params)
        s = sinr_all(w, active, params)
        hear = hearable_order(s, threshold)
        m = hear.size
        counts[j] = m
        if collect_rows and m >= l_min:
            pts = np.column_stack((x[hear], y[hear]))
            rec = geometry_record_from_points(pts)
            sids.append(sid)
            ls.append(rec.L)
            psis.append(rec.psi_max)
            gtoas.append(rec.gdop_toa)
            gtdoas.append(rec.gdop_tdoa)
            insides.append(rec.inside_hull)
            degens.append(rec.degenerate)
    rows = (
        np.asarray(sids, np.int64),
        np.asarray(ls, np.int32),
        np.asarray(psis, np.float64),
        np.asarray(gtoas, np.float64),
        np.asarray(gtdoas, np.float64),
        np.asarray(insides, np.uint8),
        np.asarray(degens, np.uint8),
    )
    return counts, rows


def sample_draws(params: NetworkParams, scenario_id: int, backend: Optional[str] = None):
    """Raw stream draws for one scenario: (k, u_r, u_theta, z, u_activity).

    Exposed so tests can pin the two backends to the same Philox stream.
    """
    which = backend or active_backend()
    if which == "compiled":
        if _speedups is None:
            raise ImportError("compiled backend requested but not built")
        return _speedups.sample_draws(params, scenario_id)
    stream = ScenarioStream()
    rng = stream.reset(params.seed, scenario_id)
    k = int(rng.poisson(params.mean_count))
    return k, rng.random(k), rng.random(k), rng.standard_normal(k), rng.random(k)
