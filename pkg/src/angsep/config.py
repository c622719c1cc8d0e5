"""Experiment configuration and the flat TOML config file format.

All keys live at the top level of the file; dB-valued fields carry a ``_db``
suffix.  ``lambda`` in the file maps to ``NetworkParams.lam`` (Python keyword).
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .network import NetworkParams

TWO_PI = 2.0 * math.pi

SWEEPABLE = ("f", "beta_over_gamma_db", "lambda")

_NETWORK_KEYS = {
    "lambda": "lam",
    "f": "f",
    "alpha": "alpha",
    "beta_over_gamma_db": "beta_over_gamma_db",
    "sigma_s_db": "sigma_s_db",
    "sigma2": "sigma2",
    "tx_power": "tx_power",
    "window_radius": "window_radius",
    "seed": "seed",
}


def default_phi_grid(n_points: int = 128) -> Tuple[float, ...]:
    """Evenly spaced grid over (0, 2*pi]; includes pi exactly when n is even."""
    return tuple(TWO_PI * (k + 1) / n_points for k in range(n_points))


@dataclass(frozen=True)
class SweepSpec:
    name: str
    values: Tuple[float, ...]

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise ValueError(f"sweep name must be one of {SWEEPABLE}")
        if len(self.values) == 0:
            raise ValueError("sweep needs at least one value")
        for v in self.values:
            self.apply(NetworkParams(), v)  # validity check via NetworkParams

    def apply(self, network: NetworkParams, value: float) -> NetworkParams:
        field_name = _NETWORK_KEYS[self.name]
        return replace(network, **{field_name: value})


@dataclass(frozen=True)
class ExperimentConfig:
    network: NetworkParams = field(default_factory=NetworkParams)
    n_scenarios: int = 100_000
    l_min: int = 4
    phi_grid: Tuple[float, ...] = field(default_factory=default_phi_grid)
    sweep: Optional[SweepSpec] = None
    output_dir: Path = Path("angsep-out")
    threads: int = 1
    psi_bin_edges: Tuple[float, ...] = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2, TWO_PI)

    def __post_init__(self):
        if self.n_scenarios < 1:
            raise ValueError("n_scenarios must be >= 1")
        if self.l_min < 3:
            raise ValueError("l_min must be >= 3 (hull membership and TDOA need 3 BSs)")
        grid = tuple(float(p) for p in self.phi_grid)
        if len(grid) == 0 or any(not 0.0 < p <= TWO_PI for p in grid):
            raise ValueError("phi_grid values must lie in (0, 2*pi]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("phi_grid must be strictly increasing")
        object.__setattr__(self, "phi_grid", grid)
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        edges = tuple(float(e) for e in self.psi_bin_edges)
        if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("psi_bin_edges must be strictly increasing with >= 2 entries")
        object.__setattr__(self, "psi_bin_edges", edges)
        object.__setattr__(self, "output_dir", Path(self.output_dir))


def _resolve_threads(raw) -> int:
    if isinstance(raw, str):
        if raw.strip().lower() == "auto":
            import os

            return max(1, os.cpu_count() or 1)
        raise ValueError("threads must be an integer or 'auto'")
    return int(raw)


def load_config(
    path: Optional[str] = None,
    seed: Optional[int] = None,
    n_scenarios: Optional[int] = None,
    threads: Optional[str] = None,
    output_dir: Optional[str] = None,
) -> ExperimentConfig:
    """Build a config from an optional TOML file plus CLI overrides."""
    data = {}
    if path is not None:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)

    net_kwargs = {}
    for file_key, attr in _NETWORK_KEYS.items():
        if file_key in data:
            value = data.pop(file_key)
            net_kwargs[attr] = int(value) if attr == "seed" else float(value)
    if seed is not None:
        net_kwargs["seed"] = int(seed)
    network = NetworkParams(**net_kwargs)

    kwargs = {"network": network}
    if "n_scenarios" in data:
        kwargs["n_scenarios"] = int(data.pop("n_scenarios"))
    if n_scenarios is not None:
        kwargs["n_scenarios"] = int(n_scenarios)
    if "l_min" in data:
        kwargs["l_min"] = int(data.pop("l_min"))
    if "phi_grid_points" in data:
        kwargs["phi_grid"] = default_phi_grid(int(data.pop("phi_grid_points")))
    if "phi_grid" in data:
        kwargs["phi_grid"] = tuple(float(v) for v in data.pop("phi_grid"))
    if "psi_bin_edges" in data:
        kwargs["psi_bin_edges"] = tuple(float(v) for v in data.pop("psi_bin_edges"))
    if "threads" in data:
        kwargs["threads"] = _resolve_threads(data.pop("threads"))
    if threads is not None:
        kwargs["threads"] = _resolve_threads(threads)
    if "output_dir" in data:
        kwargs["output_dir"] = Path(data.pop("output_dir"))
    if output_dir is not None:
        kwargs["output_dir"] = Path(output_dir)

    sweep_name = data.pop("sweep_name", None)
    sweep_values = data.pop("sweep_values", None)
    if (sweep_name is None) != (sweep_values is None):
        raise ValueError("sweep_name and sweep_values must be given together")
    if sweep_name is not None:
        kwargs["sweep"] = SweepSpec(str(sweep_name), tuple(float(v) for v in sweep_values))

    if data:
        raise ValueError(f"unknown config keys: {sorted(data)}")
    return ExperimentConfig(**kwargs)
