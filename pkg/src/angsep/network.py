"""Poisson network deployments, per-link SINR, and hearability.

Base stations form a homogeneous Poisson process on a disk around the device.
Each link carries independent log-normal shadowing; each BS independently
carries traffic ("active") with the load probability.  Every BS is a
candidate for detection; the activity flags thin only the interference
field, so lowering the load raises every candidate's SINR.

Scenario draws are keyed by (seed, scenario_id) through a counter-based
Philox stream, which makes each scenario a pure function of its id: blocks
of scenarios can be generated in any order, on any worker count, with
bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import DegenerateInputError

TWO_PI = 2.0 * math.pi
_LN10_OVER_10 = math.log(10.0) / 10.0
_F64_MAX = float(np.finfo(np.float64).max)


@dataclass(frozen=True)
class NetworkParams:
    """Scalar model parameters; distances in meters, powers in watts."""

    lam: float = 2.0 / (math.sqrt(3.0) * 500.0**2)
    f: float = 1.0
    alpha: float = 4.0
    beta_over_gamma_db: float = -10.0
    sigma_s_db: float = 8.0
    sigma2: float = 0.0
    tx_power: float = 1.0
    window_radius: float = 5000.0
    seed: int = 12345

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ValueError("lam must be positive")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError("f must lie in [0, 1]")
        if not self.alpha > 2.0:
            raise ValueError("alpha must exceed 2")
        if self.sigma_s_db < 0.0:
            raise ValueError("sigma_s_db must be nonnegative")
        if self.sigma2 < 0.0:
            raise ValueError("sigma2 must be nonnegative")
        if not self.tx_power > 0.0:
            raise ValueError("tx_power must be positive")
        if not self.window_radius > 0.0:
            raise ValueError("window_radius must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def mean_count(self) -> float:
        """Expected BS count inside the simulation disk."""
        return self.lam * math.pi * self.window_radius**2

    @property
    def shadow_scale(self) -> float:
        """S = exp(shadow_scale * z) for a standard normal z."""
        return self.sigma_s_db * _LN10_OVER_10

    @property
    def threshold_linear(self) -> float:
        """Detection threshold on linear SINR (0.0 when the dB value is -inf)."""
        return 10.0 ** (self.beta_over_gamma_db / 10.0)


@dataclass(frozen=True)
class Scenario:
    """One realized deployment as seen from the device at the origin."""

    positions: np.ndarray  # (k, 2)
    shadowing: np.ndarray  # (k,) linear gains
    active: np.ndarray  # (k,) bool
    hearable_indices: np.ndarray  # SINR-descending order

    def __post_init__(self):
        k = self.positions.shape[0]
        if self.positions.ndim != 2 or self.positions.shape[1] != 2:
            raise ValueError("positions must have shape (k, 2)")
        if self.shadowing.shape != (k,) or self.active.shape != (k,):
            raise ValueError("per-BS arrays must share one length")
        if self.hearable_indices.size and not (
            (self.hearable_indices >= 0).all() and (self.hearable_indices < k).all()
        ):
            raise ValueError("hearable indices out of range")

    @property
    def n_bs(self) -> int:
        return self.positions.shape[0]

    @property
    def n_hearable(self) -> int:
        return self.hearable_indices.size


class ScenarioStream:
    """Reusable Philox stream reset per (seed, scenario_id).

    Resetting the state of one bit generator is several times cheaper than
    constructing a fresh one per scenario, and yields identical draws.
    """

    def __init__(self):
        self._philox = np.random.Philox(key=[0, 0])
        self._rng = np.random.Generator(self._philox)
        self._state = self._philox.state

    def reset(self, seed: int, scenario_id: int) -> np.random.Generator:
        st = self._state
        st["state"]["counter"][:] = 0
        st["state"]["key"][0] = seed
        st["state"]["key"][1] = scenario_id
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._philox.state = st
        return self._rng

    @property
    def bit_generator(self) -> np.random.Philox:
        return self._philox


def draw_scenario_arrays(rng: np.random.Generator, params: NetworkParams):
    """Raw per-scenario draws in the canonical stream order.

    Order matters: the compiled kernel consumes the same Philox stream
    through NumPy's C distribution functions, so any reordering here would
    desynchronize the two backends.
    """
    k = int(rng.poisson(params.mean_count))
    u_r = rng.random(k)
    u_t = rng.random(k)
    z = rng.standard_normal(k)
    u_a = rng.random(k)
    r = params.window_radius * np.sqrt(u_r)
    theta = TWO_PI * u_t
    x = r * np.cos(theta)
    y = r * np.sin(theta)
    shadow = np.exp(params.shadow_scale * z)
    active = u_a < params.f
    return x, y, shadow, active


def link_gains(x: np.ndarray, y: np.ndarray, shadow: np.ndarray, params: NetworkParams) -> np.ndarray:
    """Received power P * S * d^-alpha per BS; a BS at the origin saturates to float max."""
    d2 = x * x + y * y
    with np.errstate(divide="ignore"):
        if params.alpha == 4.0:
            w = params.tx_power * shadow / (d2 * d2)
        else:
            w = params.tx_power * shadow * d2 ** (-params.alpha / 2.0)
    return np.where(np.isfinite(w), w, _F64_MAX)


def sinr_all(w: np.ndarray, active: np.ndarray, params: NetworkParams) -> np.ndarray:
    """Linear SINR of every BS against the active interference field."""
    total = float(np.sum(w[active]))
    denom = np.where(active, total - w, total) + params.sigma2
    with np.errstate(divide="ignore"):
        return np.where(denom > 0.0, w / denom, math.inf)


def hearable_order(sinr: np.ndarray, threshold: float) -> np.ndarray:
    """Indices of BSs at or above the threshold, strongest SINR first."""
    idx = np.nonzero(sinr >= threshold)[0]
    order = np.argsort(-sinr[idx], kind="stable")
    return idx[order]


def sample_scenario(params: NetworkParams, scenario_id: int, _stream: Optional[ScenarioStream] = None) -> Scenario:
    """Realize deployment number ``scenario_id`` for the given parameters.

    Deterministic in (params.seed, scenario_id); repeated calls return
    bit-identical scenarios.
    """
    stream = _stream if _stream is not None else ScenarioStream()
    rng = stream.reset(params.seed, scenario_id)
    x, y, shadow, active = draw_scenario_arrays(rng, params)
    w = link_gains(x, y, shadow, params)
    s = sinr_all(w, active, params)
    hearable = hearable_order(s, params.threshold_linear)
    return Scenario(
        positions=np.column_stack([x, y]),
        shadowing=shadow,
        active=active,
        hearable_indices=hearable,
    )


def sinr(scenario: Scenario, params: NetworkParams, bs_index: int) -> float:
    """Linear SINR of one BS (interference from the other active BSs only)."""
    k = scenario.n_bs
    if not 0 <= bs_index < k:
        raise IndexError("bs_index out of range")
    x = scenario.positions[:, 0]
    y = scenario.positions[:, 1]
    d2 = x[bs_index] ** 2 + y[bs_index] ** 2
    if d2 == 0.0:
        raise DegenerateInputError("BS at zero distance from the device")
    w = link_gains(x, y, scenario.shadowing, params)
    return float(sinr_all(w, scenario.active, params)[bs_index])


def hearable_set(scenario: Scenario, params: NetworkParams) -> np.ndarray:
    """Hearable BS indices sorted by decreasing SINR; may be empty."""
    x = scenario.positions[:, 0]
    y = scenario.positions[:, 1]
    w = link_gains(x, y, scenario.shadowing, params)
    s = sinr_all(w, scenario.active, params)
    return hearable_order(s, params.threshold_linear)


def shadowing_transformed_density(params: NetworkParams) -> float:
    """Density of the displacement-equivalent unshadowed network.

    Log-normal moment in closed form:
    lam * exp(0.5 * (2/alpha)^2 * (sigma_s_db * ln10 / 10)^2).
    """
    s = (2.0 / params.alpha) * params.sigma_s_db * _LN10_OVER_10
    return params.lam * math.exp(0.5 * s * s)


@dataclass(frozen=True)
class HearabilityTable:
    """Empirical distribution of the hearable count N."""

    counts: np.ndarray  # occurrences of N = L for L = 0..L_max
    n_scenarios: int

    @property
    def pmf(self) -> np.ndarray:
        return self.counts / self.n_scenarios

    @property
    def stderr(self) -> np.ndarray:
        p = self.pmf
        return np.sqrt(p * (1.0 - p) / self.n_scenarios)

    def as_pmf(self) -> dict:
        return {L: float(p) for L, p in enumerate(self.pmf)}

    def p_at_least(self, l_min: int) -> float:
        return float(self.pmf[l_min:].sum()) if l_min < len(self.counts) else 0.0


def empirical_hearability(params: NetworkParams, n_scenarios: int) -> HearabilityTable:
    """Estimate P(N = L) by Monte Carlo over ``n_scenarios`` deployments."""
    if n_scenarios < 1:
        raise ValueError("n_scenarios must be >= 1")
    from . import kernels

    counts_n, _ = kernels.run_block(params, 0, n_scenarios, l_min=0, collect_rows=False)
    hist = np.bincount(counts_n)
    return HearabilityTable(counts=hist, n_scenarios=n_scenarios)
