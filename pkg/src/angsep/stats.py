"""Estimators behind the correlation table and the CDF figures.

GDOP samples can be infinite (singular geometries), so the estimators take a
position on them: Spearman ranks infinities above every finite value, Pearson
drops the affected pairs, and ECDFs report the infinite mass separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata


class UndefinedCorrelationError(ValueError):
    """Raised when an input has zero variance so the correlation is undefined."""


@dataclass(frozen=True)
class DistributionTable:
    """Right-continuous CDF samples: F[i] = P(X <= x[i])."""

    x: np.ndarray
    F: np.ndarray
    inf_mass: float = 0.0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        F = np.asarray(self.F, dtype=np.float64)
        if x.ndim != 1 or x.shape != F.shape or x.size == 0:
            raise ValueError("x and F must be equal-length non-empty vectors")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "F", F)

    def validate(self):
        if np.any(np.diff(self.x) < 0):
            raise ValueError("x must be nondecreasing")
        if np.any(np.diff(self.F) < -1e-12):
            raise ValueError("F must be nondecreasing")
        if np.any(self.F < -1e-12) or np.any(self.F > 1.0 + 1e-12):
            raise ValueError("F must lie within [0, 1]")

    def evaluate(self, q: np.ndarray) -> np.ndarray:
        """Step-function evaluation at arbitrary points (0 left of support)."""
        idx = np.searchsorted(self.x, q, side="right")
        out = np.zeros_like(np.asarray(q, dtype=np.float64))
        nz = idx > 0
        out[nz] = self.F[idx[nz] - 1]
        return out


def ecdf(values) -> DistributionTable:
    """Empirical CDF over the finite values; infinities counted as top mass.

    F uses the full sample size in the denominator, so the final step equals
    1 - inf_mass and the infinite tail is reported via ``inf_mass``.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("ecdf needs at least one value")
    if np.any(np.isnan(v)):
        raise ValueError("ecdf input contains NaN")
    n = v.size
    finite = v[np.isfinite(v)]
    if finite.size == 0:
        raise ValueError("ecdf needs at least one finite value")
    xs, counts = np.unique(finite, return_counts=True)
    F = np.cumsum(counts) / n
    return DistributionTable(xs, F, inf_mass=(n - finite.size) / n)


def ks_distance(a: DistributionTable, b: DistributionTable) -> float:
    """Sup-norm distance between two CDF tables over their merged abscissae."""
    xs = np.union1d(a.x, b.x)
    return float(np.max(np.abs(a.evaluate(xs) - b.evaluate(xs))))


def spearman_rho(x, y) -> float:
    """Spearman rank correlation with average ranks on ties.

    Infinite values rank above every finite value, which keeps singular
    geometry GDOPs usable without moment assumptions.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("need two equal-length vectors with >= 2 entries")
    rx = rankdata(x, method="average")
    ry = rankdata(y, method="average")
    return _pearson(rx, ry)


def pearson_r(x, y, log_transform_y: bool = False) -> float:
    """Pearson product-moment correlation (two-pass, mean-centered).

    With ``log_transform_y`` the correlation is against log(y); pairs with
    non-finite y (before or after the transform) are excluded.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("need two equal-length vectors with >= 2 entries")
    if log_transform_y:
        if np.any(y[np.isfinite(y)] <= 0.0):
            raise ValueError("log transform requires positive y")
        with np.errstate(divide="ignore"):
            y = np.log(y)
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if x.size < 2:
        raise ValueError("fewer than 2 finite pairs remain")
    return _pearson(x, y)


def count_nonfinite(y) -> int:
    y = np.asarray(y, dtype=np.float64)
    return int(np.sum(~np.isfinite(y)))


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    vx = float(np.sum(dx * dx))
    vy = float(np.sum(dy * dy))
    if vx == 0.0 or vy == 0.0:
        raise UndefinedCorrelationError("zero variance input")
    r = float(np.sum(dx * dy)) / math.sqrt(vx * vy)
    return min(max(r, -1.0), 1.0)
