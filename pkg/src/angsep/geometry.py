"""Bearing geometry: maximum angular separation, GDOP, and hull membership.

All operations work on the bearings of participating base stations as seen
from a device at the origin.  They are pure functions of the angles (plus,
for the pipeline entry point, the raw 2-D positions), so they can be called
freely from parallel workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

#: |psi_max - pi| below this is treated as an ill-defined hull boundary case.
DEGENERATE_TOL = 1e-12

_EPS = float(np.finfo(np.float64).eps)


def _gdop_from_2x2(trace: float, det: float) -> float:
    """sqrt(tr(M^-1)) of a 2x2 information matrix, +inf when singular.

    A Gram determinant below (eps * trace)^2 is rounding residue of an
    exactly singular geometry (e.g. sin(pi) != 0 in floats), so it maps to
    +inf rather than a ~1e16 artifact.
    """
    if det <= (_EPS * trace) ** 2:
        return math.inf
    return math.sqrt(trace / det)


class DegenerateInputError(ValueError):
    """Raised for inputs the geometry is undefined on (e.g. a point at the origin)."""


class InsufficientGeometryError(ValueError):
    """Raised when too few base stations are supplied for the requested metric."""


@dataclass(frozen=True)
class AngleSet:
    """Sorted bearings (radians in [0, 2*pi)) of the participating BSs.

    Duplicate bearings are allowed and show up as zero-width gaps.
    """

    bearings: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bearings, dtype=np.float64)
        if b.ndim != 1 or b.size < 1:
            raise DegenerateInputError("need at least one bearing")
        if np.any(b < 0.0) or np.any(b >= TWO_PI):
            raise ValueError("bearings must lie in [0, 2*pi)")
        if np.any(np.diff(b) < 0.0):
            raise ValueError("bearings must be sorted ascending")
        object.__setattr__(self, "bearings", b)

    def __len__(self):
        return self.bearings.size

    def gaps(self) -> np.ndarray:
        """Consecutive angular gaps, including the wraparound gap.

        The L gaps always sum to 2*pi.  For a single bearing the lone
        (wraparound) gap is the full circle.
        """
        b = self.bearings
        wrap = TWO_PI - (b[-1] - b[0])
        return np.append(np.diff(b), wrap)


class HullMembership(NamedTuple):
    inside: bool
    degenerate: bool


def compute_angle_set(positions: Sequence[Sequence[float]]) -> AngleSet:
    """Bearings of 2-D points relative to a device at the origin.

    Raises DegenerateInputError if any point coincides with the origin.
    """
    pts = np.asarray(positions, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
        raise DegenerateInputError("positions must be a non-empty list of 2-D points")
    if np.any((pts[:, 0] == 0.0) & (pts[:, 1] == 0.0)):
        raise DegenerateInputError("point at the origin has no bearing")
    b = np.arctan2(pts[:, 1], pts[:, 0])
    b = np.where(b < 0.0, b + TWO_PI, b)
    # atan2(-0.0, r) can round to exactly 2*pi after the shift
    b = np.where(b >= TWO_PI, 0.0, b)
    return AngleSet(np.sort(b))


def psi_max(angles: AngleSet) -> float:
    """Maximum angular separation: the largest gap between consecutive bearings."""
    return float(angles.gaps().max())


def gdop_toa_matrix(angles: AngleSet) -> float:
    """TOA GDOP via the information matrix H^T H, rows (cos b_i, sin b_i).

    Evaluated through the singular values of H rather than the closed-form
    determinant: forming H^T H squares the condition number and loses the
    algebraic identity with the angle-sum route near collinear geometries.
    Returns +inf when the matrix is singular (collinear bearings).
    """
    if len(angles) < 2:
        raise InsufficientGeometryError("TOA GDOP needs at least 2 base stations")
    H = np.column_stack([np.cos(angles.bearings), np.sin(angles.bearings)])
    sv = np.linalg.svd(H, compute_uv=False)
    if sv[1] <= _EPS * sv[0]:
        return math.inf
    return math.hypot(1.0 / sv[0], 1.0 / sv[1])


def gdop_toa_anglesum(angles: AngleSet) -> float:
    """TOA GDOP as sqrt(L) / sqrt(sum over pairs of sin^2(b_j - b_i)).

    Algebraically identical to ``gdop_toa_matrix`` (Cauchy-Binet on the 2x2
    determinant), so the two serve as independent numerical routes.
    """
    b = angles.bearings
    L = b.size
    if L < 2:
        raise InsufficientGeometryError("TOA GDOP needs at least 2 base stations")
    diffs = b[None, :] - b[:, None]
    iu = np.triu_indices(L, k=1)
    denom = float(np.sum(np.sin(diffs[iu]) ** 2))
    return _gdop_from_2x2(float(L), denom)


def gdop_bound(L: int, psi: float) -> float:
    """Upper bound sqrt(L) / |sin(psi_max)| on the TOA GDOP.

    +inf when sin(psi) vanishes; |sin| below a few eps is the float residue
    of psi sitting exactly on a multiple of pi and counts as vanishing.
    """
    if L < 2:
        raise InsufficientGeometryError("bound needs at least 2 base stations")
    s = abs(math.sin(psi))
    if s <= 4.0 * _EPS:
        return math.inf
    return math.sqrt(L) / s


def gdop_tdoa(angles: AngleSet, reference_index: int = 0) -> float:
    """TDOA GDOP with a common reference BS and correlated range differences.

    The measurement rows are u_i - u_ref for i != ref with covariance
    sigma_r^2 (I + 1 1^T); the inverse is applied through the
    Sherman-Morrison identity, which reduces the Fisher information to
    H^T H - (H^T 1)(H^T 1)^T / L.  The result does not depend on which BS
    is the reference.

    Returns +inf when the information matrix is singular.
    """
    b = angles.bearings
    L = b.size
    if L < 3:
        raise InsufficientGeometryError("TDOA GDOP needs at least 3 base stations")
    if not 0 <= reference_index < L:
        raise IndexError("reference_index out of range")
    c = np.cos(b)
    s = np.sin(b)
    hx = np.delete(c - c[reference_index], reference_index)
    hy = np.delete(s - s[reference_index], reference_index)
    return _gdop_from_difference_rows(hx, hy, L)


def _gdop_from_difference_rows(hx: np.ndarray, hy: np.ndarray, L: int) -> float:
    a = float(np.sum(hx * hx))
    bb = float(np.sum(hx * hy))
    cc = float(np.sum(hy * hy))
    sx = float(np.sum(hx))
    sy = float(np.sum(hy))
    f00 = a - sx * sx / L
    f01 = bb - sx * sy / L
    f11 = cc - sy * sy / L
    return _gdop_from_2x2(f00 + f11, f00 * f11 - f01 * f01)


def crlb_from_gdop(gdop: float, sigma_r: float) -> float:
    """Position-error CRLB sigma_r^2 * GDOP^2 for a common ranging std dev."""
    if gdop < 0.0:
        raise ValueError("gdop must be nonnegative")
    if sigma_r <= 0.0:
        raise ValueError("sigma_r must be positive")
    return sigma_r * sigma_r * gdop * gdop


def inside_convex_hull(angles: AngleSet) -> HullMembership:
    """Whether the origin lies strictly inside the convex hull of the BSs.

    Equivalent to psi_max < pi.  Cases with psi_max within DEGENERATE_TOL of
    pi sit on the hull boundary and are flagged rather than classified.
    """
    if len(angles) < 3:
        raise InsufficientGeometryError("hull membership needs at least 3 base stations")
    psi = psi_max(angles)
    return HullMembership(psi < math.pi, abs(psi - math.pi) < DEGENERATE_TOL)


@dataclass(frozen=True)
class GeometryRecord:
    """Per-scenario geometry outputs for one hearable set."""

    L: int
    psi_max: float
    gdop_toa: float
    gdop_tdoa: float
    inside_hull: bool
    degenerate: bool


def geometry_record_from_points(points: np.ndarray) -> GeometryRecord:
    """Evaluate a hearable set given positions ordered strongest-SINR first.

    This is the Monte Carlo pipeline entry point: unit vectors come from the
    positions directly and the TDOA reference is the first (strongest) BS.
    Requires at least 3 points.
    """
    pts = np.asarray(points, dtype=np.float64)
    L = pts.shape[0]
    if L < 3:
        raise InsufficientGeometryError("pipeline records need at least 3 base stations")
    x = pts[:, 0]
    y = pts[:, 1]
    d = np.sqrt(x * x + y * y)
    if np.any(d == 0.0):
        raise DegenerateInputError("point at the origin has no bearing")
    ux = x / d
    uy = y / d

    b = np.arctan2(y, x)
    b = np.where(b < 0.0, b + TWO_PI, b)
    sb = np.sort(b)
    wrap = TWO_PI - (sb[-1] - sb[0])
    psi = float(max(np.diff(sb).max() if L > 1 else 0.0, wrap))

    scc = float(np.sum(ux * ux))
    sss = float(np.sum(uy * uy))
    scs = float(np.sum(ux * uy))
    gtoa = _gdop_from_2x2(scc + sss, scc * sss - scs * scs)

    hx = ux[1:] - ux[0]
    hy = uy[1:] - uy[0]
    gtdoa = _gdop_from_difference_rows(hx, hy, L)

    return GeometryRecord(
        L=L,
        psi_max=psi,
        gdop_toa=gtoa,
        gdop_tdoa=gtdoa,
        inside_hull=psi < math.pi,
        degenerate=abs(psi - math.pi) < DEGENERATE_TOL,
    )
