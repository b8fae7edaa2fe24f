"""Clamped B-spline curves over SE2 trajectories.

A trajectory (x(u), y(u), theta(u)) is represented as a linear combination
of B-spline basis functions weighted by a 3 x n matrix of control points,
one row per coordinate.  The default parameterisation uses quadratic
splines over a 0.2 s horizon with one control point per 0.1 s step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_N = 3
DEFAULT_DEGREE = 2
DEFAULT_HORIZON = 0.2


class SplineFitError(ValueError):
    """Raised when a least-squares fit cannot be solved."""


@dataclass(frozen=True)
class KnotVector:
    """Clamped knot vector for ``n`` control points of degree ``degree``.

    The knot list has length n + degree + 1, is non-decreasing, and repeats
    its first and last entries degree + 1 times so the curve interpolates
    the end control points.
    """

    knots: tuple[float, ...]
    degree: int
    n: int

    def __post_init__(self):
        m = self.n + self.degree + 1
        if len(self.knots) != m:
            raise ValueError(f"expected {m} knots (n + degree + 1), got {len(self.knots)}")
        ks = self.knots
        if any(b < a for a, b in zip(ks, ks[1:])):
            raise ValueError("knots must be non-decreasing")
        d1 = self.degree + 1
        if len(set(ks[:d1])) != 1 or len(set(ks[-d1:])) != 1:
            raise ValueError("clamped knot vector must repeat its end knots degree+1 times")

    @property
    def start(self) -> float:
        return self.knots[0]

    @property
    def end(self) -> float:
        return self.knots[-1]


def make_clamped_knots(n: int, degree: int, horizon: float) -> KnotVector:
    """Build a clamped knot vector on [0, horizon] with uniform interior knots.

    Requires n >= degree + 1 (otherwise the curve is underdetermined) and
    horizon > 0.
    """
    if n < degree + 1:
        raise ValueError(f"need n >= degree + 1 control points, got n={n}, degree={degree}")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    interior = n - degree - 1
    spans = interior + 1
    ks = [0.0] * (degree + 1)
    ks += [horizon * j / spans for j in range(1, interior + 1)]
    ks += [float(horizon)] * (degree + 1)
    return KnotVector(knots=tuple(ks), degree=degree, n=n)


def basis_value(i: int, degree: int, u: float, kv: KnotVector) -> float:
    """Cox-de Boor value of basis function ``i`` (0-based) at parameter ``u``.

    Uses the 0/0 := 0 convention for repeated knots.  ``u`` must lie in the
    knot range; the end of the range is treated as part of the last span so
    the final basis function reaches 1 there.
    """
    if not 0 <= i < kv.n:
        raise IndexError(f"basis index {i} outside 0..{kv.n - 1}")
    if u < kv.start or u > kv.end:
        raise ValueError(f"parameter {u} outside knot range [{kv.start}, {kv.end}]")
    return _cox_de_boor(i, degree, u, kv.knots, kv.end)


def _cox_de_boor(i: int, d: int, u: float, ks: tuple[float, ...], u_max: float) -> float:
    if d == 0:
        if ks[i] <= u < ks[i + 1]:
            return 1.0
        # close the final non-empty span so evaluation at u_max works
        if u == u_max and ks[i] < ks[i + 1] == u_max:
            return 1.0
        return 0.0
    left = 0.0
    den = ks[i + d] - ks[i]
    if den > 0.0:
        left = (u - ks[i]) / den * _cox_de_boor(i, d - 1, u, ks, u_max)
    right = 0.0
    den = ks[i + d + 1] - ks[i + 1]
    if den > 0.0:
        right = (ks[i + d + 1] - u) / den * _cox_de_boor(i + 1, d - 1, u, ks, u_max)
    return left + right


def basis_row(kv: KnotVector, u: float) -> np.ndarray:
    """All n basis values at ``u`` as a 1-D array."""
    return np.array([basis_value(i, kv.degree, u, kv) for i in range(kv.n)])


def basis_matrix(kv: KnotVector, us) -> np.ndarray:
    """Design matrix with one row of basis values per parameter in ``us``."""
    return np.array([basis_row(kv, float(u)) for u in us])


@dataclass(frozen=True)
class CoefficientMatrix:
    """3 x n control-point matrix: rows are x [m], y [m], theta [rad]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != 3:
            raise ValueError(f"coefficient matrix must be 3 x n, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("coefficient matrix entries must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[1]


def coefficient_loss(predicted: CoefficientMatrix, reference: CoefficientMatrix) -> float:
    """Sum of absolute element-wise differences between two control-point matrices."""
    if predicted.values.shape != reference.values.shape:
        raise ValueError(
            f"shape mismatch: {predicted.values.shape} vs {reference.values.shape}"
        )
    return float(np.sum(np.abs(predicted.values - reference.values)))


def _wrap_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    w = (theta + math.pi) % (2.0 * math.pi) - math.pi
    if w == -math.pi:
        w = math.pi
    return w


@dataclass(frozen=True)
class SplineCurve:
    """A fitted SE2 curve: knot vector plus its 3 x n coefficient matrix."""

    knots: KnotVector
    coefficients: CoefficientMatrix

    def __post_init__(self):
        if self.knots.n != self.coefficients.n:
            raise ValueError(
                f"knot vector expects {self.knots.n} control points, "
                f"coefficient matrix has {self.coefficients.n}"
            )

    def evaluate(self, u: float, wrap_heading: bool = True) -> tuple[float, float, float]:
        """Pose (x, y, theta) at parameter ``u``.

        theta is re-wrapped to (-pi, pi] unless ``wrap_heading`` is False
        (the coefficients live on an unwrapped heading branch).
        """
        b = basis_row(self.knots, u)
        x, y, th = self.coefficients.values @ b
        if wrap_heading:
            th = _wrap_angle(th)
        return float(x), float(y), float(th)


def evaluate(curve: SplineCurve, u: float, wrap_heading: bool = True) -> tuple[float, float, float]:
    return curve.evaluate(u, wrap_heading=wrap_heading)


@dataclass(frozen=True)
class FitResult:
    curve: SplineCurve
    residual: float
    parameters: np.ndarray = field(repr=False, default=None)


def fit(
    waypoints,
    n: int = DEFAULT_N,
    degree: int = DEFAULT_DEGREE,
    horizon: float | None = None,
) -> FitResult:
    """Least-squares fit of a clamped spline to timestamped SE2 waypoints.

    ``waypoints`` is a sequence of (time [s], x [m], y [m], theta [rad]) with
    strictly increasing times.  Timestamps are mapped linearly onto the knot
    range [0, horizon] (horizon defaults to the waypoint time span).  Headings
    are unwrapped to a continuous branch before fitting.
    """
    w = np.asarray(list(waypoints), dtype=float)
    if w.ndim != 2 or w.shape[1] != 4:
        raise ValueError("waypoints must be (time, x, y, theta) rows")
    if w.shape[0] < n:
        raise ValueError(f"need at least n={n} waypoints, got {w.shape[0]}")
    times = w[:, 0]
    if np.any(np.diff(times) <= 0):
        raise ValueError("waypoint times must be strictly increasing")
    span = times[-1] - times[0]
    if horizon is None:
        horizon = float(span)
    kv = make_clamped_knots(n, degree, horizon)
    us = (times - times[0]) * (horizon / span)
    us[-1] = horizon  # guard the top end against round-off drift

    targets = w[:, 1:4].copy()
    targets[:, 2] = np.unwrap(targets[:, 2])

    design = basis_matrix(kv, us)
    coeffs, _, rank, _ = np.linalg.lstsq(design, targets, rcond=None)
    if rank < n:
        raise SplineFitError(
            f"rank-deficient fit (rank {rank} < n={n}): waypoint parameters do not "
            "cover the support of every basis function"
        )
    residual = float(np.sum((design @ coeffs - targets) ** 2))
    curve = SplineCurve(knots=kv, coefficients=CoefficientMatrix(values=coeffs.T))
    return FitResult(curve=curve, residual=residual, parameters=us)
