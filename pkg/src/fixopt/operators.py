"""Firmly nonexpansive mappings on R^d.

The operator grammar is closed: identity, metric projection onto a ball,
the two-level ball composite whose fixed point set is a generalized convex
feasible set, and half-averaging ``x -> (x + T(x)) / 2``. Every expressible
operator satisfies

    ||T(x) - T(y)||^2 + ||(x - T(x)) - (y - T(y))||^2 <= ||x - y||^2,

which is what the property tests sample. Operators are immutable and their
evaluation is pure, so values can be shared freely across threads.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import DimensionMismatchError

__all__ = [
    "Ball",
    "Identity",
    "BallProjection",
    "GcfsComposite",
    "HalfAveraged",
    "as_vector",
    "unit_ball",
    "project_ball",
    "apply",
    "residual",
    "firm_nonexpansivity_slack",
    "operator_dim",
]


def as_vector(x):
    """Copy into a finite, contiguous 1-d float array."""
    arr = np.array(x, dtype=float, order="C")
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("expected a vector with at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite coordinates")
    return arr


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball with strictly positive radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def dim(self):
        return self.center.shape[0]


def unit_ball(dim):
    """The unit ball at the origin of R^dim."""
    return Ball(np.zeros(dim), 1.0)


@dataclass(frozen=True)
class Identity:
    """x -> x, valid in any dimension."""

    @property
    def dim(self):
        return None


@dataclass(frozen=True)
class BallProjection:
    """Metric projection onto a ball."""

    ball: Ball

    @property
    def dim(self):
        return self.ball.dim


@dataclass(frozen=True)
class GcfsComposite:
    """x -> (x + P_outer(mean of inner-ball projections of x)) / 2.

    Its fixed points are the points of the outer ball minimizing the mean
    squared distance to the inner balls, which is nonempty even when the
    balls share no common point.
    """

    outer: Ball
    inner: tuple
    _inner_centers: np.ndarray = field(init=False, repr=False, compare=False)
    _inner_radii: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        inner = tuple(self.inner)
        if not inner:
            raise ValueError("GcfsComposite needs at least one inner ball")
        if any(b.dim != self.outer.dim for b in inner):
            raise DimensionMismatchError("inner and outer balls disagree on dimension")
        object.__setattr__(self, "inner", inner)
        centers = np.ascontiguousarray(np.stack([b.center for b in inner]))
        radii = np.ascontiguousarray([b.radius for b in inner], dtype=float)
        object.__setattr__(self, "_inner_centers", centers)
        object.__setattr__(self, "_inner_radii", radii)

    @property
    def dim(self):
        return self.outer.dim


@dataclass(frozen=True)
class HalfAveraged:
    """x -> (x + T(x)) / 2 for an inner operator T."""

    inner: object

    @property
    def dim(self):
        return self.inner.dim


def operator_dim(op):
    """Dimension the operator acts on, or None when it acts on any."""
    return op.dim


def _check_dims(op, x):
    d = op.dim
    if d is not None and d != x.shape[0]:
        raise DimensionMismatchError(
            f"operator of dimension {d} applied to vector of dimension {x.shape[0]}"
        )


def project_ball(x, ball):
    """Metric projection of x onto the ball.

    Interior points come back unchanged; exterior points are pulled to the
    boundary along the ray from the center.
    """
    x = np.ascontiguousarray(x, dtype=float)
    if x.shape[0] != ball.dim:
        raise DimensionMismatchError(
            f"point of dimension {x.shape[0]} vs ball of dimension {ball.dim}"
        )
    return _backend.ball_project(x, ball.center, ball.radius)


def apply(op, x):
    """Evaluate the operator at x."""
    x = np.ascontiguousarray(x, dtype=float)
    _check_dims(op, x)
    if isinstance(op, Identity):
        return x
    if isinstance(op, BallProjection):
        return _backend.ball_project(x, op.ball.center, op.ball.radius)
    if isinstance(op, GcfsComposite):
        return _backend.gcfs_apply(x, op.outer.center, op.outer.radius,
                                   op._inner_centers, op._inner_radii)
    if isinstance(op, HalfAveraged):
        return 0.5 * (x + apply(op.inner, x))
    raise TypeError(f"not an operator expression: {op!r}")


def residual(op, x):
    """Fixed-point residual ||x - T(x)||."""
    x = np.ascontiguousarray(x, dtype=float)
    _check_dims(op, x)
    if isinstance(op, Identity):
        return 0.0
    if isinstance(op, GcfsComposite):
        return _backend.gcfs_residual(x, op.outer.center, op.outer.radius,
                                      op._inner_centers, op._inner_radii)
    return float(np.linalg.norm(x - apply(op, x)))


def firm_nonexpansivity_slack(op, x, y):
    """||x-y||^2 - ||Tx-Ty||^2 - ||(x-Tx)-(y-Ty)||^2.

    Nonnegative (up to rounding) for every operator in the grammar.
    """
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatchError("x and y have different dimensions")
    tx = apply(op, x)
    ty = apply(op, y)
    lhs = float(np.linalg.norm(x - y)) ** 2
    image = float(np.linalg.norm(tx - ty)) ** 2
    displacement = float(np.linalg.norm((x - tx) - (y - ty))) ** 2
    return lhs - image - displacement
