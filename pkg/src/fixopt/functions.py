"""Convex objective components with closed-form proximal maps.

Two families cover the benchmark problems:

* ``DiagQuadratic``: f(x) = 0.5 * sum_j diag_j x_j^2 + sum_j linear_j x_j,
  smooth, with coordinatewise prox.
* ``WeightedL1``: f(x) = sum_j weights_j |x_j - anchor_j|, nonsmooth, with
  soft-thresholding prox.

Values are immutable and every operation is pure.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NonsmoothFunctionError
from .operators import as_vector

__all__ = ["DiagQuadratic", "WeightedL1", "soft_threshold"]


def soft_threshold(t, tau):
    """sign(t) * max(|t| - tau, 0), elementwise."""
    return np.sign(t) * np.maximum(np.abs(t) - tau, 0.0)


def _check_dim(f, x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.shape[0] != f.dim:
        raise DimensionMismatchError(
            f"function of dimension {f.dim} evaluated at vector of dimension {x.shape[0]}"
        )
    return x


@dataclass(frozen=True)
class DiagQuadratic:
    """f(x) = 0.5 <x, diag(d) x> + <linear, x> with d_j >= 0."""

    diag: np.ndarray
    linear: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diag", as_vector(self.diag))
        object.__setattr__(self, "linear", as_vector(self.linear))
        if self.diag.shape != self.linear.shape:
            raise DimensionMismatchError("diag and linear must have equal length")
        if np.any(self.diag < 0):
            raise ValueError("diagonal entries must be nonnegative for convexity")

    @property
    def dim(self):
        return self.diag.shape[0]

    def value(self, x):
        x = _check_dim(self, x)
        return float(0.5 * np.dot(x, self.diag * x) + np.dot(self.linear, x))

    def gradient(self, x):
        x = _check_dim(self, x)
        return self.diag * x + self.linear

    def subgradient(self, x):
        return self.gradient(x)

    def prox(self, z, gamma):
        """argmin_y gamma * f(y) + 0.5 ||z - y||^2, coordinatewise."""
        if gamma <= 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        z = _check_dim(self, z)
        return (z - gamma * self.linear) / (1.0 + gamma * self.diag)

    def lipschitz_grad(self):
        """max_j diag_j, or None when the function is affine."""
        top = float(np.max(self.diag))
        return top if top > 0 else None


@dataclass(frozen=True)
class WeightedL1:
    """f(x) = sum_j weights_j |x_j - anchor_j| with weights_j > 0."""

    weights: np.ndarray
    anchor: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", as_vector(self.weights))
        object.__setattr__(self, "anchor", as_vector(self.anchor))
        if self.weights.shape != self.anchor.shape:
            raise DimensionMismatchError("weights and anchor must have equal length")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be strictly positive")

    @property
    def dim(self):
        return self.weights.shape[0]

    def value(self, x):
        x = _check_dim(self, x)
        return float(np.dot(self.weights, np.abs(x - self.anchor)))

    def gradient(self, x):
        raise NonsmoothFunctionError(
            "weighted l1 objective is nonsmooth; use subgradient()"
        )

    def subgradient(self, x):
        """Minimal-norm selection: sign pattern, zero at the kinks."""
        x = _check_dim(self, x)
        return self.weights * np.sign(x - self.anchor)

    def prox(self, z, gamma):
        """Soft-thresholding toward the anchor."""
        if gamma <= 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        z = _check_dim(self, z)
        return self.anchor + soft_threshold(z - self.anchor, gamma * self.weights)

    def lipschitz_grad(self):
        return None
