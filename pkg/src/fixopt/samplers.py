"""Index-sequence generators for the stochastic solvers.

Four selection rules are supported, mirroring the benchmark's sampling
regimes. Indices are 1-based (components are numbered 1..I).

* ``UniformIID`` - each index drawn uniformly, independently.
* ``GreedyMaxResidual`` - the component whose fixed-point set is currently
  farthest from the iterate (needs the residuals each draw).
* ``PermutationCycle`` - a fresh random permutation of 1..I every I draws.
* ``MarkovChain`` - state transitions of a positive row-stochastic matrix.

``SamplerState`` owns a seeded generator, so a (spec, seed) pair always
reproduces the same index stream.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "UniformIID",
    "GreedyMaxResidual",
    "PermutationCycle",
    "MarkovChain",
    "SamplerState",
    "make_state",
    "next_index",
    "marginal_distribution",
    "stationary_distribution",
    "random_markov_matrix",
]

_ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class UniformIID:
    size: int

    def __post_init__(self):
        _check_size(self.size)


@dataclass(frozen=True)
class GreedyMaxResidual:
    size: int

    def __post_init__(self):
        _check_size(self.size)


@dataclass(frozen=True)
class PermutationCycle:
    size: int

    def __post_init__(self):
        _check_size(self.size)


@dataclass(frozen=True)
class MarkovChain:
    """Sampler driven by a strictly positive row-stochastic matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        P = np.ascontiguousarray(self.matrix, dtype=float)
        _check_markov_matrix(P)
        object.__setattr__(self, "matrix", P)

    @property
    def size(self):
        return self.matrix.shape[0]


def _check_size(size):
    if size < 1:
        raise ValueError(f"sampler needs at least one component, got {size}")


def _check_markov_matrix(P):
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("transition matrix must be square")
    if np.any(P <= 0):
        raise ValueError("transition matrix entries must be strictly positive")
    if np.max(np.abs(P.sum(axis=1) - 1.0)) > _ROW_SUM_TOL:
        raise ValueError("transition matrix rows must sum to 1")


class SamplerState:
    """Mutable per-run sampling state; single-owner, not thread-safe."""

    def __init__(self, spec, seed):
        self.spec = spec
        self.rng = np.random.default_rng(seed)
        self.cursor = 0          # position within the current permutation
        self.permutation = None
        self.current = 1         # Markov chains start in state 1
        if isinstance(spec, MarkovChain):
            self._rows_cumulative = np.cumsum(spec.matrix, axis=1)


def make_state(spec, seed):
    return SamplerState(spec, seed)


def next_index(state, residuals=None):
    """Draw the next component index in 1..I, advancing the state."""
    spec = state.spec
    if isinstance(spec, UniformIID):
        return int(state.rng.integers(1, spec.size + 1))
    if isinstance(spec, GreedyMaxResidual):
        if residuals is None:
            raise ValueError("greedy sampling needs the current residuals")
        res = np.asarray(residuals, dtype=float)
        if res.shape[0] != spec.size:
            raise ValueError(
                f"expected {spec.size} residuals, got {res.shape[0]}"
            )
        # argmax of the squared residuals; ties go to the smallest index
        return int(np.argmax(res * res)) + 1
    if isinstance(spec, PermutationCycle):
        if state.permutation is None or state.cursor == spec.size:
            state.permutation = state.rng.permutation(spec.size) + 1
            state.cursor = 0
        out = int(state.permutation[state.cursor])
        state.cursor += 1
        return out
    if isinstance(spec, MarkovChain):
        row = state._rows_cumulative[state.current - 1]
        u = state.rng.random()
        nxt = int(np.searchsorted(row, u, side="right"))
        state.current = min(nxt, spec.size - 1) + 1
        return state.current
    raise TypeError(f"not a sampler spec: {spec!r}")


def marginal_distribution(spec):
    """Long-run index distribution, or None when there is no fixed law.

    Uniform and permutation sampling are uniform; a Markov chain settles at
    its stationary distribution; greedy selection depends on the iterate
    path, so callers fall back to uniform weighting.
    """
    if isinstance(spec, (UniformIID, PermutationCycle)):
        return np.full(spec.size, 1.0 / spec.size)
    if isinstance(spec, MarkovChain):
        return stationary_distribution(spec.matrix)
    if isinstance(spec, GreedyMaxResidual):
        return None
    raise TypeError(f"not a sampler spec: {spec!r}")


def stationary_distribution(matrix, tol=1e-13, max_iter=200_000):
    """The probability vector pi with pi P = pi, by power iteration.

    Positive matrices have a unique such vector and the iteration converges
    geometrically; the result satisfies ||pi P - pi||_inf <= 1e-10.
    """
    P = np.ascontiguousarray(matrix, dtype=float)
    _check_markov_matrix(P)
    n = P.shape[0]
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = pi @ P
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) < tol:
            pi = nxt
            break
        pi = nxt
    defect = np.max(np.abs(pi @ P - pi))
    if defect > 1e-10:
        raise RuntimeError(f"power iteration stalled, defect {defect:.3e}")
    return pi


def random_markov_matrix(size, rng):
    """Positive random transition matrix: uniform(0,1) entries + 0.1, rows normalized."""
    _check_size(size)
    raw = rng.random((size, size)) + 0.1
    return raw / raw.sum(axis=1, keepdims=True)
