"""Anchored stochastic iteration engines and their run loop.

Both engines share the anchored (Halpern-style) outer update

    x_{n+1} = alpha_n * x_0 + (1 - alpha_n) * y_n,

and differ in how the inner point y_n is produced from a sampled component
(f, T):

    gradient engine:  y_n = T(x_n - inner_n * g),  g in subdifferential f(x_n)
    proximal engine:  y_n = T(prox_{inner_n * f}(x_n))

With the ``projected`` flag (the default in the experiment harness), y_n is
additionally projected onto the problem's bounding ball, which keeps the
sequence bounded by construction.

A run records, at every iteration, the summed fixed-point residual D_n over
all components, the expected objective F_n under the sampler's long-run
index distribution (uniform when the sampler has none), the step sizes, and
cumulative wall time. Runs continue to n_max even after crossing the
stopping thresholds; the crossings are only marked.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, NonsmoothFunctionError, ScheduleValidationError
from .functions import DiagQuadratic, WeightedL1
from .operators import apply, as_vector, project_ball, residual
from .samplers import GreedyMaxResidual, make_state, marginal_distribution, next_index
from .schedules import GRADIENT, PROXIMAL, validate

__all__ = [
    "ProblemInstance",
    "SolverState",
    "StoppingRule",
    "RunTrace",
    "component_residuals",
    "metric_D",
    "metric_F",
    "step_gradient",
    "step_proximal",
    "run",
    "first_d_crossing",
    "first_f_delta_crossing",
    "QUADRATIC",
    "WEIGHTED_L1",
]

QUADRATIC = "quadratic"
WEIGHTED_L1 = "weighted_l1"


@dataclass(frozen=True)
class ProblemInstance:
    """Problem data: I component pairs (f, T) plus a bounding ball.

    All components share one dimension and one objective family (all
    diagonal quadratics or all weighted-l1 terms).
    """

    dim: int
    components: tuple
    bounding_ball: object

    def __post_init__(self):
        components = tuple(self.components)
        if not components:
            raise ValueError("problem needs at least one component")
        object.__setattr__(self, "components", components)
        kinds = set()
        for f, op in components:
            if f.dim != self.dim:
                raise DimensionMismatchError("component function dimension mismatch")
            if op.dim is not None and op.dim != self.dim:
                raise DimensionMismatchError("component operator dimension mismatch")
            if isinstance(f, DiagQuadratic):
                kinds.add(QUADRATIC)
            elif isinstance(f, WeightedL1):
                kinds.add(WEIGHTED_L1)
            else:
                raise TypeError(f"unsupported objective component: {f!r}")
        if len(kinds) != 1:
            raise ValueError("objective family must be homogeneous per instance")
        object.__setattr__(self, "_kind", kinds.pop())
        if self.bounding_ball.dim != self.dim:
            raise DimensionMismatchError("bounding ball dimension mismatch")

    @property
    def size(self):
        return len(self.components)

    @property
    def objective_kind(self):
        return self._kind


@dataclass
class SolverState:
    """Iteration counter, anchor x0 (never mutated) and current iterate."""

    n: int
    x0: np.ndarray
    x: np.ndarray


@dataclass(frozen=True)
class StoppingRule:
    d_threshold: float
    f_delta_threshold: float
    n_max: int

    def __post_init__(self):
        if self.d_threshold <= 0 or self.f_delta_threshold <= 0:
            raise ValueError("thresholds must be positive")
        if self.n_max < 0:
            raise ValueError("n_max must be nonnegative")


@dataclass
class RunTrace:
    """Dense per-iteration record of one run, n = 0..n_max."""

    n: np.ndarray
    d_metric: np.ndarray
    f_metric: np.ndarray
    alpha: np.ndarray
    inner: np.ndarray
    time_s: np.ndarray
    residuals: np.ndarray            # (n_max + 1, I) per-component residuals
    f_distribution: np.ndarray
    f_dist_fallback: bool
    final_x: np.ndarray = None
    d_cross_n: int | None = None
    f_delta_cross_n: int | None = None
    terminal_n: int = 0
    seed: object = field(default=None, repr=False)


def component_residuals(x, problem):
    """||x - T_i(x)|| for every component, as an array of length I."""
    return np.array([residual(op, x) for _, op in problem.components])


def metric_D(x, problem):
    """Summed fixed-point residual over all components."""
    return float(component_residuals(x, problem).sum())


def metric_F(x, problem, dist):
    """Expected objective sum_i dist_i * f_i(x) under a probability vector."""
    dist = np.asarray(dist, dtype=float)
    if dist.shape[0] != problem.size:
        raise ValueError(f"distribution must have length {problem.size}")
    if np.any(dist < 0) or abs(dist.sum() - 1.0) > 1e-9:
        raise ValueError("distribution must be nonnegative and sum to 1")
    return float(sum(w * f.value(x) for w, (f, _) in zip(dist, problem.components)))


def _advance(state, problem, sampler_state, schedule, projected, algorithm,
             residuals=None):
    alpha_n, inner_n = schedule.value(state.n)
    if isinstance(sampler_state.spec, GreedyMaxResidual) and residuals is None:
        residuals = component_residuals(state.x, problem)
    w = next_index(sampler_state, residuals)
    f, op = problem.components[w - 1]
    if algorithm == GRADIENT:
        z = state.x - inner_n * f.subgradient(state.x)
    else:
        z = f.prox(state.x, inner_n)
    y = apply(op, z)
    if projected:
        y = project_ball(y, problem.bounding_ball)
    state.x = alpha_n * state.x0 + (1.0 - alpha_n) * y
    state.n += 1
    return w


def step_gradient(state, problem, sampler_state, schedule, projected=False):
    """One gradient-engine step; mutates state, returns the sampled index."""
    if problem.objective_kind != QUADRATIC:
        raise NonsmoothFunctionError("gradient engine needs a smooth objective")
    violations = validate(schedule, GRADIENT)
    if violations:
        raise ScheduleValidationError(GRADIENT, violations)
    return _advance(state, problem, sampler_state, schedule, projected, GRADIENT)


def step_proximal(state, problem, sampler_state, schedule, projected=False):
    """One proximal-engine step; mutates state, returns the sampled index."""
    violations = validate(schedule, PROXIMAL)
    if violations:
        raise ScheduleValidationError(PROXIMAL, violations)
    return _advance(state, problem, sampler_state, schedule, projected, PROXIMAL)


def first_d_crossing(d_values, threshold):
    """First n with D_n <= threshold, or None."""
    hits = np.nonzero(np.asarray(d_values) <= threshold)[0]
    return int(hits[0]) if hits.size else None


def first_f_delta_crossing(f_values, threshold):
    """First n >= 1 with |F_n - F_{n-1}| <= threshold, or None."""
    f_values = np.asarray(f_values)
    if f_values.shape[0] < 2:
        return None
    hits = np.nonzero(np.abs(np.diff(f_values)) <= threshold)[0]
    return int(hits[0]) + 1 if hits.size else None


def run(problem, algorithm, schedule, sampler_spec, x0, stopping, seed,
        projected=True):
    """Iterate one engine from x0 and record the full trace.

    Parameters
    ----------
    problem : ProblemInstance
    algorithm : {"gradient", "proximal"}
        The gradient engine requires a quadratic (smooth) objective.
    schedule : StepSchedule
        Must validate for ``algorithm``.
    sampler_spec : sampler spec with size == problem.size
    x0 : array of length problem.dim
        Anchor and initial iterate.
    stopping : StoppingRule
        Thresholds mark crossing events; the run always continues to n_max.
    seed : int or numpy SeedSequence
        Seeds the sampler's index stream.
    projected : bool
        Project y_n onto the bounding ball (boundedness by construction).

    Returns
    -------
    RunTrace
    """
    violations = validate(schedule, algorithm)
    if violations:
        raise ScheduleValidationError(algorithm, violations)
    if algorithm == GRADIENT and problem.objective_kind != QUADRATIC:
        raise NonsmoothFunctionError("gradient engine needs a smooth objective")
    if sampler_spec.size != problem.size:
        raise ValueError("sampler size must equal the number of components")
    x0 = as_vector(x0)
    if x0.shape[0] != problem.dim:
        raise DimensionMismatchError("x0 dimension mismatch")

    dist = marginal_distribution(sampler_spec)
    fallback = dist is None
    if fallback:
        dist = np.full(problem.size, 1.0 / problem.size)

    n_records = stopping.n_max + 1
    d_vals = np.empty(n_records)
    f_vals = np.empty(n_records)
    alphas = np.empty(n_records)
    inners = np.empty(n_records)
    times = np.empty(n_records)
    res_matrix = np.empty((n_records, problem.size))

    state = SolverState(n=0, x0=x0.copy(), x=x0.copy())
    sampler_state = make_state(sampler_spec, seed)
    t_start = time.perf_counter()
    for n in range(n_records):
        res = component_residuals(state.x, problem)
        res_matrix[n] = res
        d_vals[n] = res.sum()
        f_vals[n] = metric_F(state.x, problem, dist)
        alphas[n], inners[n] = schedule.value(n)
        times[n] = time.perf_counter() - t_start
        if n < stopping.n_max:
            _advance(state, problem, sampler_state, schedule, projected,
                     algorithm, residuals=res)

    return RunTrace(
        n=np.arange(n_records),
        d_metric=d_vals,
        f_metric=f_vals,
        alpha=alphas,
        inner=inners,
        time_s=times,
        residuals=res_matrix,
        f_distribution=dist,
        f_dist_fallback=fallback,
        final_x=state.x,
        d_cross_n=first_d_crossing(d_vals, stopping.d_threshold),
        f_delta_cross_n=first_f_delta_crossing(f_vals, stopping.f_delta_threshold),
        terminal_n=stopping.n_max,
        seed=seed,
    )
