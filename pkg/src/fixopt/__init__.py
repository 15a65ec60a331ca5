"""fixopt: stochastic convex optimization over intersections of fixed point
sets of firmly nonexpansive mappings.

Two anchored iteration engines (a stochastic gradient variant and a
stochastic proximal variant) minimize the expectation of convex components
subject to membership in every component operator's fixed point set. The
package also ships the samplers, power-law step-size schedules, random
problem generator, and the seeded experiment harness used by the benchmark
suite.
"""

from . import _backend
from .errors import (
    DimensionMismatchError,
    NonsmoothFunctionError,
    ScheduleValidationError,
)
from .functions import DiagQuadratic, WeightedL1, soft_threshold
from .harness import (
    EnsembleReport,
    ExperimentConfig,
    emit_csv,
    generate_problem,
    load_config,
    load_problem,
    run_experiment,
    save_problem,
)
from .operators import (
    Ball,
    BallProjection,
    GcfsComposite,
    HalfAveraged,
    Identity,
    apply,
    firm_nonexpansivity_slack,
    project_ball,
    residual,
    unit_ball,
)
from .samplers import (
    GreedyMaxResidual,
    MarkovChain,
    PermutationCycle,
    SamplerState,
    UniformIID,
    make_state,
    marginal_distribution,
    next_index,
    random_markov_matrix,
    stationary_distribution,
)
from .schedules import GRADIENT, PROXIMAL, StepSchedule, validate
from .solver import (
    ProblemInstance,
    RunTrace,
    SolverState,
    StoppingRule,
    component_residuals,
    metric_D,
    metric_F,
    run,
    step_gradient,
    step_proximal,
)

__version__ = "0.1.0"

kernel_backend = _backend.current
kernel_backends_available = _backend.available
