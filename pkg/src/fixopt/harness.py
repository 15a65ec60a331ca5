"""Experiment harness: random instances, seeded ensembles, CSV emission.

An experiment fixes one randomly generated problem instance and runs the
chosen engine from ``samplings`` random initial points, all seeds derived
from a single master seed. Per-iteration curves are averaged pointwise over
the ensemble, and threshold crossings are read off the averaged curves
(per-run crossing statistics are kept in the report metadata).

File formats
------------
* config: JSON object with the ExperimentConfig fields
  (d, I, K, objective, algorithm, sampler, schedule{a, b, scale_alpha,
  scale_inner}, samplings, n_max, d_threshold, f_delta_threshold,
  master_seed, optional markov_seed and workers).
* problem instance: self-describing JSON, lossless float round-trip.
* trace CSV: one row per iteration, columns
  n, D_n, F_n, alpha_n, inner_n, cum_time_s.
* summary CSV: the three event blocks (D crossing, |delta F| crossing,
  terminal), columns event, threshold, n, time_s, value.
"""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ScheduleValidationError
from .functions import DiagQuadratic, WeightedL1
from .operators import Ball, BallProjection, GcfsComposite, HalfAveraged, Identity, unit_ball
from .samplers import (
    GreedyMaxResidual,
    MarkovChain,
    PermutationCycle,
    UniformIID,
    random_markov_matrix,
)
from .schedules import GRADIENT, StepSchedule, validate
from .solver import (
    QUADRATIC,
    WEIGHTED_L1,
    ProblemInstance,
    StoppingRule,
    first_d_crossing,
    first_f_delta_crossing,
    run,
)

__all__ = [
    "ExperimentConfig",
    "Event",
    "EnsembleReport",
    "generate_problem",
    "run_experiment",
    "emit_csv",
    "save_problem",
    "load_problem",
    "load_config",
    "config_to_dict",
    "config_from_dict",
    "SAMPLER_NAMES",
]

SAMPLER_NAMES = ("iid", "greedy", "perm", "markov")
OBJECTIVES = (QUADRATIC, WEIGHTED_L1)
TRACE_FILE = "trace.csv"
SUMMARY_FILE = "summary.csv"


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    I: int
    K: int
    objective: str
    algorithm: str
    sampler: str
    schedule: StepSchedule
    samplings: int
    n_max: int
    d_threshold: float
    f_delta_threshold: float
    master_seed: int
    markov_seed: int | None = None
    workers: int = 1

    def __post_init__(self):
        if min(self.d, self.I, self.K) < 1:
            raise ValueError("d, I and K must all be at least 1")
        if self.samplings < 1:
            raise ValueError("samplings must be at least 1")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.sampler not in SAMPLER_NAMES:
            raise ValueError(f"sampler must be one of {SAMPLER_NAMES}")
        if self.algorithm == GRADIENT and self.objective != QUADRATIC:
            raise ValueError("the gradient algorithm needs a quadratic objective")

    @property
    def stopping(self):
        return StoppingRule(self.d_threshold, self.f_delta_threshold, self.n_max)


@dataclass(frozen=True)
class Event:
    """One crossing block of the summary: threshold, iteration, time, value."""

    threshold: float | None
    n: int | None
    time_s: float | None
    value: float | None


@dataclass
class EnsembleReport:
    """Pointwise-averaged curves plus crossing events for one experiment."""

    config: ExperimentConfig
    n: np.ndarray
    d_metric: np.ndarray
    f_metric: np.ndarray
    alpha: np.ndarray
    inner: np.ndarray
    time_s: np.ndarray
    residuals: np.ndarray          # (n_max + 1, I), averaged over runs
    events: dict
    metadata: dict
    run_traces: list = field(repr=False)


def _uniform_open_closed(rng, size=None):
    """Uniform draw from (0, 1]: redraw the measure-zero exact zeros."""
    u = np.atleast_1d(rng.random(size))
    while True:
        zeros = u == 0.0
        if not zeros.any():
            break
        u[zeros] = rng.random(int(zeros.sum()))
    return u if size is not None else float(u[0])


def generate_problem(seed, d, I, K, objective):
    """Random problem instance with the benchmark parameter ranges.

    Quadratic components draw diag entries from [0, d] and linear terms from
    [-1, 1]^d; weighted-l1 components draw weights from (0, 1] and anchors
    from [-1, 1]. Every operator is a ball composite with K inner balls of
    radius in (0, 1] centered in [-1/sqrt(d), 1/sqrt(d))^d, the outer and
    bounding balls both the unit ball at the origin. Deterministic in seed;
    objective and geometry draws use separate substreams, so the two
    objective families share the constraint geometry at equal seeds.
    """
    if min(d, I, K) < 1:
        raise ValueError("d, I and K must all be at least 1")
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    func_rng, ball_rng = np.random.default_rng(seed).spawn(2)
    half_width = 1.0 / np.sqrt(d)
    components = []
    for _ in range(I):
        if objective == QUADRATIC:
            f = DiagQuadratic(func_rng.uniform(0.0, d, d),
                              func_rng.uniform(-1.0, 1.0, d))
        else:
            f = WeightedL1(_uniform_open_closed(func_rng, d),
                           func_rng.uniform(-1.0, 1.0, d))
        inner = tuple(
            Ball(ball_rng.uniform(-half_width, half_width, d),
                 _uniform_open_closed(ball_rng))
            for _ in range(K)
        )
        components.append((f, GcfsComposite(unit_ball(d), inner)))
    return ProblemInstance(dim=d, components=tuple(components),
                           bounding_ball=unit_ball(d))


def _make_sampler_spec(cfg, markov_seed_seq):
    if cfg.sampler == "iid":
        return UniformIID(cfg.I)
    if cfg.sampler == "greedy":
        return GreedyMaxResidual(cfg.I)
    if cfg.sampler == "perm":
        return PermutationCycle(cfg.I)
    seed = cfg.markov_seed if cfg.markov_seed is not None else markov_seed_seq
    return MarkovChain(random_markov_matrix(cfg.I, np.random.default_rng(seed)))


def _run_task(args):
    problem, algorithm, schedule, spec, x0, stopping, seed = args
    return run(problem, algorithm, schedule, spec, x0, stopping, seed,
               projected=True)


def run_experiment(cfg):
    """Run the full ensemble for one configuration and average the traces."""
    violations = validate(cfg.schedule, cfg.algorithm)
    if violations:
        raise ScheduleValidationError(cfg.algorithm, violations)

    root = np.random.SeedSequence(cfg.master_seed)
    problem_ss, markov_ss, ensemble_ss = root.spawn(3)
    problem = generate_problem(problem_ss, cfg.d, cfg.I, cfg.K, cfg.objective)
    spec = _make_sampler_spec(cfg, markov_ss)
    stopping = cfg.stopping

    tasks = []
    for run_ss in ensemble_ss.spawn(cfg.samplings):
        x0_ss, sampler_ss = run_ss.spawn(2)
        x0 = np.random.default_rng(x0_ss).uniform(-1.0, 1.0, cfg.d)
        tasks.append((problem, cfg.algorithm, cfg.schedule, spec, x0,
                      stopping, sampler_ss))

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            traces = list(pool.map(_run_task, tasks))
    else:
        traces = [_run_task(t) for t in tasks]

    d_avg = np.mean([t.d_metric for t in traces], axis=0)
    f_avg = np.mean([t.f_metric for t in traces], axis=0)
    time_avg = np.mean([t.time_s for t in traces], axis=0)
    res_avg = np.mean([t.residuals for t in traces], axis=0)

    d_n = first_d_crossing(d_avg, cfg.d_threshold)
    f_n = first_f_delta_crossing(f_avg, cfg.f_delta_threshold)
    events = {
        "d_cross": Event(
            cfg.d_threshold,
            d_n,
            float(time_avg[d_n]) if d_n is not None else None,
            float(d_avg[d_n]) if d_n is not None else None,
        ),
        "f_delta_cross": Event(
            cfg.f_delta_threshold,
            f_n,
            float(time_avg[f_n]) if f_n is not None else None,
            float(f_avg[f_n]) if f_n is not None else None,
        ),
        "terminal": Event(None, cfg.n_max, float(time_avg[-1]), float(f_avg[-1])),
    }

    if cfg.sampler == "greedy":
        f_dist_kind = "uniform (greedy has no stationary law)"
    elif cfg.sampler == "markov":
        f_dist_kind = "markov stationary"
    else:
        f_dist_kind = "uniform"
    run_d_crosses = [t.d_cross_n for t in traces]
    run_f_crosses = [t.f_delta_cross_n for t in traces]
    metadata = {
        "f_distribution": f_dist_kind,
        "crossing_semantics": "events read off the ensemble-averaged curves",
        "master_seed": cfg.master_seed,
        "samplings": cfg.samplings,
        "run_d_cross_n": run_d_crosses,
        "run_f_delta_cross_n": run_f_crosses,
        "mean_run_d_cross_n": _mean_or_none(run_d_crosses),
        "mean_run_f_delta_cross_n": _mean_or_none(run_f_crosses),
    }

    return EnsembleReport(
        config=cfg,
        n=np.arange(cfg.n_max + 1),
        d_metric=d_avg,
        f_metric=f_avg,
        alpha=traces[0].alpha,
        inner=traces[0].inner,
        time_s=time_avg,
        residuals=res_avg,
        events=events,
        metadata=metadata,
        run_traces=traces,
    )


def _mean_or_none(values):
    crossed = [v for v in values if v is not None]
    return float(np.mean(crossed)) if len(crossed) == len(values) and crossed else None


def _fmt(value):
    """Lossless decimal text for CSV cells; empty for missing."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def emit_csv(report, destination):
    """Write trace.csv and summary.csv for the report into a directory."""
    destination = Path(destination)
    destination.mkdir(parents=True, exist_ok=True)
    with open(destination / TRACE_FILE, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("n,D_n,F_n,alpha_n,inner_n,cum_time_s\n")
        for i in range(report.n.shape[0]):
            fh.write(",".join([
                str(int(report.n[i])),
                _fmt(report.d_metric[i]),
                _fmt(report.f_metric[i]),
                _fmt(report.alpha[i]),
                _fmt(report.inner[i]),
                _fmt(report.time_s[i]),
            ]) + "\n")
    with open(destination / SUMMARY_FILE, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("event,threshold,n,time_s,value\n")
        for name in ("d_cross", "f_delta_cross", "terminal"):
            ev = report.events[name]
            fh.write(",".join([
                name, _fmt(ev.threshold), _fmt(ev.n), _fmt(ev.time_s),
                _fmt(ev.value),
            ]) + "\n")


# --- problem instance (de)serialization ------------------------------------


def _ball_to_dict(ball):
    return {"center": ball.center.tolist(), "radius": float(ball.radius)}


def _ball_from_dict(data):
    return Ball(np.asarray(data["center"], dtype=float), data["radius"])


def _operator_to_dict(op):
    if isinstance(op, Identity):
        return {"kind": "identity"}
    if isinstance(op, BallProjection):
        return {"kind": "ball_projection", "ball": _ball_to_dict(op.ball)}
    if isinstance(op, GcfsComposite):
        return {
            "kind": "gcfs",
            "outer": _ball_to_dict(op.outer),
            "inner": [_ball_to_dict(b) for b in op.inner],
        }
    if isinstance(op, HalfAveraged):
        return {"kind": "half_averaged", "inner": _operator_to_dict(op.inner)}
    raise TypeError(f"not an operator expression: {op!r}")


def _operator_from_dict(data):
    kind = data["kind"]
    if kind == "identity":
        return Identity()
    if kind == "ball_projection":
        return BallProjection(_ball_from_dict(data["ball"]))
    if kind == "gcfs":
        return GcfsComposite(
            _ball_from_dict(data["outer"]),
            tuple(_ball_from_dict(b) for b in data["inner"]),
        )
    if kind == "half_averaged":
        return HalfAveraged(_operator_from_dict(data["inner"]))
    raise ValueError(f"unknown operator kind {kind!r}")


def _function_to_dict(f):
    if isinstance(f, DiagQuadratic):
        return {"kind": QUADRATIC, "diag": f.diag.tolist(),
                "linear": f.linear.tolist()}
    return {"kind": WEIGHTED_L1, "weights": f.weights.tolist(),
            "anchor": f.anchor.tolist()}


def _function_from_dict(data):
    if data["kind"] == QUADRATIC:
        return DiagQuadratic(np.asarray(data["diag"], dtype=float),
                             np.asarray(data["linear"], dtype=float))
    if data["kind"] == WEIGHTED_L1:
        return WeightedL1(np.asarray(data["weights"], dtype=float),
                          np.asarray(data["anchor"], dtype=float))
    raise ValueError(f"unknown objective kind {data['kind']!r}")


def problem_to_dict(problem):
    ks = sorted({
        len(op.inner) for _, op in problem.components
        if isinstance(op, GcfsComposite)
    })
    return {
        "d": problem.dim,
        "I": problem.size,
        "K": ks[0] if len(ks) == 1 else None,
        "objective": problem.objective_kind,
        "bounding_ball": _ball_to_dict(problem.bounding_ball),
        "components": [
            {"function": _function_to_dict(f), "operator": _operator_to_dict(op)}
            for f, op in problem.components
        ],
    }


def problem_from_dict(data):
    components = tuple(
        (_function_from_dict(c["function"]), _operator_from_dict(c["operator"]))
        for c in data["components"]
    )
    return ProblemInstance(
        dim=data["d"],
        components=components,
        bounding_ball=_ball_from_dict(data["bounding_ball"]),
    )


def save_problem(problem, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(problem_to_dict(problem), fh, indent=1)
        fh.write("\n")


def load_problem(path):
    with open(path, encoding="utf-8") as fh:
        return problem_from_dict(json.load(fh))


# --- experiment config (de)serialization -----------------------------------


def config_to_dict(cfg):
    out = {
        "d": cfg.d,
        "I": cfg.I,
        "K": cfg.K,
        "objective": cfg.objective,
        "algorithm": cfg.algorithm,
        "sampler": cfg.sampler,
        "schedule": {
            "a": cfg.schedule.a,
            "b": cfg.schedule.b,
            "scale_alpha": cfg.schedule.scale_alpha,
            "scale_inner": cfg.schedule.scale_inner,
        },
        "samplings": cfg.samplings,
        "n_max": cfg.n_max,
        "d_threshold": cfg.d_threshold,
        "f_delta_threshold": cfg.f_delta_threshold,
        "master_seed": cfg.master_seed,
        "workers": cfg.workers,
    }
    if cfg.markov_seed is not None:
        out["markov_seed"] = cfg.markov_seed
    return out


def config_from_dict(data):
    sched = data["schedule"]
    return ExperimentConfig(
        d=int(data["d"]),
        I=int(data["I"]),
        K=int(data["K"]),
        objective=data["objective"],
        algorithm=data["algorithm"],
        sampler=data["sampler"],
        schedule=StepSchedule(
            a=float(sched["a"]),
            b=float(sched["b"]),
            scale_alpha=float(sched.get("scale_alpha", 1e-3)),
            scale_inner=float(sched.get("scale_inner", 1e-3)),
        ),
        samplings=int(data["samplings"]),
        n_max=int(data["n_max"]),
        d_threshold=float(data["d_threshold"]),
        f_delta_threshold=float(data["f_delta_threshold"]),
        master_seed=int(data["master_seed"]),
        markov_seed=(int(data["markov_seed"]) if "markov_seed" in data else None),
        workers=int(data.get("workers", 1)),
    )


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))
