import numpy as np
import pytest

from fixopt import (
    Ball,
    BallProjection,
    DiagQuadratic,
    GcfsComposite,
    Identity,
    NonsmoothFunctionError,
    ProblemInstance,
    ScheduleValidationError,
    SolverState,
    StepSchedule,
    StoppingRule,
    UniformIID,
    WeightedL1,
    component_residuals,
    make_state,
    metric_D,
    metric_F,
    run,
    step_gradient,
    step_proximal,
    unit_ball,
)


def single_component(f, op, d):
    return ProblemInstance(dim=d, components=((f, op),), bounding_ball=unit_ball(d))


def zero_quadratic(d):
    return DiagQuadratic(np.zeros(d), np.zeros(d))


# --- problem construction ----------------------------------------------------


def test_problem_rejects_mixed_objectives():
    comps = (
        (DiagQuadratic([1.0], [0.0]), Identity()),
        (WeightedL1([1.0], [0.0]), Identity()),
    )
    with pytest.raises(ValueError):
        ProblemInstance(dim=1, components=comps, bounding_ball=unit_ball(1))


def test_problem_rejects_dimension_mismatch():
    comps = ((DiagQuadratic([1.0, 1.0], [0.0, 0.0]), Identity()),)
    with pytest.raises(Exception):
        ProblemInstance(dim=1, components=comps, bounding_ball=unit_ball(1))


# --- hand-executed steps ------------------------------------------------------


def test_gradient_step_hand_example():
    # f = 0.5 x^2, T = Id, x0 = 1, lambda_0 = alpha_0 = 0.5
    prob = single_component(DiagQuadratic([1.0], [0.0]), Identity(), 1)
    sched = StepSchedule(0.25, 0.5, 0.5, 0.5)
    state = SolverState(n=0, x0=np.array([1.0]), x=np.array([1.0]))
    w = step_gradient(state, prob, make_state(UniformIID(1), 0), sched)
    assert w == 1
    assert state.n == 1
    assert state.x == pytest.approx([0.75])


def test_gradient_step_zero_objective_is_anchored_fixed_point_iteration():
    d = 2
    op = BallProjection(Ball([0.0, 0.0], 0.5))
    prob = single_component(zero_quadratic(d), op, d)
    sched = StepSchedule(0.25, 0.5, 0.5, 0.5)
    x0 = np.array([2.0, 0.0])
    state = SolverState(n=0, x0=x0.copy(), x=x0.copy())
    step_gradient(state, prob, make_state(UniformIID(1), 0), sched)
    alpha0 = 0.5
    expected = alpha0 * x0 + (1 - alpha0) * np.array([0.5, 0.0])
    assert np.allclose(state.x, expected)


def test_gradient_step_at_common_fixed_point_moves_toward_anchor_only():
    d = 2
    prob = single_component(zero_quadratic(d), Identity(), d)
    sched = StepSchedule(0.25, 0.5, 0.5, 0.5)
    x0 = np.array([0.25, 0.25])
    x = np.array([0.1, 0.1])
    state = SolverState(n=0, x0=x0.copy(), x=x.copy())
    step_gradient(state, prob, make_state(UniformIID(1), 0), sched)
    assert np.allclose(state.x, 0.5 * x0 + 0.5 * x)


def test_proximal_step_hand_example():
    # f = |x|, T = Id, x0 = 3, gamma_0 = 1, alpha_0 = 0.5: prox soft-thresholds to 2
    prob = single_component(WeightedL1([1.0], [0.0]), Identity(), 1)
    sched = StepSchedule(0.125, 0.75, 0.5, 1.0)
    state = SolverState(n=0, x0=np.array([3.0]), x=np.array([3.0]))
    w = step_proximal(state, prob, make_state(UniformIID(1), 0), sched)
    assert w == 1
    assert state.x == pytest.approx([2.5])


def test_proximal_step_fixes_anchor_point():
    a = np.array([0.3, -0.2])
    prob = single_component(WeightedL1([1.0, 1.0], a), Identity(), 2)
    sched = StepSchedule(0.125, 0.75, 0.5, 1.0)
    state = SolverState(n=0, x0=a.copy(), x=a.copy())
    step_proximal(state, prob, make_state(UniformIID(1), 0), sched)
    assert np.allclose(state.x, a)


def test_proximal_step_small_gamma_approaches_pure_operator_step():
    d = 2
    op = BallProjection(Ball([0.0, 0.0], 0.5))
    prob = single_component(WeightedL1([1.0, 1.0], [0.9, 0.9]), op, d)
    sched = StepSchedule(0.125, 0.75, 1e-12, 1e-12)
    x = np.array([2.0, 0.0])
    state = SolverState(n=0, x0=x.copy(), x=x.copy())
    step_proximal(state, prob, make_state(UniformIID(1), 0), sched)
    from fixopt import apply

    assert np.linalg.norm(state.x - apply(op, x)) <= 1e-9


def test_gradient_step_rejects_nonsmooth_objective():
    prob = single_component(WeightedL1([1.0], [0.0]), Identity(), 1)
    sched = StepSchedule(0.25, 0.5)
    state = SolverState(n=0, x0=np.array([1.0]), x=np.array([1.0]))
    with pytest.raises(NonsmoothFunctionError):
        step_gradient(state, prob, make_state(UniformIID(1), 0), sched)


def test_steps_reject_invalid_schedule():
    prob = single_component(DiagQuadratic([1.0], [0.0]), Identity(), 1)
    bad = StepSchedule(0.5, 0.25)
    state = SolverState(n=0, x0=np.array([1.0]), x=np.array([1.0]))
    with pytest.raises(ScheduleValidationError):
        step_gradient(state, prob, make_state(UniformIID(1), 0), bad)
    with pytest.raises(ScheduleValidationError):
        step_proximal(state, prob, make_state(UniformIID(1), 0), bad)


# --- metrics ------------------------------------------------------------------


def test_metric_d_zero_at_common_fixed_point():
    d = 2
    prob = ProblemInstance(
        dim=d,
        components=(
            (zero_quadratic(d), Identity()),
            (zero_quadratic(d), BallProjection(unit_ball(d))),
        ),
        bounding_ball=unit_ball(d),
    )
    assert metric_D(np.array([0.1, 0.1]), prob) == 0.0


def test_metric_d_single_composite():
    op = GcfsComposite(unit_ball(2), (Ball([3.0, 0.0], 1.0),))
    prob = single_component(zero_quadratic(2), op, 2)
    assert metric_D(np.array([0.0, 0.0]), prob) == pytest.approx(0.5, abs=1e-12)


def test_metric_d_unchanged_by_identity_components():
    op = GcfsComposite(unit_ball(2), (Ball([3.0, 0.0], 1.0),))
    prob1 = single_component(zero_quadratic(2), op, 2)
    prob2 = ProblemInstance(
        dim=2,
        components=((zero_quadratic(2), op), (zero_quadratic(2), Identity())),
        bounding_ball=unit_ball(2),
    )
    x = np.array([0.0, 0.0])
    assert metric_D(x, prob1) == pytest.approx(metric_D(x, prob2))


def test_metric_f_weighted_mean():
    f1 = DiagQuadratic([0.0], [1.0])   # f(x) = x
    f2 = DiagQuadratic([0.0], [2.0])   # f(x) = 2x
    prob = ProblemInstance(
        dim=1,
        components=((f1, Identity()), (f2, Identity())),
        bounding_ball=unit_ball(1),
    )
    x = np.array([3.0])
    assert metric_F(x, prob, [1.0 / 3.0, 2.0 / 3.0]) == pytest.approx(5.0)
    assert metric_F(x, prob, [1.0, 0.0]) == pytest.approx(3.0)


def test_metric_f_identical_components_uniform():
    f = DiagQuadratic([1.0, 1.0], [0.0, 0.0])
    prob = ProblemInstance(
        dim=2,
        components=((f, Identity()), (f, Identity())),
        bounding_ball=unit_ball(2),
    )
    x = np.array([3.0, 4.0])
    assert metric_F(x, prob, [0.5, 0.5]) == pytest.approx(f.value(x))


def test_metric_f_rejects_malformed_distribution():
    prob = single_component(DiagQuadratic([1.0], [0.0]), Identity(), 1)
    with pytest.raises(ValueError):
        metric_F(np.array([1.0]), prob, [0.5, 0.5])
    with pytest.raises(ValueError):
        metric_F(np.array([1.0]), prob, [0.7])


# --- run loop -----------------------------------------------------------------


def test_run_zero_iterations_records_initial_state():
    prob = single_component(DiagQuadratic([1.0], [0.0]), Identity(), 1)
    tr = run(prob, "gradient", StepSchedule(0.25, 0.5), UniformIID(1),
             np.array([2.0]), StoppingRule(1e-3, 1e-5, 0), seed=0)
    assert tr.n.tolist() == [0]
    assert tr.d_metric[0] == 0.0
    assert tr.f_metric[0] == pytest.approx(2.0)
    assert np.allclose(tr.final_x, [2.0])


def test_run_halpern_limit_is_nearest_fixed_point():
    d = 3
    prob = single_component(zero_quadratic(d), BallProjection(unit_ball(d)), d)
    x0 = np.zeros(d)
    x0[0] = 2.0
    tr = run(prob, "gradient", StepSchedule(0.25, 0.5, 0.1, 0.1), UniformIID(1),
             x0, StoppingRule(1e-3, 1e-5, 1000), seed=0, projected=False)
    target = np.zeros(d)
    target[0] = 1.0
    assert np.linalg.norm(tr.final_x - target) <= 1e-2


def test_run_determinism():
    rng = np.random.default_rng(0)
    from fixopt import generate_problem

    prob = generate_problem(5, 8, 3, 2, "quadratic")
    x0 = rng.uniform(-1, 1, 8)
    kw = dict(problem=prob, algorithm="gradient",
              schedule=StepSchedule(0.25, 0.5), sampler_spec=UniformIID(3),
              x0=x0, stopping=StoppingRule(1e-3, 1e-5, 100), seed=99)
    t1, t2 = run(**kw), run(**kw)
    assert np.array_equal(t1.d_metric, t2.d_metric)
    assert np.array_equal(t1.f_metric, t2.f_metric)
    assert np.array_equal(t1.final_x, t2.final_x)


def test_run_zero_objective_engines_coincide():
    d = 4
    op = GcfsComposite(unit_ball(d), (Ball(np.full(d, 0.1), 0.8),))
    prob = single_component(zero_quadratic(d), op, d)
    x0 = np.full(d, 1.5)
    kw = dict(schedule=StepSchedule(0.25, 0.5), sampler_spec=UniformIID(1),
              x0=x0, stopping=StoppingRule(1e-3, 1e-5, 200), seed=3)
    tg = run(prob, "gradient", **kw)
    tp = run(prob, "proximal", **kw)
    assert np.array_equal(tg.d_metric, tp.d_metric)
    assert np.array_equal(tg.final_x, tp.final_x)


def test_run_anchor_combination_identity():
    # ||x_{n+1} - y_n|| = alpha_n ||x0 - y_n|| reconstructed from the iterates
    d = 3
    prob = single_component(
        DiagQuadratic(np.full(d, 0.5), np.full(d, 0.1)),
        GcfsComposite(unit_ball(d), (Ball(np.full(d, 0.05), 0.9),)), d)
    sched = StepSchedule(0.25, 0.5, 0.5, 0.5)
    sampler = make_state(UniformIID(1), 0)
    state = SolverState(n=0, x0=np.full(d, 1.0), x=np.full(d, 1.0))
    for _ in range(50):
        n = state.n
        x_prev = state.x.copy()
        step_gradient(state, prob, sampler, sched)
        alpha_n = sched.alpha(n)
        y = (state.x - alpha_n * state.x0) / (1.0 - alpha_n)
        assert np.linalg.norm(state.x - alpha_n * state.x0 - (1 - alpha_n) * y) <= 1e-10
        assert abs(np.linalg.norm(state.x - y)
                   - alpha_n * np.linalg.norm(state.x0 - y)) <= 1e-10
        del x_prev


def test_run_projected_variant_keeps_y_in_bounding_ball():
    d = 5
    rng = np.random.default_rng(21)
    prob = single_component(
        DiagQuadratic(rng.uniform(0, 5, d), rng.uniform(-1, 1, d)),
        GcfsComposite(unit_ball(d), (Ball(rng.uniform(-0.1, 0.1, d), 0.5),)), d)
    sched = StepSchedule(0.25, 0.5, 0.9, 0.9)
    sampler = make_state(UniformIID(1), 1)
    x0 = rng.uniform(-1, 1, d) * 3
    state = SolverState(n=0, x0=x0.copy(), x=x0.copy())
    for _ in range(100):
        n = state.n
        step_gradient(state, prob, sampler, sched, projected=True)
        alpha_n = sched.alpha(n)
        y = (state.x - alpha_n * state.x0) / (1.0 - alpha_n)
        assert np.linalg.norm(y) <= 1.0 + 1e-12


def test_run_rejects_sampler_size_mismatch():
    prob = single_component(DiagQuadratic([1.0], [0.0]), Identity(), 1)
    with pytest.raises(ValueError):
        run(prob, "gradient", StepSchedule(0.25, 0.5), UniformIID(3),
            np.array([1.0]), StoppingRule(1e-3, 1e-5, 5), seed=0)


def test_ball_is_isolated_from_caller_mutation():
    center = np.array([0.5, 0.5])
    b = Ball(center, 1.0)
    center[0] = 99.0
    assert b.center[0] == 0.5


def test_run_validates_schedule_and_smoothness():
    prob = single_component(WeightedL1([1.0], [0.0]), Identity(), 1)
    with pytest.raises(NonsmoothFunctionError):
        run(prob, "gradient", StepSchedule(0.25, 0.5), UniformIID(1),
            np.array([1.0]), StoppingRule(1e-3, 1e-5, 10), seed=0)
    with pytest.raises(ScheduleValidationError):
        run(prob, "proximal", StepSchedule(0.5, 0.25), UniformIID(1),
            np.array([1.0]), StoppingRule(1e-3, 1e-5, 10), seed=0)


def test_run_crossing_markers():
    d = 2
    prob = single_component(zero_quadratic(d), BallProjection(unit_ball(d)), d)
    x0 = np.array([2.0, 0.0])
    tr = run(prob, "gradient", StepSchedule(0.25, 0.5, 1e-3, 1e-3), UniformIID(1),
             x0, StoppingRule(0.5, 1e-5, 50), seed=0)
    assert tr.terminal_n == 50
    assert tr.d_cross_n is not None
    assert tr.d_metric[tr.d_cross_n] <= 0.5
    if tr.d_cross_n > 0:
        assert np.all(tr.d_metric[:tr.d_cross_n] > 0.5)
    # f is identically zero here, so the delta-F marker fires immediately
    assert tr.f_delta_cross_n == 1


def test_run_greedy_uses_residuals():
    d = 2
    far = GcfsComposite(unit_ball(d), (Ball([3.0, 0.0], 1.0),))
    near = Identity()
    prob = ProblemInstance(
        dim=d,
        components=((zero_quadratic(d), near), (zero_quadratic(d), far)),
        bounding_ball=unit_ball(d),
    )
    from fixopt import GreedyMaxResidual

    tr = run(prob, "gradient", StepSchedule(0.25, 0.5), GreedyMaxResidual(2),
             np.array([0.0, 0.0]), StoppingRule(1e-3, 1e-5, 5), seed=0)
    # greedy always selects the far component; its residual must shrink
    assert tr.residuals[5, 1] < tr.residuals[0, 1]
    assert tr.f_dist_fallback


def test_run_matches_naive_reference_loop():
    # literal transcription of the update rules, independent of the engine
    # implementation; identical seeds must give identical iterates
    from fixopt import apply, generate_problem, make_state, next_index, project_ball

    for algorithm, objective in (("gradient", "quadratic"),
                                 ("proximal", "weighted_l1")):
        prob = generate_problem(17, 6, 3, 2, objective)
        sched = StepSchedule(0.25, 0.5, 1e-2, 1e-2)
        rng = np.random.default_rng(8)
        x0 = rng.uniform(-1, 1, 6)
        n_max = 60

        tr = run(prob, algorithm, sched, UniformIID(3), x0,
                 StoppingRule(1e-3, 1e-5, n_max), seed=55, projected=True)

        sampler = make_state(UniformIID(3), 55)
        x = x0.copy()
        for n in range(n_max):
            alpha_n, inner_n = sched.value(n)
            w = next_index(sampler)
            f, op = prob.components[w - 1]
            if algorithm == "gradient":
                z = x - inner_n * f.subgradient(x)
            else:
                z = f.prox(x, inner_n)
            y = project_ball(apply(op, z), prob.bounding_ball)
            x = alpha_n * x0 + (1.0 - alpha_n) * y
        assert np.array_equal(tr.final_x, x)


def test_component_residuals_shape():
    prob = ProblemInstance(
        dim=2,
        components=((zero_quadratic(2), Identity()),
                    (zero_quadratic(2), BallProjection(unit_ball(2)))),
        bounding_ball=unit_ball(2),
    )
    res = component_residuals(np.array([3.0, 0.0]), prob)
    assert res.shape == (2,)
    assert res[0] == 0.0
    assert res[1] == pytest.approx(2.0)
