import numpy as np
import pytest

from tvfixpoint import functions as fn
from tvfixpoint import oracle, problems, running, sets
from tvfixpoint.errors import OracleFailure, ParameterError
from tvfixpoint.problems import ProblemInstance, static_stream


def test_box_constrained_scalar():
    inst = ProblemInstance(fn.Quadratic([[1.0]], [-2.0], 2.0), feasible_set=sets.box(-1, 1, 1))
    sol = oracle.solve_instance(inst, "primal")
    assert sol.x_star == pytest.approx([1.0])
    assert sol.residual <= 1e-10


def test_scalar_lasso():
    inst = ProblemInstance(fn.Quadratic([[1.0]], [-1.0], 0.5), g=fn.L1Norm(1, 0.5))
    sol = oracle.solve_instance(inst, "primal")
    assert sol.x_star == pytest.approx([0.5], abs=1e-10)
    assert sol.objective == pytest.approx(0.125 + 0.25)


def test_equality_qp_two_by_two_kkt():
    inst = ProblemInstance(fn.Quadratic(np.eye(2)), linear_eq=(np.ones((1, 2)), np.array([2.0])))
    sol = oracle.solve_instance(inst, "dual_eq")
    # x + A'p = 0 and 1'x = 2
    assert sol.x_star == pytest.approx([1.0, 1.0])
    assert sol.p_star == pytest.approx([-1.0])


def test_inequality_qp_active_set():
    inst = ProblemInstance(fn.Quadratic([[1.0]]), linear_ineq=(np.array([[-1.0]]), np.array([-1.0])),
                           slater_point=np.array([2.0]))
    sol = oracle.solve_instance(inst, "dual_ineq")
    assert sol.x_star == pytest.approx([1.0]) and sol.p_star == pytest.approx([1.0])


def test_static_stream_trajectory_is_constant():
    s = problems.make_scenario({"scenario": "static_quadratic", "T": 30})
    traj = oracle.solution_trajectory(s)
    assert len(traj) == 31
    xs = np.array([t.x_star for t in traj])
    assert np.abs(xs - xs[0]).max() <= 1e-10


def test_moving_quadratic_consecutive_distances():
    s = problems.make_scenario({"scenario": "moving_quadratic", "T": 40, "drift": 0.01})
    xs = np.array([t.x_star for t in oracle.solution_trajectory(s)])
    assert np.allclose(np.linalg.norm(np.diff(xs, axis=0), axis=1), 0.01, atol=1e-9)


def test_iterative_oracle_is_warm_start_independent():
    # nonquadratic composite part forces the iterative route
    s = problems.make_scenario({"scenario": "tv_lasso", "T": 5})
    inst = s.sample(3)
    a = oracle.solve_instance(inst, "primal")
    b = oracle.solve_instance(inst, "primal", warm=oracle.ReferenceSolution(
        np.full(inst.dim, 0.9), np.full(inst.dim, 0.9), 0.0, 0.0, 0))
    assert np.abs(a.x_star - b.x_star).max() <= 10 * 1e-10 / (1 - 0.5) + 1e-12
    assert a.iterations > 0


def test_oracle_objective_below_every_iterate():
    s = problems.make_scenario({"scenario": "tv_lasso", "T": 40})
    traj = oracle.solution_trajectory(s)
    rec = running.run_forward_backward(s)
    for k, (x, sol) in enumerate(zip(rec.states, traj), start=1):
        assert sol.objective <= s.sample(k).objective(x) + 1e-9


def test_douglas_rachford_state_is_shadow_variable():
    g = fn.Indicator(sets.halfspace(np.array([-1.0]), -1.0))
    inst = ProblemInstance(fn.Quadratic([[1.0]]), g=g)
    sol = oracle.solve_instance(inst, "douglas_rachford", lam=1.0)
    assert sol.x_star == pytest.approx([1.0], abs=1e-9)
    assert sol.state_star == pytest.approx([0.0], abs=1e-9)


def test_iteration_cap_raises():
    from tvfixpoint import operators as ops

    slow = ops.AveragedOperator(lambda x: 0.999 * x, 0.0005, 1, contraction=0.999)
    with pytest.raises(OracleFailure):
        oracle._fixed_point(slow, np.ones(1), 1e-10, maxiter=100)


def test_unknown_family():
    with pytest.raises(ParameterError):
        oracle.solve_instance(ProblemInstance(fn.Quadratic(np.eye(1))), "newton")


def test_trajectory_matches_stream_horizon():
    inst = ProblemInstance(fn.Quadratic(np.eye(2), [1.0, 0.0]))
    traj = oracle.solution_trajectory(static_stream(inst, 7))
    assert len(traj) == 8
    assert traj[0].x_star == pytest.approx([-1.0, 0.0])
