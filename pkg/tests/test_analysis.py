import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tvfixpoint import analysis as an
from tvfixpoint import oracle, problems, running, sets
from tvfixpoint.errors import ParameterError

pos = st.floats(0.0, 10.0, allow_nan=False)
alpha_st = st.floats(0.05, 0.95)


# ----------------------------------------------------------------------
# bound formulas

def test_fpr_bounded_image_examples():
    b = an.bound_fpr_bounded_image(np.full(100, 0.5), 1.0, 0.0, 1.0)
    assert b.value == pytest.approx(0.01)
    b = an.bound_fpr_bounded_image(np.full(100, 0.5), 1.0, 0.1, 1.0)
    assert b.asymptote == pytest.approx(0.41 / an.a_bar(np.full(100, 0.5)))
    # time-invariant rate
    assert np.allclose(b.curve - 0.41, 1.0 / np.arange(1, 101))


def test_tracking_contraction_examples():
    b = an.bound_tracking_contraction(np.full(50, 0.9), 0.01, 0.0)
    assert b.asymptote == pytest.approx(0.1)
    b = an.bound_tracking_contraction(np.full(10, 0.9), 0.0, 1.0)
    assert b.value == pytest.approx(0.9 ** 10) and b.value == pytest.approx(0.3487, abs=1e-4)
    assert b.curve[0] == 1.0
    b = an.bound_tracking_contraction(np.full(10, 0.9), 0.3, 2.5, k=1)
    assert b.value == 2.5


def test_tracking_zero_delta_is_exact_power():
    L = 0.73
    b = an.bound_tracking_contraction(np.full(40, L), 0.0, 1.7)
    assert np.array_equal(b.curve, np.concatenate([[1.0], np.cumprod(np.full(40, L))]) * 1.7)
    assert np.allclose(b.curve, L ** np.arange(41) * 1.7, rtol=1e-13)


def test_fpr_iterate_variation_examples():
    a = np.full(100, 0.5)
    assert np.array_equal(an.bound_fpr_iterate_variation(a, 0.0, 1.0).curve,
                          an.bound_fpr_bounded_image(a, 1.0, 0.0, 1.0).curve)
    assert an.bound_fpr_iterate_variation(a, 0.1, 1.0).value == pytest.approx(0.02)


def test_vanishing_examples():
    assert an.bound_vanishing(np.zeros(100), np.zeros(100)).summable
    assert an.bound_vanishing(0.5 ** np.arange(1, 201)).summable
    assert not an.bound_vanishing(np.full(200, 0.1)).summable


def test_objective_gap_examples():
    b = an.bound_objective_gap(0.5, np.full(100, 2.0), 1.0, 0.0, 0.0, 1.0, 1.0)
    assert b.value == pytest.approx(0.01)
    # proximal point: M = 0, first branch for any lambda
    b = an.bound_objective_gap(50.0, np.zeros(100), 1.0, 0.0, 0.0, 1.0, 1.0)
    assert b.value == pytest.approx(1 / (2 * 50.0 * 100))
    # second branch constant
    lam, M, abar = 0.8, 2.0, 0.25
    b = an.bound_objective_gap(lam, np.full(10, M), 1.0, 0.0, 0.0, abar, 1.0)
    C = 1 + (lam * M - 1) / abar
    assert b.value == pytest.approx(C / (2 * lam * 10))
    with pytest.raises(ParameterError):
        an.bound_objective_gap(1.0, np.full(10, 2.0), 1.0, 0.0, 0.0, 1.0, 1.0)


def test_dual_constants_examples():
    dc = an.dual_constants(np.eye(2), 1.0, 2.0)
    assert dc.smoothness == pytest.approx(1.0) and dc.strong_convexity == pytest.approx(0.5)
    dc = an.dual_constants(np.array([[1.0, 1.0]]), 1.0, 1.0)
    assert dc.sigma_max == pytest.approx(np.sqrt(2)) and dc.sigma_0 == pytest.approx(np.sqrt(2))
    assert dc.sigma_min == pytest.approx(np.sqrt(2))
    dc = an.dual_constants(np.array([[1.0, 0.0], [1.0, 0.0]]), 1.0, 1.0)
    assert dc.sigma_min == 0.0 and dc.sigma_0 == pytest.approx(np.sqrt(2))
    with pytest.raises(ParameterError):
        an.dual_constants(np.zeros((2, 2)), 1.0, 1.0)


@settings(max_examples=200, deadline=None)
@given(alpha_st, pos, pos, pos, pos, pos, st.floats(0.05, 0.95))
def test_bounds_are_monotone_in_every_constant(alpha, X, delta, d, sigma, init, L):
    a = np.full(30, alpha)
    bump = 0.37
    base = an.bound_fpr_bounded_image(a, X, delta, init).curve
    for args in ((X + bump, delta, init), (X, delta + bump, init), (X, delta, init + bump)):
        assert np.all(an.bound_fpr_bounded_image(a, *args).curve >= base)
    base = an.bound_tracking_contraction(np.full(30, L), delta, init).curve
    assert np.all(an.bound_tracking_contraction(np.full(30, L), delta + bump, init).curve >= base)
    assert np.all(an.bound_tracking_contraction(np.full(30, L), delta, init + bump).curve >= base)
    base = an.bound_fpr_iterate_variation(a, d, init).curve
    assert np.all(an.bound_fpr_iterate_variation(a, d + bump, init).curve >= base)
    assert np.all(an.bound_fpr_iterate_variation(a, d, init + bump).curve >= base)
    M = np.full(30, 1.5)
    abar = 1.0
    base = an.bound_objective_gap(0.5, M, X, delta, sigma, abar, init).curve
    for args in ((X + bump, delta, sigma), (X, delta + bump, sigma), (X, delta, sigma + bump)):
        assert np.all(an.bound_objective_gap(0.5, M, *args, abar, init).curve >= base)
    assert np.all(an.bound_objective_gap(0.5, M, X, delta, sigma, abar, init + bump).curve >= base)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.05, 0.95), min_size=1, max_size=40), st.floats(0.0, 1.0))
def test_bound_curves_finite_and_nonnegative(alphas, delta):
    for b in (an.bound_fpr_bounded_image(alphas, 1.0, delta, 1.0),
              an.bound_fpr_iterate_variation(alphas, delta, 1.0),
              an.bound_tracking_contraction(alphas, delta, 1.0)):
        assert np.all(np.isfinite(b.curve)) and np.all(b.curve >= 0)


def test_verdict_slack():
    assert an.verdict([1.0 + 5e-7], [1.0])["holds"]
    assert not an.verdict([1.0 + 5e-6], [1.0])["holds"]
    v = an.verdict([0.5, 0.9], [1.0, 1.0])
    assert v["worst_margin"] == pytest.approx(-0.1) and v["checked"] == 2


# ----------------------------------------------------------------------
# measure_and_verify

def pipeline(name, algorithm, lam=None, B=None, **kw):
    s = problems.make_scenario({"scenario": name, **kw})
    rec = running.run_algorithm(s, algorithm, lam, B=B)
    traj = oracle.solution_trajectory(s, running.oracle_family(algorithm, s), lam=rec.params["lambda"])
    return s, rec, an.measure_and_verify(rec, traj, s)


def test_static_contraction_tracking_holds():
    _, _, rep = pipeline("static_quadratic", "projected_gradient", 0.1, T=100)
    assert rep.variation["delta_hat"] == 0.0
    assert rep.verdicts["tracking"]["holds"]


def test_moving_quadratic_steady_state_below_asymptote():
    _, rec, rep = pipeline("moving_quadratic", "projected_gradient", 0.1, T=300)
    assert rep.info["tracking_asymptote"] == pytest.approx(0.01 / (1 - 0.9))
    assert np.all(rep.measured["tracking_error"][100:] <= 0.1 + 1e-6)
    assert rep.verdicts["tracking"]["holds"]


def test_lasso_with_box_bound_uses_box_norm():
    s = problems.make_scenario({"scenario": "tv_lasso", "T": 80})
    _, _, rep = pipeline("tv_lasso", "forward_backward", T=80)
    assert rep.X == pytest.approx(s.sample(1).feasible_set.norm)
    assert rep.all_hold


def test_weighted_fpr_uses_recorded_alphas():
    _, rec, rep = pipeline("tv_lasso", "forward_backward", T=30)
    expected = rec.alpha * (1 - rec.alpha) * rec.g_residual ** 2
    assert np.allclose(rep.measured["weighted_fpr"], expected, rtol=1e-12)


@pytest.mark.parametrize("name, algorithm, kw", [
    ("static_quadratic", "projected_gradient", {}),
    ("moving_quadratic", "projected_gradient", {}),
    ("moving_quadratic", "proximal_point", {}),
    ("tv_lasso", "forward_backward", {}),
    ("tv_lasso", "projected_gradient", {"l1": 0.0}),
    ("tv_lasso", "proximal_point", {"l1": 0.0}),
    ("tv_lasso", "douglas_rachford", {}),
    ("tv_inequality_qp", "dual_ascent", {}),
    ("tv_equality_qp", "dual_ascent", {}),
])
def test_every_shipped_pairing_holds(name, algorithm, kw):
    _, _, rep = pipeline(name, algorithm, T=120, **kw)
    assert rep.verdicts
    assert rep.all_hold, {k: v for k, v in rep.verdicts.items() if not v["holds"]}


def test_admm_report_measures_dual_error():
    _, rec, rep = pipeline("tv_admm_consensus", "admm", T=60)
    assert "dual_error" in rep.measured and rep.measured["dual_error"].shape == (61,)


def test_horizon_mismatch():
    s, rec, _ = pipeline("moving_quadratic", "projected_gradient", 0.1, T=20)
    traj = oracle.solution_trajectory(s)
    with pytest.raises(ParameterError):
        an.measure_and_verify(rec, traj[:-1], s)


def test_report_json_round_trip():
    _, _, rep = pipeline("tv_lasso", "forward_backward", T=20)
    back = an.BoundReport.from_dict(json.loads(rep.to_json()))
    assert back.to_dict() == rep.to_dict()


def test_steady_state_and_rate_fit():
    e = 0.9 ** np.arange(200)
    assert an.fit_rate(e) == pytest.approx(0.9, rel=1e-12)
    mean, var = an.steady_state(np.concatenate([np.ones(80), np.full(20, 2.0)]))
    assert mean == 2.0 and var == 0.0


def test_bounded_set_run_on_lasso_box():
    s = problems.make_scenario({"scenario": "tv_lasso", "T": 50})
    B = sets.box(-1e3, 1e3, s.sample(1).dim)
    _, rec, rep = pipeline("tv_lasso", "forward_backward", B=B, T=50)
    assert rep.verdicts["fpr_bounded"]["holds"]
