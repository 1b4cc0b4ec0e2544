import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tvfixpoint import functions as fn
from tvfixpoint import sets
from tvfixpoint.errors import ParameterError, UnsupportedOperation

vec = arrays(float, 4, elements=st.floats(-20, 20, allow_nan=False))


def random_quadratic(rng, n, m=0.5):
    A = rng.normal(size=(n, n))
    return fn.Quadratic(A @ A.T + m * np.eye(n), rng.normal(size=n), rng.normal())


def central_difference(f, x, h=1e-6):
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


# ----------------------------------------------------------------------
# gradients

def test_gradient_examples():
    assert np.allclose(fn.eval_gradient(fn.Quadratic(np.eye(2)), [1.0, 2.0]), [1.0, 2.0])
    f = fn.Quadratic([[1.0]], [-2.0], 2.0)  # (x - 2)^2 / 2
    assert np.allclose(fn.eval_gradient(f, [0.0]), [-2.0])


@pytest.mark.parametrize("seed", range(5))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    for f in (random_quadratic(rng, 5), fn.LeastSquares(rng.normal(size=(7, 5)), rng.normal(size=7))):
        x = rng.normal(size=5)
        g = fn.eval_gradient(f, x)
        fd = central_difference(f, x)
        assert np.linalg.norm(g - fd) <= 1e-4 * max(1.0, np.linalg.norm(g))


def test_gradient_of_nonsmooth_is_rejected():
    with pytest.raises(UnsupportedOperation):
        fn.eval_gradient(fn.L1Norm(3), np.ones(3))


# ----------------------------------------------------------------------
# prox

def test_prox_examples():
    assert np.allclose(fn.eval_prox(fn.L1Norm(1), None, 0.5, [2.0]), [1.5])
    assert np.allclose(fn.eval_prox(fn.Quadratic([[1.0]]), None, 1.0, [4.0]), [2.0])
    for lam in (0.1, 1.0, 10.0):
        assert np.allclose(fn.eval_prox(fn.ZeroFunction(1), sets.box(-1, 1, 1), lam, [2.0]), [1.0])


def test_prox_quadratic_over_box_is_the_constrained_minimizer():
    rng = np.random.default_rng(7)
    f = random_quadratic(rng, 3)
    box = sets.box(-0.2, 0.2, 3)
    v = rng.normal(size=3) * 3
    lam = 0.7
    x = fn.eval_prox(f, box, lam, v)
    assert box.contains(x)
    obj = lambda y: f(y) + np.sum((y - v) ** 2) / (2 * lam)  # noqa: E731
    for _ in range(2000):
        y = box.project(x + 0.05 * rng.normal(size=3))
        assert obj(y) >= obj(x) - 1e-10


def test_prox_quadratic_over_affine_solves_kkt():
    rng = np.random.default_rng(8)
    f = random_quadratic(rng, 4)
    A = rng.normal(size=(2, 4))
    b = rng.normal(size=2)
    aff = sets.affine(A, b)
    v = rng.normal(size=4)
    x = fn.eval_prox(f, aff, 0.5, v)
    assert np.allclose(A @ x, b)
    # stationarity: gradient of the prox objective lies in the row space of A
    r = f.gradient(x) + (x - v) / 0.5
    coef = np.linalg.lstsq(A.T, r, rcond=None)[0]
    assert np.allclose(A.T @ coef, r, atol=1e-8)


def test_prox_without_closed_form_is_unsupported():
    with pytest.raises(UnsupportedOperation):
        fn.L1Norm(2).prox(1.0, np.ones(2), sets.ball(1.0, dim=2))


def test_prox_rejects_nonpositive_lambda():
    with pytest.raises(ParameterError):
        fn.L1Norm(2).prox(0.0, np.ones(2))


# ----------------------------------------------------------------------
# projections

def test_projection_examples():
    assert np.allclose(fn.project(sets.ball(1.0, dim=2), [3.0, 4.0]), [0.6, 0.8])
    assert np.allclose(fn.project(sets.box(-1, 1, 2), [2.0, 0.0]), [1.0, 0.0])
    assert np.allclose(fn.project(sets.simplex(2), [0.5, 0.5]), [0.5, 0.5])


def test_simplex_projection_matches_sorted_threshold():
    rng = np.random.default_rng(9)
    S = sets.simplex(6)
    for _ in range(200):
        x = rng.normal(size=6) * 2
        p = S.project(x)
        assert p.sum() == pytest.approx(1.0) and np.all(p >= 0)
        # optimality: p = max(x - tau, 0) for one threshold tau
        tau = np.mean((x - p)[p > 0])
        assert np.allclose(p, np.maximum(x - tau, 0), atol=1e-12)


def catalog_sets():
    return [
        sets.whole_space(4), sets.box(-1, 2, 4), sets.ball(1.5, center=np.arange(4.0)),
        sets.halfspace(np.array([1.0, -1.0, 0.5, 2.0]), 0.3),
        sets.affine(np.array([[1.0, 1.0, 0.0, 0.0], [0.0, 1.0, -1.0, 2.0]]), np.array([1.0, -2.0])),
        sets.simplex(4, 2.0), sets.nonnegative_orthant(4), sets.nonnegative_ball(4, 1.0),
    ]


@settings(max_examples=100, deadline=None)
@given(vec)
def test_projection_idempotent_and_fixes_members(x):
    for S in catalog_sets():
        p = S.project(x)
        assert S.contains(p, tol=1e-8)
        assert np.allclose(S.project(p), p, atol=1e-12, rtol=0)


def test_inconsistent_sets_are_rejected():
    with pytest.raises(ParameterError):
        sets.box(1.0, -1.0, 2)
    with pytest.raises(ParameterError):
        sets.ball(-1.0, dim=2)


# ----------------------------------------------------------------------
# conjugates

def test_conjugate_constants_examples():
    _, M_star = fn.conjugate_constants(fn.ConvexFunction(1, m=2.0))
    assert M_star == pytest.approx(0.5)
    m_star, _ = fn.conjugate_constants(fn.ConvexFunction(1, m=0.0, M=4.0))
    assert m_star == pytest.approx(0.25)
    assert fn.conjugate_constants(fn.Quadratic(np.eye(3))) == pytest.approx((1.0, 1.0))
    with pytest.raises(UnsupportedOperation):
        fn.conjugate_constants(fn.L1Norm(2))


def moreau_catalog():
    rng = np.random.default_rng(10)
    return [
        fn.L1Norm(4, 0.7), fn.EuclideanNorm(4, 1.3), random_quadratic(rng, 4),
        fn.Indicator(sets.box(-0.5, 0.5, 4)), fn.Indicator(sets.ball(2.0, dim=4)), fn.ZeroFunction(4),
    ]


@settings(max_examples=100, deadline=None)
@given(vec, st.floats(0.05, 5.0))
def test_moreau_identity(v, lam):
    for f in moreau_catalog():
        fs = f.conjugate()
        lhs = f.prox(lam, v) + lam * fs.prox(1.0 / lam, v / lam)
        assert np.allclose(lhs, v, atol=1e-8 * max(1.0, np.abs(v).max()))


# ----------------------------------------------------------------------
# curvature and firm nonexpansiveness

@pytest.mark.parametrize("seed", range(4))
def test_gradient_monotonicity_between_m_and_M(seed):
    rng = np.random.default_rng(seed)
    for f in (random_quadratic(rng, 5), fn.LeastSquares(rng.normal(size=(8, 5)), rng.normal(size=8))):
        for _ in range(500):
            x, y = rng.normal(size=(2, 5)) * 3
            inner = (f.gradient(x) - f.gradient(y)) @ (x - y)
            d2 = (x - y) @ (x - y)
            assert f.m * d2 - 1e-9 <= inner <= f.M * d2 + 1e-9


@settings(max_examples=100, deadline=None)
@given(vec, vec, st.floats(0.05, 5.0))
def test_prox_firmly_nonexpansive(v1, v2, lam):
    box = sets.box(-1, 1, 4)
    for f, cset in [(fn.L1Norm(4, 0.4), None), (fn.L1Norm(4, 0.4), box), (fn.EuclideanNorm(4, 2.0), None),
                    (moreau_catalog()[2], None), (moreau_catalog()[2], box), (fn.ZeroFunction(4), box)]:
        p1, p2 = f.prox(lam, v1, cset), f.prox(lam, v2, cset)
        d = p1 - p2
        assert d @ d <= (v1 - v2) @ d + 1e-9 * max(1.0, (v1 - v2) @ (v1 - v2))
        if cset is not None:
            assert cset.contains(p1)


def test_values_match_pointwise_evaluation():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(20, 4))
    for f in moreau_catalog()[:3] + [fn.LeastSquares(rng.normal(size=(6, 4)), rng.normal(size=6))]:
        assert np.allclose(f.values(X), [f(x) for x in X])


def test_curvature_validation():
    with pytest.raises(ParameterError):
        fn.ConvexFunction(2, m=3.0, M=1.0)
    with pytest.raises(ParameterError):
        fn.Quadratic([[1.0, 0.0], [0.0, -1.0]])
