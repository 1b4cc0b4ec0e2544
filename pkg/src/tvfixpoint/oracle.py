"""
Reference solutions of sampled problems.

`solve_instance` solves one instance to high accuracy: closed forms or KKT
systems for quadratics, otherwise the family's own static operator iterated
until its fixed-point residual falls below the tolerance. A solution carries
both the decision variable scored by the tracking metrics (``x_star``) and the
fixed point of the running operator (``state_star``):

=================  ==============  =================
family             x_star          state_star
=================  ==============  =================
primal             x*              x*
douglas_rachford   x*              z* (shadow)
dual_eq/dual_ineq  x*              p*
admm               z*              beta* (shadow)
=================  ==============  =================
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np
from numpy import linalg as la

from . import functions as fn
from . import running
from .errors import OracleFailure, ParameterError, UnsupportedOperation

TOL = 1e-10
MAXITER = 1_000_000
ENUMERATION_LIMIT = 12


@dataclass(frozen=True)
class ReferenceSolution:
    x_star: np.ndarray
    state_star: np.ndarray
    objective: float
    residual: float
    iterations: int
    p_star: Optional[np.ndarray] = None
    extras: dict = field(default_factory=dict)


def _fixed_point(op, x0, tol, maxiter=MAXITER):
    """Iterate `op` until ``|T x - x|`` is below the tolerance."""
    # with a contraction the distance to the fixed point is at most r / (1 - L)
    target = tol * (1.0 - op.contraction) if op.contraction is not None else tol
    x = np.asarray(x0, dtype=float)
    for it in range(1, maxiter + 1):
        y = op(x)
        r = la.norm(y - x)
        x = y
        if r <= target:
            return x, r, it
    raise OracleFailure(f"{op.name}: residual {r:.3g} above {target:.3g} after {maxiter} iterations")


def _primal(instance, tol, warm):
    f, g, X = instance.f, instance.g, instance.feasible_set
    form = f.quadratic_form()
    closed = X.is_whole_space or X.kind == "affine-subspace" or (
        X.is_separable and form is not None and not np.any(form[0] - np.diag(np.diag(form[0])))
        and np.all(np.diag(form[0]) > 0))
    if running._is_zero(g) and form is not None and closed and (f.m > 0 or not X.is_whole_space):
        x = f.minimize(X)
        r = la.norm(X.project(x - f.gradient(x) / f.M) - x) if f.M > 0 else 0.0
        return x, r, 0
    x0 = np.zeros(f.dim) if warm is None else warm
    if f.is_smooth:
        lam = 1.0 / f.M if f.M > 0 else 1.0
        op = running.build_forward_backward(instance, lam)
    else:
        op = running.build_proximal_point(instance, 1.0)
    return _fixed_point(op, x0, tol)


def _dual_eq(instance, warm):
    A, b = instance.linear_eq
    Q, q, _ = instance.f.quadratic_form()
    n, r = Q.shape[0], b.size
    K = np.block([[Q, A.T], [A, np.zeros((r, r))]])
    rhs = np.concatenate([-q, b])
    sol, *_ = la.lstsq(K, rhs, rcond=None)
    x, p = sol[:n], sol[n:]
    if warm is not None:
        # non-unique multipliers: take the one nearest to the warm start
        U, s, _ = la.svd(A)
        rank = int(np.sum(s > 1e-10 * s[0]))
        N = U[:, rank:]
        p = p + N @ (N.T @ (np.asarray(warm) - p))
    res = la.norm(K @ np.concatenate([x, p]) - rhs) / max(1.0, la.norm(rhs))
    return x, p, res


def _kkt_active(Q, q, A, b, active):
    n = Q.shape[0]
    idx = list(active)
    As, bs = A[idx], b[idx]
    r = len(idx)
    K = np.block([[Q, As.T], [As, np.zeros((r, r))]])
    try:
        sol = la.solve(K, np.concatenate([-q, bs]))
    except la.LinAlgError:
        return None
    p = np.zeros(b.size)
    p[idx] = sol[n:]
    return sol[:n], p


def _dual_ineq(instance, tol, warm):
    A, b = instance.linear_ineq
    Q, q, _ = instance.f.quadratic_form()
    rows = b.size
    scale = max(1.0, la.norm(b), la.norm(q))

    def ok(cand):
        if cand is None:
            return False
        x, p = cand
        return bool(np.all(A @ x <= b + 1e-12 * scale) and np.all(p >= -1e-12 * scale))

    guesses = []
    if warm is not None:
        guesses.append(tuple(np.nonzero(np.asarray(warm) > 0)[0]))
    for size in range(rows + 1):
        guesses.extend(combinations(range(rows), size))
    for S in guesses:
        cand = _kkt_active(Q, q, A, b, S)
        if ok(cand):
            x, p = cand
            p = np.maximum(p, 0.0)
            res = la.norm(Q @ x + q + A.T @ p) + abs(p @ (A @ x - b))
            return x, p, res / scale
    raise OracleFailure("active-set enumeration found no KKT point")


def _admm_kkt(instance):
    A, B, c = instance.admm
    Qf, qf, _ = instance.f.quadratic_form()
    g = instance.g if instance.g is not None else fn.ZeroFunction(B.shape[1])
    Qg, qg, _ = g.quadratic_form()
    n, m, r = A.shape[1], B.shape[1], c.size
    K = np.block([
        [Qf, np.zeros((n, m)), A.T],
        [np.zeros((m, n)), Qg, B.T],
        [A, B, np.zeros((r, r))],
    ])
    rhs = np.concatenate([-qf, -qg, c])
    sol, *_ = la.lstsq(K, rhs, rcond=None)
    res = la.norm(K @ sol - rhs) / max(1.0, la.norm(rhs))
    return sol[:n], sol[n:n + m], sol[n + m:], res


def _admm_iterate(instance, lam, tol, warm):
    from .problems import static_stream

    A, B, c = instance.admm
    init = warm if isinstance(warm, dict) else None
    stream = static_stream(instance, 1, family="admm")
    state = dict(init) if init else {}
    for it in range(1, MAXITER + 1, 1000):
        rec = running.run_admm(stream.with_horizon(1000), lam, state)
        tail = rec.t_residual[-1]
        state = {k: rec.aux[k][-1] for k in ("x", "z", "p")}
        if tail <= tol:
            return rec.aux["x"][-1], rec.aux["z"][-1], rec.aux["p"][-1], tail, it + 999
    raise OracleFailure("ADMM reference iteration did not converge")


def solve_instance(instance, family, tol=TOL, warm=None, lam=None):
    """
    Solve one instance to tolerance `tol`.

    Parameters
    ----------
    instance : ProblemInstance
    family : {"primal", "douglas_rachford", "dual_eq", "dual_ineq", "admm"}
    tol : float
    warm : ndarray or ReferenceSolution, optional
        Previous solution; selects the nearest solution when it is not unique.
    lam : float, optional
        Step of the running method; needed for the shadow fixed points of
        Douglas-Rachford and ADMM.

    Raises
    ------
    OracleFailure
        When an iterative solve hits the iteration cap or the final residual
        exceeds `tol`.
    """
    if not tol > 0:
        raise ParameterError("tolerance must be positive")
    prev = warm if isinstance(warm, ReferenceSolution) else None
    if family == "primal":
        running.validate_instance(instance, "forward_backward" if instance.f.is_smooth else "proximal_point")
        x, res, it = _primal(instance, tol, prev.x_star if prev else warm)
        sol = ReferenceSolution(x, x, instance.objective(x), res, it)
    elif family == "douglas_rachford":
        if lam is None:
            raise ParameterError("Douglas-Rachford fixed points depend on lambda")
        running.validate_instance(instance, "douglas_rachford")
        x, _, _ = _primal(instance, tol, prev.x_star if prev else None)
        z0 = x - lam * instance.f.gradient(x) if instance.f.is_smooth else x
        op = running.build_douglas_rachford(instance, lam)
        z, res, it = _fixed_point(op, z0, tol)
        g = instance.g if instance.g is not None else fn.ZeroFunction(instance.dim)
        x = g.prox(lam, z)
        sol = ReferenceSolution(x, z, instance.objective(x), res, it)
    elif family in ("dual_eq", "dual_ineq"):
        running.validate_instance(instance, "dual_ascent")
        if not instance.feasible_set.is_whole_space:
            raise UnsupportedOperation("dual reference solutions assume an unconstrained primal")
        w = prev.p_star if prev else warm
        if family == "dual_eq":
            if instance.linear_eq is None:
                raise ParameterError("instance has no equality constraints")
            x, p, res = _dual_eq(instance, w)
        else:
            if instance.linear_ineq is None:
                raise ParameterError("instance has no inequality constraints")
            x, p, res = _dual_ineq(instance, tol, w)
        sol = ReferenceSolution(x, p, instance.f(x), res, 0, p_star=p)
    elif family == "admm":
        running.validate_instance(instance, "admm")
        lam = 1.0 if lam is None else lam
        A, B, c = instance.admm
        g = instance.g if instance.g is not None else fn.ZeroFunction(B.shape[1])
        if instance.f.quadratic_form() is not None and g.quadratic_form() is not None \
                and instance.feasible_set.is_whole_space:
            x, z, p, res = _admm_kkt(instance)
            it = 0
        else:
            w = None if prev is None else {"x": prev.extras["x"], "z": prev.x_star, "p": prev.p_star}
            x, z, p, res, it = _admm_iterate(instance, lam, tol, w)
        beta = p - lam * (B @ z)
        sol = ReferenceSolution(z, beta, instance.f(x) + g(z), res, it, p_star=p, extras={"x": x})
    else:
        raise ParameterError(f"unknown family {family!r}")
    if not sol.residual <= tol:
        raise OracleFailure(f"{family} reference residual {sol.residual:.3g} exceeds {tol:g}")
    return sol


def solution_trajectory(stream, family=None, tol=TOL, lam=None, warm=None):
    """
    Reference solutions for ``k = 1..horizon + 1``, each warm-started from
    the previous one (a nearest-continuation selection when solutions are not
    unique).
    """
    family = stream.family if family is None else family
    out = []
    prev = warm
    for k in range(1, stream.horizon + 2):
        if stream.static and out:
            out.append(out[0])
            continue
        prev = solve_instance(stream.sample(k), family, tol, prev, lam)
        out.append(prev)
    return out
