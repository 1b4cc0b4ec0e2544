r"""
Running fixed-point iterations over a stream of sampled problems.

Every algorithm applies one operator per sample: ``x_{k+1} = T_k(x_k)``,
optionally followed by a projection onto a compact set ``B``. Builders turn a
`ProblemInstance` into the `AveragedOperator` of one algorithm step, with its
averagedness constant, contraction factor and image bound; runners drive the
iteration and return a `RunRecord`.

The MK state of each algorithm (the variable the operator acts on) is

==================  ================================================
projected gradient  primal ``x``
proximal point      primal ``x``
forward-backward    primal ``x``
dual ascent         multiplier ``p``; primal ``x(p)`` stored as ``aux``
Douglas-Rachford    shadow ``z``; primal ``x = prox_g(z)`` as ``aux``
ADMM                dual shadow ``beta``; ``x, z, p, nu`` as ``aux``
==================  ================================================
"""

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy import linalg as la

from . import functions as fn
from . import operators as ops
from . import sets
from .errors import (ConfigError, DivergenceError, NumericalError, ParameterError,
                     UnsupportedOperation)

DIVERGENCE_NORM = 1e12


@dataclass
class RunRecord:
    """
    Trajectory and per-step metadata of one run.

    Attributes
    ----------
    algorithm : str
    states : ndarray, shape (T + 1, n)
        MK states ``x_1 .. x_{T+1}``.
    t_residual, g_residual, alpha : ndarray, shape (T,)
        ``|T_k(x_k) - x_k|``, the same divided by ``alpha_k``, and ``alpha_k``.
    contraction : ndarray or None
        ``L_k`` when every step declared a contraction factor.
    aux : dict of ndarray
        Other per-step variables, each with ``T + 1`` rows.
    decision_key : str
        ``"state"`` or an `aux` key: the variable scored against the oracle
        decision ``x*``.
    image_bound : float or None
        Largest declared image bound over the run.
    """

    algorithm: str
    states: np.ndarray
    t_residual: np.ndarray
    g_residual: np.ndarray
    alpha: np.ndarray
    contraction: Optional[np.ndarray] = None
    aux: dict = field(default_factory=dict)
    decision_key: str = "state"
    state_name: str = "x"
    times: Optional[np.ndarray] = None
    image_bound: Optional[float] = None
    params: dict = field(default_factory=dict)
    stream: str = "custom"
    seed: int = 0
    wall_time: float = 0.0

    @property
    def horizon(self):
        return len(self.t_residual)

    @property
    def decision(self):
        return self.states if self.decision_key == "state" else self.aux[self.decision_key]


def _as_vector(x):
    x = np.asarray(x, dtype=float).ravel().copy()
    if not np.all(np.isfinite(x)):
        raise ParameterError("initial point must be finite")
    return x


def _diverged(message, step, partial):
    exc = DivergenceError(f"step {step}: {message}", step=step)
    exc.partial = partial
    return exc


def _iterate(build, x1, T, algorithm, bound_set=None):
    """Core loop shared by every operator-based runner."""
    x = _as_vector(x1)
    T = int(T)
    if T < 1:
        raise ParameterError("horizon must be at least 1")
    states = [x]
    t_res, alphas, Ls, bounds = [], [], [], []
    start = time.perf_counter()
    for k in range(1, T + 1):
        op = build(k)
        if bound_set is not None and not bound_set.is_whole_space:
            op = ops.compose_averaged(ops.projection_operator(bound_set, name="proj_B"), op)
        if op.dim != x.size:
            raise ParameterError(f"operator {k} has dimension {op.dim}, iterate has {x.size}")
        try:
            y = ops.apply(op, x)
        except NumericalError as exc:
            partial = _partial(algorithm, states, t_res, alphas)
            raise _diverged(str(exc), k, partial) from exc
        if la.norm(y) > DIVERGENCE_NORM:
            raise _diverged(f"iterate norm exceeded {DIVERGENCE_NORM:g}", k, _partial(algorithm, states, t_res, alphas))
        t_res.append(la.norm(y - x))
        alphas.append(op.alpha)
        Ls.append(op.contraction)
        bounds.append(op.image_bound)
        states.append(y)
        x = y
    t_res, alphas = np.array(t_res), np.array(alphas)
    contraction = None if any(L is None for L in Ls) else np.array(Ls)
    image_bound = None if any(b is None for b in bounds) else float(max(bounds))
    return RunRecord(algorithm, np.array(states), t_res, t_res / alphas, alphas, contraction,
                     image_bound=image_bound, wall_time=time.perf_counter() - start)


def _partial(algorithm, states, t_res, alphas):
    t_res, alphas = np.array(t_res), np.array(alphas)
    return RunRecord(algorithm, np.array(states), t_res, t_res / alphas if len(alphas) else t_res, alphas)


def _finish(rec, stream, params, times=None):
    if stream is not None:
        rec.stream, rec.seed = stream.name, stream.seed
        T = rec.horizon
        rec.times = stream.period * np.arange(1, T + 2, dtype=float) if times is None else times
    rec.params = dict(params)
    return rec


def run_mk(op_stream, x1, T, algorithm="mk"):
    """
    Running Mann-Krasnosel'skii iteration ``x_{k+1} = T_k(x_k)``.

    Parameters
    ----------
    op_stream : callable
        ``k -> AveragedOperator`` for ``k = 1..T``.
    x1 : array_like
    T : int

    Raises
    ------
    DivergenceError
        On non-finite or exploding iterates; ``exc.partial`` holds the
        record up to the failing step.
    """
    return _iterate(op_stream, x1, T, algorithm)


def run_bounded_mk(op_stream, x1, T, B, algorithm="bounded-mk"):
    """
    Bounded running iteration ``x_{k+1} = proj_B(T_k(x_k))``.

    With ``B`` the whole space this is `run_mk` (bitwise). Otherwise each step
    is the composition with the projection, whose averagedness constant and
    image bound ``|B|`` are recorded.
    """
    if B.dim != np.size(x1):
        raise ParameterError("bounding set and initial point have different dimensions")
    return _iterate(op_stream, x1, T, algorithm, bound_set=B)


# ----------------------------------------------------------------------
# structural checks

def _is_zero(g):
    return g is None or isinstance(g, fn.ZeroFunction)


def validate_instance(instance, algorithm):
    """Raise if `instance` lacks the structure `algorithm` needs."""
    f, g = instance.f, instance.g
    if algorithm in ("projected_gradient", "forward_backward"):
        if not f.is_smooth:
            raise UnsupportedOperation(f"{algorithm} needs a smooth f (M < inf)")
        if algorithm == "projected_gradient" and not _is_zero(g):
            raise ConfigError("projected gradient takes no composite term g")
    elif algorithm == "proximal_point":
        if not _is_zero(g):
            raise ConfigError("proximal point acts on f alone; use forward_backward for f + g")
    elif algorithm == "dual_ascent":
        if instance.linear_ineq is None and instance.linear_eq is None:
            raise ConfigError("dual ascent needs linear constraints")
        if instance.linear_ineq is not None and instance.slater_point is None:
            raise ConfigError("inequality-constrained dual ascent needs a Slater point")
        if not f.m > 0:
            raise UnsupportedOperation("dual ascent needs a strongly convex f (m > 0)")
        if f.quadratic_form() is None:
            raise UnsupportedOperation("dual ascent solves the Lagrangian step for quadratic f only")
    elif algorithm == "douglas_rachford":
        if instance.admm is not None or instance.linear_eq is not None or instance.linear_ineq is not None:
            raise ConfigError("Douglas-Rachford here handles f + g over a set, without linear constraints")
    elif algorithm == "admm":
        if instance.admm is None:
            raise ConfigError("ADMM needs a coupling (A, B, c)")
    else:
        raise ConfigError(f"unknown algorithm {algorithm!r}")


# ----------------------------------------------------------------------
# primal builders

def _set_bound(cset):
    return cset.norm if cset.is_compact else None


def build_projected_gradient(instance, lam):
    """
    ``proj_X (I - lam grad f)`` with ``alpha = 1 / (2 - lam M / 2)``.

    Contraction ``max(|1 - lam m|, |1 - lam M|)`` when ``m > 0``; image bound
    ``|X|`` when ``X`` is compact.
    """
    validate_instance(instance, "projected_gradient")
    X = instance.feasible_set
    proj = ops.projection_operator(X)
    if instance.f.M == 0:
        return proj
    return ops.compose_averaged(proj, ops.gradient_step(instance.f, lam), name="pg")


def build_proximal_point(instance, lam):
    """``prox_{f, X, lam}``: 1/2-averaged, contraction ``1 / (1 + m lam)`` when ``m > 0``."""
    validate_instance(instance, "proximal_point")
    lam = float(lam)
    if not lam > 0:
        raise ParameterError("lambda must be positive")
    f, X = instance.f, instance.feasible_set
    L = 1.0 / (1.0 + f.m * lam) if f.m > 0 else None

    def prox(x):
        return f.prox(lam, x, X)

    return ops.AveragedOperator(prox, 0.5, f.dim, contraction=L, image_bound=_set_bound(X), name="pp")


def build_forward_backward(instance, lam):
    """
    ``prox_{g, X, lam}(x - lam grad f(x))``, ``alpha = 1 / (2 - lam M / 2)``.

    A zero `f` gives the proximal point operator of `g`; a missing `g` gives
    projected gradient.
    """
    validate_instance(instance, "forward_backward")
    lam = float(lam)
    f, X = instance.f, instance.feasible_set
    g = instance.g if instance.g is not None else fn.ZeroFunction(f.dim)

    def backward(v):
        return g.prox(lam, v, X)

    back = ops.AveragedOperator(backward, 0.5, f.dim, image_bound=_set_bound(X), name="prox_g")
    if f.M == 0:
        return back
    return ops.compose_averaged(back, ops.gradient_step(f, lam), name="fb")


# ----------------------------------------------------------------------
# Douglas-Rachford

def dr_contraction(m, M, lam):
    """``(1 + max((lam M - 1)/(lam M + 1), (1 - lam m)/(1 + lam m))) / 2``."""
    return 0.5 * (1.0 + max((lam * M - 1) / (lam * M + 1), (1 - lam * m) / (1 + lam * m)))


def build_douglas_rachford(instance, lam):
    """
    Douglas-Rachford operator on the shadow variable ``z``.

    ``z -> z + prox_{f,X}(2 x - z) - x`` with ``x = prox_g(z)``; 1/2-averaged.
    A contraction when ``f`` is strongly convex and smooth and ``X`` is the
    whole space.
    """
    validate_instance(instance, "douglas_rachford")
    lam = float(lam)
    if not lam > 0:
        raise ParameterError("lambda must be positive")
    f, X = instance.f, instance.feasible_set
    g = instance.g if instance.g is not None else fn.ZeroFunction(f.dim)

    def step(z):
        x = g.prox(lam, z)
        return z + f.prox(lam, 2 * x - z, X) - x

    L = None
    if f.m > 0 and f.is_smooth and X.is_whole_space:
        L = dr_contraction(f.m, f.M, lam)
    return ops.AveragedOperator(step, 0.5, f.dim, contraction=L, name="dr")


# ----------------------------------------------------------------------
# dual ascent

def lagrangian_argmin(instance, p):
    """``argmin_{x in X} f(x) + p'(A x - b)`` for the instance's linear constraints."""
    A, _ = instance.linear_ineq if instance.linear_ineq is not None else instance.linear_eq
    Q, q, _ = instance.f.quadratic_form()
    return fn._quadratic_argmin(Q, q + A.T @ p, instance.feasible_set, instance.f.M, instance.f.m)


def dual_box_radius(instance):
    """
    Radius of the Slater ball ``|p| <= (f(xbar) - q(0)) / gamma``.

    ``q(0) = min_X f`` and ``gamma = min_i (b - A xbar)_i``.
    """
    Q, q, c = instance.f.quadratic_form()
    x0 = fn._quadratic_argmin(Q, q, instance.feasible_set, instance.f.M, instance.f.m)
    return max(0.0, instance.f(instance.slater_point) - instance.f(x0)) / instance.slater_gap


def build_dual_ascent(instance, lam, B=None):
    """
    Projected dual ascent ``p -> proj(p + lam (A x(p) - b))`` as an averaged operator.

    ``-q`` is smooth with constant ``sigma_max^2 / m``, so the ascent step is
    averaged with ``alpha = lam sigma_max^2 / (2 m)``. Inequalities project
    onto the Slater ball intersected with the nonnegative orthant; equalities
    project onto `B` when given. A contraction factor is declared when
    ``A A'`` is nonsingular and ``X`` is the whole space.
    """
    from .analysis import dual_constants

    validate_instance(instance, "dual_ascent")
    lam = float(lam)
    f = instance.f
    ineq = instance.linear_ineq is not None
    A, b = instance.linear_ineq if ineq else instance.linear_eq
    dc = dual_constants(A, f.m, f.M)
    if not 0 < lam * dc.smoothness < 2:
        raise ParameterError(f"lambda {lam} outside (0, 2 m / sigma_max^2) = (0, {2 / dc.smoothness:.6g})")
    L = None
    if dc.sigma_min > 0 and instance.feasible_set.is_whole_space:
        L = max(abs(1 - lam * dc.sigma_min ** 2 / f.M), abs(1 - lam * dc.smoothness))
        L = max(L, np.finfo(float).tiny) if L < 1 else None

    def ascent(p):
        return p + lam * (A @ lagrangian_argmin(instance, p) - b)

    op = ops.AveragedOperator(ascent, lam * dc.smoothness / 2, b.size, contraction=L, name="dual")
    if ineq:
        P = sets.nonnegative_ball(b.size, dual_box_radius(instance))
        return ops.compose_averaged(ops.projection_operator(P, name="proj_P"), op)
    if B is not None and not B.is_whole_space:
        return ops.compose_averaged(ops.projection_operator(B, name="proj_B"), op)
    return op


# ----------------------------------------------------------------------
# runners over streams

def _instances(stream, algorithm):
    def get(k):
        inst = stream.sample(k)
        validate_instance(inst, algorithm)
        return inst
    return get


def max_smoothness(stream):
    return max(stream.sample(k).f.M for k in range(1, stream.horizon + 2))


def default_lambda(stream, algorithm):
    """Default step of each algorithm (see module docs of the CLI)."""
    if algorithm in ("projected_gradient", "forward_backward"):
        M = max_smoothness(stream)
        return 1.0 / M if M > 0 else 1.0
    if algorithm == "dual_ascent":
        from .analysis import dual_constants

        inst = stream.sample(1)
        A, _ = inst.linear_ineq if inst.linear_ineq is not None else inst.linear_eq
        m = min(stream.sample(k).f.m for k in range(1, stream.horizon + 2))
        return m / dual_constants(A, m, inst.f.M).sigma_max ** 2
    return 1.0


def _primal_run(stream, builder, algorithm, lam, x1, B):
    inst = _instances(stream, algorithm)
    lam = default_lambda(stream, algorithm) if lam is None else float(lam)
    if algorithm in ("projected_gradient", "forward_backward"):
        M = max_smoothness(stream)
        if not lam * M < 2:
            raise ParameterError(f"lambda {lam} outside (0, 2/M_max) = (0, {2 / M:.6g})")
    x1 = np.zeros(stream.sample(1).dim) if x1 is None else x1

    def build(k):
        return builder(inst(k), lam)

    if B is None:
        rec = run_mk(build, x1, stream.horizon, algorithm)
    else:
        rec = run_bounded_mk(build, x1, stream.horizon, B, algorithm)
    return _finish(rec, stream, {"lambda": lam, "bounding_set": _describe(B)})


def run_projected_gradient(stream, lam=None, x1=None, B=None):
    return _primal_run(stream, build_projected_gradient, "projected_gradient", lam, x1, B)


def run_proximal_point(stream, lam=None, x1=None, B=None):
    return _primal_run(stream, build_proximal_point, "proximal_point", lam, x1, B)


def run_forward_backward(stream, lam=None, x1=None, B=None):
    return _primal_run(stream, build_forward_backward, "forward_backward", lam, x1, B)


def run_douglas_rachford(stream, lam=None, z1=None, B=None):
    """
    Running Douglas-Rachford; the state is ``z``, ``aux['x'] = prox_g(z)``.

    With a compact `B` each step is projected (``alpha = 2/3``).
    """
    rec = _primal_run(stream, build_douglas_rachford, "douglas_rachford", lam, z1, B)
    lam = rec.params["lambda"]
    xs = []
    for k, z in enumerate(rec.states, start=1):
        inst = stream.sample(k)
        g = inst.g if inst.g is not None else fn.ZeroFunction(inst.dim)
        xs.append(g.prox(lam, z))
    rec.aux["x"] = np.array(xs)
    rec.decision_key, rec.state_name = "x", "z"
    return rec


def run_dual_ascent(stream, lam=None, p1=None, mode=None, B=None):
    """
    Running dual ascent ``p_{k+1} = proj(p_k + lam (A x_k - b_k))``.

    ``x_k = argmin f_k + p_k'(A x - b_k)`` is stored in ``aux['x']`` (one row
    per ``k = 1..T+1``). `mode` (``"inequality"`` / ``"equality"``) defaults
    to the constraint type of the stream.
    """
    first = stream.sample(1)
    validate_instance(first, "dual_ascent")
    detected = "inequality" if first.linear_ineq is not None else "equality"
    mode = detected if mode is None else mode
    if mode not in ("inequality", "equality"):
        raise ParameterError("mode must be 'inequality' or 'equality'")
    if mode != detected:
        raise ConfigError(f"stream carries {detected} constraints, not {mode}")
    if mode == "inequality" and first.slater_point is None:
        raise ConfigError("inequality mode needs a Slater point")
    inst = _instances(stream, "dual_ascent")
    lam = default_lambda(stream, "dual_ascent") if lam is None else float(lam)
    rows = (first.linear_ineq if mode == "inequality" else first.linear_eq)[1].size
    p1 = np.zeros(rows) if p1 is None else p1

    def build(k):
        return build_dual_ascent(inst(k), lam, B if mode == "equality" else None)

    rec = run_mk(build, p1, stream.horizon, "dual_ascent")
    rec.aux["x"] = np.array([lagrangian_argmin(inst(k), p) for k, p in enumerate(rec.states, start=1)])
    rec.decision_key, rec.state_name = "x", "p"
    return _finish(rec, stream, {"lambda": lam, "mode": mode, "bounding_set": _describe(B)})


# ----------------------------------------------------------------------
# ADMM

def coupled_argmin(fun, M, p, v, lam, cset=None):
    """
    ``argmin_u fun(u) + p'M u + lam/2 |M u + v|^2`` over `cset`.

    Quadratics use a linear solve; other catalog functions need ``M'M = s I``
    and reduce to a prox.
    """
    form = fun.quadratic_form()
    MtM = M.T @ M
    lin = M.T @ p + lam * (M.T @ v)
    if form is not None:
        Q, q, _ = form
        H = Q + lam * MtM
        eig = la.eigvalsh(H)
        if eig.min() <= 1e-12 * max(1.0, eig.max()) and (cset is None or cset.is_whole_space):
            raise UnsupportedOperation("ADMM subproblem is not strongly convex")
        return fn._quadratic_argmin(H, q + lin, cset, eig.max(), max(eig.min(), 0.0))
    s = MtM[0, 0]
    if not (s > 0 and np.allclose(MtM, s * np.eye(MtM.shape[0]))):
        raise UnsupportedOperation(f"{fun.name} subproblem needs M'M proportional to the identity")
    return fun.prox(1.0 / (lam * s), -lin / (lam * s), cset)


def admm_contraction(A, m, M, lam):
    """Contraction factor of ADMM with strongly convex, smooth ``f``; None if it does not apply."""
    from .analysis import dual_constants

    dc = dual_constants(A, m, M)
    if not (m > 0 and np.isfinite(M) and dc.sigma_min > 0):
        return None
    a = lam * dc.sigma_max ** 2 / m
    b = lam * dc.sigma_min ** 2 / M
    return 0.5 * (1.0 + max((a - 1) / (a + 1), (1 - b) / (1 + b)))


def run_admm(stream, lam=None, initials=None, B=None, form=None):
    """
    Running ADMM.

    Parameters
    ----------
    stream : ProblemStream
        Instances carry ``admm = (A, B_mat, c)``; ``f`` acts on ``x`` and
        ``g`` on ``z``.
    lam : float, optional
    initials : dict, optional
        ``x``, ``z``, ``p`` starting values (zeros by default).
    B : ConvexSet, optional
        Bounding set of the dual shadow variable.
    form : {"bounded", "standard"}, optional
        ``"bounded"`` updates z, then x, then the projected multiplier;
        ``"standard"`` is classic ADMM (x, z, p) and requires ``B`` to be the
        whole space. Defaults to bounded for a compact ``B``, else standard.

    Notes
    -----
    The MK state is the dual shadow variable ``beta``: ``p_k + lam (A x_k - c)``
    in the bounded form (the projected quantity) and ``p_k - lam B z_k`` in
    the standard form. The bounded form lags the standard one by one
    x-update: with ``B`` the whole space and bounded ``x_1`` equal to the
    first standard x-update, bounded ``(x_k, z_k, p_k)`` equals standard
    ``(x_{k+1}, z_k, p_k)``.
    """
    first = stream.sample(1)
    validate_instance(first, "admm")
    A0, Bm0, c0 = first.admm
    lam = 1.0 if lam is None else float(lam)
    if not lam > 0:
        raise ParameterError("lambda must be positive")
    whole = B is None or B.is_whole_space
    if form is None:
        form = "standard" if whole else "bounded"
    if form not in ("bounded", "standard"):
        raise ParameterError("form must be 'bounded' or 'standard'")
    if form == "standard" and not whole:
        raise ParameterError("standard ADMM has no bounding step; use form='bounded'")
    if B is not None and B.dim != c0.size:
        raise ParameterError("bounding set must live in the multiplier space")
    init = dict(initials or {})
    x = _as_vector(init.get("x", np.zeros(A0.shape[1])))
    z = _as_vector(init.get("z", np.zeros(Bm0.shape[1])))
    p = _as_vector(init.get("p", np.zeros(c0.size)))

    def shadow(x, z, p, A, Bm, c):
        return p + lam * (A @ x - c) if form == "bounded" else p - lam * (Bm @ z)

    xs, zs, ps, nus = [x], [z], [p], [p.copy()]
    betas = [shadow(x, z, p, A0, Bm0, c0)]
    t_res, Ls = [], []
    alpha = 2.0 / 3.0 if not whole else 0.5
    start = time.perf_counter()
    T = stream.horizon
    for k in range(1, T + 1):
        inst = stream.sample(k)
        validate_instance(inst, "admm")
        A, Bm, c = inst.admm
        g = inst.g if inst.g is not None else fn.ZeroFunction(Bm.shape[1])
        X = inst.feasible_set
        try:
            if form == "bounded":
                z_new = coupled_argmin(g, Bm, p, A @ x - c, lam)
                x_new = coupled_argmin(inst.f, A, p, A @ x + 2 * (Bm @ z_new) - 2 * c, lam, X)
                pre = p + lam * (A @ x_new + A @ x + Bm @ z_new - 2 * c)
                beta = pre if whole else B.project(pre)
                p_new = beta - lam * (A @ x_new - c)
                nu = p + lam * (A @ x_new + Bm @ z_new - c)
            else:
                x_new = coupled_argmin(inst.f, A, p, Bm @ z - c, lam, X)
                z_new = coupled_argmin(g, Bm, p, A @ x_new - c, lam)
                p_new = p + lam * (A @ x_new + Bm @ z_new - c)
                nu = p_new
                beta = p_new - lam * (Bm @ z_new)
        except (UnsupportedOperation, la.LinAlgError) as exc:
            raise NumericalError(f"ADMM subproblem failed at step {k}: {exc}") from exc
        if not all(np.all(np.isfinite(v)) for v in (x_new, z_new, p_new)) or la.norm(beta) > DIVERGENCE_NORM:
            partial = _partial("admm", betas, t_res, [alpha] * len(t_res))
            raise _diverged("ADMM iterates left the finite range", k, partial)
        t_res.append(la.norm(beta - betas[-1]))
        Ls.append(admm_contraction(A, inst.f.m, inst.f.M, lam) if X.is_whole_space else None)
        x, z, p = x_new, z_new, p_new
        xs.append(x), zs.append(z), ps.append(p), nus.append(nu), betas.append(beta)
    t_res = np.array(t_res)
    rec = RunRecord(
        "admm", np.array(betas), t_res, t_res / alpha, np.full(T, alpha),
        contraction=None if any(L is None for L in Ls) else np.array(Ls),
        aux={"x": np.array(xs), "z": np.array(zs), "p": np.array(ps), "nu": np.array(nus)},
        decision_key="z", state_name="beta",
        image_bound=None if whole else B.norm, wall_time=time.perf_counter() - start,
    )
    return _finish(rec, stream, {"lambda": lam, "form": form, "bounding_set": _describe(B)})


# ----------------------------------------------------------------------

ALGORITHMS = {
    "projected_gradient": ("primal", run_projected_gradient),
    "proximal_point": ("primal", run_proximal_point),
    "forward_backward": ("primal", run_forward_backward),
    "dual_ascent": (None, run_dual_ascent),
    "douglas_rachford": ("douglas_rachford", run_douglas_rachford),
    "admm": ("admm", run_admm),
}


def oracle_family(algorithm, stream):
    """Reference-solution family matching `algorithm` on `stream`."""
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}")
    fam = ALGORITHMS[algorithm][0]
    if fam is None:
        return "dual_ineq" if stream.sample(1).linear_ineq is not None else "dual_eq"
    return fam


def run_algorithm(stream, algorithm, lam=None, initial=None, B=None, form=None):
    """Dispatch by name; `initial` is the starting MK state (or ADMM initials dict)."""
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}")
    runner = ALGORITHMS[algorithm][1]
    if algorithm == "admm":
        return runner(stream, lam, initial, B, form)
    if form is not None:
        raise ConfigError("'form' only applies to ADMM")
    return runner(stream, lam, initial, B=B)


def _describe(B):
    if B is None:
        return None
    return {"kind": B.kind, "norm": B.norm}
