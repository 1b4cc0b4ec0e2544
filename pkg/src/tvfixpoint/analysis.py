r"""
Theoretical bound curves and their verification against measured runs.

Notation used throughout: ``alpha_k`` averagedness constants, ``L_k``
contraction factors, ``X`` image bound, ``delta`` path variation, ``d`` the
run-dependent squared variation, ``sigma`` objective variation and
``a_bar = min_k (1 - alpha_k) / alpha_k``.

The weighted fixed-point residual ``alpha (1 - alpha) |G x - x|^2`` equals
``((1 - alpha) / alpha) |T x - x|^2``; it is what the averaged bounds control.
"""

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from numpy import linalg as la

from .errors import ParameterError, UnsupportedOperation

ABS_SLACK = 1e-6
REL_SLACK = 1e-6


@dataclass(frozen=True)
class BoundCurve:
    """Bound value at the full horizon, per-prefix (or per-k) curve and asymptote."""

    value: float
    curve: np.ndarray
    asymptote: float


def _check_alphas(alpha_seq):
    a = np.asarray(alpha_seq, dtype=float).ravel()
    if a.size == 0 or np.any(a <= 0) or np.any(a >= 1):
        raise ParameterError("averagedness constants must lie in (0, 1)")
    return a


def a_bar(alpha_seq):
    a = _check_alphas(alpha_seq)
    return float(np.min((1 - a) / a))


def bound_fpr_bounded_image(alpha_seq, X, delta, init_dist, T=None):
    """
    Averaged-residual bound for bounded averaged operators.

    ``(1/T) sum_k alpha_k (1 - alpha_k) |G_k x_k - x_k|^2
    <= |x_1 - x*_1|^2 / T + delta (4 X + delta)``.

    Returns
    -------
    BoundCurve
        ``curve[j]`` is the bound for the prefix ``T' = j + 1``; the asymptote
        ``delta (4 X + delta) / a_bar`` bounds the long-run average of
        ``|T_k x_k - x_k|^2``.
    """
    a = _check_alphas(alpha_seq)
    T = a.size if T is None else int(T)
    if T < 1 or X < 0 or delta < 0 or init_dist < 0:
        raise ParameterError("need T >= 1 and nonnegative X, delta, init_dist")
    tail = delta * (4 * X + delta)
    prefix = np.arange(1, T + 1, dtype=float)
    curve = init_dist ** 2 / prefix + tail
    return BoundCurve(float(curve[-1]), curve, tail / a_bar(a[:T] if a.size >= T else a))


def bound_tracking_contraction(L_seq, delta, init_dist, k=None):
    r"""
    Tracking bound for contractive operators.

    ``|x_k - x*_k| <= Lhat_k |x_1 - x*_1| + (1 - Lbar_k^{k-1}) / (1 - Lbar_k) delta``
    with ``Lhat_k = L_1 ... L_{k-1}`` and ``Lbar_k = max(L_1 .. L_{k-1})``.

    Returns
    -------
    BoundCurve
        ``curve[k - 1]`` for ``k = 1 .. len(L_seq) + 1`` (``k = 1`` gives
        `init_dist`); asymptote ``delta / (1 - max L)``.
    """
    L = np.asarray(L_seq, dtype=float).ravel()
    if np.any(L <= 0) or np.any(L >= 1):
        raise ParameterError("contraction factors must lie in (0, 1)")
    if delta < 0 or init_dist < 0:
        raise ParameterError("delta and init_dist must be nonnegative")
    K = L.size + 1 if k is None else int(k)
    L = L[:K - 1]
    Lhat = np.concatenate([[1.0], np.cumprod(L)])
    Lbar = np.concatenate([[0.0], np.maximum.accumulate(L)]) if L.size else np.zeros(1)
    steps = np.arange(K, dtype=float)  # k - 1
    geo = np.where(steps > 0, (1 - Lbar ** steps) / np.where(steps > 0, 1 - Lbar, 1.0), 0.0)
    curve = Lhat * init_dist + geo * delta
    asym = delta / (1 - L.max()) if L.size else float(delta)
    return BoundCurve(float(curve[-1]), curve, float(asym))


def bound_fpr_iterate_variation(alpha_seq, d, init_dist, T=None):
    """
    Averaged-residual bound under squared variations:
    ``|x_1 - x*_1|^2 / T + d^2`` (no image bound needed).
    """
    a = _check_alphas(alpha_seq)
    T = a.size if T is None else int(T)
    if d < 0 or init_dist < 0:
        raise ParameterError("d and init_dist must be nonnegative")
    curve = init_dist ** 2 / np.arange(1, T + 1, dtype=float) + d ** 2
    return BoundCurve(float(curve[-1]), curve, float(d ** 2 / a_bar(a)))


@dataclass(frozen=True)
class VanishingVerdict:
    summable: bool
    total: float
    tail: float
    residual_vanishes: Optional[bool] = None


def bound_vanishing(delta_seq, g_residual=None, tol=1e-6):
    """
    Finite-horizon check of the summable-variation premise.

    The sequence counts as summable when the sum over the second half of the
    horizon is below `tol`. If residuals are given, also reports whether the
    final ``|G x - x|`` is below `tol`.
    """
    d = np.asarray(delta_seq, dtype=float).ravel()
    if np.any(d < 0):
        raise ParameterError("variations must be nonnegative")
    tail = float(d[d.size // 2:].sum()) if d.size else 0.0
    res = None
    if g_residual is not None and len(g_residual):
        res = bool(np.asarray(g_residual)[-1] < tol)
    return VanishingVerdict(tail < tol, float(d.sum()), tail, res)


def bound_objective_gap(lam, M_seq, X, delta, sigma, abar, init_dist, T=None):
    """
    Averaged objective-gap bound of running forward-backward.

    ``(1/T) sum_k F_{k+1}(x_{k+1}) - F_{k+1}(x*_{k+1})
    <= C |x_1 - x*_1|^2 / (2 lam T) + C delta (4 X + delta) / (2 lam) + sigma``
    with ``C = 1`` when ``lam <= 1 / M_k`` for every ``k`` and
    ``C = 1 + (lam M - 1) / a_bar`` otherwise. Proximal point is the case
    ``M_k = 0``.
    """
    M = np.asarray(M_seq, dtype=float).ravel()
    if not lam > 0:
        raise ParameterError("lambda must be positive")
    if np.any(M < 0) or np.any(lam * M >= 2):
        raise ParameterError("need lambda in (0, 2 / M)")
    if min(X, delta, sigma, init_dist) < 0 or not abar > 0:
        raise ParameterError("constants must be nonnegative (a_bar positive)")
    T = M.size if T is None else int(T)
    Mmax = float(M.max()) if M.size else 0.0
    C = 1.0 if lam * Mmax <= 1.0 + 1e-12 else 1.0 + (lam * Mmax - 1.0) / abar
    prefix = np.arange(1, T + 1, dtype=float)
    curve = C * init_dist ** 2 / (2 * lam * prefix) + C * delta * (4 * X + delta) / (2 * lam) + sigma
    return BoundCurve(float(curve[-1]), curve, float(C * delta * (4 * X + delta) / (2 * lam) + sigma))


@dataclass(frozen=True)
class DualConstants:
    """
    Singular values of a constraint matrix and the derived dual constants.

    ``sigma_min`` is the smallest singular value of ``A'`` (zero when ``A``
    has more rows than columns); ``sigma_0`` the smallest one above
    ``1e-10 sigma_max``.
    """

    sigma_max: float
    sigma_min: float
    sigma_0: float
    smoothness: float
    strong_convexity: float


def dual_constants(A, m, M):
    """
    Curvature of ``-q`` for the Lagrangian dual of ``min f`` s.t. ``A x (<=, =) b``.

    ``-q`` is smooth with ``sigma_max^2 / m`` and strongly convex with
    ``sigma_min^2 / M`` (``sigma_0^2 / M`` on the range of ``A`` when
    ``sigma_min = 0``).
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    s = la.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        raise ParameterError("constraint matrix must be nonzero")
    smax = float(s[0])
    smin = 0.0 if A.shape[0] > A.shape[1] else float(s[-1])
    s0 = float(s[s > 1e-10 * smax].min())
    if smin <= 1e-10 * smax:
        smin = 0.0
    smooth = smax ** 2 / m if m > 0 else np.inf
    sc_base = smin if smin > 0 else s0
    strong = sc_base ** 2 / M if np.isfinite(M) and M > 0 else 0.0
    return DualConstants(smax, smin, s0, float(smooth), float(strong))


# ----------------------------------------------------------------------
# measurement and verification

@dataclass
class BoundReport:
    """
    Measured curves, bound curves and verdicts of one run.

    `verdicts` maps a bound name to ``{"holds", "worst_margin", "checked"}``;
    a bound holds when every measured value is at most the bound plus
    ``1e-6 + 1e-6 |bound|``.
    """

    algorithm: str
    variation: dict
    X: Optional[float]
    init_dist: float
    alpha_seq: np.ndarray
    L_seq: Optional[np.ndarray]
    curves: dict = field(default_factory=dict)
    measured: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def all_hold(self):
        return all(v["holds"] for v in self.verdicts.values())

    def to_dict(self):
        def conv(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            if isinstance(v, (np.floating, np.integer, np.bool_)):
                return v.item()
            return v

        return conv(asdict(self))

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        arr = {k: np.asarray(v, dtype=float) for k, v in d["curves"].items()}
        meas = {k: np.asarray(v, dtype=float) for k, v in d["measured"].items()}
        L = d.get("L_seq")
        return cls(d["algorithm"], d["variation"], d["X"], d["init_dist"], np.asarray(d["alpha_seq"]),
                   None if L is None else np.asarray(L), arr, meas, d["verdicts"], d.get("info", {}))


def verdict(measured, bound, abs_slack=ABS_SLACK, rel_slack=REL_SLACK):
    """``{"holds", "worst_margin", "checked"}`` for ``measured <= bound`` elementwise."""
    m = np.asarray(measured, dtype=float)
    b = np.asarray(bound, dtype=float)
    if m.shape != b.shape:
        raise ParameterError(f"measured {m.shape} and bound {b.shape} differ in shape")
    margin = m - b
    ok = m <= b + abs_slack + rel_slack * np.abs(b)
    return {"holds": bool(np.all(ok)), "worst_margin": float(margin.max()), "checked": int(m.size)}


def weighted_fpr(t_residual, alpha):
    """Per-step ``alpha (1 - alpha) |G x - x|^2``."""
    t = np.asarray(t_residual, dtype=float)
    a = np.asarray(alpha, dtype=float)
    return (1 - a) / a * t ** 2


def prefix_mean(v):
    v = np.asarray(v, dtype=float)
    return np.cumsum(v) / np.arange(1, v.size + 1)


def tracking_errors(values, references, squared=False):
    """Per-step ``|v_k - v*_k|`` or, with `squared`, the sum of squared errors."""
    diff = np.asarray(values, dtype=float) - np.asarray(references, dtype=float)
    sq = np.sum(diff ** 2, axis=1)
    return sq if squared else np.sqrt(sq)


PRIMAL_ALGORITHMS = ("projected_gradient", "proximal_point", "forward_backward")


def measure_and_verify(record, oracle_traj, stream=None, constants=None):
    """
    Measure a run against its reference trajectory and check every bound
    that applies to it.

    Parameters
    ----------
    record : RunRecord
    oracle_traj : list of ReferenceSolution
        One solution per ``k = 1 .. T + 1``.
    stream : ProblemStream, optional
        Needed for objective gaps and the objective-variation estimate.
    constants : dict, optional
        Overrides for ``delta``, ``X``, ``sigma``, ``d``, ``init_dist`` and
        ``squared_tracking`` (sum of squared errors instead of the norm).

    Bounds checked
    --------------
    * ``tracking``: per-step state error against the contraction bound (runs
      declaring a contraction factor; not ADMM).
    * ``fpr_bounded``: prefix-averaged weighted residual against the
      image-bound version (runs with a finite image bound; not ADMM).
    * ``fpr_squared``: the same against the squared-variation version.
    * ``objective``: averaged objective gap (primal methods over a fixed
      compact set, with `stream`).
    * ``primal_recovery``: ``|x_k - x*_k| <= (sigma_max / m) |p_k - p*_k|``
      for dual ascent.
    """
    from .problems import estimate_variation

    c = dict(constants or {})
    T = record.horizon
    if len(oracle_traj) != T + 1:
        raise ParameterError(f"oracle covers {len(oracle_traj)} steps, run needs {T + 1}")
    states = record.states
    state_star = np.array([s.state_star for s in oracle_traj])
    dec_star = np.array([s.x_star for s in oracle_traj])
    if states.shape != state_star.shape:
        raise ParameterError("run states and oracle fixed points have different shapes")

    primal = record.algorithm in PRIMAL_ALGORITHMS
    if stream is not None:
        pts = record.decision if primal or record.algorithm == "douglas_rachford" else None
        var = estimate_variation(stream, oracle_traj, iterates=states, points=pts)
    else:
        var = estimate_variation(_NoStream(), oracle_traj, iterates=states)
    variation = var.as_dict()
    for key, name in (("delta", "delta_hat"), ("d", "d_hat"), ("sigma", "sigma_hat")):
        if key in c:
            variation[name] = float(c[key])
    delta, d, sigma = variation["delta_hat"], variation["d_hat"], variation["sigma_hat"]
    X = c.get("X", record.image_bound)
    init_dist = float(c.get("init_dist", la.norm(states[0] - state_star[0])))

    state_err = tracking_errors(states, state_star)
    squared = bool(c.get("squared_tracking", record.params.get("squared_tracking", False)))
    track = tracking_errors(record.decision, dec_star, squared=squared)
    wfpr = weighted_fpr(record.t_residual, record.alpha)
    measured = {
        "state_error": state_err,
        "tracking_error": track,
        "weighted_fpr": wfpr,
        "fpr_avg": prefix_mean(wfpr),
    }
    curves, verdicts = {}, {}
    info = {"a_bar": a_bar(record.alpha), "tracking_form": "squared" if squared else "norm"}
    is_admm = record.algorithm == "admm"

    if record.contraction is not None and not is_admm:
        b = bound_tracking_contraction(record.contraction, delta, init_dist)
        curves["tracking"] = b.curve
        info["tracking_asymptote"] = b.asymptote
        verdicts["tracking"] = verdict(state_err, b.curve)
    if X is not None and np.isfinite(X) and not is_admm:
        b = bound_fpr_bounded_image(record.alpha, X, delta, init_dist)
        curves["fpr_bounded"] = b.curve
        info["fpr_asymptote"] = b.asymptote
        verdicts["fpr_bounded"] = verdict(measured["fpr_avg"], b.curve)
    if not is_admm:
        b = bound_fpr_iterate_variation(record.alpha, d, init_dist)
        curves["fpr_squared"] = b.curve
        verdicts["fpr_squared"] = verdict(measured["fpr_avg"], b.curve)

    if stream is not None and primal:
        gaps = np.array([stream.sample(k).objective(x) - sol.objective
                         for k, (x, sol) in enumerate(zip(record.decision, oracle_traj), start=1)])
        measured["objective_gap"] = gaps
        measured["objective_gap_avg"] = prefix_mean(gaps[1:])
        fixed_set = stream.static or _fixed_feasible_set(stream)
        if X is not None and np.isfinite(X) and fixed_set:
            lam = record.params["lambda"]
            Ms = [0.0 if record.algorithm == "proximal_point" else stream.sample(k).f.M
                  for k in range(1, T + 1)]
            # the objective bound uses the primal path variation and |X|
            dx = float(c.get("delta", var.delta_hat))
            init_x = float(c.get("init_dist", la.norm(record.decision[0] - dec_star[0])))
            abar_obj = a_bar(1.0 / (2.0 - lam * np.asarray(Ms) / 2.0))
            try:
                b = bound_objective_gap(lam, Ms, X, dx, sigma, abar_obj, init_x)
            except ParameterError as exc:
                info["objective_skipped"] = str(exc)
            else:
                curves["objective"] = b.curve
                verdicts["objective"] = verdict(measured["objective_gap_avg"], b.curve)
    else:
        measured["objective_gap"] = np.array([sol.objective for sol in oracle_traj]) * np.nan

    if record.algorithm == "dual_ascent" and stream is not None:
        ratio = []
        for k in range(1, T + 2):
            inst = stream.sample(k)
            A, _ = inst.linear_ineq if inst.linear_ineq is not None else inst.linear_eq
            ratio.append(dual_constants(A, inst.f.m, inst.f.M).sigma_max / inst.f.m)
        bound = np.array(ratio) * state_err
        curves["primal_recovery"] = bound
        measured["primal_error"] = tracking_errors(record.aux["x"], dec_star)
        verdicts["primal_recovery"] = verdict(measured["primal_error"], bound, abs_slack=1e-9, rel_slack=0.0)

    if is_admm and all(s.p_star is not None for s in oracle_traj):
        measured["dual_error"] = tracking_errors(record.aux["p"], np.array([s.p_star for s in oracle_traj]))

    if var.per_step.get("delta") is not None:
        v = bound_vanishing(var.per_step["delta"], record.g_residual)
        info["vanishing"] = asdict(v)
    return BoundReport(record.algorithm, variation, None if X is None else float(X), init_dist,
                       np.asarray(record.alpha), None if record.contraction is None else np.asarray(record.contraction),
                       curves, measured, verdicts, info)


class _NoStream:
    family = "none"


def _fixed_feasible_set(stream):
    first = stream.sample(1).feasible_set
    for k in (2, stream.horizon + 1):
        s = stream.sample(k).feasible_set
        if s is not first and (s.kind != first.kind or any(
                not np.array_equal(np.asarray(first.params[key]), np.asarray(s.params[key])) for key in first.params)):
            return False
    return True


def steady_state(values, fraction=0.2):
    """Mean and variance over the last `fraction` of a curve."""
    v = np.asarray(values, dtype=float)
    tail = v[-max(1, int(round(fraction * v.size))):]
    return float(tail.mean()), float(tail.var())


def fit_rate(errors, last=100):
    """Geometric rate from a log-linear least-squares fit of the last `last` values."""
    e = np.asarray(errors, dtype=float)[-last:]
    if np.any(e <= 0):
        raise UnsupportedOperation("rate fit needs positive errors")
    slope = np.polyfit(np.arange(e.size), np.log(e), 1)[0]
    return float(np.exp(slope))
