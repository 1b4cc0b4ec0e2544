"""
Time-varying problems as indexed streams of sampled instances.

A `ProblemStream` maps a sample index ``k`` to a `ProblemInstance`. Samplers
are pure functions of ``(k, seed)``: every random draw comes from
``np.random.default_rng([seed, k, tag])`` so instances can be rebuilt in any
order, by any thread, and compare bitwise equal.

The scenario families are registered in `SCENARIOS`; `make_scenario` builds a
stream from a flat parameter mapping (usually a parsed `ScenarioConfig`).
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy import linalg as la

from . import functions as fn
from . import sets
from .errors import ConfigError, ParameterError

FAMILIES = ("primal", "dual_ineq", "dual_eq", "douglas_rachford", "admm")


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """
    One sampled problem.

    Parameters
    ----------
    f : ConvexFunction
    g : ConvexFunction, optional
        Composite (usually nonsmooth) term.
    feasible_set : ConvexSet, optional
        Defaults to the whole space.
    linear_ineq : (A, b), optional
        Constraint ``A x <= b``.
    linear_eq : (A, b), optional
        Constraint ``A x = b``.
    admm : (A, B, c), optional
        Coupling ``A x + B z = c`` of a two-block problem ``f(x) + g(z)``.
    slater_point : ndarray, optional
        Strictly feasible point for `linear_ineq`.
    t : float
        Sampling time.
    k : int
        Sample index.
    info : dict
        Scenario-specific extras (ground truth, geometry); never read by solvers.
    """

    f: fn.ConvexFunction
    g: Optional[fn.ConvexFunction] = None
    feasible_set: Optional[sets.ConvexSet] = None
    linear_ineq: Optional[tuple] = None
    linear_eq: Optional[tuple] = None
    admm: Optional[tuple] = None
    slater_point: Optional[np.ndarray] = None
    t: float = 0.0
    k: int = 0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.f.dim
        if self.feasible_set is None:
            object.__setattr__(self, "feasible_set", sets.whole_space(n))
        if self.feasible_set.dim != n:
            raise ParameterError("feasible set and f have different dimensions")
        if self.g is not None and self.admm is None and self.g.dim != n:
            raise ParameterError("g and f have different dimensions")
        for name in ("linear_ineq", "linear_eq"):
            pair = getattr(self, name)
            if pair is None:
                continue
            A, b = np.atleast_2d(np.asarray(pair[0], dtype=float)), np.asarray(pair[1], dtype=float).ravel()
            if A.shape != (b.size, n):
                raise ParameterError(f"{name}: A must be {b.size} x {n}, got {A.shape}")
            object.__setattr__(self, name, (A, b))
        if self.admm is not None:
            A, B, c = (np.atleast_2d(np.asarray(a, dtype=float)) for a in self.admm)
            c = c.ravel()
            if A.shape[0] != B.shape[0] or A.shape[0] != c.size or A.shape[1] != n:
                raise ParameterError("ADMM coupling matrices have inconsistent shapes")
            if self.g is not None and self.g.dim != B.shape[1]:
                raise ParameterError("g must live in the column space of B")
            object.__setattr__(self, "admm", (A, B, c))
        if self.slater_point is not None:
            if self.linear_ineq is None:
                raise ParameterError("a Slater point needs inequality constraints")
            xs = np.asarray(self.slater_point, dtype=float).ravel()
            A, b = self.linear_ineq
            if not np.all(A @ xs < b):
                raise ParameterError("slater_point must satisfy A x < b strictly")
            object.__setattr__(self, "slater_point", xs)

    @property
    def dim(self):
        return self.f.dim

    def objective(self, x):
        """``f(x) + g(x)`` for single-block instances."""
        val = self.f(x)
        if self.g is not None and self.admm is None:
            val += self.g(x)
        return float(val)

    def objectives(self, X):
        """`objective` at every row of `X`."""
        vals = self.f.values(X)
        if self.g is not None and self.admm is None:
            vals = vals + self.g.values(X)
        return vals

    @property
    def slater_gap(self):
        """``gamma = min_i (b - A xbar)_i``."""
        A, b = self.linear_ineq
        return float(np.min(b - A @ self.slater_point))


@dataclass(frozen=True, eq=False)
class ProblemStream:
    """
    Deterministic sampler ``k -> ProblemInstance`` over a horizon.

    Indices ``1..horizon + 1`` are valid: a run of ``horizon`` steps produces
    ``x_{horizon+1}``, which is scored against instance ``horizon + 1``.
    """

    sampler: Callable[[int], ProblemInstance]
    horizon: int
    period: float = 1.0
    seed: int = 0
    name: str = "custom"
    family: str = "primal"
    params: dict = field(default_factory=dict)
    static: bool = False

    def __post_init__(self):
        if int(self.horizon) < 1:
            raise ParameterError("horizon must be at least 1")
        if not self.period > 0:
            raise ParameterError("sampling period must be positive")
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}")

    def sample(self, k):
        return sample(self, k)

    def __iter__(self):
        for k in range(1, self.horizon + 1):
            yield self.sample(k)

    def with_horizon(self, horizon):
        """Same sampler over another horizon."""
        return ProblemStream(self.sampler, int(horizon), self.period, self.seed, self.name,
                             self.family, dict(self.params, T=int(horizon)), self.static)


def sample(stream, k):
    k = int(k)
    if not 1 <= k <= stream.horizon + 1:
        raise ParameterError(f"sample index {k} outside 1..{stream.horizon + 1}")
    return stream.sampler(k)


def static_stream(instance, horizon, family="primal", name="static"):
    """Stream returning the same instance at every index."""
    return ProblemStream(lambda k: instance, horizon, family=family, name=name, static=True)


def rng_for(seed, *keys):
    """Counter-based generator: a pure function of ``(seed, keys)``."""
    return np.random.default_rng([int(seed), *[int(k) for k in keys]])


# ----------------------------------------------------------------------
# scenario generators

def spectrum_matrix(rng, n, m, M):
    """Random symmetric matrix with eigenvalues evenly spread over [m, M]."""
    U, _ = la.qr(rng.normal(size=(n, n)))
    Q = (U * np.linspace(m, M, n)) @ U.T
    return 0.5 * (Q + Q.T)


def centered_quadratic(Q, center):
    """``(x - c)'Q(x - c) / 2`` with minimum value 0 at ``c``."""
    c = np.asarray(center, dtype=float)
    return fn.Quadratic(Q, -Q @ c, 0.5 * c @ Q @ c)


def _orbit(n, radius, angle):
    """Offset of size `radius` rotating in the first coordinate plane."""
    v = np.zeros(n)
    v[0] = radius * np.cos(angle)
    if n > 1:
        v[1] = radius * np.sin(angle)
    return v


def _static_quadratic(p):
    n, seed = p["n"], p["seed"]
    rng = rng_for(seed, 0)
    Q = spectrum_matrix(rng, n, p["m"], p["M"])
    center = rng.normal(size=n)
    inst = ProblemInstance(centered_quadratic(Q, center), info={"center": center})
    return (lambda k: inst), "primal", True


def drift_offset(k, drift, decay):
    """``drift * sum_{i=1..k} decay**i`` (``drift * k`` when decay is 1)."""
    if decay == 1.0:
        return drift * k
    return drift * decay * (1.0 - decay ** k) / (1.0 - decay)


def _moving_quadratic(p):
    n, seed = p["n"], p["seed"]
    Q = spectrum_matrix(rng_for(seed, 0), n, p["m"], p["M"])
    h = p["h"]

    def sampler(k):
        c = np.zeros(n)
        c[0] = drift_offset(k, p["drift"], p["decay"])
        return ProblemInstance(centered_quadratic(Q, c), t=h * k, k=k, info={"center": c})

    return sampler, "primal", p["drift"] == 0


def _tv_lasso(p):
    n, rows, seed, h = p["n"], p["rows"], p["seed"], p["h"]
    rng = rng_for(seed, 0)
    A = rng.normal(size=(rows, n)) / np.sqrt(rows)
    support = rng.choice(n, size=min(p["sparsity"], n), replace=False)
    signs = rng.choice([-1.0, 1.0], size=support.size)
    phases = rng.uniform(0, 2 * np.pi, size=support.size)
    r = p["radius"]
    X = sets.box(-r, r, n)
    g = fn.L1Norm(n, p["l1"]) if p["l1"] > 0 else None

    def sampler(k):
        t = h * k
        truth = np.zeros(n)
        truth[support] = signs * r * (0.5 + p["amplitude"] * np.sin(p["omega"] * t + phases))
        noise = p["noise"] * rng_for(seed, k, 1).normal(size=rows)
        b = A @ truth + noise
        return ProblemInstance(fn.LeastSquares(A, b), g=g, feasible_set=X, t=t, k=k,
                               info={"truth": truth})

    static = p["omega"] == 0 and p["noise"] == 0
    return sampler, "primal", static


def _tv_inequality_qp(p):
    n, rows, seed, h = p["n"], p["rows"], p["seed"], p["h"]
    rng = rng_for(seed, 0)
    Q = spectrum_matrix(rng, n, p["m"], p["M"])
    A = rng.normal(size=(rows, n))
    b = 0.5 + rng.uniform(size=rows)
    base = 2.0 * rng.normal(size=n)
    slater = np.zeros(n)

    def sampler(k):
        t = h * k
        c = base + _orbit(n, p["radius"], p["omega"] * t)
        return ProblemInstance(centered_quadratic(Q, c), linear_ineq=(A, b), slater_point=slater,
                               t=t, k=k, info={"center": c})

    return sampler, "dual_ineq", p["omega"] == 0


def _tv_equality_qp(p):
    n, rows, seed, h = p["n"], p["rows"], p["seed"], p["h"]
    rank = p["rank"] if p["rank"] > 0 else rows
    if rows > n or rank > rows:
        raise ConfigError("tv_equality_qp needs rank <= rows <= n")
    rng = rng_for(seed, 0)
    Q = spectrum_matrix(rng, n, p["m"], p["M"])
    U, _ = la.qr(rng.normal(size=(rows, rows)))
    V, _ = la.qr(rng.normal(size=(n, n)))
    A = (U[:, :rank] * rng.uniform(0.5, 2.0, size=rank)) @ V[:, :rank].T
    base = rng.normal(size=n)
    center = rng.normal(size=n)

    def sampler(k):
        t = h * k
        ref = base + _orbit(n, p["radius"], p["omega"] * t)
        c = center + _orbit(n, p["radius"], p["omega"] * t + 1.0)
        return ProblemInstance(centered_quadratic(Q, c), linear_eq=(A, A @ ref), t=t, k=k,
                               info={"center": c})

    return sampler, "dual_eq", p["omega"] == 0


def _tv_admm_consensus(p):
    N, n, seed, h = p["agents"], p["n"], p["seed"], p["h"]
    rng = rng_for(seed, 0)
    blocks = [spectrum_matrix(rng, n, p["m"], p["M"]) for _ in range(N)]
    Q = np.zeros((N * n, N * n))
    for i, Qi in enumerate(blocks):
        Q[i * n:(i + 1) * n, i * n:(i + 1) * n] = Qi
    bases = rng.normal(size=(N, n))
    phases = rng.uniform(0, 2 * np.pi, size=N)
    A = np.eye(N * n)
    B = -np.tile(np.eye(n), (N, 1))
    c = np.zeros(N * n)
    g = fn.L1Norm(n, p["l1"]) if p["l1"] > 0 else fn.ZeroFunction(n)

    def sampler(k):
        t = h * k
        centers = np.concatenate([bases[i] + _orbit(n, p["radius"], p["omega"] * t + phases[i])
                                  for i in range(N)])
        return ProblemInstance(centered_quadratic(Q, centers), g=g, admm=(A, B, c), t=t, k=k,
                               info={"centers": centers.reshape(N, n)})

    return sampler, "admm", p["omega"] == 0


def _localization(p):
    from .localization import localization_sampler

    return localization_sampler(p), "admm", p["omega"] == 0


COMMON = {"T": 200, "seed": 0, "h": 1.0}

# family name -> (builder, default parameters); every key is a valid config key
SCENARIOS = {
    "static_quadratic": (_static_quadratic, {"n": 10, "m": 1.0, "M": 2.0}),
    "moving_quadratic": (_moving_quadratic, {"n": 2, "m": 1.0, "M": 2.0, "drift": 0.01, "decay": 1.0}),
    "tv_lasso": (_tv_lasso, {"n": 10, "rows": 30, "sparsity": 3, "l1": 0.05, "radius": 1.0,
                             "amplitude": 0.5, "omega": 0.05, "noise": 0.01}),
    "tv_inequality_qp": (_tv_inequality_qp, {"n": 5, "rows": 4, "m": 1.0, "M": 4.0,
                                             "radius": 0.5, "omega": 0.05}),
    "tv_equality_qp": (_tv_equality_qp, {"n": 6, "rows": 3, "rank": 0, "m": 1.0, "M": 4.0,
                                         "radius": 0.5, "omega": 0.05}),
    "tv_admm_consensus": (_tv_admm_consensus, {"agents": 4, "n": 3, "m": 1.0, "M": 2.0, "l1": 0.0,
                                               "radius": 0.5, "omega": 0.05}),
    "localization_lite": (_localization, {"nodes": 8, "anchors": 5, "half_width": 0.5, "noise": 0.1,
                                          "max_degree": 3, "anchor_range": 0.6, "omega": 0.0}),
}

INTEGER_KEYS = {"T", "seed", "n", "rows", "rank", "sparsity", "agents", "nodes", "anchors", "max_degree"}


def scenario_params(name, overrides=None):
    """Defaults of scenario `name` updated with `overrides`, validated and typed."""
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    _, defaults = SCENARIOS[name]
    params = dict(COMMON, **defaults)
    for key, value in (overrides or {}).items():
        if key not in params:
            raise ConfigError(f"scenario {name}: unknown key {key!r}")
        params[key] = value
    for key, value in params.items():
        try:
            if key in INTEGER_KEYS:
                if float(value) != int(value):
                    raise ValueError
                params[key] = int(value)
            else:
                params[key] = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"scenario {name}: {key} = {value!r} is not a number") from None
    if params["T"] < 1:
        raise ConfigError("T must be at least 1")
    if not params["h"] > 0:
        raise ConfigError("h must be positive")
    for key in ("n", "rows", "agents", "nodes", "anchors", "max_degree", "sparsity"):
        if key in params and params[key] < 1:
            raise ConfigError(f"{key} must be positive")
    if "m" in params and not 0 < params["m"] <= params["M"]:
        raise ConfigError("need 0 < m <= M")
    return params


def make_scenario(config):
    """
    Build the stream of a scenario family.

    Parameters
    ----------
    config : ScenarioConfig or mapping
        Either a parsed config or a mapping with a ``scenario`` key plus
        scenario parameters (``T``, ``seed``, dimensions, ...).
    """
    if hasattr(config, "scenario_params"):
        name, overrides = config.scenario, config.scenario_params
    else:
        overrides = dict(config)
        try:
            name = overrides.pop("scenario")
        except KeyError:
            raise ConfigError("config has no 'scenario' entry") from None
    p = scenario_params(name, overrides)
    builder, _ = SCENARIOS[name]
    try:
        sampler, family, static = builder(p)
    except ParameterError as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    return ProblemStream(lru_cache(maxsize=None)(sampler), p["T"], p["h"], p["seed"], name,
                         family, p, static)


# ----------------------------------------------------------------------
# variation estimates

@dataclass(frozen=True)
class VariationEstimate:
    """
    Measured variation parameters.

    ``delta_hat`` bounds consecutive fixed-point distances, ``d_hat`` the
    squared-distance gap along a run, ``sigma_hat`` consecutive changes of the
    optimal-value-normalized objective. ``per_step`` keeps the raw sequences.
    """

    delta_hat: float
    d_hat: float
    sigma_hat: float
    per_step: dict = field(default_factory=dict)

    def as_dict(self):
        return {"delta_hat": self.delta_hat, "d_hat": self.d_hat, "sigma_hat": self.sigma_hat}


def path_variation(points):
    """Consecutive distances ``|x*_k - x*_{k-1}|``."""
    P = np.asarray(points, dtype=float)
    if len(P) < 2:
        return np.zeros(0)
    return la.norm(np.diff(P, axis=0), axis=1)


def squared_variation(iterates, fixed_points):
    """
    Per-step ``|x_{k+1} - x*_{k+1}|^2 - |x_{k+1} - x*_k|^2`` for ``k = 1..T``.

    `iterates` and `fixed_points` both hold ``T + 1`` rows.
    """
    X = np.asarray(iterates, dtype=float)
    S = np.asarray(fixed_points, dtype=float)
    if X.shape != S.shape:
        raise ParameterError("iterates and fixed points must cover the same steps")
    nxt = X[1:]
    return np.sum((nxt - S[1:]) ** 2, axis=1) - np.sum((nxt - S[:-1]) ** 2, axis=1)


def estimate_variation(stream, oracle_traj, iterates=None, points=None, n_random=32):
    """
    Estimate the variation parameters of a stream from its oracle trajectory.

    Parameters
    ----------
    stream : ProblemStream
    oracle_traj : list of ReferenceSolution
        Solutions for ``k = 1..K``; fixed points are read from ``state_star``.
    iterates : ndarray, optional
        Run iterates (``K`` rows, same state space as ``state_star``); enables
        ``d_hat``.
    points : ndarray, optional
        Extra decision points at which objective changes are sampled.
    n_random : int
        Random feasible points added to the sample when the feasible set is
        compact.

    Notes
    -----
    Objective changes are measured on ``F_k - F_k(x*_k)``. Only the gap
    ``F_k(x) - F_k(x*_k)`` enters the objective bounds, and it is unchanged by
    that shift, which removes pure level changes from the estimate. The
    estimate is taken over a finite sample that includes every oracle point
    and the supplied iterates, i.e. the points at which the bound is used.
    """
    if not oracle_traj:
        raise ParameterError("empty oracle trajectory")
    K = len(oracle_traj)
    states = np.array([s.state_star for s in oracle_traj])
    deltas = path_variation(states)
    per_step = {"delta": deltas}
    d_hat = 0.0
    if iterates is not None:
        iterates = np.asarray(iterates, dtype=float)
        if len(iterates) != K:
            raise ParameterError(f"need {K} iterates to match the oracle, got {len(iterates)}")
        gaps = squared_variation(iterates, states)
        per_step["d_squared"] = gaps
        d_hat = float(np.sqrt(max(0.0, gaps.max()))) if gaps.size else 0.0

    sigma_hat = 0.0
    if stream.family in ("primal", "douglas_rachford") and K > 1:
        sig = _objective_changes(stream, oracle_traj, points, n_random)
        per_step["sigma"] = sig
        sigma_hat = float(sig.max()) if sig.size else 0.0
    return VariationEstimate(float(deltas.max()) if deltas.size else 0.0, d_hat, sigma_hat, per_step)


def _objective_changes(stream, oracle_traj, points, n_random):
    first = stream.sample(1)
    cset = first.feasible_set
    cloud = [s.x_star for s in oracle_traj]
    if points is not None:
        cloud.extend(np.atleast_2d(np.asarray(points, dtype=float)))
    if cset.is_compact and n_random:
        rng = rng_for(stream.seed, 0, 99)
        R = cset.norm
        for y in rng.uniform(-R, R, size=(n_random, cset.dim)):
            cloud.append(cset.project(y))
    cloud = np.array(cloud)
    prev = None
    out = []
    for k, sol in enumerate(oracle_traj, start=1):
        inst = stream.sample(k)
        vals = inst.objectives(cloud) - sol.objective
        if prev is not None:
            out.append(np.max(np.abs(vals - prev)))
        prev = vals
    return np.array(out)
