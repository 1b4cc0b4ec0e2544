r"""
Averaged operators on R^n.

An operator ``T`` is alpha-averaged when ``T = (1 - alpha) I + alpha G`` with
``G`` nonexpansive. Operators are single-valued closures carrying their
averagedness constant and, optionally, a contraction factor and a bound on
the norm of their image.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from numpy import linalg as la

from .errors import ContractError, NumericalError, ParameterError

SLACK = 1e-9


@dataclass(frozen=True)
class AveragedOperator:
    """
    An alpha-averaged map with metadata.

    Parameters
    ----------
    fn : callable
        Pure map from an ``(n,)`` array to an ``(n,)`` array.
    alpha : float
        Averagedness constant in (0, 1).
    dim : int
    contraction : float, optional
        Lipschitz constant ``L < 1`` when the operator is a contraction.
    image_bound : float, optional
        ``X`` with ``|T(x)| <= X`` for all ``x``; checked on every call.
    name : str
    """

    fn: Callable[[np.ndarray], np.ndarray]
    alpha: float
    dim: int
    contraction: Optional[float] = None
    image_bound: Optional[float] = None
    name: str = "T"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.contraction is not None and not 0.0 < self.contraction < 1.0:
            raise ParameterError(f"contraction factor must lie in (0, 1), got {self.contraction}")
        if self.image_bound is not None and not self.image_bound >= 0:
            raise ParameterError("image bound must be nonnegative")
        if int(self.dim) < 1:
            raise ParameterError("dimension must be positive")

    def __call__(self, x):
        return apply(self, x)

    def nonexpansive_part(self, x):
        """``G(x) = x + (T(x) - x) / alpha``."""
        x = np.asarray(x, dtype=float)
        return x + (self(x) - x) / self.alpha


@dataclass(frozen=True)
class ResidualPair:
    g_residual: float
    t_residual: float


def relax(g, alpha, dim, name="relax"):
    """``T = (1 - alpha) I + alpha g`` for a nonexpansive map `g`."""
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")

    def fn(x):
        return (1.0 - alpha) * x + alpha * g(x)

    return AveragedOperator(fn, float(alpha), int(dim), name=name)


def composed_alpha(a1, a2):
    """Averagedness constant of the composition of an a1- and an a2-averaged map."""
    return (a1 + a2 - 2.0 * a1 * a2) / (1.0 - a1 * a2)


def compose_averaged(t1, t2, name=None):
    """
    Composition ``t1 o t2`` (``t2`` applied first).

    The contraction factor is the product of the declared factors (a factor
    without one counts as nonexpansive); the image bound is the one of `t1`.
    """
    if t1.dim != t2.dim:
        raise ParameterError(f"dimension mismatch: {t1.dim} vs {t2.dim}")
    alpha = composed_alpha(t1.alpha, t2.alpha)
    assert 0.0 < alpha < 1.0
    factors = [t.contraction for t in (t1, t2) if t.contraction is not None]
    contraction = float(np.prod(factors)) if factors else None
    f1, f2 = t1.fn, t2.fn

    def fn(x):
        return f1(f2(x))

    return AveragedOperator(
        fn, alpha, t1.dim, contraction=contraction, image_bound=t1.image_bound,
        name=name or f"{t1.name}o{t2.name}",
    )


def apply(t, x):
    x = np.asarray(x, dtype=float).ravel()
    if x.size != t.dim:
        raise ParameterError(f"{t.name}: expected size {t.dim}, got {x.size}")
    y = np.asarray(t.fn(x), dtype=float).ravel()
    if y.size != t.dim:
        raise ParameterError(f"{t.name} changed the dimension")
    if not np.all(np.isfinite(y)):
        raise NumericalError(f"{t.name} returned non-finite values")
    if t.image_bound is not None:
        ny = la.norm(y)
        if ny > t.image_bound + SLACK * max(1.0, t.image_bound):
            raise ContractError(f"{t.name}: |T(x)| = {ny:.6g} exceeds image bound {t.image_bound:.6g}")
    return y


def fixed_point_residual(t, x, tx=None):
    """Residuals ``|G(x) - x|`` and ``|T(x) - x|``; pass `tx` to reuse ``T(x)``."""
    x = np.asarray(x, dtype=float).ravel()
    if tx is None:
        tx = apply(t, x)
    r = float(la.norm(tx - x))
    return ResidualPair(g_residual=r / t.alpha, t_residual=r)


def cayley_of_resolvent(r):
    """Reflection ``C = 2R - I`` of a resolvent ``R``."""

    def cayley(x):
        x = np.asarray(x, dtype=float)
        return 2.0 * r(x) - x

    return cayley


def check_averaged(t, alpha, sample_pairs, slack=SLACK):
    r"""
    Audit alpha-averagedness on sample pairs.

    Checks

    .. math:: \|Tx - Ty\|^2 \le \|x - y\|^2
              - \frac{1-\alpha}{\alpha}\|(I-T)x - (I-T)y\|^2

    on every pair.

    Returns
    -------
    ok : bool
        True if the inequality holds within `slack` on every pair.
    worst : float
        Largest value of ``LHS - RHS`` observed (negative when all hold strictly).
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterError("alpha must lie in (0, 1)")
    pairs = list(sample_pairs)
    if not pairs:
        raise ParameterError("need at least one sample pair")
    fn = t.fn if isinstance(t, AveragedOperator) else t
    c = (1.0 - alpha) / alpha
    worst = -np.inf
    for x, y in pairs:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        tx, ty = fn(x), fn(y)
        d = tx - ty
        lhs = d @ d
        e = (x - tx) - (y - ty)
        rhs = (x - y) @ (x - y) - c * (e @ e)
        worst = max(worst, float(lhs - rhs))
    return bool(worst <= slack), worst


def check_contraction(t, L, sample_pairs, slack=SLACK):
    """Worst ``|Tx - Ty| - L|x - y|`` over the pairs and whether it is <= slack."""
    fn = t.fn if isinstance(t, AveragedOperator) else t
    worst = -np.inf
    for x, y in sample_pairs:
        worst = max(worst, float(la.norm(fn(x) - fn(y)) - L * la.norm(np.asarray(x) - np.asarray(y))))
    return bool(worst <= slack), worst


# ----------------------------------------------------------------------
# common building blocks

def projection_operator(cset, name="proj"):
    """Projection onto `cset` as a 1/2-averaged operator."""
    bound = cset.norm if cset.is_compact else None
    return AveragedOperator(cset.project, 0.5, cset.dim, image_bound=bound, name=name)


def gradient_step(f, lam, name="grad"):
    """
    ``I - lam grad f``, averaged with ``alpha = lam M / 2``.

    A contraction with ``max(|1 - lam m|, |1 - lam M|)`` when ``m > 0``.
    """
    if not f.is_smooth:
        raise ParameterError("gradient step needs a smooth function")
    if not 0.0 < lam * f.M < 2.0:
        raise ParameterError(f"step {lam} outside (0, 2/M) for M = {f.M}")
    L = None
    if f.m > 0:
        L = max(abs(1 - lam * f.m), abs(1 - lam * f.M))
        # L = 0 (one-step solve) is still a valid contraction claim at tiny L
        L = max(L, np.finfo(float).tiny) if L < 1 else None
    grad = f.gradient

    def fn(x):
        return x - lam * grad(x)

    return AveragedOperator(fn, lam * f.M / 2.0, f.dim, contraction=L, name=name)


def with_metadata(t, **changes):
    """Copy of `t` with some metadata replaced (e.g. a tighter contraction)."""
    return replace(t, **changes)


def random_pairs(rng, dim, count, scale=1.0):
    """`count` random Gaussian pairs, handy for the audits above."""
    X = rng.normal(scale=scale, size=(count, dim))
    Y = rng.normal(scale=scale, size=(count, dim))
    return list(zip(X, Y))
