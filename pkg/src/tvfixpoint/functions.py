r"""
Catalog of convex functions with gradient and prox oracles.

Each function carries its strong convexity constant ``m`` and its strong
smoothness constant ``M`` (``M = inf`` marks a nonsmooth function). The prox
convention is

.. math:: \mathrm{prox}_{f,\mathcal{X},\lambda}(v)
          = \arg\min_{x \in \mathcal{X}} f(x) + \frac{1}{2\lambda}\|x - v\|^2 .

Closed forms are used wherever they exist; a smooth function over a set with
no closed form falls back to a projected-gradient inner loop.
"""

import numpy as np
from numpy import linalg as la

from . import sets as _sets
from .errors import ParameterError, UnsupportedOperation

INNER_TOL = 1e-10
INNER_MAXITER = 100_000


class ConvexFunction:
    """
    Base class of the catalog.

    Attributes
    ----------
    dim : int
        Dimension of the argument.
    m : float
        Strong convexity constant (0 if merely convex).
    M : float
        Strong smoothness constant, ``inf`` for nonsmooth functions.
    """

    name = "convex"

    def __init__(self, dim, m=0.0, M=np.inf):
        dim = int(dim)
        if dim < 1:
            raise ParameterError("dimension must be positive")
        if m < 0 or M < 0:
            raise ParameterError("curvature constants must be nonnegative")
        if np.isfinite(M) and m > M * (1 + 1e-12) + 1e-12:
            raise ParameterError(f"need m <= M, got m={m}, M={M}")
        self.dim, self.m, self.M = dim, float(m), float(M)

    @property
    def is_smooth(self):
        return bool(np.isfinite(self.M))

    def __call__(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise UnsupportedOperation(f"{self.name} is not differentiable (M = inf)")

    def values(self, X):
        """Evaluate at every row of `X`."""
        return np.array([self(x) for x in np.atleast_2d(X)])

    def prox(self, lam, v, cset=None):
        raise UnsupportedOperation(f"no prox available for {self.name}")

    def quadratic_form(self):
        """``(Q, q, c)`` with ``f(x) = x'Qx/2 + q'x + c``, or None."""
        return None

    def conjugate(self):
        raise UnsupportedOperation(f"conjugate of {self.name} is not in the catalog")

    def _check(self, x):
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.dim:
            raise ParameterError(f"{self.name}: expected size {self.dim}, got {x.size}")
        return x

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, m={self.m:g}, M={self.M:g})"


# ----------------------------------------------------------------------
# smooth functions

class Quadratic(ConvexFunction):
    """``f(x) = x'Qx/2 + q'x + const`` with ``Q`` symmetric PSD."""

    name = "quadratic"

    def __init__(self, Q, q=None, const=0.0):
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        n = Q.shape[0]
        if Q.shape != (n, n):
            raise ParameterError("Q must be square")
        if not np.allclose(Q, Q.T, atol=1e-12 * max(1.0, np.abs(Q).max())):
            raise ParameterError("Q must be symmetric")
        Q = 0.5 * (Q + Q.T)
        eig = la.eigvalsh(Q) if n else np.zeros(0)
        scale = max(1.0, np.abs(eig).max()) if n else 1.0
        if eig.min() < -1e-10 * scale:
            raise ParameterError("Q must be positive semidefinite")
        m = max(float(eig.min()), 0.0)
        M = max(float(eig.max()), 0.0)
        super().__init__(n, m=m, M=M)
        self.Q = Q
        self.q = np.zeros(n) if q is None else np.asarray(q, dtype=float).ravel().copy()
        if self.q.size != n:
            raise ParameterError("q has the wrong size")
        self.const = float(const)
        self._diagonal = not np.any(Q - np.diag(np.diag(Q)))

    def __call__(self, x):
        x = self._check(x)
        return float(0.5 * x @ self.Q @ x + self.q @ x + self.const)

    def gradient(self, x):
        x = self._check(x)
        return self.Q @ x + self.q

    def values(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return 0.5 * np.einsum("ij,jk,ik->i", X, self.Q, X) + X @ self.q + self.const

    def quadratic_form(self):
        return self.Q, self.q, self.const

    def shifted(self, w):
        """The same quadratic plus the linear term ``w'x``."""
        return Quadratic(self.Q, self.q + np.asarray(w, dtype=float).ravel(), self.const)

    def minimize(self, cset=None):
        """Exact minimizer over `cset` (strong convexity required off closed forms)."""
        return _quadratic_argmin(self.Q, self.q, cset, self.M, self.m)

    def prox(self, lam, v, cset=None):
        lam = _check_lambda(lam)
        v = self._check(v)
        n = self.dim
        # f(x) + |x - v|^2 / (2 lam)  ==  quadratic with Q + I/lam and q - v/lam
        Q = self.Q + np.eye(n) / lam
        q = self.q - v / lam
        return _quadratic_argmin(Q, q, cset, self.M + 1.0 / lam, self.m + 1.0 / lam, x0=v)

    def conjugate(self):
        if self.m <= 0:
            raise UnsupportedOperation("conjugate of a singular quadratic is an extended-value function")
        Qi = la.inv(self.Q)
        Qi = 0.5 * (Qi + Qi.T)
        return Quadratic(Qi, -Qi @ self.q, 0.5 * self.q @ Qi @ self.q - self.const)


class LeastSquares(Quadratic):
    """``f(x) = |Ax - b|^2 / 2``."""

    name = "least-squares"

    def __init__(self, A, b):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        if A.shape[0] != b.size:
            raise ParameterError("A rows and b size differ")
        super().__init__(A.T @ A, -A.T @ b, 0.5 * b @ b)
        self.A, self.b = A, b

    def __call__(self, x):
        x = self._check(x)
        r = self.A @ x - self.b
        return float(0.5 * r @ r)

    def gradient(self, x):
        x = self._check(x)
        return self.A.T @ (self.A @ x - self.b)

    def values(self, X):
        R = np.atleast_2d(np.asarray(X, dtype=float)) @ self.A.T - self.b
        return 0.5 * np.sum(R * R, axis=1)


class ZeroFunction(Quadratic):
    """The zero function; its prox over a set is the projection."""

    name = "zero"

    def __init__(self, dim):
        super().__init__(np.zeros((dim, dim)))

    def __call__(self, x):
        self._check(x)
        return 0.0

    def values(self, X):
        return np.zeros(len(np.atleast_2d(X)))

    def prox(self, lam, v, cset=None):
        _check_lambda(lam)
        v = self._check(v)
        return v.copy() if cset is None else cset.project(v)

    def conjugate(self):
        return Indicator(_sets.ball(0.0, dim=self.dim))


# ----------------------------------------------------------------------
# nonsmooth functions

class L1Norm(ConvexFunction):
    """Weighted l1 norm ``sum_i w_i |x_i|``."""

    name = "l1"

    def __init__(self, dim, weight=1.0):
        super().__init__(dim)
        self.weight = np.broadcast_to(np.asarray(weight, dtype=float), (self.dim,)).copy()
        if np.any(self.weight < 0):
            raise ParameterError("l1 weights must be nonnegative")

    def __call__(self, x):
        x = self._check(x)
        return float(self.weight @ np.abs(x))

    def values(self, X):
        return np.abs(np.atleast_2d(np.asarray(X, dtype=float))) @ self.weight

    def prox(self, lam, v, cset=None):
        lam = _check_lambda(lam)
        v = self._check(v)
        y = soft_threshold(v, lam * self.weight)
        if cset is None or cset.is_whole_space:
            return y
        if cset.is_separable:
            lo, hi = cset.bounds()
            return np.clip(y, lo, hi)
        raise UnsupportedOperation(f"prox of l1 over a {cset.kind} set has no closed form")

    def conjugate(self):
        return Indicator(_sets.box(-self.weight, self.weight))


class EuclideanNorm(ConvexFunction):
    """``w |x|_2``; prox is block soft-thresholding."""

    name = "l2"

    def __init__(self, dim, weight=1.0):
        super().__init__(dim)
        if weight < 0:
            raise ParameterError("weight must be nonnegative")
        self.weight = float(weight)

    def __call__(self, x):
        return float(self.weight * la.norm(self._check(x)))

    def prox(self, lam, v, cset=None):
        lam = _check_lambda(lam)
        v = self._check(v)
        if cset is not None and not cset.is_whole_space:
            raise UnsupportedOperation("prox of the l2 norm over a set has no closed form")
        nv = la.norm(v)
        t = lam * self.weight
        return v * (1 - t / nv) if nv > t else np.zeros_like(v)

    def conjugate(self):
        return Indicator(_sets.ball(self.weight, dim=self.dim))


class Indicator(ConvexFunction):
    """Indicator of a convex set: 0 inside, ``inf`` outside."""

    name = "indicator"

    def __init__(self, cset, tol=1e-9):
        super().__init__(cset.dim)
        self.set, self.tol = cset, tol

    def __call__(self, x):
        return 0.0 if self.set.contains(self._check(x), self.tol) else np.inf

    def prox(self, lam, v, cset=None):
        _check_lambda(lam)
        v = self._check(v)
        if cset is None or cset.is_whole_space or cset is self.set:
            return self.set.project(v)
        raise UnsupportedOperation("projection onto an intersection of sets is not in the catalog")

    def conjugate(self):
        s = self.set
        if s.kind == "box" and np.allclose(s.params["lower"], -s.params["upper"]):
            return L1Norm(s.dim, s.params["upper"])
        if s.kind == "euclidean-ball" and not np.any(s.params["center"]):
            if s.params["radius"] == 0:
                return ZeroFunction(s.dim)
            return EuclideanNorm(s.dim, s.params["radius"])
        raise UnsupportedOperation(f"support function of a {s.kind} set is not in the catalog")


# ----------------------------------------------------------------------
# module-level oracles

def eval_gradient(f, x):
    """Gradient of a smooth catalog function; rejects ``M = inf``."""
    if not f.is_smooth:
        raise UnsupportedOperation(f"{f.name} has no gradient (M = inf)")
    return f.gradient(x)


def eval_prox(f, cset, lam, v):
    """``prox_{f, cset, lam}(v)``; ``cset=None`` means the whole space."""
    return f.prox(lam, v, cset)


def project(cset, x):
    return cset.project(x)


def conjugate_constants(f):
    """
    Curvature constants of the convex conjugate.

    Returns
    -------
    m_star, M_star : float
        ``m_star = 1/M`` (strong convexity, valid for unconstrained ``f``) and
        ``M_star = 1/m`` (strong smoothness, ``inf`` when ``m = 0``).
    """
    if f.m <= 0 and not f.is_smooth:
        raise UnsupportedOperation("conjugate constants need m > 0 or M < inf")
    m_star = 1.0 / f.M if f.is_smooth and f.M > 0 else (np.inf if f.M == 0 else 0.0)
    M_star = 1.0 / f.m if f.m > 0 else np.inf
    return m_star, M_star


def soft_threshold(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def projected_gradient_solve(grad, step, proj, x0, tol=INNER_TOL, maxiter=INNER_MAXITER):
    """Projected gradient loop used as the fallback inner solver."""
    x = proj(np.asarray(x0, dtype=float))
    for _ in range(maxiter):
        x_new = proj(x - step * grad(x))
        if la.norm(x_new - x) <= tol:
            return x_new
        x = x_new
    raise UnsupportedOperation(f"projected-gradient fallback did not reach {tol:g} in {maxiter} iterations")


# ----------------------------------------------------------------------

def _check_lambda(lam):
    lam = float(lam)
    if not lam > 0:
        raise ParameterError("prox parameter must be positive")
    return lam


def _quadratic_argmin(Q, q, cset, M, m, x0=None):
    """argmin over cset of x'Qx/2 + q'x."""
    n = q.size
    if cset is None or cset.is_whole_space:
        if m > 0:
            return la.solve(Q, -q)
        x, *_ = la.lstsq(Q, -q, rcond=None)
        if la.norm(Q @ x + q) > 1e-8 * max(1.0, la.norm(q)):
            raise ParameterError("quadratic is unbounded below")
        return x
    if cset.kind == "affine-subspace":
        C, d = cset.params["matrix"], cset.params["rhs"]
        r = C.shape[0]
        K = np.block([[Q, C.T], [C, np.zeros((r, r))]])
        sol, *_ = la.lstsq(K, np.concatenate([-q, d]), rcond=None)
        return sol[:n]
    if cset.is_separable and not np.any(Q - np.diag(np.diag(Q))) and np.all(np.diag(Q) > 0):
        lo, hi = cset.bounds()
        return np.clip(-q / np.diag(Q), lo, hi)
    if not M > 0:
        # linear objective over a set: only the zero function reaches here
        if np.any(q):
            raise UnsupportedOperation("linear program over a set is not in the catalog")
        return cset.project(np.zeros(n) if x0 is None else x0)
    start = np.zeros(n) if x0 is None else x0
    return projected_gradient_solve(lambda x: Q @ x + q, 1.0 / M, cset.project, start)
