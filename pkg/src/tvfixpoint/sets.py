"""
Closed convex sets with Euclidean projections.

Every set is an immutable `ConvexSet` built through one of the factory
functions below (`whole_space`, `box`, `ball`, ...). Besides `project` the
sets expose `norm`, the norm of their largest element, which is what the
tracking bounds need as the image bound of a projected operator.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy import linalg as la

from .errors import ParameterError

KINDS = (
    "whole-space",
    "box",
    "euclidean-ball",
    "halfspace",
    "affine-subspace",
    "simplex",
    "nonnegative-orthant",
    "nonnegative-ball",
)


@dataclass(frozen=True, eq=False)
class ConvexSet:
    """A closed convex subset of R^dim identified by `kind` and `params`."""

    kind: str
    dim: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown set kind {self.kind!r}")
        if int(self.dim) < 1:
            raise ParameterError("set dimension must be positive")

    # ------------------------------------------------------------------
    def project(self, x):
        """Euclidean projection of `x` onto the set."""
        x = _as_vector(x, self.dim)
        kind, p = self.kind, self.params
        if kind == "whole-space":
            return x.copy()
        if kind == "box":
            return np.clip(x, p["lower"], p["upper"])
        if kind == "euclidean-ball":
            d = x - p["center"]
            nd = la.norm(d)
            if nd <= p["radius"]:
                return x.copy()
            return p["center"] + d * (p["radius"] / nd)
        if kind == "halfspace":
            a, b = p["normal"], p["offset"]
            viol = a @ x - b
            if viol <= 0:
                return x.copy()
            return x - (viol / (a @ a)) * a
        if kind == "affine-subspace":
            C, d = p["matrix"], p["rhs"]
            r = C @ x - d
            return x - p["pinv"] @ r
        if kind == "simplex":
            return _project_simplex(x, p["total"])
        if kind == "nonnegative-orthant":
            return np.maximum(x, 0.0)
        if kind == "nonnegative-ball":
            y = np.maximum(x, 0.0)
            ny = la.norm(y)
            if ny > p["radius"]:
                y *= p["radius"] / ny
            return y
        raise AssertionError(kind)  # pragma: no cover

    def contains(self, x, tol=1e-9):
        """Membership test up to an absolute distance `tol`."""
        x = _as_vector(x, self.dim)
        return bool(la.norm(self.project(x) - x) <= tol)

    @property
    def norm(self):
        """Norm of the largest element (``inf`` for unbounded sets)."""
        kind, p = self.kind, self.params
        if kind == "box":
            return float(la.norm(np.maximum(np.abs(p["lower"]), np.abs(p["upper"]))))
        if kind == "euclidean-ball":
            return float(la.norm(p["center"]) + p["radius"])
        if kind == "simplex":
            return float(p["total"])
        if kind == "nonnegative-ball":
            return float(p["radius"])
        return float("inf")

    @property
    def is_compact(self):
        return bool(np.isfinite(self.norm))

    @property
    def is_whole_space(self):
        return self.kind == "whole-space"

    @property
    def is_separable(self):
        """True for sets that are Cartesian products of intervals."""
        return self.kind in ("whole-space", "box", "nonnegative-orthant")

    def bounds(self):
        """Coordinate-wise (lower, upper) arrays for separable sets."""
        n = self.dim
        if self.kind == "whole-space":
            return np.full(n, -np.inf), np.full(n, np.inf)
        if self.kind == "box":
            return self.params["lower"], self.params["upper"]
        if self.kind == "nonnegative-orthant":
            return np.zeros(n), np.full(n, np.inf)
        raise ParameterError(f"{self.kind} is not a product of intervals")

    def __repr__(self):
        return f"ConvexSet({self.kind!r}, dim={self.dim})"


# ----------------------------------------------------------------------
# factories

def whole_space(dim):
    return ConvexSet("whole-space", int(dim))


def box(lower, upper, dim=None):
    """Box ``{x : lower <= x <= upper}``; scalars broadcast to `dim`."""
    if dim is None:
        dim = np.size(upper) if np.ndim(upper) else np.size(lower)
    lo = np.broadcast_to(np.asarray(lower, dtype=float), (dim,)).copy()
    hi = np.broadcast_to(np.asarray(upper, dtype=float), (dim,)).copy()
    if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo > hi):
        raise ParameterError("box requires lower <= upper componentwise")
    return ConvexSet("box", int(dim), {"lower": lo, "upper": hi})


def ball(radius, center=None, dim=None):
    if center is None:
        if dim is None:
            raise ParameterError("ball needs a center or a dimension")
        center = np.zeros(dim)
    center = np.asarray(center, dtype=float).ravel()
    if not radius >= 0:
        raise ParameterError("ball radius must be nonnegative")
    return ConvexSet("euclidean-ball", center.size, {"center": center, "radius": float(radius)})


def halfspace(normal, offset):
    """Halfspace ``{x : normal @ x <= offset}``."""
    a = np.asarray(normal, dtype=float).ravel()
    if not np.any(a):
        raise ParameterError("halfspace normal must be nonzero")
    return ConvexSet("halfspace", a.size, {"normal": a, "offset": float(offset)})


def affine(matrix, rhs):
    """Affine subspace ``{x : matrix @ x = rhs}``; must be nonempty."""
    C = np.atleast_2d(np.asarray(matrix, dtype=float))
    d = np.asarray(rhs, dtype=float).ravel()
    if C.shape[0] != d.size:
        raise ParameterError("affine set: matrix rows and rhs size differ")
    pinv = la.pinv(C)
    if la.norm(C @ (pinv @ d) - d) > 1e-9 * max(1.0, la.norm(d)):
        raise ParameterError("affine set is empty (rhs not in the range of matrix)")
    return ConvexSet("affine-subspace", C.shape[1], {"matrix": C, "rhs": d, "pinv": pinv})


def simplex(dim, total=1.0):
    if not total > 0:
        raise ParameterError("simplex total must be positive")
    return ConvexSet("simplex", int(dim), {"total": float(total)})


def nonnegative_orthant(dim):
    return ConvexSet("nonnegative-orthant", int(dim))


def nonnegative_ball(dim, radius):
    """Intersection of the nonnegative orthant with a centered ball."""
    if not radius >= 0:
        raise ParameterError("radius must be nonnegative")
    return ConvexSet("nonnegative-ball", int(dim), {"radius": float(radius)})


# ----------------------------------------------------------------------

def _as_vector(x, dim):
    x = np.asarray(x, dtype=float).ravel()
    if x.size != dim:
        raise ParameterError(f"expected a vector of size {dim}, got {x.size}")
    return x


def _project_simplex(x, total):
    # sort-based projection: find the threshold tau with sum(max(x - tau, 0)) = total
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - total
    idx = np.arange(1, x.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    tau = css[rho] / (rho + 1)
    return np.maximum(x - tau, 0.0)
