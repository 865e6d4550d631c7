"""Elementary closed convex sets in R^n with exact metric projections.

Five set variants are supported: balls, half-spaces, hyperplanes, axis-aligned
boxes and axis-aligned ellipsoids.  All projections accept a single point of
shape (n,) or a batch of shape (..., n) and are exact up to floating point,
except the ellipsoid which solves a one-dimensional dual equation by
safeguarded bisection to residual <= 1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EllipsoidRootFindError, UnboundedFamily

# Default additive slack for containment tests. Double-precision projections
# land within ~1e-12 of boundaries, so 1e-9 absorbs accumulated rounding.
CONTAINS_TOL = 1e-9

_ELLIPSOID_ROOT_RESIDUAL = 1e-12
_ELLIPSOID_MAX_BISECT = 110


def _as_points(x, dim, what="point"):
    """Coerce to a float array of shape (..., dim)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != dim:
        raise DimensionMismatch(
            f"{what} has dimension {x.shape[-1] if x.ndim else 0}, expected {dim}"
        )
    return x


def _vec(v, name):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be finite")
    return v


@dataclass(frozen=True, eq=False)
class Ball:
    """Closed ball {x : ||x - center|| <= radius}."""

    center: np.ndarray
    radius: float
    kind = "ball"
    strictly_convex = True

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "center"))
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0 and np.isfinite(self.radius)):
            raise ValueError("radius must be positive and finite")

    @property
    def dim(self):
        return self.center.size

    def project(self, x):
        x = _as_points(x, self.dim)
        d = x - self.center
        n = np.linalg.norm(d, axis=-1, keepdims=True)
        outside = n > self.radius
        # avoid 0/0 for interior points; they keep x exactly
        scale = np.where(outside, self.radius / np.where(outside, n, 1.0), 1.0)
        return np.where(outside, self.center + d * scale, x)

    def contains(self, x, tol=CONTAINS_TOL):
        x = _as_points(x, self.dim)
        return np.linalg.norm(x - self.center, axis=-1) <= self.radius + tol

    def bounding_radius(self):
        return float(np.linalg.norm(self.center) + self.radius)

    def to_dict(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """Closed half-space {x : <normal, x> <= offset}."""

    normal: np.ndarray
    offset: float
    kind = "halfspace"
    strictly_convex = False

    def __post_init__(self):
        object.__setattr__(self, "normal", _vec(self.normal, "normal"))
        object.__setattr__(self, "offset", float(self.offset))
        if np.linalg.norm(self.normal) == 0.0:
            raise ValueError("normal must be nonzero")

    @property
    def dim(self):
        return self.normal.size

    def project(self, x):
        x = _as_points(x, self.dim)
        excess = x @ self.normal - self.offset
        nn = float(self.normal @ self.normal)
        shift = np.maximum(excess, 0.0) / nn
        return np.where((excess > 0.0)[..., None], x - shift[..., None] * self.normal, x)

    def contains(self, x, tol=CONTAINS_TOL):
        x = _as_points(x, self.dim)
        # slack measured as a distance, so it does not scale with ||normal||
        return x @ self.normal - self.offset <= tol * np.linalg.norm(self.normal)

    def bounding_radius(self):
        raise UnboundedFamily("a half-space is unbounded")

    def to_dict(self):
        return {"type": "halfspace", "normal": self.normal.tolist(), "offset": self.offset}


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Hyperplane {x : <normal, x> = offset}."""

    normal: np.ndarray
    offset: float
    kind = "hyperplane"
    strictly_convex = False

    def __post_init__(self):
        object.__setattr__(self, "normal", _vec(self.normal, "normal"))
        object.__setattr__(self, "offset", float(self.offset))
        if np.linalg.norm(self.normal) == 0.0:
            raise ValueError("normal must be nonzero")

    @property
    def dim(self):
        return self.normal.size

    def project(self, x):
        x = _as_points(x, self.dim)
        excess = x @ self.normal - self.offset
        nn = float(self.normal @ self.normal)
        return np.where((excess != 0.0)[..., None], x - (excess / nn)[..., None] * self.normal, x)

    def contains(self, x, tol=CONTAINS_TOL):
        x = _as_points(x, self.dim)
        return np.abs(x @ self.normal - self.offset) <= tol * np.linalg.norm(self.normal)

    def bounding_radius(self):
        raise UnboundedFamily("a hyperplane is unbounded")

    def to_dict(self):
        return {"type": "hyperplane", "normal": self.normal.tolist(), "offset": self.offset}


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box {x : lo <= x <= hi componentwise}."""

    lo: np.ndarray
    hi: np.ndarray
    kind = "box"
    strictly_convex = False

    def __post_init__(self):
        object.__setattr__(self, "lo", _vec(self.lo, "lo"))
        object.__setattr__(self, "hi", _vec(self.hi, "hi"))
        if self.lo.size != self.hi.size:
            raise DimensionMismatch("lo and hi dimensions differ")
        if not np.all(self.lo <= self.hi):
            raise ValueError("requires lo <= hi componentwise")

    @property
    def dim(self):
        return self.lo.size

    def project(self, x):
        x = _as_points(x, self.dim)
        return np.clip(x, self.lo, self.hi)

    def contains(self, x, tol=CONTAINS_TOL):
        x = _as_points(x, self.dim)
        return np.all((x >= self.lo - tol) & (x <= self.hi + tol), axis=-1)

    def bounding_radius(self):
        # farthest vertex from the origin
        far = np.maximum(np.abs(self.lo), np.abs(self.hi))
        return float(np.linalg.norm(far))

    def to_dict(self):
        return {"type": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """Axis-aligned ellipsoid {x : sum_d ((x_d - c_d)/axes_d)^2 <= 1}."""

    center: np.ndarray
    axes: np.ndarray
    kind = "ellipsoid"
    strictly_convex = True

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "center"))
        object.__setattr__(self, "axes", _vec(self.axes, "axes"))
        if self.center.size != self.axes.size:
            raise DimensionMismatch("center and axes dimensions differ")
        if not np.all(self.axes > 0):
            raise ValueError("axes must be positive")

    @property
    def dim(self):
        return self.center.size

    def _quad(self, x):
        return np.sum(((x - self.center) / self.axes) ** 2, axis=-1)

    def project(self, x):
        """Project via the dual equation.

        For z = x - center outside the ellipsoid the projection is
        y_d = z_d * a_d^2 / (a_d^2 + lam) with lam > 0 the unique root of the
        constraint residual phi(lam) = sum_d (y_d/a_d)^2 - 1.  phi is strictly
        decreasing, so a fixed bisection count is deterministic and safe.
        """
        x = _as_points(x, self.dim)
        shape = x.shape
        pts = x.reshape(-1, self.dim)
        z = pts - self.center
        a2 = self.axes**2
        quad = np.sum((z / self.axes) ** 2, axis=-1)
        outside = quad > 1.0
        if not np.any(outside):
            return x
        zo = z[outside]

        def phi(lam):
            y = zo * a2 / (a2 + lam[:, None])
            return np.sum((y / self.axes) ** 2, axis=-1) - 1.0

        lo = np.zeros(zo.shape[0])
        # phi(lam) <= (||a*z|| / lam)^2 - 1 < 0 once lam exceeds ||a*z||
        hi = np.linalg.norm(zo * self.axes, axis=-1) + np.max(a2)
        for _ in range(_ELLIPSOID_MAX_BISECT):
            mid = 0.5 * (lo + hi)
            w = phi(mid) > 0.0
            lo = np.where(w, mid, lo)
            hi = np.where(w, hi, mid)
        lam = 0.5 * (lo + hi)
        res = np.abs(phi(lam))
        if np.any(res > _ELLIPSOID_ROOT_RESIDUAL):
            raise EllipsoidRootFindError(
                f"dual residual {res.max():.3e} after {_ELLIPSOID_MAX_BISECT} "
                "bisections; axes may be numerically degenerate"
            )
        proj = pts.copy()
        proj[outside] = self.center + zo * a2 / (a2 + lam[:, None])
        return proj.reshape(shape)

    def contains(self, x, tol=CONTAINS_TOL):
        x = _as_points(x, self.dim)
        return self._quad(x) <= 1.0 + tol

    def bounding_radius(self):
        """Exact radius of the smallest origin-centered ball containing the set.

        Maximizes ||c + diag(axes) s|| over the unit sphere via the secular
        equation psi(lam) = sum_d (a_d c_d)^2/(lam - a_d^2)^2 = 1 on
        (max a^2, inf), including the degenerate branch where c has no
        component along a longest axis.
        """
        c, a = self.center, self.axes
        if np.linalg.norm(c) == 0.0:
            return float(np.max(a))
        a2 = a**2
        amax2 = float(np.max(a2))
        g = a * c
        top = a2 == amax2
        nontop = ~top

        def psi_nontop(lam):
            return float(np.sum(g[nontop] ** 2 / (lam - a2[nontop]) ** 2))

        if float(np.sum(g[top] ** 2)) == 0.0 and psi_nontop(amax2) < 1.0:
            # c is orthogonal to every longest axis and the interior terms
            # cannot fill the constraint: the maximizer sits at lam = amax2
            # with the slack absorbed by a longest-axis component.
            s = np.zeros_like(c)
            s[nontop] = g[nontop] / (amax2 - a2[nontop])
            beta2 = 1.0 - float(np.sum(s**2))
            s[np.argmax(a2)] = np.sqrt(max(beta2, 0.0))
            return float(np.linalg.norm(c + a * s))

        def psi(lam):
            with np.errstate(divide="ignore", over="ignore"):
                return float(np.sum(g**2 / (lam - a2) ** 2))

        lo = amax2 * (1 + 1e-14) + 1e-300
        hi = amax2 + float(np.linalg.norm(g)) + 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if psi(mid) > 1.0:
                lo = mid
            else:
                hi = mid
        lam = 0.5 * (lo + hi)
        s = g / (lam - a2)
        s /= np.linalg.norm(s)
        return float(np.linalg.norm(c + a * s))

    def to_dict(self):
        return {"type": "ellipsoid", "center": self.center.tolist(), "axes": self.axes.tolist()}


# union of the five descriptor types
ConvexSet = Ball | HalfSpace | Hyperplane | Box | Ellipsoid

_KIND_MAP = {
    "ball": (Ball, ("center", "radius")),
    "halfspace": (HalfSpace, ("normal", "offset")),
    "hyperplane": (Hyperplane, ("normal", "offset")),
    "box": (Box, ("lo", "hi")),
    "ellipsoid": (Ellipsoid, ("center", "axes")),
}


def set_from_dict(record):
    """Build a set descriptor from its tagged-record form (strict keys)."""
    if not isinstance(record, dict) or "type" not in record:
        raise ValueError("set record must be an object with a 'type' tag")
    tag = record["type"]
    if tag not in _KIND_MAP:
        raise ValueError(f"unknown set type {tag!r}")
    cls, fields = _KIND_MAP[tag]
    extra = set(record) - {"type", *fields}
    if extra:
        raise ValueError(f"unknown key {sorted(extra)[0]!r} in {tag} record")
    missing = [f for f in fields if f not in record]
    if missing:
        raise ValueError(f"missing key {missing[0]!r} in {tag} record")
    return cls(*(record[f] for f in fields))


def project(s: ConvexSet, x):
    """Metric projection of x onto s."""
    return s.project(x)


def contains(s: ConvexSet, x, tol=CONTAINS_TOL):
    """Whether x satisfies the defining inequality of s within additive slack tol."""
    return s.contains(x, tol)


def is_strictly_convex(s: ConvexSet) -> bool:
    return s.strictly_convex


def member_distance(s: ConvexSet, x):
    """Euclidean distance from x to s, i.e. ||x - P_s(x)||."""
    return np.linalg.norm(np.asarray(x, float) - s.project(x), axis=-1)


def family_bounding_radius(sets) -> float:
    """Smallest radius of an origin-centered ball containing every bounded member.

    Half-spaces and hyperplanes are unbounded; they are tolerated only when a
    bounded member is present in the same list (the bounded member then
    encloses the intersection).  With no bounded member the hypothesis of a
    common enclosing ball fails and UnboundedFamily is raised.
    """
    sets = list(sets)
    if not sets:
        raise ValueError("empty set list")
    radii = []
    for s in sets:
        try:
            radii.append(s.bounding_radius())
        except UnboundedFamily:
            continue
    if not radii:
        raise UnboundedFamily("family has no bounded member")
    return max(radii)
