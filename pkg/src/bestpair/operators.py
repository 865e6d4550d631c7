"""Anchored simultaneous-projection operators and steering schedules.

The core operator is M[d](x) = tau*d + (1-tau)*sum_l w_l P_l(x) over a family
of convex sets.  Products of these operators with a fixed anchor, applied with
a vanishing steering sequence, converge to the metric projection of the anchor
onto the family's intersection; `shlwb_project` runs that iteration directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, MaxIterExceeded

SHLWB_DEFAULT_TOL = 1e-4
SHLWB_DEFAULT_MAX_ITER = 200_000

# partial-sum threshold of the divergence heuristic
_DIVERGENCE_PARTIAL_SUM = 10.0


@dataclass(frozen=True)
class SteeringSchedule:
    """Parametric steering sequence tau_k = c / (k + k0)^p.

    The defaults (c=1, k0=2, p=1) give the harmonic-type sequence 1/(k+2),
    which satisfies all steering axioms: values in (0,1), monotone decay to 0,
    divergent sum, summable successive differences.  Out-of-range parameters
    are representable so that `validate_schedule` can report their failures.
    """

    c: float = 1.0
    k0: float = 2.0
    p: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and np.isfinite(self.c)):
            raise ValueError("c must be positive and finite")
        if not (self.k0 > 0 and np.isfinite(self.k0)):
            raise ValueError("k0 must be positive and finite")
        if not np.isfinite(self.p):
            raise ValueError("p must be finite")

    def tau(self, k):
        """tau_k for an integer index or an array of indices."""
        k = np.asarray(k, dtype=float)
        out = self.c / (k + self.k0) ** self.p
        return float(out) if out.ndim == 0 else out

    def satisfies_axioms(self) -> bool:
        """Closed-form check of the steering axioms for this parametric family."""
        in_range = 0.0 < self.tau(0) < 1.0 and self.p >= 0
        return in_range and self.p > 0 and self.p <= 1.0

    def to_dict(self):
        return {"c": self.c, "k0": self.k0, "p": self.p}


@dataclass
class ScheduleReport:
    """Per-axiom verdicts for a steering schedule checked on a finite prefix."""

    prefix: int
    in_range: bool
    monotone: bool
    to_zero: bool
    divergent: bool
    partial_sum: float
    partial_sum_exceeds_threshold: bool
    tail_value: float

    @property
    def passed(self) -> bool:
        return self.in_range and self.monotone and self.to_zero and self.divergent

    def to_dict(self):
        return {
            "prefix": self.prefix,
            "in_range": self.in_range,
            "monotone": self.monotone,
            "to_zero": self.to_zero,
            "divergent": self.divergent,
            "partial_sum": self.partial_sum,
            "partial_sum_exceeds_threshold": self.partial_sum_exceeds_threshold,
            "tail_value": self.tail_value,
            "passed": self.passed,
        }


def validate_schedule(schedule: SteeringSchedule, prefix: int = 10**6) -> ScheduleReport:
    """Check the steering axioms on k < prefix.

    Range and monotonicity are checked numerically on the prefix.  Divergence
    of the series cannot be decided from a finite prefix, so the verdict uses
    the closed form for the parametric family (p <= 1 diverges); the
    partial-sum heuristic (sum over the prefix > 10) is reported alongside.
    Summability of successive differences follows from monotone decay by
    telescoping, so it carries no separate verdict.
    """
    prefix = int(prefix)
    if prefix < 1:
        raise ValueError("prefix must be positive")
    taus = schedule.tau(np.arange(prefix))
    taus = np.atleast_1d(taus)
    in_range = bool(np.all((taus > 0.0) & (taus < 1.0)))
    monotone = bool(np.all(np.diff(taus) <= 0.0))
    to_zero = schedule.p > 0
    divergent = schedule.p <= 1.0
    psum = float(np.sum(taus))
    return ScheduleReport(
        prefix=prefix,
        in_range=in_range,
        monotone=monotone,
        to_zero=to_zero,
        divergent=divergent,
        partial_sum=psum,
        partial_sum_exceeds_threshold=psum > _DIVERGENCE_PARTIAL_SUM,
        tail_value=float(taus[-1]),
    )


@dataclass(frozen=True, eq=False)
class Family:
    """Ordered convex sets with simplex weights and a steering schedule.

    Weights default to uniform.  The schedule must satisfy the steering axioms
    (checked in closed form); nonemptiness of the intersection is validated at
    problem load, not here, because it needs a projection run.
    """

    sets: tuple
    weights: np.ndarray = None
    schedule: SteeringSchedule = field(default_factory=SteeringSchedule)

    def __post_init__(self):
        sets = tuple(self.sets)
        if not sets:
            raise ValueError("family needs at least one set")
        dim = sets[0].dim
        for s in sets:
            if s.dim != dim:
                raise DimensionMismatch("family members have mixed dimensions")
        if self.weights is None:
            w = np.full(len(sets), 1.0 / len(sets))
        else:
            w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(sets),):
            raise ValueError("weights length must match number of sets")
        if not np.all(w > 0):
            raise ValueError("weights must be strictly positive")
        if abs(float(np.sum(w)) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")
        if not self.schedule.satisfies_axioms():
            raise ValueError("schedule violates the steering axioms")
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self):
        return self.sets[0].dim

    def __len__(self):
        return len(self.sets)

    def weighted_projection(self, x):
        """sum_l w_l P_l(x), accumulated in index order."""
        x = np.asarray(x, dtype=float)
        acc = self.weights[0] * self.sets[0].project(x)
        for w, s in zip(self.weights[1:], self.sets[1:]):
            acc = acc + w * s.project(x)
        return acc

    def member_distances(self, x):
        """Distances ||x - P_l(x)|| to every member, shape (L, ...)."""
        x = np.asarray(x, dtype=float)
        return np.stack(
            [np.linalg.norm(x - s.project(x), axis=-1) for s in self.sets]
        )

    def with_schedule(self, schedule: SteeringSchedule) -> "Family":
        return Family(self.sets, self.weights, schedule)


def _check_dim(family: Family, x, what="point"):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != family.dim:
        raise DimensionMismatch(f"{what} dimension does not match family dimension {family.dim}")
    return x


def apply_m(family: Family, tau: float, anchor, x):
    """One anchored step: tau*anchor + (1-tau)*weighted projection of x."""
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0,1), got {tau}")
    anchor = _check_dim(family, anchor, "anchor")
    x = _check_dim(family, x)
    return tau * anchor + (1.0 - tau) * family.weighted_projection(x)


def apply_m_hat(family: Family, tau: float, x):
    """Self-anchored step: apply_m with anchor = x."""
    x = _check_dim(family, x)
    return apply_m(family, tau, x, x)


def apply_q_hat(family: Family, q: int, x):
    """Anchored sweep of q+1 steps.

    The anchor is the original input at every inner step and the steering
    index restarts at 0 on every call.
    """
    if q < 0:
        raise ValueError("q must be nonnegative")
    x = _check_dim(family, x)
    taus = np.atleast_1d(family.schedule.tau(np.arange(q + 1)))
    y = x
    for t in range(q + 1):
        y = taus[t] * x + (1.0 - taus[t]) * family.weighted_projection(y)
    return y


def q_hat_path(family: Family, q: int, x):
    """All sweep outputs [Q_0(x), ..., Q_q(x)] in one pass, shape (q+1, ..., n).

    Successive sweep outputs share their prefix because the anchor is fixed,
    so the whole path costs the same as the longest single sweep.
    """
    if q < 0:
        raise ValueError("q must be nonnegative")
    x = _check_dim(family, x)
    taus = np.atleast_1d(family.schedule.tau(np.arange(q + 1)))
    out = np.empty((q + 1,) + x.shape)
    y = x
    for t in range(q + 1):
        y = taus[t] * x + (1.0 - taus[t]) * family.weighted_projection(y)
        out[t] = y
    return out


def shlwb_project(
    family: Family,
    anchor,
    tol: float = SHLWB_DEFAULT_TOL,
    max_iter: int = SHLWB_DEFAULT_MAX_ITER,
):
    """Approximate the projection of `anchor` onto the family's intersection.

    Runs x_{k+1} = tau_k*anchor + (1-tau_k)*sum_l w_l P_l(x_k) from
    x_0 = anchor until ||x_{k+1} - x_k|| <= tol*tau_k.  The stop test is
    scaled by tau_k because the per-step displacement of an anchored iteration
    is Theta(tau_k) even at the limit, so an unscaled gap test would stall.

    Accepts a batch of anchors of shape (..., n); the stop test then uses the
    largest row gap.  Raises MaxIterExceeded (carrying the last iterate and
    gap) when the budget runs out, which signals slow steering or an empty
    intersection.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    anchor = _check_dim(family, anchor, "anchor")
    x = anchor
    gap = np.inf
    for k in range(max_iter):
        tau = float(family.schedule.tau(k))
        x_next = tau * anchor + (1.0 - tau) * family.weighted_projection(x)
        gap = float(np.max(np.linalg.norm(x_next - x, axis=-1)))
        x = x_next
        if gap <= tol * tau:
            return x
    raise MaxIterExceeded(
        f"no convergence within {max_iter} iterations (last gap {gap:.3e})",
        last=x,
        gap=gap,
    )
