"""Alternating anchored-sweep solver for best approximation pairs.

Given two families of convex sets whose intersections A and B are disjoint,
the solver alternates growing anchored sweeps: sweep r applies r+1 anchored
steps on family A to produce the next odd iterate, then r+1 steps on family B
for the next even iterate.  Under the convergence hypotheses the odd iterates
tend to a point of A, the even iterates to a point of B, and the pair attains
dist(A, B).  A classical alternating-projection baseline and a problem
validator live here as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    MaxIterExceeded,
    MaxOuterExceeded,
    ProblemValidationError,
    TraceTooShort,
    UnboundedFamily,
)
from .intersection import project_intersection
from .operators import Family

DISJOINTNESS_TOL = 1e-6
FEASIBILITY_TOL = 1e-6
REFERENCE_TOL = 1e-9
BOUND_SLACK = 1e-9

# Converged requires mutual-projection residuals below this fraction of
# fixed_point_tol; a unit factor would leave the trailing-sweep gaps exactly
# at their acceptance bound.
_STOP_RESIDUAL_FACTOR = 0.5


@dataclass(frozen=True)
class SolverOptions:
    max_sweeps: int = 200
    pair_gap_tol: float = 1e-4
    fixed_point_tol: float = 1e-4
    record_inner_steps: bool = False

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be positive")
        if not (self.pair_gap_tol > 0 and self.fixed_point_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True, eq=False)
class Problem:
    """Two validated families, the common bounding radius and solver options."""

    family_a: Family
    family_b: Family
    rho: float
    options: SolverOptions = field(default_factory=SolverOptions)
    seed: int = 0

    def __post_init__(self):
        if self.family_a.dim != self.family_b.dim:
            raise DimensionMismatch("families have different dimensions")
        if not (self.rho > 0 and np.isfinite(self.rho)):
            raise ValueError("rho must be positive and finite")

    @property
    def dim(self):
        return self.family_a.dim


@dataclass
class ProblemReport:
    """Outcome of problem validation."""

    distance: float
    feasibility_a: float
    feasibility_b: float


@dataclass
class TraceEntry:
    k: int
    x: np.ndarray
    phase: str  # "A" or "B"
    sweep: int
    gap: float
    inner: np.ndarray | None = None  # (sweep+1, n) step outputs when recorded


@dataclass
class IterationTrace:
    x0: np.ndarray
    x0_projected: bool
    entries: list
    terminal: str  # "Converged" or "MaxSweeps"

    def odd_entries(self):
        return [e for e in self.entries if e.phase == "A"]

    def even_entries(self):
        return [e for e in self.entries if e.phase == "B"]

    @property
    def sweeps(self) -> int:
        return len(self.entries) // 2


@dataclass
class BestPair:
    """Candidate pair with its gap and reference-projection residuals.

    residuals = (||a - P_A a||, ||b - P_B b||, ||a - P_A b||, ||b - P_B a||).
    """

    a: np.ndarray
    b: np.ndarray
    gap: float
    residuals: tuple
    iterations: int | None = None

    def to_dict(self):
        return {
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "gap": self.gap,
            "residuals": {
                "a_to_A": self.residuals[0],
                "b_to_B": self.residuals[1],
                "a_vs_PA_b": self.residuals[2],
                "b_vs_PB_a": self.residuals[3],
            },
            "iterations": self.iterations,
        }


def _clip_to_ball(x, rho):
    n = float(np.linalg.norm(x))
    if n > rho:
        return x * (rho / n), True
    return x, False


def _family_bound_check(fam: Family, rho: float, label: str):
    bounded = 0
    for i, s in enumerate(fam.sets):
        try:
            r = s.bounding_radius()
        except UnboundedFamily:
            continue
        bounded += 1
        if r > rho + BOUND_SLACK:
            raise ProblemValidationError(
                f"family {label} member {i} not contained in B[0,{rho}] "
                f"(needs radius {r:.6g})"
            )
    if bounded == 0:
        raise ProblemValidationError(
            f"family {label} has no bounded member; the bounding hypothesis fails"
        )


def _family_feasibility(fam: Family, label: str) -> float:
    origin = np.zeros(fam.dim)
    try:
        y = project_intersection(fam, origin, tol=REFERENCE_TOL)
    except MaxIterExceeded as exc:
        raise ProblemValidationError(
            f"family {label} intersection appears empty (projection stalled)"
        ) from exc
    worst = float(np.max(fam.member_distances(y)))
    if worst > FEASIBILITY_TOL:
        raise ProblemValidationError(
            f"family {label} intersection appears empty "
            f"(worst member distance {worst:.3e})"
        )
    return worst


def _alternate_projections(problem: Problem, x0, inner_tol, max_outer):
    """Iterate z <- P_B(P_A(z)) with reference projections; returns (u, z, k)."""
    z, _ = _clip_to_ball(np.asarray(x0, dtype=float), problem.rho)
    tol = problem.options.pair_gap_tol
    for k in range(max_outer):
        u = project_intersection(problem.family_a, z, tol=inner_tol)
        z_new = project_intersection(problem.family_b, u, tol=inner_tol)
        if float(np.linalg.norm(z_new - z)) <= tol:
            u = project_intersection(problem.family_a, z_new, tol=inner_tol)
            return u, z_new, k + 1
        z = z_new
    raise MaxOuterExceeded(f"no convergence within {max_outer} outer iterations")


def validate_problem(problem: Problem) -> ProblemReport:
    """Check the solvability hypotheses; raises ProblemValidationError."""
    _family_bound_check(problem.family_a, problem.rho, "A")
    _family_bound_check(problem.family_b, problem.rho, "B")
    feas_a = _family_feasibility(problem.family_a, "A")
    feas_b = _family_feasibility(problem.family_b, "B")
    origin = np.zeros(problem.dim)
    u, z, _ = _alternate_projections(problem, origin, inner_tol=1e-8, max_outer=10_000)
    distance = float(np.linalg.norm(u - z))
    if distance <= DISJOINTNESS_TOL:
        raise ProblemValidationError(
            f"families not disjoint (distance estimate {distance:.3e})"
        )
    return ProblemReport(distance=distance, feasibility_a=feas_a, feasibility_b=feas_b)


def _pair_residuals(problem: Problem, a, b):
    pa_a = project_intersection(problem.family_a, a, tol=REFERENCE_TOL)
    pb_b = project_intersection(problem.family_b, b, tol=REFERENCE_TOL)
    pa_b = project_intersection(problem.family_a, b, tol=REFERENCE_TOL)
    pb_a = project_intersection(problem.family_b, a, tol=REFERENCE_TOL)
    return (
        float(np.linalg.norm(a - pa_a)),
        float(np.linalg.norm(b - pb_b)),
        float(np.linalg.norm(a - pa_b)),
        float(np.linalg.norm(b - pb_a)),
    )


def run_ashlwb(problem: Problem, x0=None, validate: bool = True) -> IterationTrace:
    """Run the alternating sweep scheme from x0 (default: the origin).

    Sweep r applies r+1 anchored steps with steering indices restarting at 0:
    x^{2r+1} from family A anchored at x^{2r}, then x^{2r+2} from family B
    anchored at x^{2r+1}.  Stops Converged when consecutive odd-iterate and
    even-iterate changes fall below pair_gap_tol and the mutual-projection
    residuals fall below fixed_point_tol/2, else MaxSweeps.
    """
    if validate:
        validate_problem(problem)
    if x0 is None:
        x0 = np.zeros(problem.dim)
    x0 = np.array(x0, dtype=float)
    if x0.shape != (problem.dim,):
        raise DimensionMismatch("x0 dimension does not match the problem")
    x0, projected = _clip_to_ball(x0, problem.rho)

    opts = problem.options
    fam_a, fam_b = problem.family_a, problem.family_b
    taus_a = np.atleast_1d(fam_a.schedule.tau(np.arange(opts.max_sweeps)))
    taus_b = np.atleast_1d(fam_b.schedule.tau(np.arange(opts.max_sweeps)))

    entries = []
    odd_prev = even_prev = None
    x = x0
    terminal = "MaxSweeps"
    for r in range(opts.max_sweeps):
        x_odd, inner_a = _sweep(fam_a, taus_a, r, x, opts.record_inner_steps)
        entries.append(
            TraceEntry(2 * r + 1, x_odd, "A", r, float(np.linalg.norm(x_odd - x)), inner_a)
        )
        x_even, inner_b = _sweep(fam_b, taus_b, r, x_odd, opts.record_inner_steps)
        entries.append(
            TraceEntry(2 * r + 2, x_even, "B", r, float(np.linalg.norm(x_even - x_odd)), inner_b)
        )
        x = x_even
        if odd_prev is not None:
            d_odd = float(np.linalg.norm(x_odd - odd_prev))
            d_even = float(np.linalg.norm(x_even - even_prev))
            if d_odd <= opts.pair_gap_tol and d_even <= opts.pair_gap_tol:
                ra = float(np.linalg.norm(
                    x_odd - project_intersection(fam_a, x_even, tol=REFERENCE_TOL)))
                rb = float(np.linalg.norm(
                    x_even - project_intersection(fam_b, x_odd, tol=REFERENCE_TOL)))
                if max(ra, rb) <= _STOP_RESIDUAL_FACTOR * opts.fixed_point_tol:
                    terminal = "Converged"
                    break
        odd_prev, even_prev = x_odd, x_even
    return IterationTrace(x0=x0, x0_projected=projected, entries=entries, terminal=terminal)


def _sweep(family: Family, taus, r, anchor, record):
    """r+1 anchored steps on one family; returns (result, inner or None)."""
    y = anchor
    inner = np.empty((r + 1, anchor.size)) if record else None
    for t in range(r + 1):
        y = taus[t] * anchor + (1.0 - taus[t]) * family.weighted_projection(y)
        if record:
            inner[t] = y
    return y, inner


def extract_best_pair(trace: IterationTrace, problem: Problem) -> BestPair:
    """Pair (last odd iterate, last even iterate) with reference residuals."""
    if len(trace.entries) < 2:
        raise TraceTooShort("need at least one full sweep to extract a pair")
    a = trace.odd_entries()[-1].x
    b = trace.even_entries()[-1].x
    return BestPair(
        a=a,
        b=b,
        gap=float(np.linalg.norm(a - b)),
        residuals=_pair_residuals(problem, a, b),
        iterations=trace.sweeps,
    )


def run_cheney_goldstein(
    problem: Problem,
    x0=None,
    inner_tol: float = 1e-8,
    max_outer: int = 10_000,
    validate: bool = True,
) -> BestPair:
    """Alternating-projection baseline z <- P_B(P_A(z)).

    The inner projections onto the two intersections use the reference
    projector at inner_tol.  Stops when the outer displacement falls below
    pair_gap_tol and returns the pair (P_A(z), z).
    """
    if validate:
        validate_problem(problem)
    if x0 is None:
        x0 = np.zeros(problem.dim)
    u, z, k = _alternate_projections(problem, x0, inner_tol, max_outer)
    return BestPair(
        a=u,
        b=z,
        gap=float(np.linalg.norm(u - z)),
        residuals=_pair_residuals(problem, u, z),
        iterations=k,
    )


def distance_estimate(problem: Problem, validate: bool = True) -> float:
    """dist(A, B) estimated as the gap of the alternating-projection baseline."""
    pair = run_cheney_goldstein(problem, inner_tol=1e-8, validate=validate)
    return pair.gap
