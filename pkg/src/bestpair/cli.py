"""Command-line front end: problem files, solver runs, reports.

Problem files are strict JSON: unknown keys anywhere are an error.  Top-level
schema:

    {
      "dimension": 2,
      "familyA": {"sets": [...], "weights": [...], "schedule": {"c":..,"k0":..,"p":..}},
      "familyB": {...},
      "options": {"max_sweeps":.., "pair_gap_tol":.., "fixed_point_tol":..,
                  "record_inner_steps": false},
      "seed": 0
    }

weights/schedule/options/seed are optional.  Set records are tagged:
{"type":"ball","center":[..],"radius":r}, {"type":"halfspace","normal":[..],
"offset":b}, {"type":"hyperplane",...}, {"type":"box","lo":[..],"hi":[..]},
{"type":"ellipsoid","center":[..],"axes":[..]}.  The bounding radius rho is
derived from the families.  All randomness flows from the file-level seed.

Exit codes: 0 success/Converged, 1 parse or validation error, 2 MaxSweeps,
3 projection iteration budget exceeded, 4 solver disagreement in `compare`.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    MaxIterExceeded,
    MaxOuterExceeded,
    ProblemValidationError,
)
from .operators import Family, SteeringSchedule, shlwb_project, validate_schedule
from .oracles import brute_force_pair, dini_monotonicity_check, fix_set_audit, uniqueness_certificate
from .sets import family_bounding_radius, set_from_dict
from .solver import (
    Problem,
    SolverOptions,
    extract_best_pair,
    run_ashlwb,
    run_cheney_goldstein,
    validate_problem,
)

_TOP_KEYS = {"dimension", "familyA", "familyB", "options", "seed"}
_FAMILY_KEYS = {"sets", "weights", "schedule"}
_SCHEDULE_KEYS = {"c", "k0", "p"}
_OPTION_KEYS = {"max_sweeps", "pair_gap_tol", "fixed_point_tol", "record_inner_steps"}


@dataclass
class ParsedProblem:
    problem: Problem
    dimension: int
    raw: dict  # canonical key-ordered form


def _reject_unknown(record: dict, allowed: set, where: str):
    for key in record:
        if key not in allowed:
            raise ValueError(f"unknown key {key!r} in {where}")


def _parse_family(record, dimension: int, where: str) -> Family:
    if not isinstance(record, dict):
        raise ValueError(f"{where} must be an object")
    _reject_unknown(record, _FAMILY_KEYS, where)
    if "sets" not in record or not record["sets"]:
        raise ValueError(f"{where} needs a nonempty 'sets' list")
    sets = tuple(set_from_dict(r) for r in record["sets"])
    for s in sets:
        if s.dim != dimension:
            raise ValueError(f"{where} contains a set of dimension {s.dim}, expected {dimension}")
    weights = record.get("weights")
    sched = record.get("schedule")
    if sched is not None:
        _reject_unknown(sched, _SCHEDULE_KEYS, f"{where}.schedule")
        schedule = SteeringSchedule(**{k: float(v) for k, v in sched.items()})
    else:
        schedule = SteeringSchedule()
    return Family(sets, weights, schedule)


def parse_problem(doc: dict) -> ParsedProblem:
    """Build a Problem from a decoded problem document (strict schema)."""
    if not isinstance(doc, dict):
        raise ValueError("problem file must contain a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "problem file")
    for key in ("dimension", "familyA", "familyB"):
        if key not in doc:
            raise ValueError(f"missing key {key!r} in problem file")
    dimension = doc["dimension"]
    if not isinstance(dimension, int) or dimension < 1:
        raise ValueError("'dimension' must be a positive integer")
    fam_a = _parse_family(doc["familyA"], dimension, "familyA")
    fam_b = _parse_family(doc["familyB"], dimension, "familyB")
    opts_rec = doc.get("options", {})
    _reject_unknown(opts_rec, _OPTION_KEYS, "options")
    options = SolverOptions(**opts_rec)
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ValueError("'seed' must be an integer")
    rho = max(
        family_bounding_radius(fam_a.sets), family_bounding_radius(fam_b.sets)
    )
    problem = Problem(fam_a, fam_b, rho, options, seed)
    return ParsedProblem(problem=problem, dimension=dimension, raw=serialize_problem(problem, dimension))


def serialize_problem(problem: Problem, dimension: int) -> dict:
    """Canonical key-ordered document for a problem (round-trip stable)."""

    def fam(f: Family):
        return {
            "sets": [s.to_dict() for s in f.sets],
            "weights": [float(w) for w in f.weights],
            "schedule": f.schedule.to_dict(),
        }

    o = problem.options
    return {
        "dimension": dimension,
        "familyA": fam(problem.family_a),
        "familyB": fam(problem.family_b),
        "options": {
            "max_sweeps": o.max_sweeps,
            "pair_gap_tol": o.pair_gap_tol,
            "fixed_point_tol": o.fixed_point_tol,
            "record_inner_steps": o.record_inner_steps,
        },
        "seed": problem.seed,
    }


def load_problem(path: str) -> ParsedProblem:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(
                f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    return parse_problem(doc)


def _parse_floats(text: str):
    return [float(t) for t in text.split(",") if t.strip() != ""]


def _with_overrides(parsed: ParsedProblem, args) -> Problem:
    problem = parsed.problem
    opts = problem.options
    changed = {}
    if getattr(args, "max_sweeps", None) is not None:
        changed["max_sweeps"] = args.max_sweeps
    if changed:
        opts = SolverOptions(
            max_sweeps=changed.get("max_sweeps", opts.max_sweeps),
            pair_gap_tol=opts.pair_gap_tol,
            fixed_point_tol=opts.fixed_point_tol,
            record_inner_steps=opts.record_inner_steps,
        )
    fam_a, fam_b = problem.family_a, problem.family_b
    if getattr(args, "schedule", None) is not None:
        c, k0, p = _parse_floats(args.schedule)
        sched = SteeringSchedule(c=c, k0=k0, p=p)
        fam_a = fam_a.with_schedule(sched)
        fam_b = fam_b.with_schedule(sched)
    seed = args.seed if getattr(args, "seed", None) is not None else problem.seed
    return Problem(fam_a, fam_b, problem.rho, opts, seed)


def _write_trace_csv(path: str, trace, dim: int):
    header = "k,phase,sweep,gap," + ",".join(f"coord_{d}" for d in range(dim))
    lines = [header]

    def row(k, phase, sweep, gap, x):
        coords = ",".join(repr(float(v)) for v in x)
        return f"{k},{phase},{sweep},{repr(float(gap))},{coords}"

    prev = trace.x0
    for e in trace.entries:
        if e.inner is not None:
            base = prev
            for step in e.inner:
                lines.append(
                    row(e.k, f"{e.phase}-inner", e.sweep, float(np.linalg.norm(step - base)), step)
                )
                base = step
        lines.append(row(e.k, e.phase, e.sweep, e.gap, e.x))
        prev = e.x
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _dump_json(path: str, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(args) -> int:
    parsed = load_problem(args.problem)
    problem = _with_overrides(parsed, args)
    x0 = np.array(_parse_floats(args.x0)) if args.x0 else None
    trace = run_ashlwb(problem, x0)
    pair = extract_best_pair(trace, problem)
    out = args.out or "trace"
    _write_trace_csv(out + ".csv", trace, problem.dim)
    summary = {
        "pair": pair.to_dict(),
        "gap": pair.gap,
        "terminal": trace.terminal,
        "sweeps": trace.sweeps,
        "x0_projected": trace.x0_projected,
    }
    _dump_json(out + ".json", summary)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if trace.terminal == "Converged" else 2


def cmd_project(args) -> int:
    parsed = load_problem(args.problem)
    fam = parsed.problem.family_a if args.family == "A" else parsed.problem.family_b
    point = np.array(_parse_floats(args.point))
    try:
        y = shlwb_project(fam, point, tol=args.tol)
    except MaxIterExceeded as exc:
        print(f"projection did not converge: last gap {exc.gap:.3e}", file=sys.stderr)
        return 3
    residuals = [float(v) for v in fam.member_distances(y)]
    print(json.dumps({"point": [float(v) for v in y], "member_residuals": residuals}, indent=2))
    return 0


def cmd_check(args) -> int:
    parsed = load_problem(args.problem)
    problem = parsed.problem
    mandatory_ok = True
    report = {"mandatory": {}, "advisory": {}}
    for label, fam in (("A", problem.family_a), ("B", problem.family_b)):
        sched_report = validate_schedule(fam.schedule, 10**5)
        report["mandatory"][f"schedule_{label}"] = sched_report.to_dict()
        if not sched_report.passed:
            mandatory_ok = False
    try:
        vrep = validate_problem(problem)
        report["mandatory"]["validation"] = {
            "passed": True,
            "distance_estimate": vrep.distance,
            "feasibility_a": vrep.feasibility_a,
            "feasibility_b": vrep.feasibility_b,
            "rho": problem.rho,
        }
    except (ProblemValidationError, MaxIterExceeded, MaxOuterExceeded) as exc:
        report["mandatory"]["validation"] = {"passed": False, "error": str(exc)}
        mandatory_ok = False

    if mandatory_ok:
        cert = uniqueness_certificate(problem)
        report["advisory"]["uniqueness"] = cert.to_dict()
        grid = _check_grid(problem.dim, problem.rho)
        for label, fam in (("A", problem.family_a), ("B", problem.family_b)):
            report["advisory"][f"dini_{label}"] = dini_monotonicity_check(fam, grid, 50).to_dict()
            report["advisory"][f"fix_set_{label}"] = _fix_set_for(fam, problem.rho).to_dict()
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if mandatory_ok else 1


def _check_grid(dim: int, rho: float):
    axes = [np.linspace(-rho, rho, 5)] * dim
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=-1)
    pts = pts[np.linalg.norm(pts, axis=1) <= rho]
    return pts[:625]


def _fix_set_for(fam: Family, rho: float):
    from .intersection import project_intersection

    seeds = np.zeros((2, fam.dim))
    seeds[1, 0] = rho / 2.0
    inside = project_intersection(fam, seeds, tol=1e-10)
    outside = np.zeros((2, fam.dim))
    outside[0, 0] = 1.05 * rho
    outside[1, -1] = -1.05 * rho
    return fix_set_audit(fam, 3, inside, outside)


def cmd_oracle(args) -> int:
    parsed = load_problem(args.problem)
    result = brute_force_pair(parsed.problem, args.resolution)
    print(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_compare(args) -> int:
    parsed = load_problem(args.problem)
    problem = _with_overrides(parsed, args)
    validate_problem(problem)
    trace = run_ashlwb(problem, validate=False)
    sweep_pair = extract_best_pair(trace, problem)
    baseline = run_cheney_goldstein(problem, validate=False)
    oracle = brute_force_pair(problem, args.resolution)
    rows = [
        ("a-s-hlwb", sweep_pair.gap, max(sweep_pair.residuals), sweep_pair.iterations),
        ("cheney-goldstein", baseline.gap, max(baseline.residuals), baseline.iterations),
        ("grid-oracle", oracle.gap, 0.0, None),
    ]
    print(f"{'method':<18}{'gap':<24}{'max residual':<16}iterations")
    for name, gap, resid, iters in rows:
        print(f"{name:<18}{gap:<24.12f}{resid:<16.3e}{iters if iters is not None else '-'}")
    gaps = [r[1] for r in rows]
    agree = max(gaps) - min(gaps) <= 1e-2
    print(f"agreement within 1e-2: {agree}")
    return 0 if agree else 4


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="bestpair",
        description="Best approximation pair between two disjoint intersections of convex sets.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the alternating sweep solver")
    run.add_argument("problem")
    run.add_argument("--x0", default=None, help="comma-separated start point (default origin)")
    run.add_argument("--out", default=None, help="output prefix for .csv/.json (default 'trace')")
    run.add_argument("--max-sweeps", type=int, default=None, dest="max_sweeps")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--schedule", default=None, help="override both schedules as 'c,k0,p'")
    run.set_defaults(func=cmd_run)

    proj = sub.add_parser("project", help="project a point onto one family's intersection")
    proj.add_argument("problem")
    proj.add_argument("--family", choices=("A", "B"), required=True)
    proj.add_argument("--point", required=True, help="comma-separated coordinates")
    proj.add_argument("--tol", type=float, default=1e-4)
    proj.set_defaults(func=cmd_project)

    chk = sub.add_parser("check", help="validate a problem and run advisory diagnostics")
    chk.add_argument("problem")
    chk.set_defaults(func=cmd_check)

    orc = sub.add_parser("oracle", help="brute-force ground-truth pair")
    orc.add_argument("problem")
    orc.add_argument("--resolution", type=float, default=0.01)
    orc.set_defaults(func=cmd_oracle)

    cmp_ = sub.add_parser("compare", help="compare solver, baseline and oracle")
    cmp_.add_argument("problem")
    cmp_.add_argument("--resolution", type=float, default=0.01)
    cmp_.add_argument("--max-sweeps", type=int, default=None, dest="max_sweeps")
    cmp_.add_argument("--schedule", default=None, help="override both schedules as 'c,k0,p'")
    cmp_.add_argument("--seed", type=int, default=None)
    cmp_.set_defaults(func=cmd_compare)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TypeError, DimensionMismatch, ProblemValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MaxOuterExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
