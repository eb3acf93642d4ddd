"""Command-line interface.

Subcommands mirror the pipeline stages (vertices, symmetrize, facets,
extend, check, classify, lift, local-test, quantum, pipeline, render).
Exit codes: 0 success, 2 verification failure, 3 budget exhaustion.
BELLSCOPE_BUDGET_SECS overrides the default enumeration budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from .canon import classify
from .catalog import render_cg_table, run_pipeline, verify_catalog
from .data import bundled_inequality
from .dd import DDState
from .errors import BellscopeError, BudgetExhausted, VerificationError
from .linalg import affine_rank
from .polytope import (Inequality, facet_enumeration, is_local_lp,
                       is_valid, lift_to_facets, polytope_hull,
                       saturating_vertices, symmetric_extension)
from .scenario import CorrelationVector, Model, ParamTag, Scenario
from .symmetry import build_symmetric_subspace, project_vertices_symmetric
from .vertices import (Polytope, enumerate_local_vertices,
                       enumerate_svetlichny_vertices, project_full_correlators)
from .quantumeval import (QuantumSetup, correlations, evaluate, ghz_state,
                          visibility_threshold, w_state)

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_BUDGET = 3


def _parse_scenario(text: str, model: str = "local") -> Scenario:
    parts = [int(t) for t in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("scenario must be n,m,k")
    return Scenario(parts[0], parts[1], parts[2], Model(model))


def _load_polytope(path: str) -> Polytope:
    with open(path) as fh:
        return Polytope.from_json(json.load(fh))


def _load_inequality(spec: str) -> Inequality:
    if spec.startswith("builtin:"):
        return bundled_inequality(spec.split(":", 1)[1])
    with open(spec) as fh:
        return Inequality.from_json(json.load(fh))


def _budget(args) -> float | None:
    if getattr(args, "budget", None):
        return float(args.budget)
    env = os.environ.get("BELLSCOPE_BUDGET_SECS")
    return float(env) if env else None


def _write_json(path: str, data) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# subcommands

def cmd_vertices(args) -> int:
    sc = _parse_scenario(args.scenario, args.model)
    if sc.model == Model.SVETLICHNY:
        poly = enumerate_svetlichny_vertices(sc)
    elif sc.model == Model.FULL_CORRELATOR:
        full = enumerate_local_vertices(sc, ParamTag.FULL_PROBABILITY)
        poly = project_full_correlators(full)
    else:
        param = ParamTag(args.param)
        poly = enumerate_local_vertices(sc, param)
    _write_json(args.out, poly.to_json())
    print(f"{len(poly)} vertices in dim {poly.dim_ambient} -> {args.out}")
    return EXIT_OK


def cmd_symmetrize(args) -> int:
    poly = _load_polytope(args.infile)
    sub = build_symmetric_subspace(poly.scenario, poly.param)
    sym = project_vertices_symmetric(poly, sub)
    _write_json(args.out, sym.to_json())
    print(f"{len(sym)} extremal symmetric points "
          f"({sub.d_s} orbit classes) -> {args.out}")
    return EXIT_OK


def cmd_facets(args) -> int:
    poly = _load_polytope(args.infile)
    deadline = None
    budget = _budget(args)
    if budget:
        deadline = time.monotonic() + budget
    state = None
    if args.checkpoint and os.path.exists(args.checkpoint):
        with open(args.checkpoint) as fh:
            state = DDState.from_json(json.load(fh)["dd_state"])
        print(f"resuming at constraint {state.inserted}")
    try:
        facets = facet_enumeration(poly, deadline=deadline, state=state)
    except BudgetExhausted as exc:
        if args.checkpoint and exc.checkpoint is not None:
            _write_json(args.checkpoint, {"dd_state": exc.checkpoint})
            print(f"budget exhausted; checkpoint -> {args.checkpoint}")
        else:
            print("budget exhausted (no checkpoint path given)")
        return EXIT_BUDGET
    _write_json(args.out, [f.to_json() for f in facets])
    print(f"{len(facets)} facets -> {args.out}")
    return EXIT_OK


def cmd_extend(args) -> int:
    with open(args.infile) as fh:
        facets = [Inequality.from_json(d) for d in json.load(fh)]
    out = []
    for f in facets:
        out.append((symmetric_extension(f) if f.basis is not None else f).to_json())
    _write_json(args.out, out)
    print(f"{len(out)} extended inequalities -> {args.out}")
    return EXIT_OK


def cmd_check(args) -> int:
    ineq = _load_inequality(args.ineq)
    poly = _load_polytope(args.vertices)
    if ineq.basis is not None:
        ineq = symmetric_extension(ineq)
    valid = is_valid(ineq, poly)
    hull = polytope_hull(poly)
    if valid:
        sat = saturating_vertices(ineq, poly)
        rank = affine_rank(sat) if sat else 0
        facet = rank == hull.dim
        print(f"valid: yes   facet: {'yes' if facet else 'no'}   "
              f"saturating-rank: {rank}/{hull.dim}   |W|: {len(sat)}")
        return EXIT_OK
    worst = max(ineq.evaluate(v) for v in poly.vertices)
    print(f"valid: NO   (max violation over vertices: {worst})")
    return EXIT_VERIFY


def cmd_classify(args) -> int:
    with open(args.infile) as fh:
        ineqs = [Inequality.from_json(d) for d in json.load(fh)]
    ineqs = [symmetric_extension(i) if i.basis is not None else i for i in ineqs]
    classes = classify(ineqs)
    out = []
    for idx, cls in enumerate(classes):
        out.append({
            "index": idx,
            "members": cls.members,
            "representative": cls.representative.to_json(),
            "key": {"bound": cls.key.bound,
                    "multisets": [list(t) for t in cls.key.multisets]},
            "cg_table": render_cg_table(cls.representative),
            "undecided": cls.undecided,
        })
    _write_json(args.out, out)
    print(f"{len(ineqs)} inequalities -> {len(classes)} classes -> {args.out}")
    return EXIT_OK


def cmd_lift(args) -> int:
    ineq = _load_inequality(args.ineq)
    poly = _load_polytope(args.vertices)
    if ineq.basis is not None:
        ineq = symmetric_extension(ineq)
    facets = lift_to_facets(ineq, poly, deadline=None)
    _write_json(args.out, [f.to_json() for f in facets])
    print(f"{len(facets)} facets containing the input face -> {args.out}")
    return EXIT_OK


def cmd_local_test(args) -> int:
    with open(args.point) as fh:
        p = CorrelationVector.from_json(json.load(fh))
    poly = _load_polytope(args.vertices)
    res = is_local_lp(p, poly)
    if res.inside:
        print("inside: convex decomposition found")
        if args.out:
            from .rational import vector_to_json
            _write_json(args.out, {"inside": True,
                                   "weights": vector_to_json(res.weights)})
    else:
        print("outside: separating inequality found")
        print(render_cg_table(res.certificate))
        if args.out:
            _write_json(args.out, {"inside": False,
                                   "certificate": res.certificate.to_json()})
    return EXIT_OK


def cmd_quantum(args) -> int:
    ineq = _load_inequality(args.ineq)
    n = ineq.scenario.n
    if args.state == "w4":
        state = w_state(4)
    elif args.state.startswith("w:"):
        state = w_state(int(args.state.split(":")[1]))
    elif args.state.startswith("ghz:"):
        state = ghz_state(n, float(args.state.split(":")[1]))
    elif args.state == "ghz":
        state = ghz_state(n)
    else:
        raise BellscopeError(f"unknown state spec {args.state!r}")
    with open(args.angles) as fh:
        angles = json.load(fh)
    setup = QuantumSetup(ineq.scenario, state, angles, args.visibility)
    value = evaluate(ineq, correlations(setup))
    report = {
        "value": value + float(ineq.bound),
        "bound": float(ineq.bound),
        "violation": value > 0,
        "margin": value,
    }
    if args.visibility_scan:
        report["threshold"] = visibility_threshold(ineq, setup)
    print(json.dumps(report, indent=1))
    if args.out:
        _write_json(args.out, report)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    sc = _parse_scenario(args.scenario, args.model)
    try:
        catalog = run_pipeline(
            sc, sc.model, budget_secs=_budget(args),
            checkpoint_path=args.checkpoint, ns_project=not args.no_ns_project,
            out_path=args.out, threads=args.threads, log=print)
    except BudgetExhausted:
        print("budget exhausted; partial catalog and checkpoint written")
        return EXIT_BUDGET
    if args.verify:
        with open(args.out) as fh:
            data = json.load(fh)
        try:
            verify_catalog(data)
        except VerificationError as exc:
            print(f"catalog verification FAILED: {exc}")
            return EXIT_VERIFY
        print("catalog verification passed")
    counts = catalog.meta["counts"]
    print(json.dumps(counts, indent=1))
    return EXIT_OK


def cmd_render(args) -> int:
    ineq = _load_inequality(args.ineq)
    print(render_cg_table(ineq))
    return EXIT_OK


def cmd_verify_catalog(args) -> int:
    with open(args.infile) as fh:
        data = json.load(fh)
    try:
        verify_catalog(data)
    except VerificationError as exc:
        print(f"verification FAILED: {exc}")
        return EXIT_VERIFY
    print("catalog verification passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bellscope",
        description="exact party-symmetric Bell-inequality enumeration")
    ap.add_argument("--version", action="version",
                    version=f"bellscope {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vertices", help="enumerate extremal points")
    p.add_argument("--scenario", required=True, help="n,m,k")
    p.add_argument("--model", default="local",
                   choices=["local", "svetlichny", "fullcorr"])
    p.add_argument("--param", default="ns", choices=["ns", "full"],
                   help="parametrization for local vertices")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_vertices)

    p = sub.add_parser("symmetrize", help="project vertices onto the "
                       "party-symmetric subspace and keep extremal points")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_symmetrize)

    p = sub.add_parser("facets", help="facet enumeration (V to H)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--budget", type=float, help="seconds")
    p.add_argument("--checkpoint")
    p.set_defaults(fn=cmd_facets)

    p = sub.add_parser("extend", help="symmetric extension to the full space")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_extend)

    p = sub.add_parser("check", help="validity / facet verdict")
    p.add_argument("--ineq", required=True, help="file or builtin:NAME")
    p.add_argument("--vertices", required=True)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("classify", help="group into relabeling classes")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("lift", help="facets containing a valid inequality's face")
    p.add_argument("--ineq", required=True)
    p.add_argument("--vertices", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_lift)

    p = sub.add_parser("local-test", help="exact LP membership with certificate")
    p.add_argument("--point", required=True)
    p.add_argument("--vertices", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_local_test)

    p = sub.add_parser("quantum", help="evaluate an inequality on a quantum setup")
    p.add_argument("--state", required=True, help="w4 | w:N | ghz |ghz:THETA")
    p.add_argument("--angles", required=True, help="JSON n x m angle table")
    p.add_argument("--ineq", required=True)
    p.add_argument("--visibility", type=float, default=1.0)
    p.add_argument("--visibility-scan", action="store_true")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_quantum)

    p = sub.add_parser("pipeline", help="vertices to classified catalog")
    p.add_argument("--scenario", required=True)
    p.add_argument("--model", default="local",
                   choices=["local", "svetlichny", "fullcorr"])
    p.add_argument("--out", required=True)
    p.add_argument("--budget", type=float)
    p.add_argument("--checkpoint")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-ns-project", action="store_true",
                   help="Svetlichny: flag facets of the raw polytope instead")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(fn=cmd_pipeline)

    p = sub.add_parser("render", help="Collins-Gisin table / term rendering")
    p.add_argument("--ineq", required=True)
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("verify-catalog", help="re-verify a stored catalog")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(fn=cmd_verify_catalog)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BudgetExhausted:
        print("budget exhausted", file=sys.stderr)
        return EXIT_BUDGET
    except BellscopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
