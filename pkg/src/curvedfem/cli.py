"""Command-line driver: ``curvedfem {mesh,solve,verify}``.

Every exit path prints one ``RESULT:`` line. Exit codes: 0 success,
1 usage/configuration error, 2 Picard non-convergence, 3 geometry,
solver or verification failure.
"""

import argparse
import json
import logging
import sys

from . import generators
from .assembly import NATURAL, BoundaryData
from .errors import ConfigurationError, CurvedFemError, GeometryError, MeshParseError, SolverError
from .expr import Expression
from .mesh import read_mesh, validate_mesh, write_mesh
from .output import write_solution_vtk, write_trace_csv
from .solver import PicardConfig, picard_solve
from .verification import VERIFY_CONFIG, convergence_study, manufactured_square_case, write_report_csv

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_FAILURE = 0, 1, 2, 3

CASES = ("square-manufactured",)
DOMAINS = {"square": "unit_square", "vnotch": "v_notch", "vnotch-inclusions": "v_notch_with_inclusions"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def result(status, **fields):
    parts = [f"status={status}"] + [f"{k}={v}" for k, v in fields.items()]
    print("RESULT: " + " ".join(parts))


def build_parser():
    parser = _Parser(prog="curvedfem", description="Cubic curved-triangle FEM for strain-limiting anti-plane shear.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("mesh", help="generate a mesh and write it as JSON")
    p.add_argument("--domain", required=True, choices=sorted(DOMAINS))
    p.add_argument("--elements", type=int, choices=(8, 16, 32), help="square meshes only")
    p.add_argument("--h", type=float, help="target element size (notched domains)")
    p.add_argument("--config", help="JSON domain specification")
    p.add_argument("-o", "--output")

    p = sub.add_parser("solve", help="run the Picard solver on a mesh")
    p.add_argument("--mesh", required=True)
    p.add_argument("--bc", required=True, help="JSON object: label -> expression or 'natural'")
    p.add_argument("--rhs", default=None, help="body term f(x, y); default 0")
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--quadrature-degree", type=int, default=8, choices=(2, 5, 8))
    p.add_argument("-o", "--output", required=True, help="solution file (.vtk)")
    p.add_argument("--trace", required=True, help="iteration trace CSV")

    p = sub.add_parser("verify", help="manufactured-solution error study")
    p.add_argument("--case", default="square-manufactured")
    p.add_argument("--elements", default="8,16,32")
    p.add_argument("-o", "--output", required=True)
    return parser


def cmd_mesh(args):
    variant = DOMAINS[args.domain]
    if variant == "unit_square":
        if args.elements is None:
            raise UsageError("mesh: --elements is required for --domain square")
        mesh = generators.generate_square_mesh(args.elements)
    else:
        if args.elements is not None:
            raise UsageError("mesh: --elements applies to --domain square only")
        if args.config:
            with open(args.config) as fh:
                data = json.load(fh)
            data.setdefault("variant", variant)
            if data["variant"] != variant:
                raise UsageError(f"mesh: config variant {data['variant']!r} does not match --domain {args.domain}")
            spec = generators.DomainSpec.from_dict(data)
        else:
            spec = generators.DomainSpec.default(variant)
        if args.h is not None and not args.h > 0:
            raise UsageError("mesh: --h must be positive")
        mesh = generators.generate_mesh(spec, args.h)
    report = validate_mesh(mesh)
    if not report.ok:
        print(report, file=sys.stderr)
        result("invalid-mesh", findings=len(report.findings))
        return EXIT_FAILURE
    if args.output:
        write_mesh(mesh, args.output)
    stats = mesh.stats.line()
    print(stats)
    result("ok", **dict(kv.split("=") for kv in stats.split()))
    return EXIT_OK


def load_bc(path, mesh):
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: boundary conditions must be a JSON object")
    mapping = {}
    for label, value in raw.items():
        if value is None or value == NATURAL:
            mapping[label] = None
        else:
            mapping[label] = Expression(value)
    # inclusion boundaries are traction free unless the file says otherwise
    for label in mesh.boundary_groups:
        if label.startswith("inclusion") and label not in mapping:
            mapping[label] = None
    return BoundaryData.from_functions(mapping)


def cmd_solve(args):
    mesh = read_mesh(args.mesh)
    bc = load_bc(args.bc, mesh)
    bc.check_covers(mesh)
    f = Expression(args.rhs) if args.rhs else None
    config = PicardConfig(args.max_iters, args.tol, args.mu, args.quadrature_degree)
    sol = picard_solve(mesh, bc, f, config=config)
    write_solution_vtk(mesh, sol.nodal_values, args.output)
    write_trace_csv(sol.trace, args.trace)
    last = sol.trace.diffs[-1] if sol.trace.diffs else 0.0
    status = "converged" if sol.trace.converged else "not-converged"
    result(status, iterations=sol.trace.iterations_used, last_diff=f"{last:.6e}")
    return EXIT_OK if sol.trace.converged else EXIT_NOT_CONVERGED


def cmd_verify(args):
    if args.case not in CASES:
        raise UsageError(f"verify: unknown case {args.case!r}; choose from {', '.join(CASES)}")
    try:
        counts = [int(c) for c in args.elements.split(",") if c.strip()]
    except ValueError:
        raise UsageError(f"verify: bad --elements {args.elements!r}") from None
    if not counts or any(c not in (8, 16, 32) for c in counts):
        raise UsageError("verify: --elements takes a comma list drawn from 8,16,32")
    reports = convergence_study(manufactured_square_case(), counts, VERIFY_CONFIG)
    write_report_csv(reports, args.output)
    worst = max(r.l2 for r in reports)
    ok = worst <= 1e-6
    result("ok" if ok else "failed", meshes=len(reports), max_l2=f"{worst:.4e}")
    return EXIT_OK if ok else EXIT_FAILURE


COMMANDS = {"mesh": cmd_mesh, "solve": cmd_solve, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: mesh, solve or verify")
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        result("usage-error", message=json.dumps(str(exc)))
        return EXIT_USAGE
    except (ConfigurationError, MeshParseError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        result("config-error", message=json.dumps(str(exc)))
        return EXIT_USAGE
    except (GeometryError, SolverError, CurvedFemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        result("failure", message=json.dumps(str(exc)))
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
