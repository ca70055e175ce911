"""Command-line interface: one subcommand per library operation.

Results are emitted as JSON on standard output.  Exit codes: 0 on success,
1 on validation errors (bad inputs, failed verification), 2 on solver
failures, 64 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import bellnorm, compat, games, scan, verify
from .errors import SolverError, ValidationError
from .measurements import tuple_from_shorthand

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _grid(spec: str) -> list[float]:
    """Parse a grid flag: either "a:b:step" or a comma-separated list."""
    try:
        if ":" in spec:
            a, b, step = (float(s) for s in spec.split(":"))
            if step <= 0:
                raise ValidationError(f"grid step must be positive in {spec!r}")
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            if count < 1:
                raise ValidationError(f"empty grid {spec!r}")
            return [a + k * step for k in range(count)]
        return [float(s) for s in spec.split(",") if s != ""]
    except ValueError as exc:
        raise ValidationError(f"bad grid specification {spec!r}") from exc


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool):
        return obj
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def _emit(result: dict, pretty: bool):
    print(json.dumps(_jsonable(result), indent=2 if pretty else None,
                     sort_keys=True))


def _build_parser() -> _Parser:
    parser = _Parser(prog="belltensor",
                     description="Tensor norms linking measurement "
                                 "incompatibility and Bell non-locality.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true",
                        help="indent the JSON output")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    _orig_add_parser = sub.add_parser

    def add_parser(*a, **kw):
        kw.setdefault("parents", [common])
        return _orig_add_parser(*a, **kw)

    sub.add_parser = add_parser

    def tuple_arg(p):
        p.add_argument("--tuple", required=True, metavar="SPEC",
                       help='measurement tuple: "pauli:x,y,z" or a JSON path')

    def game_arg(p):
        p.add_argument("--game", required=True, metavar="ID",
                       help='game: chsh | mt:<t> | gpq:<p>:<q> | i3322 | path')

    p = sub.add_parser("norm-m", help="game-locality norm of a tuple")
    tuple_arg(p); game_arg(p)

    p = sub.add_parser("norm-c", help="compatibility norm of a tuple")
    tuple_arg(p)

    p = sub.add_parser("gamma", help="white-noise compatibility threshold")
    tuple_arg(p)

    p = sub.add_parser("compatible", help="decide compatibility, certify yes")
    tuple_arg(p)
    p.add_argument("--emit-certificate", metavar="OUT.json", default=None)

    p = sub.add_parser("bias", help="classical bias of a game")
    game_arg(p)

    p = sub.add_parser("qbias", help="quantum bias of a game (Tsirelson SDP)")
    game_arg(p)

    p = sub.add_parser("uncertainty", help="bias-inverse uncertainty product")
    game_arg(p)

    p = sub.add_parser("seesaw", help="see-saw lower bound on the norm")
    tuple_arg(p); game_arg(p)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("scan", help="parameter sweep over a game family")
    p.add_argument("family", choices=("mt", "gpq"))
    p.add_argument("--y", default=None, metavar="A:B:STEP")
    p.add_argument("--t", default=None, metavar="A:B:STEP")
    p.add_argument("--p", default=None, metavar="A:B:STEP")
    p.add_argument("--q", default=None, metavar="A:B:STEP")
    p.add_argument("--out", required=True, metavar="OUT.csv")
    p.add_argument("--svg", default=None, metavar="OUT.svg")
    p.add_argument("--kind", choices=("region", "curves"), default="region")

    p = sub.add_parser("verify", help="run the self-verification suite")
    p.add_argument("--only", default=None, metavar="NAME[,NAME...]",
                   help="comma-separated criterion names")
    return parser


def _run(args) -> tuple[dict, int]:
    if args.command == "norm-m":
        A = tuple_from_shorthand(args.tuple)
        M = games.game_from_id(args.game)
        return {"norm_m": bellnorm.m_bell_norm(A, M),
                "game_invertible": M.invertible}, EXIT_OK
    if args.command == "norm-c":
        A = tuple_from_shorthand(args.tuple)
        return {"norm_c": compat.compatibility_norm(A)}, EXIT_OK
    if args.command == "gamma":
        A = tuple_from_shorthand(args.tuple)
        return {"gamma": compat.gamma_threshold(A)}, EXIT_OK
    if args.command == "compatible":
        A = tuple_from_shorthand(args.tuple)
        flag, cert = compat.is_compatible(A)
        out = {"compatible": flag, "certificate": None}
        if flag and args.emit_certificate:
            try:
                with open(args.emit_certificate, "w") as fh:
                    json.dump(compat.joint_povm_to_json(cert), fh, indent=2)
            except OSError as exc:
                raise ValidationError(
                    f"cannot write certificate to {args.emit_certificate!r}: "
                    f"{exc}") from exc
            out["certificate"] = args.emit_certificate
        return out, EXIT_OK
    if args.command == "bias":
        M = games.game_from_id(args.game)
        return {"classical_bias": games.classical_bias(M)}, EXIT_OK
    if args.command == "qbias":
        M = games.game_from_id(args.game)
        return {"quantum_bias": games.quantum_bias_sdp(M)}, EXIT_OK
    if args.command == "uncertainty":
        M = games.game_from_id(args.game)
        return {"uncertainty_product": games.uncertainty_product(M),
                "lower_bound": math.sqrt(M.n / 2.0),
                "hadamard": games.is_scaled_hadamard(M.m)}, EXIT_OK
    if args.command == "seesaw":
        A = tuple_from_shorthand(args.tuple)
        M = games.game_from_id(args.game)
        res = bellnorm.seesaw_bias(A, M, restarts=args.restarts,
                                   iters=args.iters, seed=args.seed)
        return {"value": res.value,
                "norm_m": bellnorm.m_bell_norm(A, M),
                "iterations": res.iterations,
                "converged": res.converged,
                "seed": args.seed}, EXIT_OK
    if args.command == "scan":
        y = _grid(args.y) if args.y else None
        if args.family == "mt":
            t = _grid(args.t) if args.t else None
            grid = scan.scan_deformed_chsh(y_grid=y, t_grid=t)
        else:
            p = _grid(args.p) if args.p else None
            q = _grid(args.q) if args.q else None
            grid = scan.scan_biased_chsh(y_grid=y, p_grid=p, q_grid=q)
        scan.emit_csv(grid, args.out)
        if args.svg:
            scan.emit_svg(grid, args.svg, kind=args.kind)
        return {"records": len(grid), "csv": args.out,
                "svg": args.svg, "violated": sum(r["violated"] for r in grid)
                }, EXIT_OK
    if args.command == "verify":
        names = args.only.split(",") if args.only else None
        results = verify.run_all(names=names, stream=sys.stderr)
        if names is not None and len(results) != len(names):
            known = {n for n, _ in verify.CRITERIA}
            raise ValidationError(
                f"unknown criterion names: {sorted(set(names) - known)}")
        report = {"criteria": [{"name": r.name, "passed": r.passed,
                                "seconds": r.seconds, "detail": r.detail}
                               for r in results],
                  "all_passed": all(r.passed for r in results)}
        return report, EXIT_OK if report["all_passed"] else EXIT_VALIDATION
    raise _UsageError(f"unknown command {args.command!r}")


_GRID_FLAGS = ("--y", "--t", "--p", "--q")


def _join_grid_flags(argv) -> list:
    """Fold "--y -1:1:0.5" into "--y=-1:1:0.5" so negative grid bounds are
    not mistaken for option flags."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in _GRID_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_join_grid_flags(argv))
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit:
        # argparse exits directly for --help; treat as success.
        return EXIT_OK
    try:
        result, code = _run(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _emit(result, args.pretty)
    return code


if __name__ == "__main__":
    sys.exit(main())
