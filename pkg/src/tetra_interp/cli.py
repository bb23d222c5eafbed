"""Command-line front end.

Exit codes: 0 success, 1 verification failed, 2 input error, 3 exceptional
parameter, 4 Pick-matrix failure, 5 center search failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import io
from .blaschke import (
    blaschke_solution,
    build_parametrization,
    build_pick_matrix,
    choose_tau,
    is_positive_definite,
    validate_data,
    verify_blaschke_solution,
)
from .errors import (
    DenominatorVanishes,
    ExceptionalGeometry,
    ExceptionalParameter,
    InvalidData,
    NotPositiveDefinite,
    NotSolvable,
    TauSearchExhausted,
    TetraInterpError,
)
from .royal import (
    DEFAULT_TOL,
    Tolerances,
    assemble,
    royal_nodes,
    solve_center,
    validate_royal_data,
    verify_tetra_inner,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_EXCEPTIONAL, EXIT_PICK, EXIT_CENTER = 0, 1, 2, 3, 4, 5
SEED_ENV = "TETRA_INTERP_SEED"


@dataclass
class RunConfig:
    seed: int = 0
    n_omega: int = 4096
    circle_grid: int = 2048
    tolerances: dict = field(default_factory=dict)
    output_path: str | None = None

    def __post_init__(self):
        if self.n_omega < 64:
            raise InvalidData(f"--n-omega must be at least 64, got {self.n_omega}")
        if self.circle_grid < 64:
            raise InvalidData(f"--grid must be at least 64, got {self.circle_grid}")
        try:
            self.tol = DEFAULT_TOL.replace(**self.tolerances)
        except (KeyError, ValueError) as exc:
            raise InvalidData(str(exc.args[0])) from exc

    @property
    def tolerance_set(self) -> Tolerances:
        return self.tol


class CliError(Exception):
    def __init__(self, code: int, message: str, payload: dict | None = None):
        super().__init__(message)
        self.code = code
        self.payload = payload


def _parse_tol(items: list[str]) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise InvalidData(f"--tol expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError as exc:
            raise InvalidData(f"--tol {name}: {value!r} is not a number") from exc
    return out


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (fallback: ${SEED_ENV}, then 0)")
    common.add_argument("--n-omega", type=int, default=4096, help="center-search angle grid size")
    common.add_argument("--grid", type=int, default=2048, help="circle grid for boundary checks")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a named tolerance")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="tetra-interp",
        description="Rational tetra-inner functions from royal interpolation data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pick", parents=[common], help="Pick matrix and positivity verdict")
    p.add_argument("input")

    p = sub.add_parser("blaschke", parents=[common], help="one Blaschke solution for a parameter zeta")
    p.add_argument("input")
    p.add_argument("--zeta", nargs=2, type=float, required=True, metavar=("RE", "IM"))
    p.add_argument("--tau-angle", type=float, default=None, help="fix the base point angle")

    p = sub.add_parser("royal", parents=[common], help="solve a royal problem and verify the result")
    p.add_argument("input")
    p.add_argument("--tau-angle", type=float, default=None, help="fix the base point angle")

    p = sub.add_parser("verify", parents=[common], help="verify a serialized map against data")
    p.add_argument("x_file")
    p.add_argument("data_file")

    p = sub.add_parser("sample", parents=[common], help="boundary samples of a serialized map as CSV")
    p.add_argument("x_file")
    p.add_argument("--count", type=int, default=256)
    return parser


def _tau(data, args, cfg: RunConfig) -> complex:
    if args.tau_angle is not None:
        return complex(np.exp(1j * args.tau_angle))
    return choose_tau(data, seed=cfg.seed)


def cmd_pick(args, cfg: RunConfig) -> tuple[str, int]:
    data = validate_data(io.load_json(args.input))
    M = build_pick_matrix(data)
    pd = is_positive_definite(M)
    out = {
        "n": data.n,
        "k": data.k,
        "M": [[complex(v) for v in row] for row in M],
        "positive_definite": pd.positive_definite,
        "smallest_pivot": pd.smallest_pivot,
        "rank": pd.rank,
    }
    if pd.note:
        out["note"] = pd.note
    return io.dumps(out), EXIT_OK


def cmd_blaschke(args, cfg: RunConfig) -> tuple[str, int]:
    data = validate_data(io.load_json(args.input))
    zeta = complex(*args.zeta)
    if abs(abs(zeta) - 1) > 1e-9:
        raise InvalidData(f"zeta must be unimodular, |zeta| = {abs(zeta)!r}")
    par = build_parametrization(data, _tau(data, args, cfg))
    phi = blaschke_solution(par, zeta)
    report = verify_blaschke_solution(phi, data)
    out = {
        "tau": par.tau,
        "zeta": zeta,
        "Z_tau": list(par.Z_tau),
        "phi": io.rational_to_json(phi),
        "report": report.as_dict(),
    }
    return io.dumps(out), EXIT_OK


def cmd_royal(args, cfg: RunConfig) -> tuple[str, int]:
    data = validate_royal_data(io.load_json(args.input))
    par = build_parametrization(data.base, _tau(data.base, args, cfg))
    center = solve_center(data, par, n_omega=cfg.n_omega, tol=cfg.tol)
    x = assemble(par, center, cfg.tol)
    report = verify_tetra_inner(x, data, tol=cfg.tol, circle_points=cfg.circle_grid, seed=cfg.seed)
    try:
        cat = royal_nodes(x, cfg.tol)
        nodes, typ = [io.node_to_json(nd) for nd in cat.nodes], list(cat.type)
    except TetraInterpError as exc:
        nodes, typ = f"{type(exc).__name__}: {exc}", None
    out = {
        "x": io.tetra_to_json(x),
        "center": io.center_to_json(center),
        "royal_nodes": nodes,
        "type": typ,
        "report": report.as_dict(),
    }
    return io.dumps(out), EXIT_OK if report.passed else EXIT_FAILED


def _load_tetra(path):
    raw = io.load_json(path)
    # accept the full output of ``royal`` as well as the bare map
    return io.tetra_from_json(raw["x"] if isinstance(raw.get("x"), dict) and "center" in raw["x"] else raw)


def cmd_verify(args, cfg: RunConfig) -> tuple[str, int]:
    x = _load_tetra(args.x_file)
    data = validate_royal_data(io.load_json(args.data_file))
    report = verify_tetra_inner(x, data, tol=cfg.tol, circle_points=cfg.circle_grid, seed=cfg.seed)
    return io.dumps(report.as_dict()), EXIT_OK if report.passed else EXIT_FAILED


def cmd_sample(args, cfg: RunConfig) -> tuple[str, int]:
    if args.count <= 0:
        raise InvalidData(f"--count must be positive, got {args.count}")
    x = _load_tetra(args.x_file)
    theta = 2 * np.pi * np.arange(args.count) / args.count
    v1, v2, v3 = x(np.exp(1j * theta))
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "x1_re", "x1_im", "x2_re", "x2_im", "x3_re", "x3_im", "x3_modulus_dev", "coupling_dev"])
    for t, a, b, c in zip(theta, v1, v2, v3):
        row = [t, a.real, a.imag, b.real, b.imag, c.real, c.imag, abs(abs(c) - 1), abs(a - np.conj(b) * c)]
        w.writerow([format(float(v), ".17g") for v in row])
    return buf.getvalue(), EXIT_OK


COMMANDS = {
    "pick": cmd_pick,
    "blaschke": cmd_blaschke,
    "royal": cmd_royal,
    "verify": cmd_verify,
    "sample": cmd_sample,
}


def _run(args) -> tuple[str, int]:
    cfg = RunConfig(
        seed=args.seed if args.seed is not None else _default_seed(),
        n_omega=args.n_omega,
        circle_grid=args.grid,
        tolerances=_parse_tol(args.tol),
        output_path=args.out,
    )
    try:
        return COMMANDS[args.command](args, cfg)
    except ExceptionalParameter as exc:
        raise CliError(EXIT_EXCEPTIONAL, str(exc)) from exc
    except (NotPositiveDefinite, TauSearchExhausted) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, NotPositiveDefinite):
            payload.update(rank=exc.rank, smallest_pivot=exc.smallest_pivot)
        raise CliError(EXIT_PICK, str(exc), payload) from exc
    except (NotSolvable, ExceptionalGeometry, DenominatorVanishes) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, NotSolvable):
            payload.update(best_residual=exc.best_residual, best_angle=exc.best_angle)
        raise CliError(EXIT_CENTER, str(exc), payload) from exc


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        text, code = _run(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.payload is not None:
            _emit(io.dumps(exc.payload), args.out)
        return exc.code
    except InvalidData as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TetraInterpError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(text, args.out)
    return code


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
