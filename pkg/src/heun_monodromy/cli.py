"""Command-line front end.

Exit codes: 0 all requested checks pass, 1 a tolerance budget failed,
2 the parameter point is degenerate (vanishing D factor or cos(phi(0))),
3 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import (
    DegenerateAtOne,
    GenericityViolated,
    HeunMonodromyError,
    NonIntegerOrder,
    NonPositiveOmega,
    ToleranceNotMet,
)
from .heunpoly import (
    NumericQuad,
    check_ode_system,
    check_parity,
    diagonal,
    first_integral,
)
from .jsonio import canonical_json
from .params import ModelParams
from .phase import TOL_MAX, TOL_MIN, solve_phase
from .verify import ALL_CHECKS, run_battery

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_DEGENERATE = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract wants 3
        raise UsageError(message)


def _add_point_args(p: argparse.ArgumentParser):
    p.add_argument("--ell", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--phi0", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--grid", type=int, default=1001)


def _params(args) -> ModelParams:
    try:
        return ModelParams(ell=args.ell, mu=args.mu, omega=args.omega)
    except NonPositiveOmega as exc:
        raise UsageError(str(exc)) from exc


def _validate_common(args):
    if not (TOL_MIN <= args.tol <= TOL_MAX):
        raise UsageError(f"--tol must lie in [{TOL_MIN}, {TOL_MAX}]")
    if args.grid < 101:
        raise UsageError("--grid must be >= 101")


def _parse_rhos(text: str | None) -> list[float]:
    if not text:
        return [0.8, 1.25]
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --rhos value {text!r}") from exc


def cmd_solve(args) -> int:
    _validate_common(args)
    params = _params(args)
    path = solve_phase(params, args.phi0, tol=args.tol)
    t = np.linspace(path.t_min, path.t_max, args.grid)
    phi_vals, P_vals = path.eval(t)
    lines = ["t,phi,P"]
    for ti, pi, Pi in zip(t, phi_vals, P_vals):
        lines.append(f"{ti:.17g},{pi:.17g},{Pi:.17g}")
    csv_text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.circle_out:
        from .circle import theta_pair_solve

        pair = theta_pair_solve(path, tol=args.tol)
        tc = np.linspace(-params.T / 2, params.T / 2, args.grid)
        F = np.exp(1j * path.phi(tc))
        psi = np.exp(path.P(tc))
        th = pair.theta(tc)
        tht = pair.theta_tilde(tc)
        rows = ["t,re_phi,im_phi,psi,re_theta,im_theta,re_theta_tilde,im_theta_tilde"]
        for i, ti in enumerate(tc):
            rows.append(
                f"{ti:.17g},{F[i].real:.17g},{F[i].imag:.17g},{psi[i]:.17g},"
                f"{th[i].real:.17g},{th[i].imag:.17g},{tht[i].real:.17g},{tht[i].imag:.17g}"
            )
        with open(args.circle_out, "w") as fh:
            fh.write("\n".join(rows) + "\n")
    summary = {
        "params": {"ell": params.ell, "mu": params.mu, "omega": params.omega},
        "phi0": args.phi0,
        "tol": args.tol,
        "err_est": path.err_est,
        "window": [path.t_min, path.t_max],
        "rows": args.grid,
    }
    sys.stderr.write(canonical_json(summary) + "\n")
    return EXIT_OK


def cmd_poly(args) -> int:
    if not (1 <= args.ell_int <= 32):
        raise UsageError("--ell must be an integer in 1..32")
    quad = diagonal(args.ell_int)
    names = ("p", "q", "r", "s")
    out = []
    for name, poly in zip(names, quad.as_tuple()):
        out.append(f"{name} = {poly.canonical_text()}")
    D = first_integral(quad)
    from .exactpoly import LaurentPoly

    d_poly = LaurentPoly({0: D})
    out.append(f"D = {d_poly.canonical_text()}")
    sys.stdout.write("\n".join(out) + "\n")
    obj = {name: poly.to_json_obj() for name, poly in zip(names, quad.as_tuple())}
    obj["D"] = d_poly.to_json_obj()
    sys.stdout.write(canonical_json(obj) + "\n")
    if args.check:
        ok_p, wit_p = check_parity(quad)
        ok_o, wit_o = check_ode_system(quad)
        if not (ok_p and ok_o):
            sys.stderr.write(f"exact checks failed: {wit_p or ''} {wit_o or ''}\n")
            return EXIT_TOLERANCE
        sys.stderr.write("exact checks passed\n")
    return EXIT_OK


def _battery_exit(failures: list[str]) -> int:
    return EXIT_OK if not failures else EXIT_TOLERANCE


def cmd_verify(args) -> int:
    _validate_common(args)
    params = _params(args)
    checks = tuple(args.checks.split(",")) if args.checks else ALL_CHECKS
    for c in checks:
        if c not in ALL_CHECKS:
            raise UsageError(f"unknown check {c!r}; choose from {','.join(ALL_CHECKS)}")
    report, failures = run_battery(
        params,
        args.phi0,
        tol=args.tol,
        grid_size=args.grid,
        rhos=_parse_rhos(args.rhos),
        checks=checks,
    )
    text = canonical_json(report) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return _battery_exit(failures)


def cmd_monodromy(args) -> int:
    _validate_common(args)
    params = _params(args)
    from .monodromy import verify_monodromy

    path = solve_phase(params, args.phi0, tol=args.tol)
    rep = verify_monodromy(path, grid_size=args.grid, rhos=_parse_rhos(args.rhos), tol=args.tol)
    obj = rep.to_json_obj()
    sys.stdout.write(canonical_json(obj) + "\n")
    from .verify import BUDGETS

    ok = (
        obj["sup_residual_circle"] <= BUDGETS["monodromy_sup"]
        and obj["boundary_residual"] <= BUDGETS["monodromy_boundary"]
        and all(res <= BUDGETS["ray_residual"] for _, res in obj["ray_residuals"])
    )
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_sqrt_monodromy(args) -> int:
    _validate_common(args)
    params = _params(args)
    ell = params.ell_int
    if ell is None:
        raise NonIntegerOrder(f"ell={params.ell} is not a positive integer")
    nq = NumericQuad(diagonal(ell), params)
    if not nq.generic:
        raise GenericityViolated(f"D+={nq.d_plus:.3e}, D-={nq.d_minus:.3e}")
    path = solve_phase(params, args.phi0, tol=args.tol)
    from .verify import check_theorem2

    rep, failures = check_theorem2(path, nq, args.grid, args.tol)
    sys.stdout.write(canonical_json({"theorem2": rep}) + "\n")
    return _battery_exit(failures)


def _sweep_one(point: dict, tol: float, grid: int, checks: tuple[str, ...]):
    params = ModelParams(ell=point["ell"], mu=point["mu"], omega=point["omega"])
    try:
        report, failures = run_battery(
            params, point.get("phi0", 0.0), tol=tol, grid_size=grid, checks=checks
        )
        code = _battery_exit(failures)
    except (GenericityViolated, DegenerateAtOne, NonIntegerOrder) as exc:
        report = {"params": point, "error": str(exc)}
        code = EXIT_DEGENERATE
    return report, code


def cmd_sweep(args) -> int:
    _validate_common(args)
    points = []
    for chunk in args.points.split(";"):
        vals = [float(x) for x in chunk.split(",")]
        if len(vals) not in (3, 4):
            raise UsageError("each sweep point is ell,mu,omega[,phi0]")
        points.append(
            {
                "ell": vals[0],
                "mu": vals[1],
                "omega": vals[2],
                "phi0": vals[3] if len(vals) == 4 else 0.0,
            }
        )
    checks = tuple(args.checks.split(",")) if args.checks else ALL_CHECKS
    max_workers = int(os.environ.get("HEUN_MONODROMY_THREADS", "0")) or None
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(
            pool.map(lambda pt: _sweep_one(pt, args.tol, args.grid, checks), points)
        )
    report = {"points": [r for r, _ in results]}
    text = canonical_json(report) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    worst = max((c for _, c in results), default=EXIT_OK)
    return worst


def build_parser() -> _Parser:
    parser = _Parser(prog="heun-monodromy")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="integrate the phase equation, dump CSV")
    _add_point_args(p)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--circle-out", type=str, default=None)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("poly", help="print the diagonal polynomial quadruple")
    p.add_argument("--ell", dest="ell_int", type=int, required=True)
    p.add_argument("--check", action="store_true")
    p.set_defaults(fn=cmd_poly)

    p = sub.add_parser("verify", help="run the verification battery")
    _add_point_args(p)
    p.add_argument("--rhos", type=str, default=None)
    p.add_argument("--checks", type=str, default=None)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("monodromy", help="monodromy report only")
    _add_point_args(p)
    p.add_argument("--rhos", type=str, default=None)
    p.set_defaults(fn=cmd_monodromy)

    p = sub.add_parser("sqrt-monodromy", help="square-root-of-monodromy report")
    _add_point_args(p)
    p.set_defaults(fn=cmd_sqrt_monodromy)

    p = sub.add_parser("sweep", help="verify several parameter points")
    p.add_argument("--points", type=str, required=True, help="ell,mu,omega[,phi0];...")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--grid", type=int, default=1001)
    p.add_argument("--checks", type=str, default=None)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(fn=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (GenericityViolated, DegenerateAtOne, NonIntegerOrder) as exc:
        sys.stderr.write(f"degenerate parameter point: {exc}\n")
        return EXIT_DEGENERATE
    except ToleranceNotMet as exc:
        sys.stderr.write(f"tolerance failure: {exc}\n")
        return EXIT_TOLERANCE
    except HeunMonodromyError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
