"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from fractions import Fraction

from . import analysis
from .core import InvalidArgumentError, NumericalError, TvpError
from .experiments import (PERTURB_EPS, PERTURB_N, REGISTRY, PerturbKind, StudyTable,
                          alpha_trajectories, convergence_study, emit_csv, perturbation_study,
                          problem_name, registry_build, shooting_n, trajectory_table)
from .shooting import ShootingConfig, solve_tvp
from .solvers import NewtonConfig, parse_method, solve_ivp

log = logging.getLogger("tempered_tvp")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _real(text):
    try:
        return float(Fraction(text)) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _real_list(text):
    return [_real(x) for x in text.split(",") if x.strip()]


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tempered-tvp", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, alpha_list=False, n_list=False, method="abm"):
        sp.add_argument("--example", default="1", help="registry problem 1..4")
        if alpha_list:
            sp.add_argument("--alpha", type=_real_list, default=[0.5],
                            help="comma-separated orders, fractions allowed")
        else:
            sp.add_argument("--alpha", type=_real, default=0.5)
        sp.add_argument("--lambda", dest="lam", type=_real, default=2.0)
        sp.add_argument("--method", default=method, choices=["bdq", "abm", "colloc"])
        sp.add_argument("--colloc-order", type=int, default=1, choices=[1, 2])
        sp.add_argument("--colloc-points", type=_real_list, default=None)
        sp.add_argument("--newton-tol", type=_real, default=1e-12)
        if n_list:
            sp.add_argument("--n", type=_int_list, default=None)
        else:
            sp.add_argument("--n", type=int, default=160)
        sp.add_argument("--out", default=None, help="CSV destination (default stdout)")

    s = sub.add_parser("solve-ivp", help="solve one initial value problem")
    common(s)
    s.add_argument("--y0", type=_real, default=None,
                   help="initial value (default: exact y(0) when known, else 0)")
    s.add_argument("--horizon", type=_real, default=None)

    s = sub.add_parser("solve-tvp", help="solve one terminal value problem by shooting")
    common(s)
    s.add_argument("--eps", type=_real, default=1e-10)
    s.add_argument("--horizon", type=_real, default=None)
    s.add_argument("--step-base", type=_real, default=None,
                   help="step is step_base / n (default depends on the example)")

    s = sub.add_parser("converge", help="error and EOC table against the exact solution")
    common(s, alpha_list=True, n_list=True, method="bdq")
    s.add_argument("--eps", type=_real, default=1e-10)
    s.add_argument("--step-base", type=_real, default=None)
    s.add_argument("--jobs", type=int, default=1)

    s = sub.add_parser("perturb", help="sensitivity to perturbed data (example 4)")
    common(s, n_list=True)
    s.add_argument("--perturb", required=True, choices=[k.value for k in PerturbKind])
    s.add_argument("--eps-list", type=_real_list, default=list(PERTURB_EPS))
    s.add_argument("--eps", type=_real, default=1e-10)
    s.add_argument("--step-base", type=_real, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(example="4")

    s = sub.add_parser("wellposed", help="contraction constants of a registry problem")
    s.add_argument("--example", default="4")
    s.add_argument("--alpha", type=_real, default=0.5)
    s.add_argument("--lambda", dest="lam", type=_real, default=2.0)
    return p


def _validate(args):
    problems = []
    try:
        args.example = problem_name(args.example)
    except InvalidArgumentError as exc:
        problems.append(str(exc))
    alphas = args.alpha if isinstance(args.alpha, list) else [args.alpha]
    if not alphas:
        problems.append("--alpha is empty")
    for al in alphas:
        if not 0 < al < 1:
            problems.append(f"--alpha {al} must lie in (0, 1)")
    if not (args.lam >= 0 and math.isfinite(args.lam)):
        problems.append(f"--lambda {args.lam} must be finite and >= 0")
    if getattr(args, "newton_tol", 1.0) <= 0:
        problems.append("--newton-tol must be positive")
    n = getattr(args, "n", None)
    for v in (n if isinstance(n, list) else [n] if n is not None else []):
        if v < 1:
            problems.append(f"--n {v} must be a positive integer")
    if getattr(args, "eps", 1.0) <= 0:
        problems.append("--eps must be positive")
    if getattr(args, "jobs", 1) < 1:
        problems.append("--jobs must be >= 1")
    for e in getattr(args, "eps_list", None) or []:
        if e <= 0:
            problems.append(f"--eps-list entry {e} must be positive")
    if getattr(args, "step_base", None) is not None and args.step_base <= 0:
        problems.append("--step-base must be positive")
    if getattr(args, "horizon", None) is not None and args.horizon <= 0:
        problems.append("--horizon must be positive")
    pts = getattr(args, "colloc_points", None)
    if pts is not None and getattr(args, "method", None) != "colloc":
        problems.append("--colloc-points requires --method colloc")
    if getattr(args, "method", None) == "colloc":
        try:
            parse_method("colloc", args.colloc_order, pts)
        except InvalidArgumentError as exc:
            problems.append(str(exc))
    if problems:
        raise UsageError("; ".join(problems))


def _method(args):
    return parse_method(args.method, args.colloc_order, args.colloc_points)


def _write(table: StudyTable, out):
    emit_csv(table, out if out else sys.stdout)


def _cmd_solve_ivp(args):
    tvp = registry_build(args.example, args.alpha, args.lam)
    horizon = args.horizon or tvp.horizon
    y0 = args.y0
    if y0 is None:
        exact = tvp.f.exact_solution
        y0 = float(exact(0.0)) if exact is not None else 0.0
    traj = solve_ivp(tvp.ivp(y0, horizon), args.n, _method(args), NewtonConfig(args.newton_tol))
    _write(trajectory_table(traj), args.out)
    return 0


def _shooting_cfg(args, tvp, n, step_base):
    return ShootingConfig(epsilon=args.eps, ivp_n=shooting_n(tvp, n, step_base),
                          method=_method(args), newton=NewtonConfig(args.newton_tol))


def _cmd_solve_tvp(args):
    tvp = registry_build(args.example, args.alpha, args.lam)
    if args.horizon is not None:
        tvp = replace(tvp, horizon=args.horizon)
    step_base = args.step_base or REGISTRY[args.example].default_step_base
    sol = solve_tvp(tvp, _shooting_cfg(args, tvp, args.n, step_base))
    print(f"y0={sol.y0:.16e}")
    print(f"terminal_mismatch={sol.terminal_mismatch:.16e}")
    print(f"bisections={sol.bisection_count}")
    if args.out:
        emit_csv(trajectory_table(sol.trajectory), args.out)
    return 0


def _cmd_converge(args):
    method = _method(args)
    n_list = args.n or [10, 20, 40, 80, 160, 320]
    cfg = ShootingConfig(epsilon=args.eps, method=method, newton=NewtonConfig(args.newton_tol))
    table = convergence_study(args.example, args.alpha, args.lam, method, n_list,
                              shooting_cfg=cfg, step_base=args.step_base, jobs=args.jobs)
    _write(table, args.out)
    for r in table.failures:
        print(f"cell alpha={r.alpha:g} n={r.n} failed: {r.failure}", file=sys.stderr)
    return 2 if table.failures else 0


def _cmd_perturb(args):
    kind = PerturbKind.parse(args.perturb)
    n_list = args.n or list(PERTURB_N)
    cfg = ShootingConfig(epsilon=args.eps, method=_method(args), newton=NewtonConfig(args.newton_tol))
    if kind is PerturbKind.Alpha:
        table = alpha_trajectories(args.eps_list, n_list[0], cfg, args.example, args.alpha,
                                   args.lam, args.step_base)
    else:
        table = perturbation_study(kind, args.eps_list, n_list, cfg, args.example, args.alpha,
                                   args.lam, args.step_base, args.jobs)
    _write(table, args.out)
    for r in table.failures:
        print(f"cell eps={r.eps:g} h={r.h:g} failed: {r.failure}", file=sys.stderr)
    return 2 if table.failures else 0


def _cmd_wellposed(args):
    rep = analysis.well_posedness(registry_build(args.example, args.alpha, args.lam))
    print(f"gamma={rep.gamma:.10g}")
    print(f"lipschitz_threshold={rep.lipschitz_threshold:.10g}")
    print(f"lipschitz={rep.lipschitz:.10g}{' (sampled)' if rep.lipschitz_estimated else ''}")
    print(f"f_sup={rep.f_sup:.10g}{' (sampled)' if rep.sup_estimated else ''}")
    print(f"beta={rep.beta:.10g}")
    print(f"contraction_holds={'true' if rep.contraction_holds else 'false'}")
    t0, t1, y_lo, y_hi = rep.domain_rect
    print(f"domain=[{t0:g}, {t1:g}] x [{y_lo:.10g}, {y_hi:.10g}]")
    return 0


COMMANDS = {
    "solve-ivp": _cmd_solve_ivp,
    "solve-tvp": _cmd_solve_tvp,
    "converge": _cmd_converge,
    "perturb": _cmd_perturb,
    "wellposed": _cmd_wellposed,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:          # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except InvalidArgumentError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, TvpError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())
