"""Command-line interface.

Exit codes: 0 success, 1 a numerical check failed, 2 invalid arguments.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import GeometryError, OutOfStrip, PoleProximity, StagnationAtZeroOfG, StepTooLarge
from .slag import BDI_POWERS, MODELS, integrate_profile, matched_psi
from .stenzel import VARIANTS, solve_potential
from .symmetric_pairs import KINDS, SymmetricPairCase
from .verification import (
    DEFAULT_TOLERANCES,
    SuiteConfig,
    bdi_power_experiment,
    dumps,
    omega_form_experiment,
    run_structure_suite,
    run_theorem_suite,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

EPILOG = """\
output formats:
  solve-potential  CSV with header N,h,hprime (h = f'(N), hprime = f''(N))
  profile          CSV with header s,re_tau,im_tau
  verify           JSON {suite, case, params, psi, seed, checks: [{name, residual, tol, pass}], pass}
  report           JSON experiment or structure-suite report
Floats are written with full round-trip precision, '.' as decimal separator.
Complex values use the form a+bi or a-bi without spaces; write a leading
minus sign as --tau0=-0.4+0.1i.  SLAG_SEED overrides --seed.
"""


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``a+bi``, ``a-bi`` or ``bi``."""
    s = text.strip()
    if not s or " " in s:
        raise argparse.ArgumentTypeError(f"invalid complex number {text!r}")
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid complex number {text!r}") from None


def _psi_arg(text: str):
    if text == "matched":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("psi must be a number or 'matched'") from None


def _add_case_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--case", required=True, choices=KINDS)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--bdi-power", choices=BDI_POWERS, default="proof", help="power of i in the BDI frame function")
    p.add_argument("--model", choices=MODELS, default="printed", help="frame function driving the profile ODE")


def _case_from(args) -> SymmetricPairCase:
    try:
        return SymmetricPairCase.from_name(args.case, p=args.p, q=args.q, m=args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _psi_from(args, case) -> float:
    if args.psi == "matched":
        return matched_psi(case, args.bdi_power)
    return float(args.psi)


def _seed(args) -> int:
    env = os.environ.get("SLAG_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"SLAG_SEED must be an integer, got {env!r}") from None
    return args.seed


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _status(msg: str, out: str | None) -> None:
    print(msg, file=sys.stdout if out else sys.stderr)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_solve_potential(args) -> int:
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    if not args.nmax > 1 or not args.step > 0:
        raise UsageError("--nmax must exceed 1 and --step must be positive")
    try:
        table = solve_potential(args.n, args.nmax, args.step, variant=args.variant, audit=False)
        residual = table.max_residual()
    except StepTooLarge as exc:
        _status(f"error: {exc}", None)
        return EXIT_FAIL
    if args.out:
        table.to_csv(args.out)
    else:
        table.write_csv(sys.stdout)
    _status(f"h(1) = {float(table.h[0])!r}", args.out)
    _status(f"max residual = {residual:.3e}", args.out)
    return EXIT_OK if residual < args.tol else EXIT_FAIL


def cmd_profile(args) -> int:
    case = _case_from(args)
    psi = _psi_from(args, case)
    if args.max_steps < 1 or not args.step > 0:
        raise UsageError("--step must be positive and --max-steps at least 1")
    try:
        curve = integrate_profile(case, psi, args.tau0, args.step, args.max_steps, args.model, args.bdi_power)
    except (OutOfStrip, PoleProximity, StagnationAtZeroOfG) as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        curve.to_csv(args.out)
    else:
        curve.write_csv(sys.stdout)
    _status(f"halt reason: {curve.halt_reason}", args.out)
    _status(f"samples: {len(curve.samples)}", args.out)
    return EXIT_OK


def _config_from(args) -> SuiteConfig:
    tol = dict(DEFAULT_TOLERANCES)
    for key in ("moment", "im_omega", "omega"):
        val = getattr(args, f"tol_{key}", None)
        if val is not None:
            tol[key] = val
    try:
        return SuiteConfig(
            seed=_seed(args),
            tolerances=tol,
            n_points=args.points,
            n_orbit_samples=args.orbit_samples,
            step=args.step,
            max_steps=args.max_steps,
            tau0=args.tau0,
            curve_psi=None,
            model=args.model,
            bdi_power=args.bdi_power,
            jobs=args.jobs,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_verify(args) -> int:
    case = _case_from(args)
    psi = _psi_from(args, case)
    config = _config_from(args)
    if args.curve_psi is not None:
        config.curve_psi = matched_psi(case, args.bdi_power) if args.curve_psi == "matched" else float(args.curve_psi)
    if config.tau0 is not None:
        try:
            case.check_strip(config.tau0)
        except OutOfStrip as exc:
            if not case.is_degenerate(config.tau0.real):
                raise UsageError(str(exc)) from None
    report = run_theorem_suite(case, psi, config)
    _emit(dumps(report) + "\n", args.out)
    failed = [c["name"] for c in report["checks"] if not c["pass"]]
    _status("pass" if report["pass"] else f"fail: {', '.join(failed)}", args.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_report(args) -> int:
    seed = _seed(args)
    if args.experiment == "bdi-i-power":
        report = bdi_power_experiment(seed=seed)
        ok = report["supported"] != "undecided"
    elif args.experiment == "omega-form":
        report = omega_form_experiment(seed=seed)
        ok = report["supported"] != "undecided"
    else:
        if args.case is None:
            raise UsageError("--case is required for the structure report")
        case = _case_from(args)
        report = run_structure_suite(case, SuiteConfig(seed=seed))
        ok = report["pass"]
    _emit(dumps(report) + "\n", args.out)
    _status(report.get("conclusion", "pass" if ok else "fail"), args.out)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stenzel-slag",
        description="Stenzel potential, cohomogeneity-one special Lagrangian profiles and their verification.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve-potential", help="tabulate f'(N)", epilog=EPILOG,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--nmax", type=float, default=4.0)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.add_argument("--variant", choices=VARIANTS, default="ricci_flat")
    sp.add_argument("--tol", type=float, default=1e-9, help="residual gate for the exit code")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_solve_potential)

    pp = sub.add_parser("profile", help="integrate a profile curve", epilog=EPILOG,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_case_args(pp)
    pp.add_argument("--psi", type=_psi_arg, required=True)
    pp.add_argument("--tau0", type=parse_complex, required=True)
    pp.add_argument("--step", type=float, default=1e-3)
    pp.add_argument("--max-steps", type=int, default=1000)
    pp.add_argument("--out")
    pp.set_defaults(func=cmd_profile)

    vp = sub.add_parser("verify", help="run the special Lagrangian suite", epilog=EPILOG,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_case_args(vp)
    vp.add_argument("--psi", type=_psi_arg, default="matched", help="calibration phase, or 'matched'")
    vp.add_argument("--curve-psi", type=_psi_arg, help="phase used to integrate the curve (default: --psi)")
    vp.add_argument("--tau0", type=parse_complex)
    vp.add_argument("--step", type=float, default=1e-3)
    vp.add_argument("--max-steps", type=int, default=400)
    vp.add_argument("--points", type=int, default=20)
    vp.add_argument("--orbit-samples", type=int, default=10)
    vp.add_argument("--tol-moment", type=float)
    vp.add_argument("--tol-imomega", dest="tol_im_omega", type=float)
    vp.add_argument("--tol-omega", type=float)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--jobs", type=int, default=1)
    vp.add_argument("--out")
    vp.set_defaults(func=cmd_verify)

    rp = sub.add_parser("report", help="convention experiments and structure checks", epilog=EPILOG,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    rp.add_argument("--experiment", choices=("bdi-i-power", "omega-form", "structure"), required=True)
    rp.add_argument("--case", choices=KINDS)
    rp.add_argument("--p", type=int)
    rp.add_argument("--q", type=int)
    rp.add_argument("--m", type=int)
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--out")
    rp.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
