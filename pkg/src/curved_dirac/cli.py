"""Command-line interface: figure data, single solutions, profiles and the verification suite.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import background as bg
from . import figures
from . import free_solver as fs
from . import interacting_solver as it
from .errors import (ClosedFormUnavailableError, ConstraintError, CurvedDiracError, ParameterError,
                     UnsupportedFamilyError)
from .gamma_algebra import ModelParams

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
CONFIG_ERRORS = (ParameterError, ConstraintError, UnsupportedFamilyError, ClosedFormUnavailableError)


class ConfigError(Exception):
    pass


def parse_list(text: str) -> list[float]:
    """'lo:hi:n' (inclusive linspace) or 'v1,v2,...'."""
    text = str(text).strip()
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            n = int(n)
            if n < 1:
                raise ValueError
            return [float(v) for v in np.linspace(float(lo), float(hi), n)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo:hi:n' or a comma list, got {text!r}") from None


def parse_complex(text) -> complex:
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _common(p, *, out=True):
    p.add_argument("--config", help="JSON file whose keys override the flags (unknown keys are rejected)")
    if out:
        p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--m", type=float, default=1.0, help="rest mass (all quantities in units of m)")


def _geometry_args(p, fig: str):
    p.add_argument("--R", type=float, default=0.2, help="curvature constant")
    p.add_argument("--tau", type=float, default=1.0)
    if fig == "linear":
        p.add_argument("--theta", type=float, default=0.3)
        p.add_argument("--xi", type=float, default=0.5)
    else:
        p.add_argument("--zeta", type=float, default=0.7)
        p.add_argument("--vartheta", type=float, default=0.3)
        p.add_argument("--a0", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curved-dirac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="mode", required=True)

    for name, what in (("fig1a", "decay parameter omega(eps)"), ("fig1b", "|eta eps / omega(eps)|")):
        p = sub.add_parser(name, help=f"decay-parameter curves: {what}")
        _common(p)
        p.add_argument("--eta", type=parse_list, default=list(figures.FIG1_ETAS),
                       help="curvature parameters (default 0.001,0.15,0.4,0.8,1.5)")
        p.add_argument("--eps", type=parse_list, default=parse_list("-4:4:401"),
                       help="energy grid, 'lo:hi:n' or list (default -4:4:401)")

    for name, geo in (("fig2", "linear"), ("fig3", "hyperbolic")):
        p = sub.add_parser(name, help=f"density traces against x/X ({geo} background)")
        _common(p)
        _geometry_args(p, geo)
        p.add_argument("--A", type=parse_complex, default=1.2, help="A_+ (complex allowed)")
        p.add_argument("--B", type=parse_complex, default=0.8, help="B_+ (complex allowed)")
        p.add_argument("--eps", type=parse_list, default=list(figures.FIG_ENERGIES))
        p.add_argument("--grid", type=int, default=512, help="points on [-X, X]")
        p.add_argument("--normalize-peak", action="store_true", help="scale each trace to unit maximum")

    p = sub.add_parser("solve-free", help="free spinor on a grid")
    _common(p)
    p.add_argument("--family", choices=("linear", "hyperbolic", "trig"), default="linear")
    p.add_argument("--R", type=float, default=0.2)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=0.3)
    p.add_argument("--xi", type=float, default=0.5)
    p.add_argument("--zeta", type=float, default=0.7)
    p.add_argument("--vartheta", type=float, default=None, help="default 0.3 (hyperbolic), 0.5 (trig)")
    p.add_argument("--a0", type=float, default=None, help="default 0.5 (hyperbolic), 0.3 (trig)")
    p.add_argument("--epsilon", type=float, default=0.8)
    p.add_argument("--A", type=parse_complex, default=1.2)
    p.add_argument("--B", type=parse_complex, default=0.8)
    p.add_argument("--subspace", choices=(fs.POSITIVE, fs.NEGATIVE), default=fs.POSITIVE)
    p.add_argument("--form", choices=("figure", "exact"), default="figure")
    p.add_argument("--amplitude-power", type=int, choices=(-1, 1), default=-1)
    p.add_argument("--grid", type=int, default=512)

    p = sub.add_parser("solve-interacting", help="closed-form Morse spinor on one half-domain")
    _common(p)
    _geometry_args(p, "linear")
    p.add_argument("--S0", type=float, default=None, help="default: eta/2 - W0")
    p.add_argument("--W0", type=float, default=None, help="default: eta/4")
    p.add_argument("--potential", help="potential JSON file {S0, W0, A0_spec, A1_spec}")
    p.add_argument("--epsilon", type=float, default=0.8)
    p.add_argument("--branch", type=int, choices=(1, -1), default=1)
    p.add_argument("--subspace", choices=(fs.POSITIVE, fs.NEGATIVE), default=fs.POSITIVE)
    p.add_argument("--amplitude-power", type=int, choices=(-1, 1), default=-1)
    p.add_argument("--grid", type=int, default=512)

    p = sub.add_parser("verify", help="run the acceptance suite")
    _common(p, out=False)
    p.add_argument("--only", type=lambda s: [int(v) for v in s.split(",")], default=None,
                   help="comma list of criterion numbers")

    p = sub.add_parser("profile", help="build a background and print its JSON document")
    _common(p)
    p.add_argument("--family", choices=sorted(bg.FAMILIES), default="LinearFlat")
    p.add_argument("--params", default="{}", help="family parameters as a JSON object")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--R", type=float, default=0.2)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--no-strict", action="store_true", help="skip the second constraint check")
    return parser


def apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> argparse.Namespace:
    if not getattr(args, "config", None):
        return args
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config!r}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    allowed = {k for k in vars(args) if k not in ("mode", "config")}
    unknown = sorted(set(k.replace("-", "_") for k in doc) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys for {args.mode}: {unknown}")
    for key, value in doc.items():
        key = key.replace("-", "_")
        if key in ("eps", "eta") and args.mode in ("fig1a", "fig1b", "fig2", "fig3"):
            value = parse_list(value) if isinstance(value, str) else [float(v) for v in value]
        elif key in ("A", "B"):
            value = parse_complex(value)
        elif key == "only" and value is not None:
            value = [int(v) for v in value]
        setattr(args, key, value)
    return args


def _emit(args, header, rows):
    if getattr(args, "out", None):
        with open(args.out, "w", newline="") as fh:
            figures.write_csv(fh, header, rows)
    else:
        figures.write_csv(sys.stdout, header, rows)


def _params(args, **extra):
    return ModelParams(tau=args.tau, mass=args.m, curvature_R=args.R, **extra)


def _or(value, default):
    return default if value is None else value


def _free_profile(args):
    if args.family == "linear":
        fam = bg.LinearFlat(args.theta, args.xi)
    elif args.family == "hyperbolic":
        fam = bg.HyperbolicConst(args.zeta, _or(args.vartheta, 0.3), _or(args.a0, 0.5))
    else:
        fam = bg.TrigConst(args.zeta, _or(args.vartheta, 0.5), _or(args.a0, 0.3))
    return bg.solve_profile(fam, _params(args))


def cmd_fig1(args):
    quantity = "omega" if args.mode == "fig1a" else "abs_wavenumber"
    _emit(args, *figures.fig1_rows(args.eta, args.eps, args.m, quantity))


def cmd_density(args):
    if args.mode == "fig2":
        prof = bg.solve_profile(bg.LinearFlat(args.theta, args.xi), _params(args))
    else:
        prof = bg.solve_profile(bg.HyperbolicConst(args.zeta, args.vartheta, args.a0), _params(args))
    if args.grid < 3:
        raise ParameterError("--grid must be at least 3")
    _emit(args, *figures.density_rows(prof, args.eps, args.A, args.B, args.grid,
                                      normalize_peak=args.normalize_peak))


def _spinor_rows(xs, psi, rho, extra=None):
    rows = []
    for i, x in enumerate(xs):
        row = [float(x)] + ([] if extra is None else [float(extra[i])])
        row += [float(psi[i, 0].real), float(psi[i, 0].imag), float(psi[i, 1].real),
                float(psi[i, 1].imag), float(rho[i])]
        rows.append(tuple(row))
    return rows


def cmd_solve_free(args):
    prof = _free_profile(args)
    sp = fs.FreeSpinor.for_profile(prof, args.epsilon, args.A, args.B, subspace=args.subspace)
    lo, hi = prof.domain
    u = np.linspace(-1, 1, args.grid + 2)[1:-1]
    xs = np.where(u < 0, -u * lo, u * hi)
    psi = fs.evaluate_spinor(prof, sp, 0.0, xs, amplitude_power=args.amplitude_power, form=args.form)
    rho = fs.probability_density(prof, psi, xs)
    header = ("x", "psi_up_re", "psi_up_im", "psi_down_re", "psi_down_im", "density")
    _emit(args, header, _spinor_rows(xs, psi, rho))


def cmd_solve_interacting(args):
    prof = bg.solve_profile(bg.LinearFlat(args.theta, args.xi), _params(args))
    if args.potential:
        try:
            with open(args.potential) as fh:
                cfg = it.PotentialConfig.from_json(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read potential {args.potential!r}: {exc}") from None
    else:
        w0 = prof.eta / 4 if args.W0 is None else args.W0
        s0 = prof.eta / 2 - w0 if args.S0 is None else args.S0
        cfg = it.PotentialConfig.morse(s0, w0)
    mp = it.morse_reduce(prof, cfg.S0, cfg.W0, args.epsilon, args.branch)
    edge = prof.domain[1] if args.branch == 1 else prof.domain[0]
    xs = np.linspace(0.0, edge, args.grid + 1)[:-1]
    if args.branch == -1:
        xs = xs[1:]
    psi = it.evaluate_interacting_spinor(prof, cfg, mp, 0.0, xs, subspace=args.subspace,
                                         amplitude_power=args.amplitude_power)
    rho = fs.probability_density(prof, psi, xs)
    z = mp.z_of_y(prof.y(xs))
    header = ("x", "z", "psi_up_re", "psi_up_im", "psi_down_re", "psi_down_im", "density")
    _emit(args, header, _spinor_rows(xs, psi, rho, z))


def cmd_verify(args):
    from . import checks

    numbers = args.only or sorted(checks.CHECKS)
    bad = [n for n in numbers if n not in checks.CHECKS]
    if bad:
        raise ConfigError(f"unknown criteria: {bad}")
    failed = []
    for n in numbers:
        ok, rows, secs = checks.run_criterion(n)
        title = checks.CHECKS[n][0]
        print(f"{'PASS' if ok else 'FAIL'}  criterion {n:2d}  {title}  ({secs:.2f} s)")
        for r in rows:
            print(f"      {r.line()}")
        if not ok:
            failed.append(n)
    print(f"{len(numbers) - len(failed)}/{len(numbers)} criteria passed")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def cmd_profile(args):
    try:
        pars = json.loads(args.params)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--params is not JSON: {exc}") from None
    cls = bg.FAMILIES[args.family]
    try:
        fam = cls(**pars)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {args.family}: {exc}") from None
    params = ModelParams(alpha=args.alpha, tau=args.tau, mass=args.m, curvature_R=args.R, eta=args.eta)
    prof = bg.solve_profile(fam, params, strict=not args.no_strict)
    text = json.dumps(prof.to_json(), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


COMMANDS = {
    "fig1a": cmd_fig1, "fig1b": cmd_fig1, "fig2": cmd_density, "fig3": cmd_density,
    "solve-free": cmd_solve_free, "solve-interacting": cmd_solve_interacting,
    "verify": cmd_verify, "profile": cmd_profile,
}


_NEGATIVE_VALUE = re.compile(r"^-[0-9.]")


def glue_negative_values(argv):
    """Attach values such as '-4:4:401' to their flag, which argparse would otherwise read as an option."""
    out = []
    for tok in argv:
        if out and _NEGATIVE_VALUE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(glue_negative_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        args = apply_config(parser, args)
        code = COMMANDS[args.mode](args)
    except (ConfigError, argparse.ArgumentTypeError, *CONFIG_ERRORS) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CurvedDiracError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if code is None else code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
