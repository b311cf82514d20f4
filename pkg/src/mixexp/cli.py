"""Command-line front end.

    mixexp moments  --preset phillips --n 10 --mmax 4
    mixexp eval     --preset szasz_baskakov --n 10 --function t --x-min 0 --x-max 2 --x-count 5
    mixexp converge --preset bernstein_durrmeyer --function abs:1/2 --n-list 8,32,128,512
    mixexp bounds   --preset phillips --function abs:1 --n 100 --x-min 0 --x-max 2 --x-count 3
    mixexp check    --preset phillips --n 50 --x 1 --samples 1000000 --seed 7

Exit codes: 0 success, 1 a check failed, 2 configuration error, 3 computation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from importlib import resources

from . import bounds as bounds_mod
from .errors import MixexpError, UnknownFamily, UnknownPreset, InadmissibleTriple
from .functions import parse_function
from .moments import beta_moments, mu_moments, nu_moments
from .oracle import brute_beta_with_bound, monte_carlo_check
from .phillips import DEFAULT_CONFIG, Operator, PRESET_NAMES, alpha, make_preset
from .ratpoly import fraction_str
from .structure_b import FAMILY_NAMES, builtin_family
from .structure_h import builtin_h, normalization_audit

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return fraction_str(v)
    if v is None:
        return ""
    return format(float(v), ".17g")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixexp", description="Phillips-type operators: moments, evaluation, bounds.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; command-line flags take precedence")
    common.add_argument("--preset", help=f"one of {', '.join(PRESET_NAMES)}")
    common.add_argument("--family", help=f"discrete family: {', '.join(FAMILY_NAMES)}")
    common.add_argument("--triple", help="continuous structure as a,b,c or alias (beta, gamma, ...)")
    common.add_argument("--n", type=int)
    common.add_argument("--n-list", dest="n_list", help="comma-separated ascending n values")
    common.add_argument("--k", type=int, help="index k for continuous-structure moments")
    common.add_argument("--mmax", type=int)
    common.add_argument("--x", help="single evaluation point")
    common.add_argument("--x-min", dest="x_min")
    common.add_argument("--x-max", dest="x_max")
    common.add_argument("--x-count", dest="x_count", type=int)
    common.add_argument("--function", help="one, t, t^m, abs:c, sin, clip:lo:hi, poly:c0:c1..., table:path")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int, help="Monte Carlo sample count for check")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("moments", "eval", "converge", "bounds", "check"):
        sub.add_parser(name, parents=[common])
    return parser


DEFAULTS = {"format": "csv", "seed": 20240601, "samples": 1_000_000, "x_count": 9}


def _load_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Merge config file values and defaults under explicit flags."""
    cfg = _load_config(args.config) if args.config else {}
    ints = {"n", "k", "mmax", "x_count", "seed", "samples"}
    for key, val in cfg.items():
        if not hasattr(args, key) or key in ("config", "command"):
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(args, key) is None:
            setattr(args, key, int(val) if key in ints else val)
    for key, val in DEFAULTS.items():
        if getattr(args, key) is None:
            setattr(args, key, val)
    return args


def _frac(s, what) -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{what}: cannot parse {s!r} as a number") from None


def _grid(args, default=None) -> list:
    if args.x is not None:
        return [_frac(args.x, "--x")]
    if args.x_min is None or args.x_max is None:
        if default is not None:
            return default
        raise ConfigError("a grid needs --x or both --x-min and --x-max")
    lo, hi = _frac(args.x_min, "--x-min"), _frac(args.x_max, "--x-max")
    count = args.x_count
    if count < 1 or hi < lo:
        raise ConfigError("grid needs x-count >= 1 and x-max >= x-min")
    if count == 1:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _n_values(args) -> list:
    if args.n_list:
        try:
            ns = [int(v) for v in args.n_list.split(",")]
        except ValueError:
            raise ConfigError(f"--n-list: cannot parse {args.n_list!r}") from None
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigError("--n-list must be strictly ascending")
        return ns
    if args.n is None:
        raise ConfigError("--n or --n-list is required")
    return [args.n]


def _preset(args):
    if args.preset:
        return make_preset(args.preset)
    if args.family and args.triple:
        return make_preset("custom", family=args.family, triple=args.triple)
    raise ConfigError("--preset (or --family with --triple) is required")


def _check_n(preset, ns):
    for n in ns:
        if n < preset.min_n:
            raise ConfigError(f"{preset.name}: n={n} below the admissible minimum {preset.min_n}")


def _check_grid(preset, xs):
    for x in xs:
        if not preset.discrete.contains(float(x)):
            raise ConfigError(f"x={x} outside the domain {list(preset.discrete.domain)} of {preset.discrete.name}")


def _function(args, default=None):
    spec = args.function or default
    if spec is None:
        raise ConfigError("--function is required")
    try:
        return parse_function(spec)
    except (ValueError, IndexError, OSError) as exc:
        raise ConfigError(f"--function: {exc}") from None


# -- commands -------------------------------------------------------------------

def cmd_moments(args):
    if args.mmax is None or args.n is None:
        raise ConfigError("moments needs --n and --mmax")
    n, mmax = args.n, args.mmax
    xs = _grid(args, default=[])
    if args.preset or (args.family and args.triple):
        preset = _preset(args)
        _check_n(preset, [n])
        _check_grid(preset, xs)
        table = mu_moments(preset.b_poly, *preset.triple, n, mmax, family=preset.discrete.name)
        kind, label = "mu", preset.name
    elif args.family:
        fam = builtin_family(args.family)
        for x in xs:
            if not fam.contains(float(x)):
                raise ConfigError(f"x={x} outside the domain {list(fam.domain)} of {fam.name}")
        table = beta_moments(fam.covariance, n, mmax, family=fam.name)
        kind, label = "beta", fam.name
    elif args.triple:
        if args.k is None:
            raise ConfigError("continuous-structure moments need --k")
        h = builtin_h(args.triple)
        table = nu_moments(*h.triple.as_tuple(), n, args.k, mmax)
        kind, label = "nu", h.name
        xs = []
    else:
        raise ConfigError("moments needs --preset, --family or --triple")

    rows = []
    for m, entry in enumerate(table.entries):
        if kind == "nu":
            rows.append({"m": m, "moment": fraction_str(entry), "values": []})
        else:
            rows.append({"m": m, "moment": str(entry), "values": [fraction_str(entry(x)) for x in xs]})
    if args.format == "json":
        doc = {"command": "moments", "source": label, **table.to_json(),
               "rendered": [r["moment"] for r in rows],
               "grid": [fraction_str(x) for x in xs],
               "values": [r["values"] for r in rows]}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "source", "n", "m", "moment", *[f"x={fraction_str(x)}" for x in xs]])
    for r in rows:
        w.writerow([kind, label, n, r["m"], r["moment"], *r["values"]])
    return buf.getvalue()


def cmd_eval(args):
    preset = _preset(args)
    ns = _n_values(args)
    _check_n(preset, ns)
    xs = _grid(args)
    _check_grid(preset, xs)
    f = _function(args)
    records = []
    for n in ns:
        op = Operator(preset, f, n, DEFAULT_CONFIG)
        for x in xs:
            val = op(float(x))
            records.append({"n": n, "x": float(x), "value": val, "f": float(f(float(x))),
                            "alpha": alpha(preset, n, float(x))})
    if args.format == "json":
        return json.dumps({"command": "eval", "preset": preset.name, "function": f.name, "rows": records}, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "x", "value", "f", "alpha"])
    for r in records:
        w.writerow([r["n"], _fmt(r["x"]), _fmt(r["value"]), _fmt(r["f"]), _fmt(r["alpha"])])
    return buf.getvalue()


def _default_grid(preset):
    lo, hi = preset.discrete.domain
    hi = min(hi, 4.0)
    return [Fraction(lo) + (Fraction(hi) - Fraction(lo)) * i / 16 for i in range(17)]


def cmd_converge(args):
    preset = _preset(args)
    ns = _n_values(args)
    _check_n(preset, ns)
    xs = _grid(args, default=_default_grid(preset))
    _check_grid(preset, xs)
    f = _function(args)
    rows = []
    for n in ns:
        op = Operator(preset, f, n, DEFAULT_CONFIG)
        sup_err = max(abs(op(float(x)) - float(f(float(x)))) for x in xs)
        gen = spec = None
        if f.modulus is not None:
            gen = max(bounds_mod.preset_bound(preset, f.modulus, n, float(x)) for x in xs)
            try:
                spec = max(bounds_mod.specialized_bound(preset.name, f.modulus, n, float(x)) for x in xs)
            except (UnknownPreset, MixexpError):
                spec = None
        rows.append({"n": n, "sup_error": sup_err, "theorem2_bound": gen, "specialized_bound": spec})
    if args.format == "json":
        return json.dumps({"command": "converge", "preset": preset.name, "function": f.name, "rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "sup_error", "theorem2_bound", "specialized_bound"])
    for r in rows:
        w.writerow([r["n"], _fmt(r["sup_error"]), _fmt(r["theorem2_bound"]), _fmt(r["specialized_bound"])])
    return buf.getvalue()


def cmd_bounds(args):
    preset = _preset(args)
    ns = _n_values(args)
    _check_n(preset, ns)
    xs = _grid(args, default=_default_grid(preset))
    _check_grid(preset, xs)
    f = _function(args, default="abs:1/2")
    if f.modulus is None:
        raise ConfigError(f"{f.name} has no modulus of continuity; bounds need one")
    reports = []
    for n in ns:
        reports.extend(bounds_mod.bound_check(preset, f, n, [float(x) for x in xs]))
    if args.format == "json":
        return json.dumps({"command": "bounds", "preset": preset.name, "function": f.name,
                           "rows": bounds_mod.reports_to_json(reports)}, indent=2) + "\n"
    return bounds_mod.reports_to_csv(reports)


def cmd_check(args):
    """Oracle-versus-analytic report; the returned flag says whether every band held."""
    preset = _preset(args)
    n = args.n
    if n is None:
        raise ConfigError("check needs --n")
    _check_n(preset, [n])
    xs = _grid(args, default=[Fraction(1) if preset.discrete.domain[1] > 1 else Fraction(1, 2)])
    _check_grid(preset, xs)
    if args.samples is None or args.samples < 2:
        raise ConfigError("check needs --samples >= 2")
    if args.seed is None:
        raise ConfigError("check needs --seed")
    x = xs[0]
    mc = monte_carlo_check(preset, n, float(x), args.samples, args.seed)

    moment_rows = []
    fam = preset.discrete
    table = beta_moments(fam.covariance, n, 4)
    for m in range(2, 5):
        brute, tail = brute_beta_with_bound(fam, n, m, x)
        rec = float(table[m](x))
        ok = abs(float(brute) - rec) <= 1e-12 * max(1.0, abs(rec))
        moment_rows.append({"m": m, "recurrence": fraction_str(table[m](x)), "brute_force": float(brute),
                            "tail_bound": tail, "passed": ok})

    audit = normalization_audit()
    audit_ok = all(abs(r["mass"] - 1.0) <= 1e-8 for r in audit)
    passed = mc["passed"] and audit_ok and all(r["passed"] for r in moment_rows)
    doc = {
        "command": "check",
        "preset": preset.name,
        "n": n,
        "x": fraction_str(x),
        "monte_carlo": mc,
        "discrete_moments": moment_rows,
        "normalization_audit": [{**r, "printed_mass": r["printed_mass"] if math.isfinite(r["printed_mass"]) else "inf"}
                                for r in audit],
        "passed": passed,
    }
    return json.dumps(doc, indent=2) + "\n", passed


COMMANDS = {"moments": cmd_moments, "eval": cmd_eval, "converge": cmd_converge, "bounds": cmd_bounds, "check": cmd_check}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    try:
        args = resolve(args)
        result = COMMANDS[args.command](args)
    except (ConfigError, UnknownFamily, UnknownPreset, InadmissibleTriple, OSError) as exc:
        print(f"mixexp: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    except (MixexpError, ArithmeticError, ValueError) as exc:
        print(f"mixexp: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    passed = True
    if isinstance(result, tuple):
        result, passed = result
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(result)
    else:
        sys.stdout.write(result)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def schema(name: str) -> dict:
    """The shipped JSON schema for a command's JSON output."""
    return json.loads(resources.files("mixexp").joinpath("schemas", f"{name}.schema.json").read_text())


if __name__ == "__main__":
    sys.exit(main())
