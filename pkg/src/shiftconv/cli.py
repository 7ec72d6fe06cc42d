"""Command-line front end."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .amplifier import AmplifierSpec, ExponentInput, balance_report, exponent_calculator, moment_S
from .arith import COEFF_CEILING, REP_NAMES, CoeffTable, dirichlet_char, named_rep, named_table, read_table, write_table
from .errors import ConfigError, ResourceError, ShiftconvError
from .lfunc import CONVENTIONS, AFEConfig, central_value
from .mellin import (
    EXPONENTS,
    MellinSpec,
    constant_coeff_mellin_closed,
    constant_coeff_mellin_numeric,
    dirichlet_series_D,
)
from .quadforms import QuadraticForm, SphericalPoly, lattice_points, theta_coeffs
from .shifted import WeightFn, contributing_pairs, growth_experiment, growth_prediction, linear_shift_sum, quad_shift_sum
from .special import QuadratureConfig, WhittakerParams, whittaker_mellin_lhs, whittaker_mellin_rhs, whittaker_w

FORMATS = ("json", "csv", "dat", "table")


@dataclass
class RunConfig:
    rep_name: str = "delta"
    table_bound: int = 10000
    output_format: str = "json"
    deterministic: bool = True
    rel_tol: float = 1e-10
    abs_tol: float = 1e-15

    def validate(self):
        if self.rep_name not in REP_NAMES:
            raise ConfigError(f"rep_name must be one of {REP_NAMES}")
        if self.table_bound < 1:
            raise ConfigError("table_bound must be positive")
        if self.table_bound > COEFF_CEILING:
            raise ResourceError(f"table_bound {self.table_bound} exceeds ceiling {int(COEFF_CEILING)}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"output_format must be one of {FORMATS}")
        return self


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def load_config(path: str | Path) -> RunConfig:
    """Read ``key=value`` lines; ``#`` starts a comment."""
    types = {f.name: f.type for f in fields(RunConfig)}
    conv = {"str": str, "int": int, "float": float, "bool": _parse_bool}
    values: Dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = conv[types[key]](val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return RunConfig(**values).validate()


# ---------------------------------------------------------------------------
# output


def _plain(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def _emit_json(out, record):
    out.write(json.dumps(_plain(record), sort_keys=True) + "\n")


def _emit_rows(out, rows: List[dict], fmt: str):
    if fmt == "json":
        _emit_json(out, rows)
        return
    keys = list(rows[0]) if rows else []
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow([_plain(r[k]) for k in keys])
    else:
        for r in rows:
            out.write(" ".join(str(_plain(r[k])) for k in keys) + "\n")


def _complex(text: str) -> complex:
    return complex(text.replace("i", "j").replace(" ", ""))


def _floats(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _form(k: int, upper: str) -> QuadraticForm:
    return QuadraticForm.from_upper(k, [int(t) for t in upper.split(",")])


def _weight(args) -> WeightFn:
    return WeightFn(args.family, args.center, args.width)


# ---------------------------------------------------------------------------
# subcommands


def cmd_coeffs(args, out):
    if args.read:
        t = read_table(args.read)
        fresh = named_table(t.name, t.bound) if t.name in REP_NAMES else None
        same = None if fresh is None else bool(np.array_equal(fresh.values, t.values))
        _emit_json(out, {"rep": t.name, "degree": t.degree, "bound": t.bound, "matches_regenerated": same})
        return 0
    t = named_table(args.rep, args.bound)
    if args.out:
        write_table(t, args.out)
        back = read_table(args.out)
        _emit_json(
            out,
            {"rep": t.name, "degree": t.degree, "bound": t.bound, "path": args.out,
             "roundtrip_exact": bool(np.array_equal(back.values, t.values))},
        )
    elif args.format == "json":
        _emit_json(out, {"rep": t.name, "degree": t.degree, "bound": t.bound, "values": list(t.values[1:])})
    else:
        write_table(t, out)
    return 0


def cmd_special(args, out):
    if args.what == "w":
        p = WhittakerParams(args.kappa, _complex(args.nu))
        ys = _floats(args.y)
        rows = [{"y": y, "w": whittaker_w(p, y)} for y in ys]
        _emit_rows(out, rows, args.format)
        return 0
    rows = []
    for kappa, nu in ((0.5, "0"), (0.0, "0.3"), (0.0, "0.5i")) if args.kappa is None else ((args.kappa, args.nu),):
        p = WhittakerParams(kappa, _complex(nu))
        for s in _floats(args.s):
            lhs, rhs = whittaker_mellin_lhs(p, s, args.quad), whittaker_mellin_rhs(p, s)
            rows.append({"kappa": kappa, "nu": nu, "s": s, "lhs": lhs.real, "rhs": rhs.real,
                         "relerr": abs(lhs - rhs) / abs(rhs)})
    _emit_rows(out, rows, "csv" if args.format == "table" else args.format)
    return 0


def cmd_theta(args, out):
    f = _form(args.k, args.upper)
    th = theta_coeffs(f, SphericalPoly.parse(args.k, args.poly), args.bound)
    t = CoeffTable(f"theta_k{args.k}", args.k, args.bound, th.r)
    if args.out:
        write_table(t, args.out)
        _emit_json(out, {"k": args.k, "upper": f.upper(), "bound": args.bound, "path": args.out})
    elif args.format == "json":
        _emit_json(out, {"k": args.k, "upper": f.upper(), "bound": args.bound, "r": list(th.r)})
    else:
        write_table(t, out)
    return 0


def _table_for_support(rep: str, W: WeightFn, Y: float, scale: float = 1.0, extra: int = 0) -> CoeffTable:
    _, hi = W.index_range(Y, scale)
    return named_table(rep, hi + max(extra, 0) + 1)


def cmd_scp(args, out):
    t0 = time.perf_counter()
    W = _weight(args)
    if args.what == "quad":
        f = _form(args.k, args.upper)
        p = SphericalPoly.parse(args.k, args.poly)
        T = _table_for_support(args.rep, W, args.Y)
        val = quad_shift_sum(T, f, p, args.alpha, args.Y, W, route=args.route)
        _, vals = lattice_points(f, max(T.bound - args.alpha, 0))
        m = vals + args.alpha
        count = int(np.count_nonzero(W(m[m > 0] / args.Y)))
        params = {"rep": args.rep, "k": args.k, "upper": f.upper(), "poly": args.poly, "alpha": args.alpha,
                  "Y": args.Y, "route": args.route}
    elif args.what == "linear":
        A = _table_for_support(args.rep, W, args.Y, args.l1)
        B = _table_for_support(args.rep_b or args.rep, W, args.Y, args.l2)
        val = linear_shift_sum(A, B, args.l1, args.l2, args.alpha, args.Y, W, W)
        pairs = contributing_pairs(args.l1, args.l2, args.alpha, W.index_range(args.Y, args.l1))
        count = int(np.count_nonzero(W(pairs[:, 0] * args.l1 / args.Y) * W(pairs[:, 1] * args.l2 / args.Y))) if len(pairs) else 0
        params = {"rep": args.rep, "rep_b": args.rep_b or args.rep, "l1": args.l1, "l2": args.l2,
                  "alpha": args.alpha, "Y": args.Y}
    else:
        Ys = _floats(args.Ys)
        f = _form(args.k, args.upper)
        T = _table_for_support(args.rep, W, max(Ys))
        pts, fit = growth_experiment(T, f, args.alpha, Ys, W)
        lines = "".join(f"{math.log(Y):.17g} {math.log(S):.17g}\n" for Y, S in pts)
        if args.out:
            Path(args.out).write_text(lines)
        if args.format == "json":
            _emit_json(out, {"points": pts, "slope": fit.slope, "intercept": fit.intercept,
                             "residual": fit.residual, "prediction": growth_prediction(f.k)})
        else:
            out.write(lines)
        return 0
    record = {"params": params, "value": val, "term_count": count}
    if args.timing:
        # wall time is opt-in so that default output stays byte-identical across runs
        record["elapsed"] = round(time.perf_counter() - t0, 3)
    _emit_json(out, record)
    return 0


def cmd_lvalue(args, out):
    rep = named_rep(args.rep, COEFF_CEILING)
    chi = dirichlet_char(args.q, args.index)
    cfg = AFEConfig(kernel_width=args.width, cutoff_multiplier=args.mult, convention=args.convention)
    cv = central_value(rep, chi, cfg)
    _emit_json(out, {"C": cv.conductor, "value_re": cv.value.real, "value_im": cv.value.imag,
                     "epsilon": cv.epsilon, "residual": cv.residual, "terms": cv.terms})
    return 0


def cmd_mellin(args, out):
    f = _form(args.k, args.upper)
    p = SphericalPoly.parse(args.k, args.poly)
    T = named_table(args.rep, args.M)
    if args.what == "dseries":
        v = dirichlet_series_D(T, f, p, _complex(args.s), args.M, route=args.route)
        _emit_json(out, {"s": _complex(args.s), "value": v.value, "tail_bound": v.tail_bound, "terms": v.terms})
        return 0
    rows = []
    for s in args.s.split(","):
        spec = MellinSpec(T, f, p, args.kappa, _complex(args.nu), _complex(s), exponent=args.exponent)
        c = constant_coeff_mellin_closed(spec, args.M).value
        n = constant_coeff_mellin_numeric(spec, args.M).value
        rows.append({"kappa": args.kappa, "nu": args.nu, "s_re": spec.s.real, "s_im": spec.s.imag,
                     "closed": c.real, "numeric": n.real, "relerr": abs(c - n) / max(abs(c), 1e-300)})
    _emit_rows(out, rows, "csv" if args.format == "table" else args.format)
    return 0


def _exponent_rows(n: int, theta0: Fraction, us: Sequence[Fraction]) -> List[dict]:
    rows = []
    for u in us:
        d, o, e = exponent_calculator(ExponentInput(n, theta0, u))
        rows.append({"u": float(u), "e_diag": float(d), "e_offdiag": float(o), "e_final": float(e)})
    return rows


def cmd_amplify(args, out):
    if args.what == "moment":
        W = _weight(args)
        spec = AmplifierSpec(args.q, args.index, args.L, args.Y, _complex(args.w), W)
        T = _table_for_support(args.rep, W, args.Y)
        r = moment_S(T, args.q, args.index, spec)
        _emit_json(out, {"q": args.q, "L": args.L, "S": r.S, "lower_bound": r.lower_bound,
                         "ratio": r.ratio, "amplifier_size": r.amplifier_size})
        return 0
    th = Fraction(args.theta0)
    if args.what == "exponents":
        rows = _exponent_rows(args.n, th, [Fraction(args.u)])
        if args.format == "table":
            out.write("u e_diag e_offdiag e_final\n")
        _emit_rows(out, rows, "dat" if args.format == "table" else args.format)
        return 0
    rep = balance_report(args.n, th)
    us = [Fraction(i, args.steps) for i in range(args.steps + 1)]
    if args.format == "json":
        _emit_json(out, {"u_star": rep.u_star, "e_final": rep.e_final, "convexity": rep.convexity,
                         "beats_convexity": rep.beats_convexity, "quoted_u": rep.quoted_u,
                         "quoted_matches": rep.quoted_matches, "sweep": _exponent_rows(args.n, th, us)})
    else:
        _emit_rows(out, _exponent_rows(args.n, th, us), "csv")
        out.write(f"# u_star={float(rep.u_star)!r} e_final={float(rep.e_final)!r} "
                  f"beats_convexity={rep.beats_convexity} quoted_u={None if rep.quoted_u is None else float(rep.quoted_u)} "
                  f"quoted_matches={rep.quoted_matches}\n")
    return 0


def cmd_exponents(args, out):
    d, o, e = exponent_calculator(ExponentInput(args.n, Fraction(args.theta0), Fraction(args.u)))
    if args.format == "json":
        _emit_json(out, {"e_diag": d, "e_offdiag": o, "e_final": e})
    else:
        out.write(f"{float(e)!r}\n")
    return 0


def cmd_selftest(args, out):
    from .acceptance import CRITERIA, run_all

    numbers = None
    if args.only:
        numbers = [int(x) for x in args.only.split(",")]
        unknown = set(numbers) - {c[0] for c in CRITERIA}
        if unknown:
            raise ConfigError(f"no acceptance criterion numbered {sorted(unknown)}")
    results = run_all(lambda line: (out.write(line + "\n"), out.flush()), numbers)
    return 0 if all(r.passed and r.in_budget for r in results) else 1


# ---------------------------------------------------------------------------


def _natural_format(args) -> str:
    what = getattr(args, "what", None)
    if args.command == "amplify":
        return {"moment": "json", "exponents": "table", "balance": "csv"}[what]
    if args.command == "scp" and what == "growth":
        return "dat"
    return args.natural


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_weight(p):
    p.add_argument("--family", choices=("compact_bump", "gaussian_bump"), default="compact_bump")
    p.add_argument("--center", type=float, default=1.0)
    p.add_argument("--width", type=float, default=1.0)


def _add_form(p, upper="2"):
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--upper", default=upper, help="upper triangle of 2A, comma separated")
    p.add_argument("--poly", default="1", help="'1' or 'e0,e1:c;...'")


def build_parser(cfg: RunConfig, cfg_given: bool = False) -> argparse.ArgumentParser:
    """Each subcommand has a natural output format; a config file or --format overrides it."""
    ap = _Parser(prog="shiftconv", description="Shifted convolution sums and twisted L-values.")
    ap.add_argument("--config", help="key=value configuration file")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, natural="json", **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--format", choices=FORMATS, default=None)
        p.set_defaults(fn=fn, config_format=cfg.output_format if cfg_given else None, natural=natural)
        return p

    p = add("coeffs", cmd_coeffs, help="coefficient tables")
    p.add_argument("--rep", choices=REP_NAMES, default=cfg.rep_name)
    p.add_argument("--bound", type=int, default=cfg.table_bound)
    p.add_argument("--out")
    p.add_argument("--read", help="import a table and compare with a fresh one")

    p = add("special", cmd_special, natural="csv", help="Whittaker functions")
    p.add_argument("what", choices=("w", "mellin-check"))
    p.add_argument("--kappa", type=float)
    p.add_argument("--nu", default="0")
    p.add_argument("--y", default="1")
    p.add_argument("--s", default="1,1.5,2")

    p = add("theta", cmd_theta, help="theta coefficients r_{f,p}(m)")
    _add_form(p)
    p.add_argument("--bound", type=int, default=100)
    p.add_argument("--out")

    p = add("scp", cmd_scp, help="shifted convolution sums")
    p.add_argument("what", choices=("quad", "linear", "growth"))
    p.add_argument("--rep", choices=REP_NAMES, default=cfg.rep_name)
    p.add_argument("--rep-b", choices=REP_NAMES)
    _add_form(p)
    _add_weight(p)
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--Y", type=float, default=100.0)
    p.add_argument("--route", choices=("lattice", "theta"), default="lattice")
    p.add_argument("--l1", type=int, default=1)
    p.add_argument("--l2", type=int, default=2)
    p.add_argument("--Ys", default="1000,3000,10000,30000,100000")
    p.add_argument("--out", help="two-column .dat file for growth")
    p.add_argument("--timing", action="store_true", help="add wall time to JSON records")

    p = add("lvalue", cmd_lvalue, help="central value of a twisted L-function")
    p.add_argument("--rep", choices=REP_NAMES, default=cfg.rep_name)
    p.add_argument("--q", type=int, default=5)
    p.add_argument("--index", type=int, default=2)
    p.add_argument("--width", type=float, default=AFEConfig.kernel_width)
    p.add_argument("--mult", type=float, default=1.0)
    p.add_argument("--convention", choices=CONVENTIONS, default="verbatim")

    p = add("mellin", cmd_mellin, natural="csv", help="Mellin transform of the constant term; D(s)")
    p.add_argument("what", choices=("check", "dseries"))
    p.add_argument("--rep", choices=REP_NAMES, default=cfg.rep_name)
    _add_form(p)
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--nu", default="0")
    p.add_argument("--s", default="3")
    p.add_argument("--M", type=int, default=2000)
    p.add_argument("--exponent", choices=EXPONENTS, default="stated")
    p.add_argument("--route", choices=("theta", "lattice"), default="theta")

    p = add("amplify", cmd_amplify, help="amplified moment and exponent algebra")
    p.add_argument("what", choices=("moment", "exponents", "balance"))
    p.add_argument("--rep", choices=REP_NAMES, default=cfg.rep_name)
    p.add_argument("--q", type=int, default=5)
    p.add_argument("--index", type=int, default=1)
    p.add_argument("--L", type=float, default=10.0)
    p.add_argument("--Y", type=float, default=500.0)
    p.add_argument("--w", default="0")
    _add_weight(p)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--theta0", default="7/64")
    p.add_argument("--u", default="0")
    p.add_argument("--steps", type=int, default=20)

    p = add("exponents", cmd_exponents, natural="table", help="e_final for given n, theta0, u")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta0", default="7/64")
    p.add_argument("--u", default="0")

    p = add("selftest", cmd_selftest, help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")
    return ap


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = RunConfig()
        if "--config" in argv:
            i = argv.index("--config")
            if i + 1 >= len(argv):
                raise ConfigError("--config needs a path")
            cfg = load_config(argv[i + 1])
        args = build_parser(cfg, "--config" in argv).parse_args(argv)
        args.quad = QuadratureConfig(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol)
        if args.format is None:
            args.format = args.config_format or _natural_format(args)
        return args.fn(args, out)
    except ShiftconvError as exc:
        err.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
        return exc.exit_code
    except (ValueError, ZeroDivisionError, OSError) as exc:
        err.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
