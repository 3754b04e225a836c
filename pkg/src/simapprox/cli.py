"""Command-line entry point.

Exit status: 0 on success, 2 when a checked mathematical guarantee fails
(the reproduction payload goes to stderr), 1 on usage or precision errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import shlex
import sys
from dataclasses import dataclass, fields
from fractions import Fraction

from . import bounds, minimal, projections, suites
from .errors import ContractViolation, InputError, PrecisionError, SimApproxError
from .interval import DEFAULT_MAX_BITS, IntervalReal
from .lattice import Subspace
from .oracles import parse_oracle
from .poly import IntPolynomial

ENV_MAX_BITS = "SIMAPPROX_MAX_BITS"
FORMATS = ("jsonl", "csv", "pretty")

GRAMMAR = """\
oracle literals:
  alg:<c0,c1,...,cd>:<lo>,<hi>   root of c0 + c1 x + ... + cd x^d isolated in (lo, hi)
  dec:<digits>[@<bits>]          real within half a unit of the last digit
  cf:fib:<a>,<b>                 continued fraction [0; a, b, a, a, b, ...]
vector lists:  "1,2,4;1,1,1"     (vectors separated by ';', coordinates by ',')
config file:   the same flags as the command line, e.g.  --xi alg:-2,0,1:1,2 --n 1
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}\n{GRAMMAR}")


# -- run configuration --------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    xi: str | None = None
    n: int | None = None
    x_max: int | None = None
    max_bits: int = DEFAULT_MAX_BITS
    emit: str = "jsonl"
    seed: int = 0
    shards: int = 1

    _FLAGS = {"xi": "--xi", "n": "--n", "x_max": "--xmax", "max_bits": "--max-bits",
              "emit": "--format", "seed": "--seed", "shards": "--shards"}

    def to_text(self) -> str:
        parts = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                parts += [self._FLAGS[f.name], shlex.quote(str(value))]
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        parser = _Parser(prog="config", add_help=False)
        _add_common(parser, suppress=False)
        ns = parser.parse_args(_config_tokens(text))
        return cls()._merge(vars(ns))

    def _merge(self, values: dict) -> "RunConfig":
        kwargs = {f.name: getattr(self, f.name) for f in fields(self)}
        for name in kwargs:
            if values.get(name) is not None:
                kwargs[name] = values[name]
        return RunConfig(**kwargs)


def _config_tokens(text: str) -> list[str]:
    tokens = []
    for line in text.splitlines():
        tokens += shlex.split(line, comments=True)
    return tokens


def _add_common(parser, suppress: bool = True):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--xi", dest="xi", default=default, help="oracle literal")
    parser.add_argument("--n", dest="n", type=int, default=default)
    parser.add_argument("--xmax", dest="x_max", type=int, default=default)
    parser.add_argument("--max-bits", dest="max_bits", type=int, default=default)
    parser.add_argument("--format", dest="emit", choices=FORMATS, default=default)
    parser.add_argument("--seed", dest="seed", type=int, default=default)
    parser.add_argument("--shards", dest="shards", type=int, default=default)


def resolve_config(ns: argparse.Namespace, environ=None) -> RunConfig:
    """Defaults, then the environment, then ``--config``, then explicit flags."""
    environ = os.environ if environ is None else environ
    cfg = RunConfig()
    if environ.get(ENV_MAX_BITS):
        try:
            cfg = cfg._merge({"max_bits": int(environ[ENV_MAX_BITS])})
        except ValueError:
            raise UsageError(f"{ENV_MAX_BITS} must be an integer")
    path = getattr(ns, "config", None)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}")
        cfg = cfg._merge(vars(RunConfig.parse(text)))
    return cfg._merge({f.name: getattr(ns, f.name, None) for f in fields(RunConfig)})


# -- output -----------------------------------------------------------------------


def _plain(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, IntervalReal):
        return {"lo": str(value.lo), "hi": str(value.hi)}
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


class Emitter:
    def __init__(self, fmt: str, out, tabular: bool = False):
        if fmt == "csv" and not tabular:
            raise UsageError("csv output is available for table subcommands only")
        self.fmt, self.out = fmt, out
        self._csv = None

    def row(self, record: dict):
        record = _plain(record)
        if self.fmt == "jsonl":
            self.out.write(json.dumps(record) + "\n")
        elif self.fmt == "csv":
            if self._csv is None:
                self._csv = csv.DictWriter(self.out, fieldnames=list(record), lineterminator="\n")
                self._csv.writeheader()
            self._csv.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v
                                for k, v in record.items()})
        else:
            self.out.write("  ".join(f"{k}={v}" for k, v in record.items()) + "\n")


def _vectors(text: str) -> list[tuple[int, ...]]:
    text = text.strip()
    if not text:
        return []
    try:
        return [tuple(int(c) for c in part.split(",")) for part in text.split(";")]
    except ValueError:
        raise UsageError(f"bad vector list {text!r}\n{GRAMMAR}")


def _subspace(text: str, ambient: int | None) -> Subspace:
    vecs = _vectors(text)
    if not vecs and ambient is None:
        raise UsageError("an empty basis needs --ambient")
    return Subspace.from_spanning_set(vecs, ambient)


def _need(cfg: RunConfig, *names):
    missing = [RunConfig._FLAGS[n] for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(missing)}\n{GRAMMAR}")


# -- commands ---------------------------------------------------------------------------


def cmd_bounds_table(args, cfg, out):
    em = Emitter(cfg.emit, out, tabular=True)
    for row in bounds.emit_table1(args.bits):
        em.row(row.display(args.digits))
    return 0


def cmd_bounds_verify(args, cfg, out):
    em = Emitter(cfg.emit, out, tabular=True)
    reports = bounds.verify_thm11_conditions(args.n_from, args.n_to, args.bits, cfg.max_bits)
    for r in reports:
        em.row(r.to_json())
    failed = [r.n for r in reports if not r.passed]
    if failed:
        raise ContractViolation("conditions fail for some n", {"failed": failed})
    return 0


def cmd_bounds_root(args, cfg, out):
    em = Emitter(cfg.emit, out, tabular=True)
    try:
        poly = IntPolynomial.parse(args.poly)
    except ValueError as exc:
        raise UsageError(f"bad polynomial {args.poly!r}: {exc}")
    interval = None
    if args.interval:
        lo, _, hi = args.interval.partition(",")
        interval = (Fraction(lo), Fraction(hi))
    root = bounds.unique_positive_root(poly, args.bits, interval)
    em.row({"poly": str(poly), "lo": root.lo, "hi": root.hi,
            "approx": float(root.mid), "sign_lo": poly.sign_at(root.lo),
            "sign_hi": poly.sign_at(root.hi)})
    return 0


def cmd_bounds_bracket(args, cfg, out):
    em = Emitter(cfg.emit, out, tabular=True)
    rows = bounds.bracket_check(args.m_from, args.m_to)
    for r in rows:
        em.row(r.to_json())
    failed = [r.m for r in rows if not r.passed]
    if failed:
        raise ContractViolation("bracketing fails for some m", {"failed": failed})
    return 0


def _records(args, cfg) -> list[minimal.MinimalPointRecord]:
    if getattr(args, "input", None):
        fh = sys.stdin if args.input == "-" else open(args.input, encoding="utf-8")
        with fh:
            return [minimal.MinimalPointRecord.from_json(json.loads(line))
                    for line in fh if line.strip()]
    _need(cfg, "xi", "n", "x_max")
    xi = parse_oracle(cfg.xi)
    return minimal.enumerate_minimal_points(xi, cfg.n, cfg.x_max, cfg.max_bits, cfg.shards,
                                            args.allow_degenerate)


def cmd_minimal_run(args, cfg, out):
    em = Emitter(cfg.emit, out)
    for rec in _records(args, cfg):
        em.row(rec.to_json())
    return 0


def _float(iv):
    return None if iv is None else float(iv.mid)


def cmd_minimal_exponents(args, cfg, out):
    em = Emitter(cfg.emit, out)
    est = minimal.estimate_exponents(_records(args, cfg), args.window)
    em.row({"records": len(est.lambda_running), "window": est.window,
            "lambda_hat_slope": est.lambda_hat_slope, "lambda_slope": est.lambda_slope,
            "lambda_hat_window_min": _float(est.lambda_hat_liminf),
            "lambda_window_max": _float(est.lambda_limsup),
            "lambda_hat_running": [_float(v) for v in est.lambda_hat_running],
            "lambda_running": [_float(v) for v in est.lambda_running]})
    return 0


def cmd_minimal_structure(args, cfg, out):
    em = Emitter(cfg.emit, out)
    records = _records(args, cfg)
    st = minimal.build_structure(records)
    heights = minimal.consecutive_heights(records)
    bad = [i for i, ok, _ in heights if not ok]
    if bad:
        raise ContractViolation("H(<x_i, x_i+1>) differs from the wedge norm",
                                {"indices": bad, "records": [r.to_json() for r in records]})
    em.row({"n": st.n, "records": len(records), "I": st.I,
            "sigma": {f"{j},{i}": q for (j, i), q in sorted(st.sigma.items())},
            "Y_squared": {f"{j},{i}": y for (j, i), y in sorted(st.Y_squared.items())},
            "height_ratios": [[a, b, float(r.mid)] for a, b, r in st.height_ratios],
            "wedge_ratios": [[i, float(r.mid)] for i, _, r in heights]})
    return 0


def cmd_minimal_checkp(args, cfg, out):
    em = Emitter(cfg.emit, out)
    records = _records(args, cfg)
    st = minimal.build_structure(records)
    em.row(minimal.check_P(records, st, args.j, args.ell, args.i0).to_json())
    return 0


def cmd_uop_profile(args, cfg, out):
    em = Emitter(cfg.emit, out)
    A = _subspace(args.basis, args.ambient)
    prof = projections.dimension_profile(A)
    problems = prof.check(A.dim)
    if problems:
        raise ContractViolation("dimension profile laws fail",
                                {"A": [list(v) for v in A.basis], "profile": prof.values,
                                 "problems": problems})
    em.row({"n": prof.n, "dim": A.dim, "profile": list(prof.values),
            "tail_start": prof.tail_start(), "concave": prof.is_concave(),
            "corollary": prof.corollary_holds()})
    return 0


def cmd_uop_project(args, cfg, out):
    em = Emitter(cfg.emit, out)
    A = _subspace(args.basis, args.ambient)
    em.row(projections.u_ell(A, args.ell).to_json())
    return 0


def cmd_uop_degeneracy(args, cfg, out):
    em = Emitter(cfg.emit, out)
    A = _subspace(args.basis, args.ambient)
    rep = projections.analyze_degeneracy(A, args.j, args.ell, _vectors(args.probes or ""))
    if rep is None:
        em.row({"degenerate": False})
    else:
        em.row({"degenerate": True, "d": rep.d, "t_range": list(rep.t_range),
                "V": [list(v) for v in rep.V.basis], "dims": list(rep.dims),
                "height_ratios": [str(r.lo) for r in rep.height_ratios],
                "probes_checked": rep.probes_checked})
    return 0


def cmd_uop_avoid(args, cfg, out):
    em = Emitter(cfg.emit, out)
    A = _subspace(args.basis, args.ambient)
    V = _subspace(args.v_basis or "", A.ambient_dim - args.ell)
    em.row({"a": list(projections.find_avoiding_map(A, args.ell, V))})
    return 0


def cmd_uop_construct_c(args, cfg, out):
    em = Emitter(cfg.emit, out)
    V = _subspace(args.v_basis, None)
    (x,) = _vectors(args.x)
    k = V.ambient_dim - 1
    C = minimal.construct_C(V, x, k, len(x) - k - 1)
    em.row({"C": list(C), "zero": not any(C)})
    return 0


def cmd_subspace(args, cfg, out):
    em = Emitter(cfg.emit, out)
    U = _subspace(args.basis, args.ambient)
    op = args.op
    if op == "show":
        em.row(U.to_json())
    elif op == "complement":
        em.row(U.orthogonal_complement().to_json())
    elif op == "plucker":
        em.row({"plucker": U.plucker()})
    else:
        if args.other is None:
            raise UsageError(f"subspace {op} needs --other")
        V = _subspace(args.other, U.ambient_dim)
        if op == "sum":
            em.row((U + V).to_json())
        elif op == "intersect":
            em.row((U & V).to_json())
        else:
            lhs = (U & V).height_squared * (U + V).height_squared
            rhs = U.height_squared * V.height_squared
            if lhs > rhs:
                raise ContractViolation("Schmidt inequality fails",
                                        {"U": [list(v) for v in U.basis], "V": [list(v) for v in V.basis]})
            em.row({"lhs": lhs, "rhs": rhs, "holds": True})
    return 0


def cmd_proptest(args, cfg, out):
    em = Emitter(cfg.emit, out)
    try:
        results = suites.run(args.suite, cfg.seed, args.cases)
    except KeyError as exc:
        raise UsageError(str(exc.args[0]))
    for r in results:
        em.row(r.to_json())
    total = sum(r.cases for r in results)
    failed = [r.name for r in results if not r.passed]
    em.row({"summary": "FAIL" if failed else "PASS", "suites": len(results), "cases": total})
    if failed:
        raise ContractViolation("property suites failed",
                                {"seed": cfg.seed, "failures": {r.name: r.failures[:3] for r in results if r.failures}})
    return 0


# -- parser ---------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    _add_common(common)
    common.add_argument("--config", help="file with default flags")

    parser = _Parser(prog="simapprox", description=__doc__.splitlines()[0],
                     epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def sub(group_parsers, name, func, **kw):
        p = group_parsers.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=func)
        return p

    b = groups.add_parser("bounds", help="certified bound values").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = sub(b, "table", cmd_bounds_table)
    p.add_argument("--digits", type=int, default=4)
    p.add_argument("--bits", type=int, default=64)
    p = sub(b, "verify-thm11", cmd_bounds_verify)
    p.add_argument("--from", dest="n_from", type=int, required=True)
    p.add_argument("--to", dest="n_to", type=int, required=True)
    p.add_argument("--bits", type=int, default=64)
    p = sub(b, "root", cmd_bounds_root)
    p.add_argument("--poly", required=True, help="coefficients, constant term first")
    p.add_argument("--interval", help="lo,hi restricting the search")
    p.add_argument("--bits", type=int, default=64)
    p = sub(b, "bracket", cmd_bounds_bracket)
    p.add_argument("--m-from", type=int, required=True)
    p.add_argument("--m-to", type=int, required=True)

    m = groups.add_parser("minimal", help="minimal points").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    for name, func in (("run", cmd_minimal_run), ("exponents", cmd_minimal_exponents),
                       ("structure", cmd_minimal_structure), ("checkP", cmd_minimal_checkp)):
        p = sub(m, name, func)
        p.add_argument("--allow-degenerate", action="store_true",
                       help="accept xi of degree <= n")
        if name != "run":
            p.add_argument("--input", help="JSON-lines records from 'minimal run' ('-' = stdin)")
        if name == "exponents":
            p.add_argument("--window", type=int)
        if name == "checkP":
            p.add_argument("--j", type=int, required=True)
            p.add_argument("--ell", type=int, required=True)
            p.add_argument("--i0", type=int, default=0)

    u = groups.add_parser("uop", help="window projections").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = sub(u, "profile", cmd_uop_profile)
    p.add_argument("--basis", required=True)
    p.add_argument("--ambient", type=int)
    p = sub(u, "project", cmd_uop_project)
    p.add_argument("--basis", required=True)
    p.add_argument("--ambient", type=int)
    p.add_argument("--ell", type=int, required=True)
    p = sub(u, "degeneracy", cmd_uop_degeneracy)
    p.add_argument("--basis", required=True)
    p.add_argument("--ambient", type=int)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--probes")
    p = sub(u, "avoid", cmd_uop_avoid)
    p.add_argument("--basis", required=True)
    p.add_argument("--ambient", type=int)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--v-basis", default="")
    p = sub(u, "construct-c", cmd_uop_construct_c)
    p.add_argument("--v-basis", required=True)
    p.add_argument("--x", required=True)

    p = groups.add_parser("subspace", parents=[common], help="heights and lattice operations")
    p.set_defaults(func=cmd_subspace)
    p.add_argument("op", choices=("show", "complement", "plucker", "sum", "intersect", "schmidt"))
    p.add_argument("--basis", required=True)
    p.add_argument("--ambient", type=int)
    p.add_argument("--other")

    p = groups.add_parser("proptest", parents=[common], help="seeded property suites")
    p.set_defaults(func=cmd_proptest)
    p.add_argument("--suite", default="all")
    p.add_argument("--cases", type=int, default=suites.CASES)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        return args.func(args, cfg, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 1
    except ContractViolation as exc:
        err.write(f"CONTRACT VIOLATION: {exc}\n")
        err.write(json.dumps(_plain(exc.payload), default=str) + "\n")
        return 2
    except PrecisionError as exc:
        err.write(f"precision error: {exc}\n")
        return 1
    except (InputError, SimApproxError) as exc:
        err.write(f"error: {exc}\n")
        return 1


def main_entry():
    sys.exit(main())
