"""Command-line front end.

Every command prints (or writes to ``--out``) a JSON report carrying the
grid and the library version, or a CSV table whose columns include
``u = log(2/t)`` next to ``t``.  Exit status: 0 on success, 2 when a
numeric verdict is inconclusive, 1 on errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from . import __version__
from .errors import RiOptError
from .funcrep import StepFn, format_float, grid_from_env, make_log_grid, parse_powlog, read_gridfn_csv
from .mazya import (
    MazyaParams,
    eta,
    geometric_sum_check,
    model_profile,
    omega_volume,
    psi,
    thm31_sandwich,
)
from .operators import CopsonOp, DilationOp, SupOp, default_family, op_norm_estimate
from .optimality import EmbeddingProblem, example_targets, reduction_check, thm38_pipeline
from .rearrange import rearrangement
from .spaces import FundamentalFn, fundamental, fundamental_orlicz, norm, parse_space

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
_DEFAULT_FORMAT = {"norm": "text", "rearrange": "csv"}
COMMANDS = ("norm", "rearrange", "fundamental", "embed", "opnorm", "mazya", "thm31", "witness", "report")


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1; status 2 is reserved for verdicts."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _clean(x):
    """JSON-safe copy: non-finite floats become strings, arrays become lists."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def _num(text: str) -> float:
    """Numbers with ``inf`` and simple fractions such as ``4/3``."""
    s = text.strip()
    if "/" in s:
        a, b = s.split("/", 1)
        return float(a) / float(b)
    return float(s)


def _grid(args):
    t_min, ppd = grid_from_env()
    return make_log_grid(args.t_min if args.t_min is not None else t_min, args.ppd if args.ppd is not None else ppd)


def _envelope(command: str, args, result: dict) -> dict:
    g = _grid(args)
    return {
        "command": command,
        "version": __version__,
        "grid": {"t_min": g.t_min, "points_per_decade": g.points_per_decade},
        "seed": args.seed,
        "result": result,
    }


def _emit_json(doc: dict, out: str | None) -> None:
    text = json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _emit_csv(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _u(t) -> np.ndarray:
    return np.log(2.0 / np.asarray(t, dtype=float))


def _function(args):
    if getattr(args, "fn_file", None):
        return read_gridfn_csv(args.fn_file)
    return parse_powlog(args.fn)


# --------------------------------------------------------------------------
# commands


def cmd_norm(args) -> int:
    s = parse_space(args.space)
    f = _function(args)
    g = _grid(args)
    val = norm(s, f, g)
    if args.format == "csv":
        _emit_csv(_table(["space", "value"], [[s.describe(), float(val)]]), args.out)
    elif args.out or args.format == "json":
        _emit_json(_envelope("norm", args, {"space": s.describe(), "fn": str(f), "value": val}), args.out)
    if not args.out and args.format == "text":
        print(format_float(val))
    return EXIT_OK


def cmd_rearrange(args) -> int:
    f = _function(args)
    g = _grid(args)
    r = rearrangement(f, g)
    t = g.nodes
    if args.format == "json":
        res = {"fn": str(f), "t": t, "f_star": r.star.values, "f_maximal": r.maximal.values}
        _emit_json(_envelope("rearrange", args, res), args.out)
    else:
        rows = zip(t, _u(t), r.star.values, r.maximal.values)
        _emit_csv(_table(["t", "u", "f_star", "f_maximal"], rows), args.out)
    return EXIT_OK


def cmd_fundamental(args) -> int:
    s = parse_space(args.space)
    g = _grid(args)
    phi = fundamental(s, g)
    vals = phi.values(g)
    if args.format == "csv":
        _emit_csv(_table(["t", "u", "phi"], zip(g.nodes, _u(g.nodes), vals)), args.out)
        return EXIT_OK
    A = fundamental_orlicz(phi)
    res = {
        "space": s.describe(),
        "label": phi.label,
        "fundamental_orlicz": A.describe(),
        "t": g.nodes,
        "phi": vals,
    }
    _emit_json(_envelope("fundamental", args, res), args.out)
    return EXIT_OK


def _verdict_status(verdict: str) -> int:
    return EXIT_INCONCLUSIVE if verdict == "inconclusive" else EXIT_OK


def _refinements(args):
    return tuple(_num(x) for x in args.refinements.split(","))


def cmd_embed(args) -> int:
    p = EmbeddingProblem(args.m, args.alpha, parse_space(args.domain), parse_space(args.target), n=args.n)
    wit = ("witness", parse_powlog(args.witness)) if args.witness else None
    fam = default_family(args.seed, args.n_random)
    rep = reduction_check(p, fam, _refinements(args), args.ppd, args.seed, wit)
    _emit_json(_envelope("embed", args, rep.to_dict()), args.out)
    return _verdict_status(rep.verdict)


def cmd_opnorm(args) -> int:
    if args.op == "copson":
        op = CopsonOp(args.m, args.alpha, args.n)
    elif args.op == "sup":
        op = SupOp(args.gamma)
    else:
        op = DilationOp(args.lam)
    fam = default_family(args.seed, args.n_random)
    rep = op_norm_estimate(op, parse_space(args.domain), parse_space(args.target), fam, _refinements(args), args.ppd, args.seed)
    _emit_json(_envelope("opnorm", args, rep.to_dict()), args.out)
    return _verdict_status(rep.verdict)


def cmd_mazya(args) -> int:
    p = MazyaParams(args.n, args.alpha, args.m)
    t = np.linspace(0.0, p.length, args.samples)
    radius = eta(p, t)
    if args.format == "csv":
        _emit_csv(_table(["depth", "eta"], zip(t, radius)), args.out)
        return EXIT_OK
    res = {
        "n": p.n,
        "alpha": p.alpha,
        "m": p.m,
        "length": p.length,
        "omega": p.omega,
        "volume": omega_volume(p),
        "t": t,
        "eta": radius,
    }
    _emit_json(_envelope("mazya", args, res), args.out)
    return EXIT_OK


def cmd_thm31(args) -> int:
    g = _grid(args)
    phi_Y = FundamentalFn(parse_powlog(args.phi), g)
    I = model_profile(args.alpha)
    sw = thm31_sandwich(phi_Y, I, g)
    ps = psi(args.alpha, phi_Y.phi, grid=g)
    geo = geometric_sum_check(args.alpha, phi_Y.phi, grid=g)
    res = {
        "phi_Y": phi_Y.label,
        "alpha": args.alpha,
        "sandwich": sw.to_dict(),
        "psi_max_gap": ps.max_gap,
        "geometric_sum": geo,
    }
    if args.format == "csv":
        rows = zip(sw.t, _u(sw.t), sw.lower, sw.phi_X, sw.upper)
        _emit_csv(_table(["t", "u", "lower", "phi_X", "upper"], rows), args.out)
    else:
        _emit_json(_envelope("thm31", args, res), args.out)
    ok = sw.holds and geo.get("holds", True) and ps.max_gap <= 1e-9
    return EXIT_OK if ok else EXIT_INCONCLUSIVE


def cmd_witness(args) -> int:
    rep = thm38_pipeline(args.m, args.alpha, args.q, args.beta, n=args.n, grid=_grid(args))
    t, S = rep.S_table
    table = _table(["t", "u", "S"], zip(t, _u(t), S))
    if args.format == "csv":
        _emit_csv(table, args.out)
    else:
        _emit_json(_envelope("witness", args, rep.to_dict()), args.out)
        if args.out:
            root, _ = os.path.splitext(args.out)
            _emit_csv(table, root + "_S.csv")
    return EXIT_OK if rep.verdict == "nonexistence_certified" else EXIT_INCONCLUSIVE


def _report_row(m: int, alpha: float) -> list:
    return example_targets(m, alpha)


def cmd_report(args) -> int:
    cases = [(args.m, a) for a in args.alphas]
    status = EXIT_OK
    rows, failures = [], []
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        futures = [pool.submit(_report_row, m, a) for m, a in cases]
        for (m, a), fut in zip(cases, futures):
            try:
                for r in fut.result():
                    rows.append({"m": m, "alpha": a, **r})
            except RiOptError as exc:
                failures.append({"m": m, "alpha": a, "error": str(exc)})
                status = EXIT_INCONCLUSIVE
    if args.format == "csv":
        header = ["m", "alpha", "q", "target", "stated_level_exponent", "measured_level_exponent"]
        _emit_csv(_table(header, [[r[h] for h in header] for r in rows]), args.out)
    else:
        _emit_json(_envelope("report", args, {"rows": rows, "failures": failures}), args.out)
    return status


# --------------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--t-min", type=_num, default=None, help="smallest grid node (default from RIOPT_GRID or 1e-30)")
    p.add_argument("--ppd", type=int, default=None, help="grid points per decade (default from RIOPT_GRID or 64)")
    p.add_argument("--out", default=None, help="output path (stdout when omitted)")
    p.add_argument("--format", choices=("json", "csv", "text"), default=None, help="output format (default depends on the command)")
    p.add_argument("--seed", type=int, default=0, help="seed of the random test family")
    return p


def _add_alpha(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--alpha", "--iso-exponent", dest="alpha", type=_num, required=required)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="riopt", description="Rearrangement-invariant norms and Sobolev embedding optimality.")
    parser.add_argument("--version", action="version", version=f"riopt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("norm", parents=[common], help="norm of a function in a space")
    p.add_argument("--space", required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--fn")
    grp.add_argument("--fn-file")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("rearrange", parents=[common], help="f* and f** on the grid")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--fn")
    grp.add_argument("--fn-file")
    p.set_defaults(func=cmd_rearrange)

    p = sub.add_parser("fundamental", parents=[common], help="fundamental function and fundamental Orlicz space")
    p.add_argument("--space", required=True)
    p.set_defaults(func=cmd_fundamental)

    for name, func in (("embed", cmd_embed), ("opnorm", cmd_opnorm)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--m", type=int, default=1)
        _add_alpha(p, required=name == "embed")
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--domain", required=True)
        p.add_argument("--target", required=True)
        p.add_argument("--n-random", type=int, default=100)
        p.add_argument("--refinements", default="1e-10,1e-20,1e-30")
        if name == "embed":
            p.add_argument("--witness", default=None, help="extra power-log test function")
        else:
            p.add_argument("--op", choices=("copson", "sup", "dilation"), default="copson")
            p.add_argument("--gamma", type=_num, default=0.5)
            p.add_argument("--lam", type=_num, default=0.5)
        p.set_defaults(func=func)

    p = sub.add_parser("mazya", parents=[common], help="model domain of the Maz'ya class")
    p.add_argument("--n", type=int, required=True)
    _add_alpha(p)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--samples", type=int, default=33)
    p.set_defaults(func=cmd_mazya)

    p = sub.add_parser("thm31", parents=[common], help="two-sided bounds for the fundamental function")
    p.add_argument("--phi", required=True, help="fundamental function of the target, power-log syntax")
    _add_alpha(p)
    p.set_defaults(func=cmd_thm31)

    p = sub.add_parser("witness", parents=[common], help="nonexistence of a largest Orlicz domain")
    p.add_argument("--m", type=int, default=1)
    _add_alpha(p)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--q", type=_num, default=math.inf)
    p.add_argument("--beta", type=_num, default=None)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("report", parents=[common], help="optimal targets for q in {1, 1/c, inf}")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--alphas", type=lambda s: [_num(x) for x in s.split(",")], default=[0.5])
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = _DEFAULT_FORMAT.get(args.command, "json")
    try:
        return int(args.func(args))
    except (RiOptError, OSError) as exc:
        print(f"riopt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
