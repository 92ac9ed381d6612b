"""Command-line front end: figure data, bounds tables, single evaluations, and
oracle verification, written as CSV or JSON.

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .bounds import CurveBank, compute_cj, compute_fj_curve
from .collective import depth_of_entanglement, xi_parameter
from .moments import (
    Form,
    GenuineKind,
    HybridPartition,
    MeasurementSettings,
    evaluate_correlated_cfrd,
    genuine_form,
    ghz_mabk_moment,
    mabk_result,
    optimize_amplitudes,
    optimize_mabk_settings,
)
from .oracle import (
    Objective,
    chsh_lhv_max,
    genuine_entanglement_max,
    hybrid_max,
    svetlichny_max,
)
from .spin import Convention, SpinMagnitude
from .states import BECParams, CorrelatedStateSpec, bec_ground_state, schwinger_moments

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _spin(text: str) -> SpinMagnitude:
    try:
        return SpinMagnitude.of(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid spin {text!r}: expected 1/2, 1, 3/2, ...") from exc


def default_g_grid(g_max: float, points: int) -> np.ndarray:
    """Ng/kappa = 0 followed by geometric spacing from g_max/2000 up to g_max."""
    if points < 2:
        return np.array([0.0])
    return np.concatenate([[0.0], np.geomspace(g_max / 2000, g_max, points - 1)])


# -- output -------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    return v


def render(columns, rows, fmt: str, meta: dict) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])
        return buf.getvalue()
    payload = {"meta": meta, "rows": [{c: _jsonable(row[c]) for c in columns} for row in rows]}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _meta(args) -> dict:
    config = {k: (str(v) if isinstance(v, SpinMagnitude) else v)
              for k, v in sorted(vars(args).items()) if k not in ("func", "inject_error", "out", "curves_out") and not k.startswith("_")}
    return {"command": args.command, "config": config, "version": __version__, "seed": args.seed}


# -- subcommands ----------------------------------------------------------------

_MODES = {"bell": lambda n: 0, "steer": lambda n: 1, "ent": lambda n: n}


def cmd_fig2(args):
    if args.j not in (SpinMagnitude(1), SpinMagnitude(2)):
        raise UsageError("fig2 supports --j 1/2 or --j 1")
    if not 2 <= args.n <= 20:
        raise UsageError("fig2 needs 2 <= --n <= 20")
    modes = list(_MODES) if args.t_mode == "all" else [args.t_mode]
    cj = compute_cj(args.j)
    r_cols = [f"r{k}" for k in range(args.j.d)]
    rows = []
    for mode in modes:
        for n in range(2, args.n + 1):
            t = _MODES[mode](n)
            r, _, res = optimize_amplitudes(n, args.j, HybridPartition(t), seed=args.seed, cj=cj)
            row = {"N": n, "j": str(args.j), "T": t, "mode": mode,
                   "lhs": res.lhs, "rhs": res.rhs, "ratio": res.ratio}
            row.update({c: float(v) for c, v in zip(r_cols, r)})
            rows.append(row)
    return ["N", "j", "T", "mode", "lhs", "rhs", "ratio"] + r_cols, rows


def _g_values(args):
    if args.g_max < 0:
        raise UsageError("--g-max must be non-negative")
    if args.grid < 1:
        raise UsageError("--grid must be >= 1")
    return default_g_grid(args.g_max, args.grid)


def cmd_fig4(args):
    if not 1 <= args.n <= 5000:
        raise UsageError("fig4 needs 1 <= --n <= 5000")
    rows = []
    j = args.n / 2
    for ng in _g_values(args):
        m = schwinger_moments(bec_ground_state(BECParams(args.n, 1.0, ng / args.n)))
        rows.append({"Ng_over_kappa": float(ng), "var_z_over_J": m.var_z / j,
                     "var_x_over_J": m.var_x / j, "xi": xi_parameter(m)})
    return ["Ng_over_kappa", "var_z_over_J", "var_x_over_J", "xi"], rows


def cmd_fig6(args):
    ns = args.n_list or [args.n]
    if any(not 2 <= n <= 5000 for n in ns):
        raise UsageError("fig6 needs every N in [2, 5000]")
    bank = CurveBank(mode="exact")
    rows = []
    for n in ns:
        j = n / 2
        for ng in _g_values(args):
            m = schwinger_moments(bec_ground_state(BECParams(n, 1.0, ng / n)))
            depth = depth_of_entanglement(m, bank)
            rows.append({"N": n, "Ng_over_kappa": float(ng), "mean_x_over_J": abs(m.mean_x) / j,
                         "var_z_over_J": m.var_z / j, "n0": depth.n0})
    return ["N", "Ng_over_kappa", "mean_x_over_J", "var_z_over_J", "n0"], rows


def cmd_bounds(args):
    if not SpinMagnitude(1) <= args.j <= SpinMagnitude(8):
        raise UsageError("bounds needs 1/2 <= --j <= 4")
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    spins = [SpinMagnitude(k) for k in range(1, args.j.two_j + 1)]
    rows = []
    for mag in spins:
        conventions = [Convention.STANDARD] + ([Convention.PAULI] if mag.two_j == 1 else [])
        for conv in conventions:
            cj = compute_cj(mag, conv)
            rows.append({"j": str(mag), "convention": conv.value, "C_J": cj.value, "dual_gap": cj.dual_gap})
    if args.curves_out:
        curves = [compute_fj_curve(mag, args.samples) for mag in spins]
        cols = ["x"] + [f"F_{m}" for m in spins]
        crow = [dict(zip(cols, [x] + [c.ys[i] for c in curves])) for i, x in enumerate(curves[0].xs)]
        emit(render(cols, crow, "csv", {}), args.curves_out)
    return ["j", "convention", "C_J", "dual_gap"], rows


def cmd_mabk(args):
    if args.n < 2:
        raise UsageError("mabk needs --n >= 2")
    t = args.t if args.t is not None else 0
    if not 0 <= t <= args.n:
        raise UsageError("mabk needs 0 <= --t <= --n")
    genuine = GenuineKind(args.genuine) if args.genuine else None
    form = Form(args.form)
    if genuine is None and t == 0 and ((form is Form.SINGLE) == (args.n % 2 == 0)):
        raise UsageError("with --t 0 use --form single for odd N and --form sum for even N")
    settings, moment = optimize_mabk_settings(args.n, form if genuine is None else genuine_form(genuine))
    res = mabk_result(ghz_mabk_moment(args.n, settings), args.n, HybridPartition(t), form, genuine)
    row = {"N": args.n, "T": t, "inequality_id": res.inequality_id, "re": moment.real, "im": moment.imag,
           "lhs": res.lhs, "rhs": res.rhs, "ratio": res.ratio, "verdict": res.verdict.value,
           "theta0": settings.angles[0], "delta": settings.angles[1] - settings.angles[0] if args.n > 1 else 0.0,
           "sign": settings.signs[0]}
    return list(row), [row]


def cmd_cfrd(args):
    if args.n < 1:
        raise UsageError("cfrd needs --n >= 1")
    t = args.t if args.t is not None else args.n
    if not 0 <= t <= args.n:
        raise UsageError("cfrd needs 0 <= --t <= --n")
    cj = compute_cj(args.j)
    part = HybridPartition(t)
    if args.r:
        if len(args.r) != args.j.d:
            raise UsageError(f"--r needs {args.j.d} values for J={args.j}")
        spec = CorrelatedStateSpec(args.n, args.j, tuple(args.r))
        settings = MeasurementSettings.ladder(args.n)
        res = evaluate_correlated_cfrd(spec, settings, part, cj)
        r = np.asarray(args.r, dtype=float)
    else:
        if args.n < 2:
            raise UsageError("amplitude optimization needs --n >= 2")
        r, _, res = optimize_amplitudes(args.n, args.j, part, seed=args.seed, cj=cj)
    row = {"N": args.n, "j": str(args.j), "T": t, "lhs": res.lhs, "rhs": res.rhs,
           "ratio": res.ratio, "verdict": res.verdict.value}
    row.update({f"r{k}": float(v) for k, v in enumerate(r)})
    return list(row), [row]


def cmd_verify(args):
    if not 2 <= args.n <= 8:
        raise UsageError("verify needs 2 <= --n <= 8")
    reports = []
    for n in range(1, args.n + 1):
        for obj in Objective:
            for t in range(n + 1):
                reports.append(hybrid_max(n, t, obj))
        if n >= 2:
            reports.append(svetlichny_max(n))
            for obj in Objective:
                reports.append(genuine_entanglement_max(n, obj))
    reports.append(chsh_lhv_max())
    rows = [r.as_row() for r in reports]
    if args.inject_error:
        rows[0]["analytic_bound"] += 1.0
        rows[0]["agrees"] = abs(rows[0]["oracle_max"] - rows[0]["analytic_bound"]) <= 1e-6
    args._failed = not all(r["agrees"] for r in rows)
    return ["inequality_id", "n", "t", "oracle_max", "analytic_bound", "agrees"], rows


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nonlocality", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, n_default, fmt_default="csv"):
        sp.add_argument("--n", type=int, default=n_default)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    sp = sub.add_parser("fig2", help="CFRD L/R ratios versus N for optimized amplitudes")
    common(sp, 10)
    sp.add_argument("--j", type=_spin, default=SpinMagnitude(2))
    sp.add_argument("--t-mode", choices=("bell", "steer", "ent", "all"), default="all")
    sp.set_defaults(func=cmd_fig2)

    for name, helptext, fn, grid in (
        ("fig4", "BEC squeezing sweep", cmd_fig4, 60),
        ("fig6", "BEC minimum-variance data and entanglement depth", cmd_fig6, 30),
    ):
        sp = sub.add_parser(name, help=helptext)
        common(sp, 100)
        sp.add_argument("--g-max", type=float, default=200.0, help="largest Ng/kappa")
        sp.add_argument("--grid", type=int, default=grid, help="number of Ng/kappa points")
        sp.set_defaults(func=fn)
    sp.add_argument("--n-list", type=int, nargs="+", default=None, help="several atom numbers")

    sp = sub.add_parser("bounds", help="C_J table and F_J curves")
    common(sp, 0)
    sp.add_argument("--j", type=_spin, default=SpinMagnitude(8), help="largest J")
    sp.add_argument("--samples", type=int, default=1001, help="F_J samples per curve")
    sp.add_argument("--curves-out", default=None, help="CSV file for the F_J curves")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("mabk", help="GHZ MABK moment against a hybrid or genuine threshold")
    common(sp, 3)
    sp.add_argument("--t", type=int, default=None)
    sp.add_argument("--form", choices=[f.value for f in Form], default="single")
    sp.add_argument("--genuine", choices=[k.value for k in GenuineKind], default=None)
    sp.set_defaults(func=cmd_mabk)

    sp = sub.add_parser("cfrd", help="CFRD ratio for the correlated spin-J family")
    common(sp, 3)
    sp.add_argument("--j", type=_spin, default=SpinMagnitude(2))
    sp.add_argument("--t", type=int, default=None, help="trusted sites (default N)")
    sp.add_argument("--r", type=float, nargs="+", default=None, help="amplitudes r_m for m=-J..J")
    sp.set_defaults(func=cmd_cfrd)

    sp = sub.add_parser("verify", help="oracle check of every classical bound")
    common(sp, 8, fmt_default="json")
    sp.add_argument("--inject-error", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        columns, rows = args.func(args)
    except UsageError as exc:
        print(f"nonlocality {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit(render(columns, rows, args.format, _meta(args)), args.out)
    if getattr(args, "_failed", False):
        print("verification failed: oracle and analytic bounds disagree", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
