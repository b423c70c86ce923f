"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 invalid input or output path,
3 flat metric where F is needed, 4 non-convergence / failed check under
--strict.  Matrices and brackets are always printed as JSON with full
round-trip precision; --format selects csv (17 significant digits) or a
human table (6 digits) for row-shaped output.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from io import StringIO

import numpy as np

from . import almost_abelian as aa_mod
from . import io
from . import lie_core as lc
from . import soliton_search as ss
from .errors import DegenerateError, FlatMetricError, MalformedInputError, PreconditionError

VERBS = ("check", "ricci", "pinch", "grad", "critical", "hessian", "flow",
         "soliton", "beta", "bound", "table1", "family")

FAMILY_COLUMNS = ["t", "F_closed", "F_computed", "abs_diff", "flag"]
TABLE1_COLUMNS = ["row", "printed_type", "computed_type", "printed_q", "computed_q", "status", "note"]
FLOW_COLUMNS = ["iteration", "F", "monitor"]
FAMILY_TOL = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="solvpinch", description="Ricci pinching of solvmanifold metrics.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--matrix", help="almost-abelian matrix A: JSON file or inline JSON")
    p.add_argument("--bracket", help="structure constants: JSON file or inline JSON")
    p.add_argument("--family", help="family name (" + ", ".join(aa_mod.FAMILIES) + ")")
    p.add_argument("--t", type=float, help="family parameter")
    p.add_argument("--t-range", help="family sweep range 'tmin:tmax'")
    p.add_argument("--steps", type=int, default=10, help="number of sweep points (default 10)")
    p.add_argument("--n", type=int, help="ambient dimension (bound, family padding)")
    p.add_argument("--m", type=int, help="nilradical dimension (bound)")
    p.add_argument("--type", dest="beta_type", help="beta type as JSON list (bound)")
    p.add_argument("--direction", help="variation direction B as JSON matrix (hessian)")
    p.add_argument("--method", choices=("ascent", "double-bracket"), default="ascent")
    p.add_argument("--config", help="flow config JSON")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rows", help="comma-separated Table 1 rows, e.g. mu3,mu4")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "table"), default="csv")
    return p


# --------------------------------------------------------------------------
# helpers

def _tol():
    raw = os.environ.get("SOLVPINCH_TOL")
    if raw is None:
        return lc.DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise MalformedInputError(f"SOLVPINCH_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise MalformedInputError("SOLVPINCH_TOL must be positive")
    return tol


def _one_input(args, allow=("matrix", "bracket", "family")):
    given = [k for k in ("matrix", "bracket", "family") if getattr(args, k) is not None]
    if len(given) != 1 or given[0] not in allow:
        raise UsageError(f"{args.verb} needs exactly one of " + ", ".join("--" + a for a in allow))
    return given[0]


def _matrix(args, tol):
    return io.parse_matrix(io.load_json_arg(args.matrix), tol)


def _bracket(args, tol):
    return io.parse_bracket(io.load_json_arg(args.bracket), tol)


def _family_member(args):
    if args.t is None:
        raise UsageError("--family needs --t")
    return aa_mod.family(args.family, args.t, args.n)


def _as_bracket(args, tol):
    kind = _one_input(args)
    if kind == "bracket":
        return _bracket(args, tol)
    aa = _matrix(args, tol) if kind == "matrix" else _family_member(args).aa
    return aa_mod.bracket_of(aa)


def _as_matrix(args, tol):
    kind = _one_input(args, ("matrix", "family"))
    return _matrix(args, tol) if kind == "matrix" else _family_member(args).aa


class _Out:
    """Collects output and writes it to --out or stdout at the end."""

    def __init__(self, path):
        self.path = path
        self.chunks = []

    def line(self, s=""):
        self.chunks.append(s + "\n")

    def json(self, obj):
        self.line(json.dumps(obj))

    def rows(self, header, rows, fmt):
        if fmt == "csv":
            buf = StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
            self.chunks.append(buf.getvalue())
        else:
            widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(h)
                      for i, h in enumerate(header)]
            self.line("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
            for r in rows:
                self.line("  ".join(str(x).ljust(w) for x, w in zip(r, widths)).rstrip())

    def flush(self):
        text = "".join(self.chunks)
        if self.path in (None, "-"):
            sys.stdout.write(text)
            return
        tmp = f"{self.path}.tmp{os.getpid()}"
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, self.path)


def _num(x, fmt):
    return io.fmt_csv(x) if fmt == "csv" else io.fmt_table(x)


def _frac_list(vals):
    return "(" + ", ".join(str(Fraction(v).limit_denominator(120)) for v in vals) + ")"


def _check_out_path(path):
    if path in (None, "-"):
        return
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d) or not os.access(d, os.W_OK) or os.path.isdir(path):
        raise MalformedInputError(f"cannot write output file {path!r}")


# --------------------------------------------------------------------------
# verbs

def cmd_check(args, out, tol):
    mu = _as_bracket(args, tol)
    diag = lc.validate_bracket(mu.c, tol)
    verdict = lc.classify_type(mu, seed=args.seed) if lc.is_solvable(mu) else None
    out.json({
        "dim": mu.dim,
        "antisymmetry": diag.antisymmetry,
        "jacobi": diag.jacobi,
        "nilpotent": lc.is_nilpotent(mu),
        "solvable": lc.is_solvable(mu),
        "unimodular": lc.is_unimodular(mu),
        "type": verdict.kind if verdict else None,
        "type_heuristic": verdict.heuristic if verdict else None,
        "flat": lc.flatness_test(mu),
    })
    return 0


def cmd_ricci(args, out, tol):
    mu = _as_bracket(args, tol)
    curv = lc.ricci(mu)
    out.json({"ric": curv.ric.tolist(), "scal": curv.scal, "ric_norm_sq": curv.ric_norm_sq, "F": curv.F})
    return 0


def cmd_pinch(args, out, tol):
    kind = _one_input(args)
    if kind == "bracket":
        F = lc.pinching_F(_bracket(args, tol))
    else:
        F = aa_mod.F_aa(_as_matrix(args, tol))
    out.line(repr(float(F)))
    return 0


def cmd_grad(args, out, tol):
    aa = _as_matrix(args, tol)
    og = aa_mod.grad_F_orbit(aa)
    out.json({
        "grad": aa_mod.grad_F(aa).tolist(),
        "orbit_tangent": og.tangent.tolist(),
        "orbit_normal_residual": og.residual,
    })
    return 0


def cmd_critical(args, out, tol):
    aa = _as_matrix(args, tol)
    verdict = aa_mod.solvsoliton_test_aa(aa)
    out.json({
        "critical_residual": aa_mod.critical_residual(aa),
        "relative_residual": aa_mod.critical_residual(aa) / aa.norm_sq ** 4,
        "orbit_critical": aa_mod.is_orbit_critical(aa),
        "global": aa_mod.global_critical_test(aa),
        "solvsoliton": verdict.kind,
        "c": verdict.c,
    })
    return 0


def cmd_hessian(args, out, tol):
    aa = _as_matrix(args, tol)
    if args.direction is not None:
        B = np.array(io.parse_matrix(io.load_json_arg(args.direction)).A)
        if B.shape != aa.A.shape:
            raise MalformedInputError("direction must have the same shape as A")
    else:
        B = aa.AAt
    res = {
        "second_variation": aa_mod.second_variation(aa, B),
        "finite_difference": aa_mod.second_variation_fd(aa, B),
        "classification": aa_mod.local_max_classify(aa, seed=args.seed),
    }
    out.json(res)
    return 0


def _flow_cfg(args, defaults=None):
    base = dict(defaults or {})
    if args.config is not None:
        base.update(io.load_json_arg(args.config) or {})
    return io.parse_flow_config(base, max_iter=args.max_iter, seed=args.seed)


def cmd_flow(args, out, tol):
    kind = _one_input(args)
    if kind == "bracket":
        res = ss.nilsoliton_find(_bracket(args, tol), _flow_cfg(args, {"grad_tol": 1e-7}))
    else:
        aa = _as_matrix(args, tol)
        cfg = _flow_cfg(args)
        res = ss.ascent_flow(aa, cfg) if args.method == "ascent" else ss.double_bracket_flow(aa, cfg)
    if args.format == "table":
        rows = [[str(i), _num(f, "table"), _num(m, "table")]
                for i, (f, m) in enumerate(zip(res.F_trace, res.trace))]
        out.rows(FLOW_COLUMNS, rows, "table")
    else:
        out.json(res.to_dict())
    if not res.converged:
        sys.stderr.write(f"flow did not converge: {res.status} after {res.iterations} steps\n")
        return 4 if args.strict else 0
    return 0


def cmd_soliton(args, out, tol):
    mu = _as_bracket(args, tol)
    sr = lc.solvsoliton_residual(mu)
    out.json({"c": sr.c, "D": sr.D.tolist(), "residual": sr.residual,
              "relative": sr.relative, "is_soliton": sr.is_soliton})
    return 4 if args.strict and not sr.is_soliton else 0


def cmd_beta(args, out, tol):
    _one_input(args, ("bracket",))
    mu = _bracket(args, tol)
    res = ss.nilsoliton_find(mu, _flow_cfg(args, {"grad_tol": 1e-7}))
    if not res.converged:
        out.json({"converged": False, "status": res.status, "residual": res.residual})
        sys.stderr.write(f"nilsoliton search did not converge ({res.status})\n")
        return 4 if args.strict else 0
    bt = ss.beta_from_nilsoliton(lc.MetricLieAlgebra.trusted(res.final, tol), 1e-6)
    out.json({
        "converged": True,
        "type": list(bt.b),
        "type_rational": [str(x) for x in bt.rational()],
        "norm_sq": bt.norm_sq,
        "q": bt.q,
        "nilsoliton": io.bracket_to_json(lc.MetricLieAlgebra.trusted(res.final, tol)),
    })
    return 0


def cmd_bound(args, out, tol):
    if args.n is None or args.m is None:
        raise UsageError("bound needs --n and --m")
    bt = None
    if args.beta_type is not None:
        vals = io.load_json_arg(args.beta_type)
        if not isinstance(vals, list) or not vals:
            raise MalformedInputError("--type must be a non-empty JSON list")
        bt = ss.BetaType.from_values([io._real(v, "type entry") for v in vals])
    out.line(repr(ss.pinching_bound(args.n, args.m, bt)))
    return 0


def cmd_table1(args, out, tol):
    rows = None if args.rows is None else [r.strip() for r in args.rows.split(",") if r.strip()]
    report = ss.table1_reproduce(ss.FlowConfig(grad_tol=1e-7, seed=args.seed), rows)
    fmt = args.format
    lines = []
    for r in report:
        lines.append([
            r.row,
            _frac_list(r.printed_type),
            _frac_list(r.computed_type) if r.computed_type is not None else "",
            str(r.printed_q),
            _num(r.computed_q, fmt) if r.computed_q is not None else "",
            r.status,
            r.note,
        ])
    out.rows(TABLE1_COLUMNS, lines, fmt)
    bad = any(r.status != "match" for r in report)
    return 4 if args.strict and bad else 0


def _t_values(args):
    if args.t_range is None:
        if args.t is None:
            raise UsageError("family needs --t or --t-range")
        return [args.t]
    try:
        lo, hi = (float(x) for x in args.t_range.split(":"))
    except ValueError:
        raise UsageError("--t-range must look like 'tmin:tmax'") from None
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if args.steps == 1:
        return [lo]
    return list(np.linspace(lo, hi, args.steps))


def cmd_family(args, out, tol):
    if args.family is None:
        raise UsageError("family needs --family")
    ts = _t_values(args)
    for t in ts:
        if not aa_mod.family_domain_ok(args.family, t):
            raise PreconditionError(f"t = {t!r} outside the domain of {args.family}")
    rows, flagged = [], False
    for t in ts:
        mem = aa_mod.family(args.family, t, args.n)
        F = lc.pinching_F(aa_mod.bracket_of(mem.aa))
        diff = abs(F - mem.F_closed)
        flag = diff >= FAMILY_TOL
        flagged |= flag
        rows.append([_num(t, args.format), _num(mem.F_closed, args.format),
                     _num(F, args.format), _num(diff, args.format), "FLAG" if flag else ""])
    out.rows(FAMILY_COLUMNS, rows, args.format)
    return 4 if args.strict and flagged else 0


COMMANDS = {name: globals()["cmd_" + name] for name in VERBS}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.t_range is not None and args.verb != "family":
        parser.print_usage(sys.stderr)
        sys.stderr.write("solvpinch: error: --t-range is only valid with the family verb\n")
        return 1
    out = _Out(args.out)
    try:
        _check_out_path(args.out)
        tol = _tol()
        code = COMMANDS[args.verb](args, out, tol)
        out.flush()
        return code
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"solvpinch: error: {exc}\n")
        return 1
    except FlatMetricError as exc:
        sys.stderr.write(f"{exc}\n")
        return 3
    except (MalformedInputError, PreconditionError, DegenerateError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
