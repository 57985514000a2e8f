"""Command-line interface: ``wged <fit|compare|curves|overlay|profile|sample>``.

Output formatting is fixed so identical inputs give byte-identical output:
human tables use 6 significant digits, --csv uses 12, and --json writes
every float at full (round-trip) precision.  Exit status is 0 on success,
1 on usage, input or domain errors and 2 when a fit did not converge.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

import numpy as np

from . import __version__, core, gof, models
from .curves import CurveTable
from .data import DATASETS
from .errors import DataError, WgedError
from .estimation import FitConfig, Sample, profile_loglik

SCHEMA_VERSION = 1
TABLE_DIGITS = 6
CSV_DIGITS = 12
WHICH = ("pdf", "cdf", "sf", "hazard", "revhazard", "cumhazard")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- input ----------------------------------------------------------------

def ingest(source) -> tuple[Sample, str]:
    """Load a sample from a file path or an embedded tag.

    Files hold whitespace- or comma-separated positive decimals; lines whose
    first non-blank character is ``#`` are ignored.  Returns the sample and a
    source tag for the report.
    """
    if source in DATASETS:
        return Sample(DATASETS[source]["values"]), source
    try:
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {source!r}: {exc.strerror}") from None
    values = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        for tok in text.replace(",", " ").split():
            try:
                v = float(tok)
            except ValueError:
                raise DataError(f"cannot parse {tok!r} as a number", lineno) from None
            if not math.isfinite(v) or v <= 0:
                raise DataError(f"value {tok} is not a finite positive number", lineno)
            values.append(v)
    if not values:
        raise DataError(f"{source!r} contains no data")
    return Sample(values), f"file:{source}"


def _parse_list(text, what):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}") from None
    if not vals:
        raise UsageError(f"empty {what}")
    return vals


def _parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be MIN:MAX:N, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or n < 2 or not hi > lo:
        raise UsageError(f"grid needs MIN < MAX and N >= 2, got {text!r}")
    return np.linspace(lo, hi, n)


def _parse_models(text):
    names = [t.strip().upper() for t in text.split(",") if t.strip()]
    if not names:
        raise UsageError("model list is empty")
    for name in names:
        if name not in models.MODEL_KINDS:
            raise UsageError(f"unknown model {name.lower()!r}; choose from "
                             + ", ".join(k.lower() for k in models.MODEL_KINDS))
    if len(set(names)) != len(names):
        raise UsageError("model list has duplicates")
    return names


def _spec(args):
    kind = _parse_models(args.model)
    if len(kind) != 1:
        raise UsageError("this command takes a single model")
    if args.params is None:
        raise UsageError("--params is required")
    return models.ModelSpec(kind[0], _parse_list(args.params, "parameters"))


def _config(args):
    return FitConfig(grid=args.starts, tol=args.tol, level=args.level, max_iter=args.max_iter)


# --- report building ------------------------------------------------------

def _num(v):
    v = float(v)
    return v if math.isfinite(v) else None


def _model_block(fit, s, args):
    spec = fit.spec
    rep = gof.gof_report(s, lambda x: models.cdf(spec, x), fit.loglik, spec.param_count,
                         ks_method=args.ks, pvalue=args.pvalue)
    block = {
        "model": spec.kind,
        "params": {k: _num(v) for k, v in spec.as_dict().items()},
        "converged": bool(fit.converged),
        "at_bound": bool(fit.at_bound),
        "starts": fit.n_starts,
        "starts_converged": fit.n_converged,
        "loglik": _num(fit.loglik),
        "gof": {k: _num(v) if isinstance(v, float) else v for k, v in rep.as_dict().items()},
    }
    res = fit.detail
    if res is not None:
        names = models.PARAM_NAMES["WGED"]
        block["std_errors"] = {k: _num(v) for k, v in zip(names, res.std_errors)}
        block["ci"] = {"level": res.level}
        block["ci"].update({k: [_num(lo), _num(hi)]
                            for k, lo, hi in zip(names, res.ci_lower, res.ci_upper)})
        block["cov"] = (None if res.cov is None
                        else [[_num(v) for v in row] for row in res.cov.to_array()])
    return block, rep


def _fit_all(kinds, s, cfg):
    fits = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", models.BoundaryWarning)
        # share the GED and BED fits as seeds for the richer models
        if "GED" in kinds or "BED" in kinds or "BGED" in kinds:
            fits["GED"] = models.ged_fit(s, cfg)
        if "BED" in kinds or "BGED" in kinds:
            fits["BED"] = models.bed_fit(s, cfg, ged=fits["GED"])
        if "BGED" in kinds:
            fits["BGED"] = models.bged_fit(s, cfg, ged=fits["GED"], bed=fits["BED"])
        if "ED" in kinds:
            fits["ED"] = models.ed_fit(s)
        if "WGED" in kinds:
            fits["WGED"] = models.wged_fit(s, cfg)
    return [fits[k] for k in kinds]


def _document(args, s, tag, blocks, command):
    meta = DATASETS.get(tag, {})
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "toolkit": {"name": "wged", "version": __version__},
        "dataset": {"source": tag, "n": s.n, "units": meta.get("units", "unknown")},
        "config": {
            "seed": args.seed,
            "tol": args.tol,
            "max_iter": args.max_iter,
            "starts_per_axis": args.starts,
            "b_range": list(FitConfig.b_range),
            "lambda_range_per_mean": list(FitConfig.lam_range),
            "log_bound": FitConfig.log_bound,
            "level": args.level,
            "ks": args.ks,
            "pvalue": args.pvalue,
        },
        "models": blocks,
    }


def _fmt(v, digits=TABLE_DIGITS):
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return "-"
    if isinstance(v, (bool, np.bool_)):
        return "yes" if v else "no"
    if isinstance(v, (int, np.integer)):
        return str(v)
    return f"{v:.{digits}g}"


def _table(header, rows):
    cells = [list(header)] + [[_fmt(v) if not isinstance(v, str) else v for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells) + "\n"


def _emit_json(doc, out):
    out.write(json.dumps(doc, indent=2, allow_nan=False) + "\n")


def _emit_curve(table: CurveTable, args, out):
    if args.csv or args.json:
        if args.json:
            doc = {"schema": SCHEMA_VERSION, "columns": list(table.columns),
                   "rows": [[_num(v) for v in r] for r in table.rows]}
            _emit_json(doc, out)
        else:
            out.write(table.to_csv(CSV_DIGITS))
    else:
        out.write(_table(table.columns, table.rows))


# --- commands -------------------------------------------------------------

def _run_fits(args, out, kinds, command):
    s, tag = ingest(args.data)
    cfg = _config(args)
    fits = _fit_all(kinds, s, cfg)
    blocks, reports = zip(*(_model_block(f, s, args) for f in fits))
    blocks = list(blocks)
    doc = _document(args, s, tag, blocks, command)
    order = sorted(range(len(fits)), key=lambda i: (reports[i].aic, fits[i].spec.kind))
    if command == "compare":
        doc["ranking"] = [fits[i].spec.kind for i in order]
    if args.json:
        _emit_json(doc, out)
    else:
        out.write(f"data: {tag} (n={s.n})\n")
        rows = []
        for rank, i in enumerate(order, start=1):
            r = reports[i]
            rows.append([str(rank), fits[i].spec.kind, r.loglik, r.aic, r.aicc, r.bic, r.hqic,
                         r.ks_stat, r.ks_pvalue, fits[i].converged])
        out.write(_table(["rank", "model", "loglik", "AIC", "AICc", "BIC", "HQIC", "K-S",
                          "p-value", "converged"], rows))
        for f, b in zip(fits, blocks):
            pars = ", ".join(f"{k}={_fmt(v)}" for k, v in b["params"].items())
            flag = "  [at parameter box]" if f.at_bound else ""
            out.write(f"{f.spec.kind}: {pars}{flag}\n")
            if "ci" in b:
                for k in models.PARAM_NAMES["WGED"]:
                    lo, hi = b["ci"][k]
                    out.write(f"  {k}: se={_fmt(b['std_errors'][k])}  "
                              f"{100 * b['ci']['level']:g}% CI [{_fmt(lo)}, {_fmt(hi)}]\n")
    return EXIT_OK if all(f.converged for f in fits) else EXIT_NONCONVERGED


def cmd_fit(args, out):
    kinds = _parse_models(args.model)
    if len(kinds) != 1:
        raise UsageError("fit takes a single model; use compare for several")
    return _run_fits(args, out, kinds, "fit")


def cmd_compare(args, out):
    return _run_fits(args, out, _parse_models(args.model), "compare")


def _curve_values(spec, which, x):
    """Evaluate one function pointwise; undefined points become NaN."""
    vals = []
    for v in x:
        try:
            vals.append(float(_curve_point(spec, which, float(v))))
        except WgedError:
            vals.append(math.nan)
    return np.array(vals)


def _curve_point(spec, which, x):
    if spec.kind == "WGED":
        p = spec.params
        fn = {"pdf": core.pdf, "cdf": core.cdf, "sf": core.survival, "hazard": core.hazard,
              "revhazard": core.reversed_hazard, "cumhazard": core.cumulative_hazard}[which]
        return fn(p, x)
    if which == "cdf":
        return models.cdf(spec, x)
    if which == "sf":
        return models.survival(spec, x)
    if which == "cumhazard":
        sf = models.survival(spec, x)
        return -math.log(sf) if sf > 0 else math.inf
    f = models.pdf(spec, x)
    if which == "pdf":
        return f
    denom = models.survival(spec, x) if which == "hazard" else models.cdf(spec, x)
    return f / denom if denom > 0 else math.nan


def cmd_curves(args, out):
    spec = _spec(args)
    grid = _parse_grid(args.grid or "0:5:101")
    if grid[0] < 0:
        raise UsageError("curve grids need MIN >= 0")
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    bad = [w for w in which if w not in WHICH]
    if bad or not which:
        raise UsageError(f"--which takes a list from {', '.join(WHICH)}")
    table = CurveTable.from_columns(grid, {w: _curve_values(spec, w, grid) for w in which})
    _emit_curve(table, args, out)
    return EXIT_OK


def cmd_overlay(args, out):
    s, _ = ingest(args.data)
    kinds = _parse_models(args.model)
    fits = _fit_all(kinds, s, _config(args))
    km = gof.kaplan_meier(s)
    grid = km.times if args.grid is None else _parse_grid(args.grid)
    if grid[0] < 0:
        raise UsageError("overlay grids need MIN >= 0")
    fn = "cdf" if args.which == "cdf" else "sf"
    series = {"km": km.at(grid) if fn == "sf" else 1.0 - km.at(grid)}
    for f in fits:
        series[f"{f.spec.kind.lower()}_{fn}"] = _curve_values(f.spec, fn, grid)
    _emit_curve(CurveTable.from_columns(grid, series), args, out)
    return EXIT_OK if all(f.converged for f in fits) else EXIT_NONCONVERGED


def cmd_profile(args, out):
    s, _ = ingest(args.data)
    fit = models.wged_fit(s, _config(args))
    est = dict(zip(("a", "b", "lambda"), fit.spec.params))
    axis = "lambda" if args.axis == "lam" else args.axis
    if args.grid is None:
        centre = est[axis]
        grid = np.linspace(0.5 * centre, 1.5 * centre, 41)
    else:
        grid = _parse_grid(args.grid)
    if grid[0] <= 0:
        raise UsageError("profile grids need MIN > 0")
    _emit_curve(profile_loglik(s, axis, grid, fit.spec.params), args, out)
    return EXIT_OK if fit.converged else EXIT_NONCONVERGED


def cmd_sample(args, out):
    spec = _spec(args)
    if args.n is None or args.n < 1:
        raise UsageError("--n must be a positive integer")
    draws = models.sample(spec, args.n, seed=args.seed)
    out.write("".join(f"{v:.{CSV_DIGITS}g}\n" for v in draws))
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "compare": cmd_compare, "curves": cmd_curves,
            "overlay": cmd_overlay, "profile": cmd_profile, "sample": cmd_sample}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--data", help="data file or embedded tag (glassfibre)")
    common.add_argument("--model", help="model name(s), comma separated: ed,ged,bed,bged,wged")
    common.add_argument("--params", help="comma-separated parameters; wged order is a,b,lambda")
    common.add_argument("--grid", help="evaluation grid MIN:MAX:N")
    common.add_argument("--seed", type=int, default=None, help="random seed (sample)")
    common.add_argument("--level", type=float, default=FitConfig.level,
                        help="confidence level for Wald intervals (default 0.95)")
    common.add_argument("--tol", type=float, default=FitConfig.tol,
                        help="optimizer tolerance (default 1e-10)")
    common.add_argument("--max-iter", type=int, default=FitConfig.max_iter,
                        help="Nelder-Mead iterations per start (default 5000)")
    common.add_argument("--starts", type=int, default=FitConfig.grid,
                        help="WGED multi-start points per axis (default 5)")
    common.add_argument("--pvalue", choices=("exact", "asymptotic", "auto"), default="auto",
                        help="K-S p-value method (default auto: exact for n <= 1000)")
    common.add_argument("--ks", choices=("pointwise", "classical"), default="pointwise",
                        help="K-S statistic convention (default pointwise)")
    common.add_argument("--which", default=None, help=f"curve function(s): {', '.join(WHICH)}")
    common.add_argument("--axis", choices=("a", "b", "lambda", "lam"), default="lambda",
                        help="profile axis (default lambda)")
    common.add_argument("--n", type=int, default=None, help="sample size (sample)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output, full float precision")
    fmt.add_argument("--csv", action="store_true", help="CSV output, 12 significant digits")

    parser = _Parser(prog="wged", description=__doc__.split("\n\n")[1].replace("\n", " "),
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"wged {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {"fit": "fit one model", "compare": "fit several models and rank by AIC",
             "curves": "tabulate pdf/cdf/sf/hazard curves for given parameters",
             "overlay": "Kaplan-Meier curve against fitted survival or cdf",
             "profile": "WGED log-likelihood along one parameter",
             "sample": "draw a seeded random sample"}
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
    return parser


_DEFAULT_MODEL = {"fit": "wged", "compare": "ed,ged,bed,bged,wged", "curves": "wged",
                  "overlay": "wged", "profile": "wged", "sample": "wged"}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.model is None:
        args.model = _DEFAULT_MODEL[args.command]
    if args.which is None:
        args.which = "cdf" if args.command == "curves" else "sf"
    try:
        if args.command in ("fit", "compare", "overlay", "profile") and args.data is None:
            raise UsageError("--data is required")
        if args.csv and args.command in ("fit", "compare"):
            raise UsageError("--csv applies to curve output; use --json for reports")
        if not 0.0 < args.level < 1.0:
            raise UsageError("--level must lie in (0, 1)")
        if args.starts < 1:
            raise UsageError("--starts must be at least 1")
        if args.max_iter < 1:
            raise UsageError("--max-iter must be at least 1")
        return COMMANDS[args.command](args, out)
    except (UsageError, WgedError, ValueError, OverflowError) as exc:
        sys.stderr.write(f"wged {args.command}: error: {exc}\n")
        return EXIT_USAGE


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
