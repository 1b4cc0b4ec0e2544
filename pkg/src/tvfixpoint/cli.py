"""
Command-line front end.

::

    tvfixpoint run <config> [-o DIR] [--sweep key=v1,v2,...] [--seed N]
    tvfixpoint report <run.csv> ...
    tvfixpoint plot <run.csv> ... -o out.svg

The default output directory of ``run`` is ``$TVFIXPOINT_OUTPUT_DIR`` or
``./runs``. The exit code is 0 iff every requested run completed and every
bound verdict holds; ``--verdict-warn`` turns violated verdicts into
warnings.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, io
from .analysis import steady_state
from .config import _value, load_config
from .errors import ConfigError, DivergenceError, TVFixError
from .experiment import execute
from .problems import make_scenario
from .svg import line_chart, scatter_panels

OUTPUT_ENV = "TVFIXPOINT_OUTPUT_DIR"
SNAPSHOT_STEPS = (2, 4, 6, 8, 32, 64)

EXIT_OK, EXIT_VERDICT, EXIT_FAILED, EXIT_USAGE = 0, 1, 2, 64


def _err(msg):
    print(f"tvfixpoint: error: {msg}", file=sys.stderr)


def _parse_sweep(items):
    sweep = {}
    for item in items or []:
        key, sep, values = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--sweep expects key=v1,v2,..., got {item!r}")
        vals = [_value(v) for v in values.split(",") if v.strip()]
        sweep[key.strip()] = vals
    return sweep


def _label(overrides):
    return ",".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in overrides.items())


def _run_one(cfg, overrides, out_dir, stem):
    point = cfg.with_overrides(overrides)
    try:
        exp = execute(point)
    except DivergenceError as exc:
        partial = getattr(exc, "partial", None)
        path = io.write_partial(out_dir, stem, partial) if partial is not None else None
        return {"stem": stem, "ok": False, "error": f"diverged: {exc}", "partial": path}
    except TVFixError as exc:
        return {"stem": stem, "ok": False, "error": str(exc)}
    path = io.write_run(out_dir, stem, exp, overrides)
    return {"stem": stem, "ok": True, "csv": path, "holds": exp.report.all_hold,
            "verdicts": exp.report.verdicts, "overrides": overrides}


def cmd_run(args):
    cfg = load_config(args.config)
    sweep = dict(cfg.sweep)
    sweep.update(_parse_sweep(args.sweep))
    seed_override = {} if args.seed is None else {"seed": int(args.seed)}
    cfg.sweep = sweep
    cfg.validate()
    points = [{**p, **seed_override} for p in cfg.sweep_points()]
    # every point is validated before any run starts
    for p in points:
        cfg.with_overrides(p)
    out_dir = args.output or os.environ.get(OUTPUT_ENV) or "runs"
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out_dir}: {exc}") from None
    base = os.path.splitext(os.path.basename(args.config))[0]
    stems = [base] if len(points) == 1 else [f"{base}-{i:02d}" for i in range(len(points))]
    with ThreadPoolExecutor(max_workers=min(len(points), os.cpu_count() or 1)) as pool:
        results = list(pool.map(lambda a: _run_one(cfg, *a), [(p, out_dir, s) for p, s in zip(points, stems)]))
    code = EXIT_OK
    for res in results:
        tag = _label(res.get("overrides", {})) or res["stem"]
        if not res["ok"]:
            extra = f" (partial record {res['partial']})" if res.get("partial") else ""
            _err(f"{res['stem']}: {res['error']}{extra}")
            code = EXIT_FAILED
            continue
        status = "all bounds hold" if res["holds"] else "BOUND VIOLATED"
        print(f"{res['csv']}  [{tag}]  {status}")
        if not res["holds"]:
            if args.verdict_warn:
                print(f"warning: {res['stem']}: bound verdict violated", file=sys.stderr)
            elif code == EXIT_OK:
                code = EXIT_VERDICT
    return code


def _reanalyze(path):
    rec, man = io.read_record(path)
    cfg = io.config_of(man)
    return execute(cfg, rec), man


def cmd_report(args):
    code = EXIT_OK
    rows = []
    for path in args.files:
        try:
            exp, man = _reanalyze(path)
        except (OSError, ValueError, KeyError, IndexError, json.JSONDecodeError, TVFixError) as exc:
            _err(f"{path}: cannot read record: {exc}")
            code = EXIT_FAILED
            continue
        rep = exp.report
        err = rep.measured["tracking_error"]
        mean, var = steady_state(err)
        rows.append((path, man, rep, float(err[-1]), mean, var))
    for path, man, rep, final, mean, var in rows:
        print(f"{path}")
        print(f"  algorithm {rep.algorithm}  scenario {man['scenario']}  T {man['horizon']}  seed {man['seed']}"
              + (f"  {_label(man['overrides'])}" if man.get("overrides") else ""))
        print(f"  final tracking error     {final:.6e}")
        print(f"  steady-state mean (20%)  {mean:.6e}  variance {var:.3e}")
        for name, v in rep.verdicts.items():
            state = "holds" if v["holds"] else "VIOLATED"
            print(f"  {name:<16} {state:<9} worst margin {v['worst_margin']:+.3e}")
        if not rep.all_hold:
            if args.verdict_warn:
                print(f"warning: {path}: bound verdict violated", file=sys.stderr)
            elif code == EXIT_OK:
                code = EXIT_VERDICT
    return code


def _read_columns(path):
    """Tracking error and tracking bound columns straight from a run CSV."""
    import csv

    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]

    def col(name):
        i = header.index(name)
        return np.array([float(r[i]) if r[i] else np.nan for r in body])

    return col("k"), col("tracking_error"), col("bound_tracking")


def _snapshots(man, rec):
    cfg = io.config_of(man)
    stream = make_scenario(cfg)
    x = rec.decision
    panels = []
    for k in SNAPSHOT_STEPS:
        if k > len(x):
            continue
        info = stream.sample(k).info
        panels.append({"title": f"k = {k}", "groups": [
            {"label": "anchors", "points": info["anchors"], "marker": "triangle", "color": "#333333"},
            {"label": "true positions", "points": info["positions"], "marker": "square", "color": "#1f77b4"},
            {"label": "estimates", "points": x[k - 1].reshape(-1, 2), "marker": "circle", "color": "#d62728"},
        ]})
    return panels


def cmd_plot(args):
    series, snapshot_sets = [], []
    for i, path in enumerate(args.files):
        try:
            k, err, bound = _read_columns(path)
            rec, man = io.read_record(path)
        except (OSError, ValueError, KeyError, IndexError, json.JSONDecodeError, TVFixError) as exc:
            _err(f"{path}: cannot read record: {exc}")
            return EXIT_FAILED
        label = _label(man.get("overrides", {})) or os.path.splitext(os.path.basename(path))[0]
        color_i = i
        series.append({"label": label, "x": k, "y": err, "color_index": color_i})
        if np.isfinite(bound).any():
            series.append({"label": f"bound {label}", "x": k, "y": bound, "dashed": True, "color_index": color_i})
        if man["scenario"] == "localization_lite":
            snapshot_sets.append((label, _snapshots(man, rec)))
    from .svg import PALETTE

    for s in series:
        s["color"] = PALETTE[s.pop("color_index") % len(PALETTE)]
    svg = line_chart(series, title="Tracking error", xlabel="k", ylabel="tracking error")
    written = []
    try:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(svg)
        written.append(args.output)
        root = os.path.splitext(args.output)[0]
        for j, (label, panels) in enumerate(snapshot_sets):
            suffix = "" if len(snapshot_sets) == 1 else f"-{j:02d}"
            path = f"{root}.snapshots{suffix}.svg"
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(scatter_panels(panels, title=f"Positions {label}"))
            written.append(path)
    except OSError as exc:
        _err(f"cannot write {args.output}: {exc}")
        return EXIT_FAILED
    for p in written:
        print(p)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="tvfixpoint", description="Running fixed-point iterations and their bounds.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--verdict-warn", action="store_true", help="report violated bounds as warnings (exit 0)")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a config (and its sweep)")
    r.add_argument("config")
    r.add_argument("-o", "--output", help=f"output directory (default ${OUTPUT_ENV} or ./runs)")
    r.add_argument("--sweep", action="append", metavar="KEY=V1,V2,...", help="sweep a key; repeatable")
    r.add_argument("--seed", type=int)

    rp = sub.add_parser("report", help="re-analyze run CSVs and print a summary")
    rp.add_argument("files", nargs="+")

    pl = sub.add_parser("plot", help="render tracking-error curves to SVG")
    pl.add_argument("files", nargs="+")
    pl.add_argument("-o", "--output", required=True)

    for s in (r, rp, pl):
        s.add_argument("--verdict-warn", action="store_true", default=argparse.SUPPRESS)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if not hasattr(args, "verdict_warn"):
        args.verdict_warn = False
    handler = {"run": cmd_run, "report": cmd_report, "plot": cmd_plot}[args.command]
    try:
        return handler(args)
    except TVFixError as exc:
        _err(str(exc))
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
