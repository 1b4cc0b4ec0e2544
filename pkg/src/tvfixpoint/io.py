"""
Run files: trajectory CSV, report JSON and reproduction manifest.

The CSV has one row per ``k = 1 .. T + 1`` and the fixed column order
``k, t_k, <state>[i]..., <aux>[i]..., t_residual, g_residual,
tracking_error, objective_gap, bound_tracking, bound_fpr_avg``. Missing
values (residuals at ``k = T + 1``, bounds that do not apply) are empty.
Floats are written with ``repr`` so a CSV plus its manifest rebuild the
run exactly.
"""

import csv
import json
import os

import numpy as np

from . import __version__
from .analysis import BoundReport
from .config import parse_config
from .errors import ParameterError
from .running import RunRecord

TAIL_COLUMNS = ["t_residual", "g_residual", "tracking_error", "objective_gap", "bound_tracking", "bound_fpr_avg"]


def _fmt(v):
    if v is None:
        return ""
    v = float(v)
    return "" if np.isnan(v) else repr(v)


def _col(arr, i):
    return None if arr is None or i >= len(arr) else arr[i]


def csv_header(record):
    cols = ["k", "t_k"]
    cols += [f"{record.state_name}[{i}]" for i in range(record.states.shape[1])]
    for key, arr in record.aux.items():
        cols += [f"{key}[{i}]" for i in range(arr.shape[1])]
    return cols + TAIL_COLUMNS


def write_csv(path, record, report=None):
    T = record.horizon
    times = record.times if record.times is not None else np.arange(1, T + 2, dtype=float)
    meas = report.measured if report is not None else {}
    curves = report.curves if report is not None else {}
    fpr_curve = curves.get("fpr_bounded", curves.get("fpr_squared"))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_header(record))
        for i in range(len(record.states)):
            row = [str(i + 1), _fmt(times[i])]
            row += [_fmt(v) for v in record.states[i]]
            for arr in record.aux.values():
                row += [_fmt(v) for v in arr[i]]
            row += [_fmt(_col(record.t_residual, i)), _fmt(_col(record.g_residual, i)),
                    _fmt(_col(meas.get("tracking_error"), i)), _fmt(_col(meas.get("objective_gap"), i)),
                    _fmt(_col(curves.get("tracking"), i)), _fmt(_col(fpr_curve, i))]
            w.writerow(row)


def manifest_for(record, config, overrides, csv_name):
    return {
        "tool": "tvfixpoint",
        "version": __version__,
        "config_sha256": config.sha256,
        "config_text": config.text,
        "overrides": overrides,
        "seed": config.seed,
        "scenario": config.scenario,
        "algorithm": record.algorithm,
        "state_name": record.state_name,
        "decision_key": record.decision_key,
        "aux_keys": {k: int(v.shape[1]) for k, v in record.aux.items()},
        "alpha_seq": [float(a) for a in record.alpha],
        "L_seq": None if record.contraction is None else [float(L) for L in record.contraction],
        "image_bound": record.image_bound,
        "params": record.params,
        "stream": record.stream,
        "horizon": record.horizon,
        "csv": csv_name,
    }


def write_run(out_dir, stem, experiment, overrides=None):
    """Write ``<stem>.csv``, ``<stem>.report.json`` and ``<stem>.manifest.json``."""
    os.makedirs(out_dir, exist_ok=True)
    rec = experiment.record
    csv_path = os.path.join(out_dir, stem + ".csv")
    write_csv(csv_path, rec, experiment.report)
    man = manifest_for(rec, experiment.config, overrides or {}, os.path.basename(csv_path))
    with open(os.path.join(out_dir, stem + ".manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(man, fh, indent=1)
    with open(os.path.join(out_dir, stem + ".report.json"), "w", encoding="utf-8") as fh:
        fh.write(experiment.report.to_json(indent=1))
    return csv_path


def write_partial(out_dir, stem, record):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, stem + ".partial.csv")
    write_csv(path, record)
    return path


def manifest_path(csv_path):
    base = csv_path[:-4] if csv_path.endswith(".csv") else csv_path
    return base + ".manifest.json"


def load_manifest(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def read_record(csv_path):
    """Rebuild the `RunRecord` stored in a CSV and its manifest."""
    man = load_manifest(manifest_path(csv_path))
    with open(csv_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParameterError(f"{csv_path} is empty")
    header, body = rows[0], rows[1:]
    T = int(man["horizon"])
    if len(body) != T + 1:
        raise ParameterError(f"{csv_path}: expected {T + 1} rows, found {len(body)}")
    idx = {name: i for i, name in enumerate(header)}

    def block(name, width):
        cols = [idx[f"{name}[{i}]"] for i in range(width)]
        return np.array([[float(r[c]) for c in cols] for r in body])

    width = sum(1 for h in header if h.startswith(man["state_name"] + "["))
    states = block(man["state_name"], width)
    aux = {k: block(k, w) for k, w in man["aux_keys"].items()}
    t_res = np.array([float(r[idx["t_residual"]]) for r in body[:T]])
    g_res = np.array([float(r[idx["g_residual"]]) for r in body[:T]])
    times = np.array([float(r[idx["t_k"]]) for r in body])
    L = man["L_seq"]
    rec = RunRecord(man["algorithm"], states, t_res, g_res, np.array(man["alpha_seq"]),
                    None if L is None else np.array(L), aux, man["decision_key"], man["state_name"], times,
                    man["image_bound"], man["params"], man["stream"], man["seed"])
    return rec, man


def config_of(manifest):
    cfg = parse_config(manifest["config_text"])
    return cfg.with_overrides(manifest.get("overrides", {}))


def load_report(path):
    with open(path, encoding="utf-8") as fh:
        return BoundReport.from_dict(json.load(fh))
