"""
One configured experiment: stream, run, reference trajectory and report.
"""

from dataclasses import dataclass

import numpy as np

from . import oracle, running, sets
from .analysis import measure_and_verify
from .config import parse_bounding
from .errors import ConfigError
from .problems import make_scenario

SQUARED_TRACKING = ("localization_lite",)


@dataclass
class Experiment:
    config: object
    stream: object
    record: object
    trajectory: list
    report: object


def state_dim(stream, algorithm):
    """Dimension of the MK state of `algorithm` on `stream`."""
    inst = stream.sample(1)
    if algorithm == "dual_ascent":
        A, _ = inst.linear_ineq if inst.linear_ineq is not None else inst.linear_eq
        return A.shape[0]
    if algorithm == "admm":
        return inst.admm[2].size
    return inst.dim


def bounding_set(spec, dim):
    parsed = parse_bounding(spec)
    if parsed is None:
        return None
    kind, r = parsed
    return sets.box(-r, r, dim) if kind == "box" else sets.ball(r, dim=dim)


def _initial(value, dim):
    if value is None:
        return np.zeros(dim)
    if isinstance(value, (int, float)):
        return np.full(dim, float(value))
    from .config import parse_number

    vals = np.array([parse_number(v) for v in str(value).split(",")], dtype=float)
    if vals.size != dim:
        raise ConfigError(f"initial point has {vals.size} entries, state has {dim}")
    return vals


def tracking_is_squared(config):
    form = config.algorithm_params.get("tracking")
    return form == "squared" if form is not None else config.scenario in SQUARED_TRACKING


def execute(config, record=None):
    """
    Run `config` (or re-analyze an existing `record` of it) and verify.

    Returns
    -------
    Experiment
    """
    stream = make_scenario(config)
    alg = config.algorithm
    ap = config.algorithm_params
    if record is None:
        B = bounding_set(ap.get("bounding"), state_dim(stream, alg))
        if alg == "admm":
            inst = stream.sample(1)
            A, Bm, c = inst.admm
            init = ap.get("initial")
            initial = {"x": _initial(init, A.shape[1]), "z": _initial(init, Bm.shape[1]),
                       "p": _initial(init, c.size)} if init is not None else None
        else:
            initial = _initial(ap.get("initial"), state_dim(stream, alg))
        record = running.run_algorithm(stream, alg, ap.get("lambda"), initial, B, ap.get("form"))
        record.params["squared_tracking"] = tracking_is_squared(config)
    family = running.oracle_family(alg, stream)
    traj = oracle.solution_trajectory(stream, family, lam=record.params["lambda"])
    report = measure_and_verify(record, traj, stream)
    return Experiment(config, stream, record, traj, report)
