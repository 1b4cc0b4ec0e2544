"""
Scenario configuration files.

A config is a UTF-8 text file of ``key = value`` lines grouped under section
headers::

    [scenario]
    name = localization_lite
    T = 300
    seed = 0

    [algorithm]
    name = admm
    lambda = 0.3
    form = bounded

    [sweep]
    omega = 0, pi/200, pi/100, pi/50

Numeric values may be simple arithmetic expressions in ``pi`` and ``e``.
Sweep values are comma-separated; every combination of sweep values is one
run.
"""

import ast
import configparser
import hashlib
import itertools
import math
import operator
from dataclasses import dataclass, field

from .errors import ConfigError
from .problems import SCENARIOS, scenario_params

ALGORITHM_KEYS = {"name", "lambda", "form", "bounding", "initial", "tracking"}
ALGORITHM_NAMES = ("projected_gradient", "proximal_point", "forward_backward",
                   "dual_ascent", "douglas_rachford", "admm")

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg, ast.UAdd: operator.pos}
_NAMES = {"pi": math.pi, "e": math.e}


def parse_number(text):
    """Evaluate a numeric literal or arithmetic expression in ``pi`` and ``e``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError, TypeError):
        raise ConfigError(f"not a number: {text!r}") from None


def _value(text):
    try:
        return parse_number(text)
    except ConfigError:
        return text.strip()


@dataclass
class ScenarioConfig:
    """
    Parsed config.

    Attributes
    ----------
    scenario : str
        Scenario family name.
    scenario_params : dict
        Scenario keys (dimensions, ``T``, ``seed``, ...), numbers already parsed.
    algorithm : str
    algorithm_params : dict
        ``lambda``, ``form``, ``bounding``, ``initial``, ``tracking``.
    sweep : dict
        ``key -> list of values``; keys refer to scenario or algorithm keys.
    text : str
        Raw config text (hashed into run manifests).
    """

    scenario: str
    scenario_params: dict
    algorithm: str
    algorithm_params: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    text: str = ""

    @property
    def sha256(self):
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    @property
    def seed(self):
        return int(self.scenario_params.get("seed", 0))

    def with_overrides(self, overrides):
        """Copy with scenario or algorithm keys replaced (sweep points, --seed)."""
        sp, ap = dict(self.scenario_params), dict(self.algorithm_params)
        for key, value in overrides.items():
            if key in ALGORITHM_KEYS - {"name"}:
                ap[key] = value
            else:
                sp[key] = value
        cfg = ScenarioConfig(self.scenario, sp, self.algorithm, ap, {}, self.text)
        cfg.validate()
        return cfg

    def sweep_points(self):
        """Every combination of sweep values as a list of override dicts."""
        if not self.sweep:
            return [{}]
        keys = list(self.sweep)
        return [dict(zip(keys, combo)) for combo in itertools.product(*(self.sweep[k] for k in keys))]

    def validate(self):
        scenario_params(self.scenario, self.scenario_params)
        if self.algorithm not in ALGORITHM_NAMES:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {list(ALGORITHM_NAMES)}")
        unknown = set(self.algorithm_params) - ALGORITHM_KEYS
        if unknown:
            raise ConfigError(f"unknown algorithm keys: {sorted(unknown)}")
        lam = self.algorithm_params.get("lambda")
        if lam is not None and not (isinstance(lam, (int, float)) and lam > 0):
            raise ConfigError("lambda must be a positive number")
        form = self.algorithm_params.get("form")
        if form is not None and form not in ("bounded", "standard"):
            raise ConfigError("form must be 'bounded' or 'standard'")
        if form is not None and self.algorithm != "admm":
            raise ConfigError("'form' only applies to admm")
        tracking = self.algorithm_params.get("tracking")
        if tracking is not None and tracking not in ("norm", "squared"):
            raise ConfigError("tracking must be 'norm' or 'squared'")
        parse_bounding(self.algorithm_params.get("bounding"))
        _, defaults = SCENARIOS[self.scenario]
        for key, values in self.sweep.items():
            if key not in defaults and key not in ("T", "seed", "h") and key not in ALGORITHM_KEYS - {"name"}:
                raise ConfigError(f"sweep key {key!r} is not a scenario or algorithm key")
            if not values:
                raise ConfigError(f"sweep {key!r} has no values")
            for v in values:
                self.with_overrides({key: v})
        return self


def parse_bounding(spec):
    """``None``/``"whole"`` or ``("box" | "ball", radius)``."""
    if spec is None or spec == "whole" or spec == "none":
        return None
    if isinstance(spec, str) and ":" in spec:
        kind, _, radius = spec.partition(":")
        kind = kind.strip()
        if kind in ("box", "ball"):
            r = parse_number(radius)
            if not r > 0:
                raise ConfigError("bounding radius must be positive")
            return kind, float(r)
    raise ConfigError(f"bounding must be 'whole', 'box:R' or 'ball:R', got {spec!r}")


def parse_config(text):
    """Parse config text into a validated `ScenarioConfig`."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    extra = set(cp.sections()) - {"scenario", "algorithm", "sweep"}
    if extra:
        raise ConfigError(f"unknown sections: {sorted(extra)}")
    if not cp.has_section("scenario") or "name" not in cp["scenario"]:
        raise ConfigError("config needs [scenario] with a 'name' key")
    if not cp.has_section("algorithm") or "name" not in cp["algorithm"]:
        raise ConfigError("config needs [algorithm] with a 'name' key")
    sc = {k: _value(v) for k, v in cp["scenario"].items() if k != "name"}
    al = {k: _value(v) for k, v in cp["algorithm"].items() if k != "name"}
    sweep = {}
    if cp.has_section("sweep"):
        for key, v in cp["sweep"].items():
            sweep[key] = [_value(x) for x in v.split(",") if x.strip()]
    cfg = ScenarioConfig(cp["scenario"]["name"].strip(), sc, cp["algorithm"]["name"].strip(), al, sweep, text)
    return cfg.validate()


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
