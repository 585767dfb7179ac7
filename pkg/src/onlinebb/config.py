"""Run configuration: JSON parsing, validation and default materialization.

Example::

    {
      "scenario": "stationary-aniso",
      "policies": [{"policy": "bb1"}, {"policy": "diminishing", "alpha0": "auto"}],
      "K": 10000
    }

Every default is written back into the returned :class:`RunConfig`, so
``parse_config(serialize(cfg)) == cfg``.
"""

from dataclasses import dataclass, field
import copy
import json
import re

import numpy as np

from .errors import ConfigError, InvalidArgument
from .geometry import set_from_dict
from .scenarios import BUNDLED, DEFAULT_K, build_sequence, random_point
from .steppers import KINDS, StepPolicy

TOP_KEYS = {"scenario", "set", "policies", "x0", "K", "output_dir", "checkpoints", "plot_points"}
POLICY_KEYS = {"name", "policy", "alpha0", "period", "alpha_min", "alpha_max", "fallback"}
SET_KEYS = {"ball": {"type", "center", "radius"}, "box": {"type", "lower", "upper"}}
COMMON_SCENARIO_KEYS = {"type", "name", "dim", "seed", "offset"}
SCENARIO_KEYS = {
    "stationary": COMMON_SCENARIO_KEYS | {"curvature", "eigenvalues", "eig_range", "center", "center_range"},
    "drifting": COMMON_SCENARIO_KEYS | {"curvature", "eigenvalues", "eig_range", "center",
                                        "center_range", "drift", "decay"},
    "random_rotation": COMMON_SCENARIO_KEYS | {"eig_range", "center_range"},
}
POLICY_DEFAULTS = {"alpha0": 0.1, "period": 10, "alpha_min": 1e-6, "alpha_max": 1e3, "fallback": 0.1}
DEFAULT_CHECKPOINTS = (100, 1000, 10_000)
_RANDOM_X0 = re.compile(r"^random\((\d+)\)$")


@dataclass
class RunConfig:
    scenario: dict
    set: dict
    policies: list
    x0: object = "zero"
    K: int = DEFAULT_K
    output_dir: str = "runs"
    checkpoints: list = field(default_factory=list)
    plot_points: int = 100

    def to_dict(self):
        return {
            "scenario": copy.deepcopy(self.scenario),
            "set": copy.deepcopy(self.set),
            "policies": copy.deepcopy(self.policies),
            "x0": copy.deepcopy(self.x0),
            "K": self.K,
            "output_dir": self.output_dir,
            "checkpoints": list(self.checkpoints),
            "plot_points": self.plot_points,
        }

    def build_sequence(self):
        return build_sequence(self.scenario, self.K)

    def build_set(self):
        return set_from_dict(self.set)

    def build_x0(self, fset):
        if isinstance(self.x0, list):
            return np.asarray(self.x0, dtype=float)
        m = _RANDOM_X0.match(self.x0)
        if m:
            return random_point(fset, np.random.default_rng(int(m.group(1))))
        return np.zeros(fset.dim)

    def build_policy(self, i, D=None, gmax=None):
        p = dict(self.policies[i])
        alpha0 = p["alpha0"]
        if alpha0 == "auto":
            if not gmax:
                raise InvalidArgument("alpha0='auto' needs a positive gradient bound")
            alpha0 = D / gmax
        return StepPolicy(p["policy"], alpha0, p["period"], p["alpha_min"], p["alpha_max"], p["fallback"])


def serialize(cfg):
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


def _unknown(d, allowed, path):
    for key in d:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}", f"{path}.{key}" if path else key)


def _number(value, path, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    if integer and int(value) != value:
        raise ConfigError(f"expected an integer, got {value!r}", path)
    if positive and not value > 0:
        raise ConfigError(f"must be positive, got {value!r}", path)
    return int(value) if integer else float(value)


def _vector(value, path, dim=None):
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list of numbers", path)
    out = [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if dim is not None and len(out) != dim:
        raise ConfigError(f"expected length {dim}, got {len(out)}", path)
    return out


def _range(value, path):
    v = _vector(value, path, 2)
    if v[0] > v[1]:
        raise ConfigError("range lower end exceeds upper end", path)
    return v


def _scenario(raw):
    bundle_set = None
    if isinstance(raw, str):
        raw = {"name": raw}
    if not isinstance(raw, dict):
        raise ConfigError("expected a bundled name or a mapping", "scenario")
    if "type" not in raw:
        name = raw.get("name")
        if name not in BUNDLED:
            raise ConfigError(f"unknown bundled scenario {name!r}; known: {sorted(BUNDLED)}", "scenario.name")
        extra = set(raw) - {"name"}
        if extra:
            raise ConfigError(f"unknown key {sorted(extra)[0]!r}", f"scenario.{sorted(extra)[0]}")
        bundle_set = copy.deepcopy(BUNDLED[name]["set"])
        raw = {"name": name, **copy.deepcopy(BUNDLED[name]["scenario"])}
    kind = raw["type"]
    if kind not in SCENARIO_KEYS:
        raise ConfigError(f"unknown scenario type {kind!r}", "scenario.type")
    _unknown(raw, SCENARIO_KEYS[kind], "scenario")

    sc = {"type": kind, "name": str(raw.get("name", kind))}
    if "dim" in raw:
        dim = _number(raw["dim"], "scenario.dim", positive=True, integer=True)
    elif "center" in raw:
        dim = len(raw["center"])
    elif "eigenvalues" in raw:
        dim = len(raw["eigenvalues"])
    elif "curvature" in raw:
        dim = len(raw["curvature"])
    else:
        raise ConfigError("cannot infer dimension; give 'dim'", "scenario.dim")
    sc["dim"] = dim
    seed = _number(raw.get("seed", 0), "scenario.seed", integer=True)
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer", "scenario.seed")
    sc["seed"] = seed
    sc["offset"] = _number(raw.get("offset", 0.0), "scenario.offset")

    if kind == "random_rotation":
        sc["eig_range"] = _range(raw.get("eig_range", [1.0, 10.0]), "scenario.eig_range")
        sc["center_range"] = _range(raw.get("center_range", [-1.0, 1.0]), "scenario.center_range")
        if sc["eig_range"][0] < 0:
            raise ConfigError("eigenvalues must be non-negative", "scenario.eig_range")
        return sc, bundle_set

    sources = [k for k in ("curvature", "eigenvalues", "eig_range") if k in raw]
    if len(sources) > 1:
        raise ConfigError(f"give only one of {sources}", f"scenario.{sources[1]}")
    source = sources[0] if sources else "eig_range"
    if source == "curvature":
        mat = raw["curvature"]
        if not isinstance(mat, list) or len(mat) != dim:
            raise ConfigError(f"expected a {dim}x{dim} matrix", "scenario.curvature")
        sc["curvature"] = [_vector(row, f"scenario.curvature[{i}]", dim) for i, row in enumerate(mat)]
    elif source == "eigenvalues":
        sc["eigenvalues"] = _vector(raw["eigenvalues"], "scenario.eigenvalues", dim)
        if min(sc["eigenvalues"]) < 0:
            raise ConfigError("eigenvalues must be non-negative", "scenario.eigenvalues")
    else:
        sc["eig_range"] = _range(raw.get("eig_range", [1.0, 10.0]), "scenario.eig_range")
        if sc["eig_range"][0] < 0:
            raise ConfigError("eigenvalues must be non-negative", "scenario.eig_range")
    if "center" in raw:
        sc["center"] = _vector(raw["center"], "scenario.center", dim)
    else:
        sc["center_range"] = _range(raw.get("center_range", [-1.0, 1.0]), "scenario.center_range")
    if kind == "drifting":
        sc["drift"] = _vector(raw.get("drift", [0.0] * dim), "scenario.drift", dim)
        sc["decay"] = _number(raw.get("decay", 1.0), "scenario.decay")
    return sc, bundle_set


def _set(raw, dim):
    if raw is None:
        raw = {"type": "ball", "center": [0.0] * dim, "radius": 5.0}
    if not isinstance(raw, dict):
        raise ConfigError("expected a mapping", "set")
    kind = raw.get("type")
    if kind not in SET_KEYS:
        raise ConfigError(f"unknown set type {kind!r}", "set.type")
    _unknown(raw, SET_KEYS[kind], "set")
    if kind == "ball":
        out = {"type": "ball",
               "center": _vector(raw.get("center", [0.0] * dim), "set.center", dim),
               "radius": _number(raw.get("radius"), "set.radius", positive=True)}
    else:
        if "lower" not in raw or "upper" not in raw:
            raise ConfigError("box needs 'lower' and 'upper'", "set")
        out = {"type": "box",
               "lower": _vector(raw["lower"], "set.lower", dim),
               "upper": _vector(raw["upper"], "set.upper", dim)}
        if any(lo > hi for lo, hi in zip(out["lower"], out["upper"])):
            raise ConfigError("lower must not exceed upper", "set")
    return out


def _policies(raw):
    if not isinstance(raw, list) or not raw:
        raise ConfigError("expected a non-empty list", "policies")
    out, names = [], set()
    for i, p in enumerate(raw):
        path = f"policies[{i}]"
        if isinstance(p, str):
            p = {"policy": p}
        if not isinstance(p, dict):
            raise ConfigError("expected a mapping", path)
        _unknown(p, POLICY_KEYS, path)
        kind = p.get("policy")
        if kind not in KINDS:
            raise ConfigError(f"unknown policy {kind!r}; expected one of {KINDS}", f"{path}.policy")
        q = {"name": str(p.get("name", kind)), "policy": kind}
        if not re.fullmatch(r"[A-Za-z0-9_.-]+", q["name"]):
            raise ConfigError("name may only use letters, digits, '_', '.', '-'", f"{path}.name")
        if q["name"] in names:
            raise ConfigError(f"duplicate policy name {q['name']!r}", f"{path}.name")
        names.add(q["name"])
        for key, default in POLICY_DEFAULTS.items():
            value = p.get(key, default)
            if key == "alpha0" and value == "auto":
                if kind != "diminishing":
                    raise ConfigError("'auto' is only meaningful for diminishing steps", f"{path}.alpha0")
                q[key] = "auto"
                continue
            q[key] = _number(value, f"{path}.{key}", positive=True, integer=(key == "period"))
        if not q["alpha_min"] <= q["fallback"] <= q["alpha_max"]:
            raise ConfigError("need alpha_min <= fallback <= alpha_max", path)
        out.append(q)
    return out


def _x0(raw, dim):
    if isinstance(raw, str):
        if raw == "zero" or _RANDOM_X0.match(raw):
            return raw
        raise ConfigError("expected 'zero', 'random(<seed>)' or a vector", "x0")
    return _vector(raw, "x0", dim)


def validate(raw):
    """Validate a decoded JSON mapping and return a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping")
    _unknown(raw, TOP_KEYS, "")
    if "scenario" not in raw:
        raise ConfigError("missing", "scenario")
    if "policies" not in raw:
        raise ConfigError("missing", "policies")
    sc, bundle_set = _scenario(raw["scenario"])
    fset = _set(raw.get("set", bundle_set), sc["dim"])
    policies = _policies(raw["policies"])
    x0 = _x0(raw.get("x0", "zero"), sc["dim"])
    K = _number(raw.get("K", DEFAULT_K), "K", positive=True, integer=True)
    if "checkpoints" in raw:
        if not isinstance(raw["checkpoints"], list):
            raise ConfigError("expected a list", "checkpoints")
        checkpoints = [_number(c, f"checkpoints[{i}]", positive=True, integer=True)
                       for i, c in enumerate(raw["checkpoints"])]
        if checkpoints and max(checkpoints) > K:
            raise ConfigError(f"checkpoint {max(checkpoints)} exceeds K={K}", "checkpoints")
    else:
        checkpoints = [c for c in DEFAULT_CHECKPOINTS if c <= K]
    output_dir = raw.get("output_dir", f"runs/{sc['name']}")
    if not isinstance(output_dir, str):
        raise ConfigError("expected a path string", "output_dir")
    plot_points = _number(raw.get("plot_points", 100), "plot_points", positive=True, integer=True)
    cfg = RunConfig(sc, fset, policies, x0, K, output_dir, checkpoints, plot_points)
    try:
        cfg.build_set()
        if cfg.scenario["type"] != "random_rotation":
            cfg.build_sequence().generate(1)
    except InvalidArgument as exc:
        raise ConfigError(str(exc), "scenario") from None
    return cfg


def parse_config(text):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from None
    return validate(raw)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
