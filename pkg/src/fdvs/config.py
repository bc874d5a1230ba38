"""YAML run-configuration schema with key-path validation errors.

Schema (defaults in parentheses; grid.nx, time.t_final, data.epsilon and
data.sigma are required):

    grid:
      nx: 256
      L: 57.6            # optional; omitted = wrap-guard minimum
    time:
      t_final: 40.0
      cfl: 0.5           # (0.5)
      snapshot_stride: 0 # (0 = only via --out snapshots disabled)
      diag_stride: 10    # (10)
    data:
      profile: gaussian  # (gaussian)
      epsilon: 0.05
      sigma: 1.5
      centers: [[0.0, 0.0], [0.0, 0.0]]
      velocity: [0.0, 0.0]
    chart:
      r_max: 0.9         # (0.9)
    norms:               # extra CSV columns, list of NormSpec mappings
      - {p: 2, q: 2, s: 0, region: All}
    fit:
      window: [10.0, 40.0]
    seed: 0

Every rejection names the offending key path (for example "grid.nx:
must be even").
"""
import math

import yaml

from .chart import DEFAULT_R_MAX, InitialDataSpec
from .errors import ConfigError
from .integrator import RunConfig
from .norms import NormSpec

__all__ = ["load_config", "parse_config", "default_config_text"]

_TOP_KEYS = {"grid", "time", "data", "chart", "norms", "fit", "seed"}
_SECTION_KEYS = {
    "grid": {"nx", "L"},
    "time": {"t_final", "cfl", "snapshot_stride", "diag_stride"},
    "data": {"profile", "epsilon", "sigma", "centers", "velocity"},
    "chart": {"r_max"},
    "fit": {"window"},
}


def _fail(path, msg):
    raise ConfigError(f"{path}: {msg}")


def _section(doc, name):
    sec = doc.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        _fail(name, "must be a mapping")
    for key in sec:
        if key not in _SECTION_KEYS[name]:
            _fail(f"{name}.{key}", "unknown key")
    return sec


def _number(sec, path, key, default=None, required=False):
    if key not in sec:
        if required:
            _fail(f"{path}.{key}", "required key missing")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"{path}.{key}", f"must be a number, got {v!r}")
    if not math.isfinite(float(v)):
        _fail(f"{path}.{key}", "must be finite")
    return float(v)


def _integer(sec, path, key, default=None, required=False):
    if key not in sec:
        if required:
            _fail(f"{path}.{key}", "required key missing")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(f"{path}.{key}", f"must be an integer, got {v!r}")
    return v


def _pair(v, path):
    if not isinstance(v, (list, tuple)) or len(v) != 2 or \
            any(isinstance(c, bool) or not isinstance(c, (int, float))
                for c in v):
        _fail(path, f"must be a pair of numbers, got {v!r}")
    return (float(v[0]), float(v[1]))


def parse_config(doc, nx_override=None) -> RunConfig:
    """Validate a parsed YAML document and build a RunConfig."""
    if not isinstance(doc, dict):
        raise ConfigError("config root: must be a mapping")
    for key in doc:
        if key not in _TOP_KEYS:
            _fail(key, "unknown key")

    grid = _section(doc, "grid")
    nx = _integer(grid, "grid", "nx", required=True)
    if nx_override is not None:
        nx = nx_override
    if nx < 16:
        _fail("grid.nx", f"must be >= 16, got {nx}")
    if nx % 2 != 0:
        _fail("grid.nx", f"must be even, got {nx}")
    L = _number(grid, "grid", "L")
    if L is not None and L <= 0:
        _fail("grid.L", f"must be positive, got {L}")

    time = _section(doc, "time")
    t_final = _number(time, "time", "t_final", required=True)
    if t_final <= 0:
        _fail("time.t_final", f"must be positive, got {t_final}")
    cfl = _number(time, "time", "cfl", default=0.5)
    if not (0.0 < cfl <= 1.0):
        _fail("time.cfl", f"must be in (0, 1], got {cfl}")
    snap = _integer(time, "time", "snapshot_stride", default=0)
    if snap < 0:
        _fail("time.snapshot_stride", f"must be >= 0, got {snap}")
    diag = _integer(time, "time", "diag_stride", default=10)
    if diag < 1:
        _fail("time.diag_stride", f"must be >= 1, got {diag}")

    data = _section(doc, "data")
    profile = data.get("profile", "gaussian")
    if profile != "gaussian":
        _fail("data.profile", f"must be 'gaussian', got {profile!r}")
    epsilon = _number(data, "data", "epsilon", required=True)
    if not (0.0 <= epsilon <= 0.3):
        _fail("data.epsilon", f"must be in [0, 0.3], got {epsilon}")
    sigma = _number(data, "data", "sigma", required=True)
    if sigma <= 0:
        _fail("data.sigma", f"must be positive, got {sigma}")
    centers = data.get("centers", [[0.0, 0.0], [0.0, 0.0]])
    if not isinstance(centers, (list, tuple)) or len(centers) != 2:
        _fail("data.centers", "must be two (x, y) pairs")
    centers = tuple(_pair(c, f"data.centers[{i}]")
                    for i, c in enumerate(centers))
    velocity = _pair(data.get("velocity", [0.0, 0.0]), "data.velocity")

    chart = _section(doc, "chart")
    r_max = _number(chart, "chart", "r_max", default=DEFAULT_R_MAX)
    if not (0.0 < r_max < 1.0):
        _fail("chart.r_max", f"must be in (0, 1), got {r_max}")

    norms_doc = doc.get("norms", [])
    if norms_doc is None:
        norms_doc = []
    if not isinstance(norms_doc, list):
        _fail("norms", "must be a list of norm mappings")
    norms = []
    for i, item in enumerate(norms_doc):
        if not isinstance(item, dict):
            _fail(f"norms[{i}]", "must be a mapping")
        for key in item:
            if key not in ("p", "q", "s", "region"):
                _fail(f"norms[{i}].{key}", "unknown key")
        try:
            norms.append(NormSpec(p=item.get("p", 2), q=item.get("q", 2),
                                  s=item.get("s", 0),
                                  region=item.get("region", "All")))
        except ValueError as e:
            _fail(f"norms[{i}]", str(e))

    fit = _section(doc, "fit")
    window = fit.get("window", [10.0, 40.0])
    window = _pair(window, "fit.window")
    if not (0.0 < window[0] < window[1]):
        _fail("fit.window", f"must be increasing positive, got {window}")

    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        _fail("seed", f"must be an integer, got {seed!r}")

    try:
        spec = InitialDataSpec(epsilon=epsilon, sigma=sigma, centers=centers,
                               velocity=velocity, profile=profile)
    except ValueError as e:
        _fail("data", str(e))
    try:
        return RunConfig(nx=nx, t_final=t_final, data=spec, L=L, cfl=cfl,
                         snapshot_stride=snap, diag_stride=diag, r_max=r_max,
                         norms=tuple(norms), fit_window=window, seed=seed)
    except ConfigError:
        raise


def load_config(path, nx_override=None) -> RunConfig:
    try:
        fh = open(path, "r")
    except OSError as e:
        raise ConfigError(f"config file: {e}")
    with fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as e:
            raise ConfigError(f"config root: invalid YAML ({e})")
    return parse_config(doc, nx_override=nx_override)


def default_config_text() -> str:
    """A ready-to-run small-data configuration."""
    return (
        "grid:\n"
        "  nx: 256\n"
        "time:\n"
        "  t_final: 40.0\n"
        "  cfl: 0.5\n"
        "  diag_stride: 10\n"
        "data:\n"
        "  epsilon: 0.05\n"
        "  sigma: 1.5\n"
        "  centers: [[0.0, 0.0], [0.0, 0.0]]\n"
        "  velocity: [1.0, -1.0]\n"
        "chart:\n"
        "  r_max: 0.9\n"
        "fit:\n"
        "  window: [10.0, 40.0]\n"
        "seed: 0\n"
    )
