"""Experiment configuration files.

Line-oriented ``key = value`` text; ``#`` starts a comment.  List values
are comma separated.
"""
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .exceptions import ConfigError

PROBLEMS = ("burgers_builtin", "external_import")


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str = "burgers_builtin"
    n_elements: int = None
    nu: float = None
    n_steps: int = None
    dt: float = None
    t_final: float = 1.0
    r: int = None
    models: tuple = ("grom", "lrom", "adlrom")
    delta: float = 0.0
    mu: float = 0.0
    order_n: int = 0
    ad_method: str = "lavrentiev"
    scheme: str = "euler"
    bootstrap: str = "first_step_euler"
    lagged: bool = False
    center: bool = False
    initial_condition: str = "step"
    reference_n_elements: int = None
    newton_tol: float = 1e-10
    newton_max_iter: int = 25
    output_dir: str = "output"
    sweep_delta: tuple = None
    sweep_mu: tuple = None
    # external_import inputs
    snapshot_file: str = None
    times_file: str = None
    mass_file: str = None
    stiffness_file: str = None
    tensor_file: str = None
    center_left_file: str = None
    center_right_file: str = None
    center_convection_file: str = None
    operators_dir: str = None
    reference_file: str = None

    @property
    def time_step(self):
        return self.dt if self.dt is not None else self.t_final / self.n_steps


def _as_bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _as_list(conv):
    def parse(s):
        items = [p.strip() for p in s.split(",") if p.strip()]
        return tuple(conv(p) for p in items)
    return parse


def _as_int(s):
    f = float(s)
    if f != int(f):
        raise ValueError(f"not an integer: {s!r}")
    return int(f)


_PARSERS = {
    "problem": str, "n_elements": _as_int, "nu": float, "n_steps": _as_int,
    "dt": float, "t_final": float, "r": _as_int,
    "models": _as_list(lambda s: s.lower()),
    "delta": float, "mu": float, "order_n": _as_int, "ad_method": str,
    "scheme": str, "bootstrap": str, "lagged": _as_bool, "center": _as_bool,
    "initial_condition": str, "reference_n_elements": _as_int,
    "newton_tol": float, "newton_max_iter": _as_int, "output_dir": str,
    "sweep_delta": _as_list(float), "sweep_mu": _as_list(float),
}
for _f in fields(ExperimentConfig):
    _PARSERS.setdefault(_f.name, str)
_ALIASES = {"model": "models", "n": "order_n", "N": "order_n",
            "method": "ad_method"}


def _check_positive(cfg, name, lines, strict=True):
    v = getattr(cfg, name)
    if v is None:
        return
    if (strict and not v > 0) or (not strict and not v >= 0):
        raise ConfigError(f"{name} must be {'positive' if strict else 'nonnegative'}, "
                          f"got {v}", lines.get(name), name)


def validate(cfg, lines=None):
    """Check required keys and value ranges; returns ``cfg``."""
    lines = lines or {}
    if cfg.problem not in PROBLEMS:
        raise ConfigError(f"problem must be one of {PROBLEMS}",
                          lines.get("problem"), "problem")
    required = ["nu", "n_steps", "r"]
    if cfg.problem == "burgers_builtin":
        required.append("n_elements")
    else:
        if cfg.operators_dir is None:
            required += ["snapshot_file", "mass_file"]
        if cfg.dt is None:
            required.append("dt")
    for key in required:
        if getattr(cfg, key) is None:
            raise ConfigError(f"missing required key '{key}'", None, key)
    for key in ("n_elements", "nu", "n_steps", "r", "dt", "t_final",
                "newton_tol", "newton_max_iter", "reference_n_elements"):
        _check_positive(cfg, key, lines)
    for key in ("delta", "mu", "order_n"):
        _check_positive(cfg, key, lines, strict=False)
    if cfg.problem == "burgers_builtin" and cfg.n_elements < 2:
        raise ConfigError("n_elements must be at least 2",
                          lines.get("n_elements"), "n_elements")
    for key in ("sweep_delta", "sweep_mu"):
        v = getattr(cfg, key)
        if v is not None:
            if len(v) == 0:
                raise ConfigError(f"{key} must not be empty", lines.get(key),
                                  key)
            if any(x < 0 for x in v):
                raise ConfigError(f"{key} entries must be nonnegative",
                                  lines.get(key), key)
    bad = [m for m in cfg.models if m not in ("grom", "lrom", "adlrom")]
    if bad or not cfg.models:
        raise ConfigError(f"unknown model(s) {bad}", lines.get("models"),
                          "models")
    if cfg.ad_method not in ("van_cittert", "tikhonov", "lavrentiev"):
        raise ConfigError(f"unknown ad_method {cfg.ad_method!r}",
                          lines.get("ad_method"), "ad_method")
    if cfg.ad_method == "tikhonov" and "adlrom" in cfg.models \
            and not cfg.mu > 0:
        raise ConfigError("tikhonov requires mu > 0", lines.get("mu"), "mu")
    if cfg.scheme not in ("euler", "bdf2"):
        raise ConfigError(f"unknown scheme {cfg.scheme!r}",
                          lines.get("scheme"), "scheme")
    if cfg.bootstrap not in ("first_step_euler", "given_history"):
        raise ConfigError(f"unknown bootstrap {cfg.bootstrap!r}",
                          lines.get("bootstrap"), "bootstrap")
    if cfg.initial_condition not in ("step", "zero"):
        raise ConfigError("initial_condition must be 'step' or 'zero'",
                          lines.get("initial_condition"), "initial_condition")
    return cfg


def parse_config_text(text, base_dir=None):
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}",
                              lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in _PARSERS:
            raise ConfigError(f"unknown key '{key}'", lineno, key)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"cannot parse value for '{key}': {exc}",
                              lineno, key) from None
        lines[key] = lineno
    if base_dir is not None:
        for key, v in list(values.items()):
            if (key.endswith("_file") or key.endswith("_dir")) and \
                    not Path(v).is_absolute():
                values[key] = str(Path(base_dir) / v)
    return validate(ExperimentConfig(**values), lines)


def parse_config(path):
    """Read and validate an experiment configuration file.

    Relative paths in ``*_file``/``*_dir`` keys resolve against the
    directory holding the config file.
    """
    path = Path(path)
    return parse_config_text(path.read_text(), base_dir=path.parent)


def with_overrides(cfg, **overrides):
    """Apply non-None overrides and revalidate."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    return validate(replace(cfg, **changes)) if changes else cfg
