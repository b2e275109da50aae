"""
Configuration management for damped-kernel runs.

Values come from built-in defaults, then an optional config file, then
command-line flags. Config files are either key=value lines (parsed with
python-dotenv, which keeps line numbers for diagnostics) or YAML.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np
import yaml
from dotenv.parser import parse_stream

from damped_kernel.classical.core import DampedParams
from damped_kernel.comparators.methods import MethodId
from damped_kernel.slicing.coefficients import SEEDS

CONFIG_ENV_VAR = "DAMPED_KERNEL_CONFIG_PATH"
OUTPUT_DIR_ENV_VAR = "DAMPED_KERNEL_OUTPUT_DIR"
DEFAULT_CONFIG_PATH = "./configs/config.yaml"

COMMANDS = ("kernel", "converge", "evolve", "compare", "check")
OUTPUT_FORMATS = ("csv", "json")

# Dotted keys understood in config files, with their built-in defaults
DEFAULTS: Dict[str, Any] = {
    "physics.kappa": 0.6,
    "physics.hbar": 1.0,
    "packet.theta0": 0.5,
    "packet.v0": 5.0,
    "grid.T": "1",
    "grid.xa": "0",
    "grid.xb": "1",
    "grid.N": "125,250,500,1000,2000,4000,8000",
    "run.method": "all",
    "run.oracle": False,
    "run.oracle_panels": None,
    "run.oracle_order": 20,
    "run.seed": "hyperbolic",
    "run.include_omega": True,
    "run.workers": 1,
    "run.inject_fault": None,
    "output.dir": "./outputs",
    "output.path": None,
    "output.format": "csv",
    "output.gnuplot": False,
    "audit_log.enabled": True,
    "audit_log.file": None,
    "audit_log.level": "INFO",
}

# Time grids of the reference regime per command
COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "evolve": {"grid.T": "0:3:61"},
    "compare": {"grid.T": "0:40:801"},
}

# Flat key aliases accepted in key=value files and used by the CLI
ALIASES: Dict[str, str] = {
    "kappa": "physics.kappa",
    "hbar": "physics.hbar",
    "theta0": "packet.theta0",
    "alpha0": "packet.theta0",
    "v0": "packet.v0",
    "T": "grid.T",
    "T_grid": "grid.T",
    "xa": "grid.xa",
    "xb": "grid.xb",
    "N": "grid.N",
    "N_list": "grid.N",
    "method": "run.method",
    "oracle": "run.oracle",
    "oracle_panels": "run.oracle_panels",
    "oracle_order": "run.oracle_order",
    "seed": "run.seed",
    "include_omega": "run.include_omega",
    "workers": "run.workers",
    "inject_fault": "run.inject_fault",
    "format": "output.format",
    "out": "output.path",
    "output_dir": "output.dir",
    "gnuplot": "output.gnuplot",
}


class ConfigError(Exception):
    """Raised when configuration is invalid."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None,
                 source: Optional[str] = None):
        self.key = key
        self.line = line
        self.source = source
        where = []
        if key:
            where.append(key)
        if source:
            where.append(f"{source} line {line}" if line else source)
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


def _canonical(key: str) -> str:
    key = key.strip()
    if "." not in key:
        key = key.replace("-", "_")
    return ALIASES.get(key, key)


def _flatten(data: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(_flatten(value, dotted + "."))
        else:
            flat[dotted] = value
    return flat


class ConfigFile:
    """
    A parsed config file with per-key line numbers.

    Enforces:
    - Known keys only
    - One assignment per key
    """

    def __init__(self, config_path: str | os.PathLike):
        """
        Load a config file.

        Args:
            config_path: Path to a .yaml/.yml file or a key=value file.

        Raises:
            ConfigError: If the file is missing or malformed.
        """
        self.config_path = Path(config_path)
        if not self.config_path.exists():
            raise ConfigError(f"Config file not found: {self.config_path}")

        self.values: Dict[str, Any] = {}
        self.lines: Dict[str, int] = {}

        if self.config_path.suffix in (".yaml", ".yml"):
            self._load_yaml()
        else:
            self._load_key_value()

        self._validate_keys()

    def _load_yaml(self) -> None:
        try:
            with open(self.config_path, "r") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML: {e}", source=str(self.config_path))
        if not isinstance(data, Mapping):
            raise ConfigError("top level must be a mapping", source=str(self.config_path))

        for key, value in _flatten(data).items():
            self.values[_canonical(key)] = value

    def _load_key_value(self) -> None:
        with open(self.config_path, "r") as f:
            for binding in parse_stream(f):
                # a binding's text starts with any blank lines before it
                text = binding.original.string
                line = binding.original.line + text[:len(text) - len(text.lstrip())].count("\n")
                if binding.error:
                    raise ConfigError(
                        f"cannot parse {binding.original.string.strip()!r}",
                        line=line, source=str(self.config_path),
                    )
                if binding.key is None:
                    continue
                key = _canonical(binding.key)
                if key in self.values:
                    raise ConfigError(
                        "key assigned twice", key=key, line=line, source=str(self.config_path),
                    )
                if binding.value is None:
                    raise ConfigError("missing value", key=key, line=line, source=str(self.config_path))
                self.values[key] = binding.value
                self.lines[key] = line

    def _validate_keys(self) -> None:
        for key in self.values:
            if key not in DEFAULTS:
                raise ConfigError(
                    "unknown config key", key=key, line=self.lines.get(key),
                    source=str(self.config_path),
                )

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a value by dot-notation path (aliases accepted).

        Args:
            key: Key path (e.g. 'physics.kappa' or 'kappa')
            default: Default value if not set

        Returns:
            Configuration value
        """
        return self.values.get(_canonical(key), default)

    def line_of(self, key: str) -> Optional[int]:
        return self.lines.get(_canonical(key))


def parse_range(text: Any, integer: bool = False) -> Tuple[float, ...]:
    """
    Parse a grid string.

    Accepted forms: a single number, a comma-separated list, or
    ``min:max:steps`` (``steps`` points including both ends, steps >= 1).

    Raises:
        ValueError: On malformed or empty input.
    """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        values: Tuple[float, ...] = (float(text),)
    elif isinstance(text, (list, tuple)):
        values = tuple(float(v) for v in text)
    else:
        spec = str(text).strip()
        if not spec:
            raise ValueError("empty range")
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ValueError(f"range {spec!r} must look like min:max:steps")
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
            if steps < 1:
                raise ValueError(f"range {spec!r} needs steps >= 1")
            if steps == 1:
                values = (lo,)
            else:
                values = tuple(float(v) for v in np.linspace(lo, hi, steps))
        else:
            values = tuple(float(v) for v in spec.split(",") if v.strip())

    if not values:
        raise ValueError("empty range")
    if not all(np.isfinite(values)):
        raise ValueError("range values must be finite")
    if integer:
        if any(v != int(v) for v in values):
            raise ValueError("expected integer values")
        return tuple(int(v) for v in values)
    return values


def _as_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


def _as_complex(value: Any) -> complex:
    if isinstance(value, complex):
        return value
    return complex(str(value).replace(" ", "").replace("i", "j"))


@dataclass(frozen=True)
class PacketSpec:
    theta0: complex = 0.5
    v0: float = 5.0


@dataclass(frozen=True)
class GridSpec:
    T: Tuple[float, ...] = (1.0,)
    x_a: Tuple[float, ...] = (0.0,)
    x_b: Tuple[float, ...] = (1.0,)
    N: Tuple[int, ...] = (125, 250, 500, 1000, 2000, 4000, 8000)


@dataclass(frozen=True)
class OutputSpec:
    directory: Path = Path("./outputs")
    path: Optional[Path] = None
    format: str = "csv"
    gnuplot: bool = False

    def target(self, command: str) -> Path:
        """Output file: the explicit path, else <directory>/<command>.<ext>."""
        if self.path is not None:
            return self.path
        ext = "dat" if self.gnuplot else self.format
        return self.directory / f"{command}.{ext}"


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved, validated run configuration (no randomness anywhere)."""

    command: str
    params: DampedParams
    packet: PacketSpec = field(default_factory=PacketSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    methods: Tuple[MethodId, ...] = tuple(MethodId)
    oracle: bool = False
    oracle_panels: Optional[int] = None
    oracle_order: int = 20
    seed: str = "hyperbolic"
    include_omega: bool = True
    workers: int = 1
    inject_fault: Optional[str] = None
    audit: Dict[str, Any] = field(default_factory=dict)
    source: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready echo of every resolved setting."""
        theta0 = complex(self.packet.theta0)
        return {
            "command": self.command,
            "physics": {"kappa": self.params.kappa, "hbar": self.params.hbar},
            "packet": {"theta0": [theta0.real, theta0.imag], "v0": self.packet.v0},
            "grid": {
                "T": list(self.grid.T),
                "x_a": list(self.grid.x_a),
                "x_b": list(self.grid.x_b),
                "N": list(self.grid.N),
            },
            "run": {
                "methods": [m.value for m in self.methods],
                "oracle": self.oracle,
                "oracle_panels": self.oracle_panels,
                "oracle_order": self.oracle_order,
                "seed": self.seed,
                "include_omega": self.include_omega,
                "inject_fault": self.inject_fault,
            },
            "output": {"format": self.output.format, "gnuplot": self.output.gnuplot},
            "config_file": self.source,
            "randomness": "none (seed-free, fully deterministic)",
        }


def resolve_config(
        command: str,
        config_path: Optional[str] = None,
        overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """
    Merge defaults, config file and overrides into a validated RunConfig.

    Args:
        command: One of ``COMMANDS``.
        config_path: Explicit config file. Defaults to $DAMPED_KERNEL_CONFIG_PATH,
            then ./configs/config.yaml when it exists.
        overrides: Flag values keyed by dotted key or alias; None entries ignored.

    Returns:
        RunConfig

    Raises:
        ConfigError: With the offending key and, for files, the line number.
    """
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")

    merged: Dict[str, Any] = dict(DEFAULTS)
    merged.update(COMMAND_DEFAULTS.get(command, {}))
    env_dir = os.getenv(OUTPUT_DIR_ENV_VAR)
    if env_dir:
        merged["output.dir"] = env_dir

    cfg_file: Optional[ConfigFile] = None
    if config_path is None:
        config_path = os.getenv(CONFIG_ENV_VAR)
        if config_path is None and Path(DEFAULT_CONFIG_PATH).exists():
            config_path = DEFAULT_CONFIG_PATH
    if config_path is not None:
        cfg_file = ConfigFile(config_path)
        merged.update(cfg_file.values)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        canonical = _canonical(key)
        if canonical not in DEFAULTS:
            raise ConfigError("unknown option", key=key)
        merged[canonical] = value

    def fail(key: str, message: str) -> ConfigError:
        line = cfg_file.line_of(key) if cfg_file is not None else None
        source = str(cfg_file.config_path) if cfg_file is not None and key in cfg_file.values else None
        return ConfigError(message, key=key, line=line, source=source)

    def convert(key: str, fn):
        try:
            return fn(merged[key])
        except (TypeError, ValueError) as e:
            raise fail(key, str(e)) from e

    kappa = convert("physics.kappa", float)
    hbar = convert("physics.hbar", float)
    try:
        params = DampedParams(kappa=kappa, hbar=hbar)
    except ValueError as e:
        raise fail("physics.kappa" if "kappa" in str(e) else "physics.hbar", str(e)) from e

    theta0 = convert("packet.theta0", _as_complex)
    if not theta0.real > 0.0:
        raise fail("packet.theta0", f"packet width needs Re(theta0) > 0, got {theta0}")
    v0 = convert("packet.v0", float)

    T = convert("grid.T", parse_range)
    if any(t < 0.0 for t in T):
        raise fail("grid.T", "times must be >= 0")
    if command in ("kernel", "converge") and any(t <= 0.0 for t in T):
        raise fail("grid.T", f"the {command} command needs T > 0")
    x_a = convert("grid.xa", parse_range)
    x_b = convert("grid.xb", parse_range)
    N = convert("grid.N", lambda v: parse_range(v, integer=True))
    if any(n < 2 for n in N):
        raise fail("grid.N", "slice counts must be >= 2")
    if command == "converge" and list(N) != sorted(set(N)):
        raise fail("grid.N", "slice counts must be strictly ascending")

    method_text = str(merged["run.method"]).strip()
    if method_text.lower() == "all":
        methods = tuple(MethodId)
    else:
        try:
            methods = tuple(MethodId(m.strip().upper()) for m in method_text.split(",") if m.strip())
        except ValueError as e:
            raise fail("run.method", str(e)) from e
        if not methods:
            raise fail("run.method", "no method selected")

    seed = str(merged["run.seed"]).strip()
    if seed not in SEEDS:
        raise fail("run.seed", f"seed must be one of {SEEDS}")

    workers = convert("run.workers", int)
    if workers < 1:
        raise fail("run.workers", "need at least one worker")

    panels = merged["run.oracle_panels"]
    if panels is not None:
        panels = convert("run.oracle_panels", int)
        if panels < 1:
            raise fail("run.oracle_panels", "need at least one panel")
    order = convert("run.oracle_order", int)
    if order < 2:
        raise fail("run.oracle_order", "Gauss-Legendre order must be >= 2")

    fmt = str(merged["output.format"]).strip().lower()
    if fmt not in OUTPUT_FORMATS:
        raise fail("output.format", f"format must be one of {OUTPUT_FORMATS}")
    path = merged["output.path"]
    output = OutputSpec(
        directory=Path(str(merged["output.dir"])),
        path=Path(str(path)) if path not in (None, "") else None,
        format=fmt,
        gnuplot=convert("output.gnuplot", _as_bool),
    )

    audit_file = merged["audit_log.file"] or str(output.directory / "audit.log")
    level = str(merged["audit_log.level"]).upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR"):
        raise fail("audit_log.level", f"invalid level {level!r}")

    fault = merged["run.inject_fault"]
    return RunConfig(
        command=command,
        params=params,
        packet=PacketSpec(theta0=theta0, v0=v0),
        grid=GridSpec(T=T, x_a=x_a, x_b=x_b, N=N),
        output=output,
        methods=methods,
        oracle=convert("run.oracle", _as_bool),
        oracle_panels=panels,
        oracle_order=order,
        seed=seed,
        include_omega=convert("run.include_omega", _as_bool),
        workers=workers,
        inject_fault=str(fault) if fault not in (None, "") else None,
        audit={
            "enabled": convert("audit_log.enabled", _as_bool),
            "file": audit_file,
            "level": level,
        },
        source=str(cfg_file.config_path) if cfg_file is not None else None,
    )


# Global config instance (lazy-loaded)
_config_instance: Optional[RunConfig] = None


def load_config(
        command: str = "kernel",
        config_path: Optional[str] = None,
        overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """
    Resolve and cache a run configuration.

    Args:
        command: Command the configuration is for
        config_path: Optional override path
        overrides: Flag values

    Returns:
        RunConfig instance
    """
    global _config_instance
    _config_instance = resolve_config(command, config_path, overrides)
    return _config_instance


def get_config() -> RunConfig:
    """Get the currently loaded config (must be initialized)."""
    if _config_instance is None:
        raise RuntimeError("Config not loaded. Call load_config() first.")
    return _config_instance
