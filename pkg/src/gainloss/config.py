"""Experiment configuration files.

One ``key = value`` per line, ``#`` starts a comment, lists are
comma-separated.  Keys a given experiment does not know are rejected.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .errors import GainLossError


class ConfigError(GainLossError, ValueError):
    """Malformed or inconsistent configuration (a usage error)."""


EXPERIMENTS = (
    "ingest", "simulate", "fpt", "leverage", "fit",
    "permute", "filter", "panel", "scan", "report",
)
SCAN_MIN_LENGTH = 10_000


def _opt_float(text: str):
    return None if text.strip().lower() in ("none", "") else float(text)


def _opt_int(text: str):
    return None if text.strip().lower() in ("none", "") else int(text)


def _floats(text: str):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _strs(text: str):
    return tuple(v.strip() for v in text.split(",") if v.strip())


PARSERS = {
    "experiment": str.strip, "seed": int, "out": str.strip, "length": int,
    "burn_in": _opt_int,
    "rho_multiple": float, "rho_abs": _opt_float, "max_wait": _opt_float,
    "dm_method": str.strip, "max_lag": int, "fit_lag_min": int, "fit_lag_max": int,
    "kind": str.strip,
    "model": str.strip, "mu": float, "a0": float, "a1a": float, "a1b": float, "b1": float,
    "sigma": float, "alpha": float, "c": float, "s0": float,
    "a1a_values": _floats, "grid": _floats, "replicates": int,
    "ks": _ints, "family": str.strip, "levels": int, "domain": str.strip,
    "csv": _strs,
}

_RUN = {"seed", "out", "length", "burn_in"}
_ANALYSIS = {"rho_multiple", "rho_abs", "max_wait", "dm_method", "max_lag", "fit_lag_min", "fit_lag_max"}
_MODEL = {"model", "mu", "a0", "a1a", "a1b", "b1", "sigma", "alpha", "c", "s0"}

ALLOWED = {
    "ingest": {"csv", "seed", "out"},
    "simulate": _RUN | _MODEL,
    "fpt": {"csv", "seed", "out", "rho_multiple", "rho_abs"},
    "leverage": {"csv", "seed", "out", "max_lag", "kind"},
    "fit": {"csv", "seed", "out"} | _ANALYSIS,
    "permute": _RUN | _ANALYSIS | _MODEL | {"csv"},
    "filter": _RUN | _ANALYSIS | _MODEL | {"csv", "ks", "family", "levels", "domain"},
    "panel": _RUN | _ANALYSIS | {"mu", "a0", "a1b", "b1", "a1a_values"},
    "scan": _RUN | _ANALYSIS | _MODEL | {"grid", "replicates"},
    "report": {"csv", "seed", "out"} | _ANALYSIS,
}


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 0
    out: str = "out"
    length: int = 1_000_000
    burn_in: int | None = None
    rho_multiple: float = 5.0
    rho_abs: float | None = None
    max_wait: float | None = 250.0
    dm_method: str = "fitted"
    max_lag: int = 250
    fit_lag_min: int = 1
    fit_lag_max: int = 50
    kind: str = "correlation"
    model: str = "egarch"
    mu: float = 0.0
    a0: float = -0.70
    a1a: float = -0.15
    a1b: float = 0.20
    b1: float = 0.92
    sigma: float = 0.013
    alpha: float = 0.985
    c: float = 1.0
    s0: float = 1.0
    a1a_values: tuple = (0.0, -0.15, -0.30)
    grid: tuple | None = None
    replicates: int = 3
    ks: tuple = (6, 8, 10)
    family: str = "d4"
    levels: int = 10
    domain: str = "returns"
    csv: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if not self.rho_multiple > 0:
            raise ConfigError("rho_multiple must be > 0")
        if self.rho_abs is not None and self.rho_abs <= 0:
            raise ConfigError("rho_abs must be > 0 (it is applied with both signs)")
        if self.experiment == "scan" and self.length < SCAN_MIN_LENGTH:
            raise ConfigError(f"scan experiments need length >= {SCAN_MIN_LENGTH}")
        if self.model not in ("egarch", "retarded", "iid"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.dm_method not in ("fitted", "histogram"):
            raise ConfigError(f"unknown dm_method {self.dm_method!r}")
        if self.domain not in ("price", "returns"):
            raise ConfigError(f"unknown filtration domain {self.domain!r}")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")

    @property
    def fit_lags(self) -> range:
        return range(self.fit_lag_min, self.fit_lag_max + 1)

    def echo(self) -> dict:
        """Keys relevant to this experiment, for the manifest.

        The output directory is left out so that a rerun elsewhere yields an
        identical manifest.
        """
        data = dataclasses.asdict(self)
        keys = (ALLOWED[self.experiment] | {"experiment"}) - {"out"}
        return {k: data[k] for k in sorted(keys)}


def parse_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    return values


def read_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_text(text, str(path))


def build_config(experiment: str, file_values: dict | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Merge file values and command-line overrides (which win)."""
    merged = dict(file_values or {})
    declared = merged.pop("experiment", None)
    if declared is not None and declared != experiment:
        raise ConfigError(f"config is for experiment {declared!r}, not {experiment!r}")
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = set(merged) - ALLOWED.get(experiment, set())
    if experiment not in ALLOWED:
        raise ConfigError(f"unknown experiment {experiment!r}")
    if unknown:
        raise ConfigError(f"keys not used by {experiment!r}: {', '.join(sorted(unknown))}")
    return ExperimentConfig(experiment=experiment, **merged)
