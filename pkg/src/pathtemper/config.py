"""Run configuration: strict TOML schema, defaults and round-trip emission.

Unknown sections or keys are rejected so typos fail fast. Every default
lands in the effective configuration, which the CLI writes next to the
outputs; loading that file back reproduces the exact run.
"""
from __future__ import annotations

import json
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .models import beta_binomial_pair, gaussian_pair, gmm_pair, load_csv, load_dataset
from .paths import LinearPath, SplineKnots, SplinePath


class ConfigError(ValueError):
    pass


_MODEL_DEFAULTS = {
    "gaussian": {"mu0": -1.0, "mu1": 1.0, "sigma": 0.01, "d": 1},
    "beta_binomial": {"a0": 180.0, "b0": 840.0, "successes": 140000, "trials": 200000},
    "gmm": {
        "data": "galaxies",
        "components": 6,
        "prior_mean": 210.0,
        "component_sd": 1.0,
        "prior_sd": 1.0,
        "data_scale": 1.0,
    },
}

_PATH_DEFAULTS = {"kind": "spline", "segments": 4}          # plus optional "knots"
_TUNING_DEFAULTS = {
    "n": 50,
    "rounds": 150,
    "sweeps_per_round": 300,
    "learning_rate": 0.2,
    "seed": 1,
}
_SNR_DEFAULTS = {
    "grid": [i / 5.0 for i in range(11)],
    "samples": 50,
    "replicates": 1000,
    "seed": 1,
}
_OUTPUT_DEFAULTS = {"directory": "out", "formats": ["csv", "json"]}

_SECTIONS = ("model", "path", "tuning", "snr", "output")


def _merge_strict(section: str, defaults: dict, given: dict, extra_ok=()) -> dict:
    unknown = set(given) - set(defaults) - set(extra_ok)
    if unknown:
        raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")
    merged = dict(defaults)
    merged.update(given)
    return merged


def load_config(path) -> dict:
    """Parse and validate a TOML run configuration file."""
    path = Path(path)
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    return validate_config(raw)


def validate_config(raw: dict) -> dict:
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    model_raw = dict(raw.get("model", {}))
    model_id = model_raw.pop("id", "gaussian")
    if model_id not in _MODEL_DEFAULTS:
        raise ConfigError(
            f"unknown model id {model_id!r}; choose from {sorted(_MODEL_DEFAULTS)}"
        )
    model = _merge_strict(f"model:{model_id}", _MODEL_DEFAULTS[model_id], model_raw)
    model["id"] = model_id

    path_cfg = _merge_strict("path", _PATH_DEFAULTS, raw.get("path", {}),
                             extra_ok=("knots",))
    if path_cfg["kind"] not in ("linear", "spline"):
        raise ConfigError(f"unknown path kind {path_cfg['kind']!r}")
    if "knots" in path_cfg:
        try:
            SplineKnots.from_jsonable(path_cfg["knots"])
        except ValueError as exc:
            raise ConfigError(f"invalid [path] knots: {exc}") from exc

    tuning = _merge_strict("tuning", _TUNING_DEFAULTS, raw.get("tuning", {}),
                           extra_ok=("sweeps",))
    tuning.setdefault("sweeps", tuning["rounds"] * tuning["sweeps_per_round"])
    if min(tuning["n"], tuning["rounds"], tuning["sweeps_per_round"], tuning["sweeps"]) < 1:
        raise ConfigError("n, rounds, sweeps_per_round and sweeps must be positive")

    snr = _merge_strict("snr", _SNR_DEFAULTS, raw.get("snr", {}))
    if snr["replicates"] < 2:
        raise ConfigError("snr replicates must be at least 2 to estimate a spread")
    output = _merge_strict("output", _OUTPUT_DEFAULTS, raw.get("output", {}))
    bad = set(output["formats"]) - {"csv", "json"}
    if bad:
        raise ConfigError(f"unknown output formats: {sorted(bad)}")

    return {"model": model, "path": path_cfg, "tuning": tuning,
            "snr": snr, "output": output}


def build_model(cfg: dict, config_dir: Path | None = None):
    m = cfg["model"]
    if m["id"] == "gaussian":
        return gaussian_pair(m["mu0"], m["mu1"], m["sigma"], m["d"])
    if m["id"] == "beta_binomial":
        return beta_binomial_pair(m["a0"], m["b0"], m["successes"], m["trials"])
    name = m["data"]
    try:
        data = load_dataset(name)
    except KeyError:
        data_path = Path(name)
        if config_dir is not None and not data_path.is_absolute():
            data_path = config_dir / data_path
        data = load_csv(data_path)
    return gmm_pair(data * m["data_scale"], m["components"], m["prior_mean"],
                    m["component_sd"], m["prior_sd"])


def build_path(cfg: dict):
    p = cfg["path"]
    if p["kind"] == "linear":
        return LinearPath()
    if "knots" in p:
        return SplinePath(SplineKnots.from_jsonable(p["knots"]))
    return SplinePath(SplineKnots.on_line(p["segments"]))


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise ConfigError(f"cannot emit value of type {type(value).__name__}")


def emit_config(cfg: dict) -> str:
    """Serialize an effective configuration back to TOML text."""
    lines = []
    for section in _SECTIONS:
        lines.append(f"[{section}]")
        for key, value in cfg[section].items():
            lines.append(f"{key} = {_toml_value(value)}")
        lines.append("")
    return "\n".join(lines)
