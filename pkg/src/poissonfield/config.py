"""Experiment configuration: JSON in dB-friendly units, resolved to linear models.

All dB -> linear conversion for experiments happens in the ``resolve_*``
functions below.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import capacity, spectrum, stable

EXPERIMENTS = ("capacity-outage", "sop", "psd", "validate-stable", "validate-capacity")


class ConfigError(ValueError):
    pass


# Defaults follow the figure captions: capacity outage (R=1, lambda=0.01,
# b=2, r0=1, sigma_dB=10), spectral outage (square pulse, P=10 dBm,
# T=1 us, lambda=0.1, b=2, sigma_dB=10, m(f)=-60 dBm/Hz).
_DEFAULT_MODEL = {
    "capacity-outage": {
        "snr_db": 20.0, "inr_db": 20.0, "sigma_db": 10.0, "lambda": 0.01, "b": 2.0,
        "r0": 1.0, "rate": 1.0, "vx": None, "variant": "published",
    },
    "sop": {
        "power_dbm": 10.0, "T": 1e-6, "pulse": "square", "doppler": {"kind": "delta"},
        "lambda": 0.1, "b": 2.0, "sigma_db": 10.0,
        "mask": {"kind": "constant", "level_dbm": -60.0}, "f_hz": 0.0,
    },
    "psd": {
        "power_dbm": 10.0, "T": 1e-6, "pulse": "square", "doppler": {"kind": "delta"},
    },
    "validate-stable": {"lambda": 0.1, "b": 2.0, "sigma_db": 0.0, "r_max": None},
    "validate-capacity": {
        "snr_db": 20.0, "sigma_db": 10.0, "r0": 1.0, "b": 2.0, "rate": 1.0,
        "variant": "published", "eta_grid": [0.01, 0.1, 1.0, 10.0, 100.0],
    },
}

_DEFAULT_SWEEP = {
    "capacity-outage": {"axis": "snr_db", "start": 0.0, "stop": 40.0, "num": 41},
    "sop": {"axis": "f_hz", "start": -4e6, "stop": 4e6, "num": 1001},
    "psd": {"axis": "f_hz", "start": -4e6, "stop": 4e6, "num": 1001},
}

_DEFAULT_SERIES = {
    "capacity-outage": {"axis": "inr_db", "values": ["-inf", 10.0, 20.0, 30.0]},
}

SWEEP_AXES = {
    "capacity-outage": ("snr_db", "inr_db", "sigma_db", "lambda", "rate", "r0", "b"),
    "sop": ("f_hz", "power_dbm", "lambda", "sigma_db", "b"),
    "psd": ("f_hz",),
}


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    n_trials: int = 100_000
    workers: int = 1
    output: str = "out.csv"
    plot: bool = False
    model: dict = field(default_factory=dict)
    sweep: dict | None = None
    series: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_json_default)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        return parse(raw)

    def sweep_values(self) -> list:
        return _grid(self.sweep) if self.sweep else []

    def series_values(self) -> list:
        return list(self.series["values"]) if self.series else [None]


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {obj!r}")


def _grid(sweep: dict) -> list:
    if "values" in sweep:
        return list(sweep["values"])
    start, stop, num = sweep["start"], sweep["stop"], int(sweep["num"])
    return [float(v) for v in np.linspace(float(start), float(stop), num)]


def load(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def parse(raw: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Fill defaults, check types and physical domains, return the resolved config."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    raw = copy.deepcopy(raw)
    exp = raw.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {', '.join(EXPERIMENTS)}; got {exp!r}")
    unknown = set(raw) - {"experiment", "seed", "n_trials", "workers", "output", "plot",
                          "model", "sweep", "series"}
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if raw.get("seed") is None:
        raise ConfigError("seed is required")
    try:
        seed = int(raw["seed"])
        n_trials = int(raw.get("n_trials", 100_000))
        workers = int(raw.get("workers", 1))
    except (TypeError, ValueError):
        raise ConfigError("seed, n_trials and workers must be integers") from None
    if seed < 0 or seed >= 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if n_trials < 1 or workers < 1:
        raise ConfigError("n_trials and workers must be >= 1")

    model = dict(_DEFAULT_MODEL[exp])
    user_model = raw.get("model") or {}
    if not isinstance(user_model, dict):
        raise ConfigError("model must be an object")
    extra = set(user_model) - set(model)
    if extra:
        raise ConfigError(f"unknown model keys for {exp}: {', '.join(sorted(extra))}")
    model.update(user_model)
    if base_dir is not None:
        model = _absolutize_files(model, base_dir)

    sweep = raw.get("sweep", _DEFAULT_SWEEP.get(exp))
    series = raw.get("series", _DEFAULT_SERIES.get(exp))
    if exp.startswith("validate"):
        sweep = series = None
    cfg = ExperimentConfig(exp, seed, n_trials, workers, str(raw.get("output", "out.csv")),
                           bool(raw.get("plot", False)), model, sweep, series)
    _validate(cfg)
    return cfg


def _absolutize_files(model: dict, base: Path) -> dict:
    def fix(v):
        if isinstance(v, dict):
            v = {k: fix(x) for k, x in v.items()}
            if "file" in v and not Path(v["file"]).is_absolute():
                v["file"] = str((base / v["file"]).resolve())
        return v
    return {k: fix(v) for k, v in model.items()}


def _validate(cfg: ExperimentConfig):
    exp = cfg.experiment
    for name, spec in (("sweep", cfg.sweep), ("series", cfg.series)):
        if spec is None:
            continue
        if not isinstance(spec, dict) or "axis" not in spec:
            raise ConfigError(f"{name} must be an object with an 'axis'")
        if name == "sweep":
            if spec["axis"] not in SWEEP_AXES[exp]:
                raise ConfigError(f"sweep axis for {exp} must be one of {SWEEP_AXES[exp]}")
            if "values" not in spec and not {"start", "stop", "num"} <= set(spec):
                raise ConfigError("sweep needs 'values' or 'start'/'stop'/'num'")
            try:
                vals = _grid(spec)
            except (TypeError, ValueError):
                raise ConfigError("sweep grid is not numeric") from None
            if not vals:
                raise ConfigError("sweep grid is empty")
            if spec["axis"] == "f_hz" and np.any(np.diff(np.asarray(vals, dtype=float)) <= 0):
                raise ConfigError("frequency grid must be strictly increasing")
        else:
            if spec["axis"] not in cfg.model:
                raise ConfigError(f"series axis {spec['axis']!r} is not a model parameter")
            if not isinstance(spec.get("values"), list) or not spec["values"]:
                raise ConfigError("series needs a non-empty 'values' list")
    # Build every model point once so domain errors surface before any work.
    try:
        for point in iter_points(cfg):
            if exp == "capacity-outage":
                resolve_link(point)
            elif exp in ("sop", "psd"):
                resolve_emission(point) if exp == "sop" else resolve_pulse(point)
                if exp == "sop":
                    resolve_mask(point["mask"])
            elif exp == "validate-stable":
                resolve_field(point)
            elif exp == "validate-capacity":
                resolve_link({**point, "inr_db": "-inf", "lambda": 0.01})
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError, OSError) as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from None


def iter_points(cfg: ExperimentConfig):
    """Model dicts for every (series, sweep) point, sweep innermost."""
    sweep_vals = cfg.sweep_values() if cfg.sweep and cfg.sweep["axis"] != "f_hz" else [None]
    for s in cfg.series_values():
        for v in sweep_vals:
            point = dict(cfg.model)
            if s is not None:
                point[cfg.series["axis"]] = s
            if v is not None:
                point[cfg.sweep["axis"]] = v
            yield point


# --------------------------------------------------------------------------
# Unit conversion (the only place dB values become linear)


def _num(x) -> float:
    return float(x)  # accepts "-inf" / "inf" strings as well


def resolve_link(m: dict) -> capacity.ProbeLink:
    inr_db = _num(m["inr_db"])
    return capacity.ProbeLink(
        snr=capacity.db_to_linear(_num(m["snr_db"])),
        inr=None if inr_db == -math.inf else capacity.db_to_linear(inr_db),
        r0=_num(m["r0"]), b=_num(m["b"]), sigma=stable.sigma_from_db(_num(m["sigma_db"])),
        rate=_num(m["rate"]), lam=_num(m["lambda"]),
        vx=None if m.get("vx") is None else _num(m["vx"]),
    )


def resolve_pulse(m: dict) -> spectrum.PulseShape:
    p = m["pulse"]
    if isinstance(p, str):
        return spectrum.PulseShape(p, _num(m["T"]))
    if p.get("kind") == "tabulated":
        table = spectrum.load_table(p["file"]) if "file" in p else p["table"]
        return spectrum.PulseShape("tabulated", _num(m["T"]), table)
    return spectrum.PulseShape(p["kind"], _num(p.get("T", m["T"])))


def resolve_doppler(d: dict) -> spectrum.DopplerSpectrum:
    kind = d.get("kind", "delta")
    if kind == "delta":
        return spectrum.DopplerSpectrum()
    if kind == "shifted_delta":
        return spectrum.DopplerSpectrum("shifted_delta", f0=_num(d["f0"]))
    if kind == "rectangular":
        return spectrum.DopplerSpectrum.rectangular(_num(d["width"]))
    if kind == "jakes":
        return spectrum.DopplerSpectrum.jakes(_num(d["f_d"]))
    if kind == "tabulated":
        table = spectrum.load_table(d["file"]) if "file" in d else d["table"]
        return spectrum.DopplerSpectrum("tabulated", table=table)
    raise ConfigError(f"unknown doppler kind {kind!r}")


def resolve_mask(d: dict) -> spectrum.SpectralMask:
    name = d.get("name", "")
    if "file" in d:
        return spectrum.SpectralMask.from_file(d["file"], name=name)
    kind = d.get("kind")
    if kind == "constant":
        return spectrum.SpectralMask.constant(_num(d["level_dbm"]), name=name)
    if kind == "piecewise_linear":
        return spectrum.SpectralMask("piecewise_linear", tuple(d["levels_dbm"]), tuple(d["freqs"]), name=name)
    if kind == "gaussian":
        return spectrum.SpectralMask("gaussian", (_num(d["center_dbm"]), _num(d["edge_dbm"])),
                                     width=_num(d["width"]), name=name)
    raise ConfigError(f"unknown mask kind {kind!r}")


def resolve_emission(m: dict) -> spectrum.EmissionModel:
    return spectrum.EmissionModel(
        power=float(spectrum.dbm_to_watt(_num(m["power_dbm"]))),
        pulse=resolve_pulse(m),
        lam=_num(m["lambda"]), b=_num(m["b"]), sigma=stable.sigma_from_db(_num(m["sigma_db"])),
        doppler=resolve_doppler(m.get("doppler") or {"kind": "delta"}),
    )


def resolve_field(m: dict):
    from .field import FieldModel
    r_max = m.get("r_max")
    return FieldModel(_num(m["lambda"]), _num(m["b"]), stable.sigma_from_db(_num(m["sigma_db"])),
                      None if r_max is None else _num(r_max))
