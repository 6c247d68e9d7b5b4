"""Experiment configuration: JSON schema checks, defaults and figure presets.

A config is a JSON object with the sections below; every omitted key takes
its default, and the materialized result is what gets echoed and hashed.

    {
      "geometry": {"family": "tetra_to_square", "value": 1.0, "d_um": 8.0}
                  | {"atoms": [{"label": 1, "xyz_um": [x, y, z]}, ...]},
      "drive":    {"omega_MHz": 1.0, "r_b_um": 10.0 | "c6": ..., "detuning_MHz": 0.0},
      "model":    "full" | "truncated" | "pxp" | "ising",
      "noise":    null | {"gamma_phi": 0.1, "eps_prep": ..., "n_shots": 150},
      "grid":     {"t_max_us": 5.0, "dt_us": 0.1},
      "analysis": {"window": "hann", "zero_pad_factor": 8, "min_prominence": 0.05, "tol_frac": 0.1},
      "output":   {"directory": "out", "formats": ["csv", "json"]},
      "seed":     0
    }
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass

from .analysis import MODELS, AnalysisOptions
from .dynamics import NoiseParams, TimeGrid
from .errors import ConfigError, RydspecError
from .geometry import FAMILIES, AtomArrangement, TransformationParam
from .hamiltonian import DriveParams

WINDOWS = ("rect", "hann")
FORMATS = ("csv", "json", "svg")

DEFAULTS = {
    "geometry": None,
    "drive": {"omega_MHz": 1.0, "r_b_um": 10.0, "c6": None, "detuning_MHz": 0.0},
    "model": "pxp",
    "noise": None,
    "grid": {"t_max_us": 5.0, "dt_us": 0.1},
    "analysis": {"window": "hann", "zero_pad_factor": 8, "min_prominence": 0.05, "tol_frac": 0.10},
    "output": {"directory": "out", "formats": ["csv", "json"]},
    "seed": 0,
}
NOISE_DEFAULTS = {
    "gamma_phi": 0.1,
    "eps_prep": 0.01,
    "eps_det_0to1": 0.02,
    "eps_det_1to0": 0.05,
    "n_shots": 150,
}
GEOMETRY_DEFAULTS = {"d_um": 8.0}

_HEX_DRIVE = {"omega_MHz": 0.8, "r_b_um": 11.0}

PRESETS = {
    "triangle-60": {"geometry": {"family": "three_atom_bend", "value": 60.0}, "model": "pxp"},
    "triangle-90": {"geometry": {"family": "three_atom_bend", "value": 90.0}, "model": "full"},
    "triangle-180": {"geometry": {"family": "three_atom_bend", "value": 180.0}, "model": "truncated"},
    "s4": {"geometry": {"family": "star_to_tetrahedron", "value": 0.0}, "model": "pxp"},
    "k4": {"geometry": {"family": "star_to_tetrahedron", "value": 1.0}, "model": "pxp"},
    "c4": {"geometry": {"family": "tetra_to_square", "value": 1.0}, "model": "pxp"},
    "k4e": {"geometry": {"family": "square_to_diamond", "value": 1.0}, "model": "pxp"},
    "hexagon-0": {"geometry": {"family": "hexagon_to_antiprism", "value": 0.0},
                  "drive": _HEX_DRIVE, "model": "full"},
    "hexagon-0.75d": {"geometry": {"family": "hexagon_to_antiprism", "value": 0.75},
                      "drive": _HEX_DRIVE, "model": "full"},
    "hexagon-1.5d": {"geometry": {"family": "hexagon_to_antiprism", "value": 1.5},
                     "drive": _HEX_DRIVE, "model": "pxp"},
}

FAMILY_ALIASES = {
    "bend": "three_atom_bend",
    "star-to-tetra": "star_to_tetrahedron",
    "tetra-to-square": "tetra_to_square",
    "square-to-diamond": "square_to_diamond",
    "hexagon-antiprism": "hexagon_to_antiprism",
}

# preset used for the drive and model when a sweep names only a family
SWEEP_BASE = {
    "three_atom_bend": "triangle-60",
    "star_to_tetrahedron": "s4",
    "tetra_to_square": "c4",
    "square_to_diamond": "k4e",
    "hexagon_to_antiprism": "hexagon-0",
}


def resolve_family(name: str) -> str:
    fam = FAMILY_ALIASES.get(name, name.replace("-", "_"))
    if fam not in FAMILIES:
        raise ConfigError(f"unknown family {name!r}; expected one of {sorted(FAMILY_ALIASES)}")
    return fam


def _reject_unknown(section: dict, allowed, where: str):
    extra = sorted(set(section) - set(allowed))
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(map(repr, extra))}; "
                          f"allowed: {', '.join(sorted(allowed))}")


def _object(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object, got {type(value).__name__}")
    return value


def _number(value, where: str, *, positive=False, nonneg=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where}: expected a finite number, got {value!r}")
    if positive and value <= 0:
        raise ConfigError(f"{where}: must be > 0, got {value!r}")
    if nonneg and value < 0:
        raise ConfigError(f"{where}: must be >= 0, got {value!r}")
    return float(value)


def _integer(value, where: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{where}: expected an integer >= {minimum}, got {value!r}")
    return value


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, fully materialized experiment description."""

    data: dict

    @classmethod
    def from_dict(cls, raw) -> "ExperimentConfig":
        raw = _object(raw, "config")
        _reject_unknown(raw, DEFAULTS, "config")
        if raw.get("geometry") is None:
            raise ConfigError("geometry: required (family + value, or atoms)")
        data = _merge({k: v for k, v in DEFAULTS.items() if k != "geometry"},
                      {k: v for k, v in raw.items() if k != "geometry"})
        data["geometry"] = _check_geometry(raw["geometry"])
        data["drive"] = _check_drive(_object(data["drive"], "drive"))
        if data["model"] not in MODELS:
            raise ConfigError(f"model: expected one of {MODELS}, got {data['model']!r}")
        if data["noise"] is not None:
            noise = _object(data["noise"], "noise")
            _reject_unknown(noise, NOISE_DEFAULTS, "noise")
            data["noise"] = _merge(NOISE_DEFAULTS, noise)
        data["grid"] = _check_section(data["grid"], "grid")
        data["analysis"] = _check_section(data["analysis"], "analysis")
        data["output"] = _check_section(data["output"], "output")
        data["seed"] = _integer(data["seed"], "seed", 0)
        cfg = cls(data)
        cfg.build()  # surfaces domain errors (e.g. eps > 1) as config errors
        return cfg

    @classmethod
    def from_json(cls, text: str, source: str = "<config>") -> "ExperimentConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(raw)

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "ExperimentConfig":
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
        return cls.from_dict(_merge(PRESETS[name], overrides))

    def replace(self, **overrides) -> "ExperimentConfig":
        return type(self).from_dict(_merge(self.data, overrides))

    # -- derived objects --------------------------------------------------

    def build(self):
        """Return ``(arrangement, drive, grid, noise, options)``."""
        try:
            return (self.arrangement(), self.drive(), self.grid(), self.noise(), self.options())
        except ConfigError:
            raise
        except RydspecError as exc:
            raise ConfigError(str(exc)) from exc

    def arrangement(self) -> AtomArrangement:
        g = self.data["geometry"]
        if "atoms" in g:
            return AtomArrangement.from_json_dict({"atoms": g["atoms"]}, name="config")
        return TransformationParam(g["family"], g["value"], g["d_um"]).arrangement()

    def drive(self) -> DriveParams:
        d = self.data["drive"]
        return DriveParams.from_mhz(d["omega_MHz"], r_b=d["r_b_um"], c6=d["c6"],
                                    detuning_mhz=d["detuning_MHz"])

    def grid(self) -> TimeGrid:
        g = self.data["grid"]
        return TimeGrid(t_max=g["t_max_us"], dt=g["dt_us"])

    def noise(self) -> NoiseParams | None:
        n = self.data["noise"]
        if n is None:
            return None
        return NoiseParams(rng_seed=self.data["seed"], **n)

    def options(self) -> AnalysisOptions:
        a = self.data["analysis"]
        return AnalysisOptions(window=a["window"], noisy_window=a["window"],
                               zero_pad_factor=a["zero_pad_factor"],
                               min_prominence_frac=a["min_prominence"], tol_frac=a["tol_frac"])

    @property
    def model(self) -> str:
        return self.data["model"]

    @property
    def seed(self) -> int:
        return self.data["seed"]

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2) + "\n"

    def sha256(self) -> str:
        """Hash of everything except the output section, which does not affect results."""
        body = {k: v for k, v in self.data.items() if k != "output"}
        canon = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def _check_geometry(g) -> dict:
    g = _object(g, "geometry")
    if "atoms" in g:
        _reject_unknown(g, {"atoms"}, "geometry")
        atoms = g["atoms"]
        if not isinstance(atoms, list) or not atoms:
            raise ConfigError("geometry.atoms: expected a non-empty list")
        for i, a in enumerate(atoms):
            a = _object(a, f"geometry.atoms[{i}]")
            _reject_unknown(a, {"label", "xyz_um"}, f"geometry.atoms[{i}]")
            xyz = a.get("xyz_um")
            if not isinstance(xyz, list) or len(xyz) != 3:
                raise ConfigError(f"geometry.atoms[{i}].xyz_um: expected 3 numbers")
            for k, c in enumerate(xyz):
                _number(c, f"geometry.atoms[{i}].xyz_um[{k}]")
        return {"atoms": copy.deepcopy(atoms)}
    _reject_unknown(g, {"family", "value", "d_um"}, "geometry")
    if "family" not in g or "value" not in g:
        raise ConfigError("geometry: need 'family' and 'value', or 'atoms'")
    out = _merge(GEOMETRY_DEFAULTS, g)
    if not isinstance(out["family"], str):
        raise ConfigError("geometry.family: expected a string")
    out["family"] = resolve_family(out["family"])
    out["value"] = _number(out["value"], "geometry.value")
    out["d_um"] = _number(out["d_um"], "geometry.d_um", positive=True)
    try:
        TransformationParam(out["family"], out["value"], out["d_um"])
    except RydspecError as exc:
        raise ConfigError(f"geometry.value: {exc}") from None
    return out


def _check_drive(d: dict) -> dict:
    _reject_unknown(d, DEFAULTS["drive"], "drive")
    d["omega_MHz"] = _number(d["omega_MHz"], "drive.omega_MHz", positive=True)
    d["detuning_MHz"] = _number(d["detuning_MHz"], "drive.detuning_MHz")
    if d["c6"] is not None:
        d["c6"] = _number(d["c6"], "drive.c6", positive=True)
        d["r_b_um"] = None
    else:
        if d["r_b_um"] is None:
            raise ConfigError("drive: give either r_b_um or c6")
        d["r_b_um"] = _number(d["r_b_um"], "drive.r_b_um", positive=True)
    return d


def _check_section(sec, name: str) -> dict:
    sec = _object(sec, name)
    _reject_unknown(sec, DEFAULTS[name], name)
    if name == "grid":
        sec["t_max_us"] = _number(sec["t_max_us"], "grid.t_max_us", positive=True)
        sec["dt_us"] = _number(sec["dt_us"], "grid.dt_us", positive=True)
        if sec["t_max_us"] / sec["dt_us"] < 7:
            raise ConfigError("grid: need at least 8 samples (t_max_us / dt_us >= 7)")
    elif name == "analysis":
        if sec["window"] not in WINDOWS:
            raise ConfigError(f"analysis.window: expected one of {WINDOWS}, got {sec['window']!r}")
        sec["zero_pad_factor"] = _integer(sec["zero_pad_factor"], "analysis.zero_pad_factor", 1)
        sec["min_prominence"] = _number(sec["min_prominence"], "analysis.min_prominence", nonneg=True)
        sec["tol_frac"] = _number(sec["tol_frac"], "analysis.tol_frac", positive=True)
    else:
        if not isinstance(sec["directory"], str) or not sec["directory"]:
            raise ConfigError("output.directory: expected a non-empty string")
        fmts = sec["formats"]
        if not isinstance(fmts, list) or any(f not in FORMATS for f in fmts):
            raise ConfigError(f"output.formats: expected a list drawn from {FORMATS}, got {fmts!r}")
    return sec
