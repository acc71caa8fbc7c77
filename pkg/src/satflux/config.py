"""TOML run configuration with strict key checking.

A config file has the tables ``[flux]``, ``[model]``, ``[grid]``, ``[time]``,
``[initial]`` and ``[output]``. Missing keys take the defaults in ``SCHEMA``;
unknown tables or keys raise :class:`~satflux.errors.ConfigError`. The same
structure, serialised as JSON, is embedded in run metadata and can be fed
back to ``simulate --config``.
"""
from __future__ import annotations

import copy
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, SatfluxError
from .flux import FluxModel, generic_copy, make_classical_flux
from .solver import (ModelParams, SchemeConfig, compatibilize_initial, steady_jump_profile)

FLUX_FAMILIES = ("classical", "classical_quadrature")
INITIAL_KINDS = ("constant", "ramp", "jump_wave", "file")
DEFAULT_OUT = "satflux_out"

# (type, default); "float?" allows null/absent, "float" accepts integers too
SCHEMA = {
    "flux": {"family": ("str", "classical"), "nu": ("float", 1.0), "c": ("float", 1.0)},
    "model": {"a": ("float", 1.0), "m": ("float", 0.0), "M": ("float", 1.0)},
    "grid": {"N": ("int", 400), "eps": ("float?", None), "kappa_bc": ("float", 1.5),
             "cfl": ("float", 0.9), "lambda_env": ("float", 0.3), "mean": ("str", "arithmetic"),
             "ell_floor_frac": ("float", 0.05), "max_steps": ("int", 50_000_000)},
    "time": {"t_end": ("float", 1.0), "snapshot_dt": ("float", 0.05)},
    "initial": {"kind": ("str", "constant"), "value": ("float", 1.0), "left": ("float", 1.0),
                "right": ("float", 1.0), "v_edge": ("float", 1.0), "path": ("str?", None),
                "compatibilize": ("bool", False), "delta0": ("float", 0.2),
                "sigma_minus": ("float", 0.0)},
    "output": {"directory": ("str?", None), "emit_svg": ("bool", False)},
}


def flux_from_dict(d: dict) -> FluxModel:
    family = d.get("family", "classical")
    if family not in FLUX_FAMILIES:
        raise ConfigError(f"flux.family: unknown family {family!r}; expected one of {FLUX_FAMILIES}")
    flux = make_classical_flux(d["nu"], d["c"])
    return flux if family == "classical" else generic_copy(flux)


def _coerce(section: str, key: str, value, kind: str):
    where = f"{section}.{key}"
    optional = kind.endswith("?")
    base = kind.rstrip("?")
    if value is None:
        if optional:
            return None
        raise ConfigError(f"{where}: value required")
    if base == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if base == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if base == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(f"{where}: must be finite")
        return value
    if not isinstance(value, str):
        raise ConfigError(f"{where}: expected a string, got {value!r}")
    return value


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; ``data`` maps table -> key -> value."""

    data: dict
    base_dir: Path = Path(".")

    def __getitem__(self, section: str) -> dict:
        return self.data[section]

    @classmethod
    def from_dict(cls, raw: dict, base_dir=".") -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a table")
        unknown = set(raw) - set(SCHEMA)
        if unknown:
            raise ConfigError(f"unknown table(s): {', '.join(sorted(unknown))}")
        data = {}
        for section, keys in SCHEMA.items():
            given = raw.get(section, {})
            if not isinstance(given, dict):
                raise ConfigError(f"[{section}] must be a table")
            bad = set(given) - set(keys)
            if bad:
                raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(bad))}")
            data[section] = {k: _coerce(section, k, given.get(k, default), kind)
                             for k, (kind, default) in keys.items()}
        cfg = cls(data=data, base_dir=Path(base_dir))
        cfg._revalidate()
        return cfg

    @classmethod
    def from_toml_text(cls, text: str, base_dir=".") -> "RunConfig":
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        return cls.from_dict(raw, base_dir)

    @classmethod
    def load(cls, path) -> "RunConfig":
        """Read a TOML file, or a run's ``metadata.json`` (its ``config`` entry)."""
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if path.suffix == ".json":
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"malformed JSON config {path}: {exc}") from exc
            if "config" in obj and "params" in obj:
                obj = obj["config"]
            return cls.from_dict(obj, path.parent)
        return cls.from_toml_text(text, path.parent)

    def to_dict(self) -> dict:
        d = copy.deepcopy(self.data)
        if d["initial"]["path"] is not None:
            d["initial"]["path"] = str(self.resolve(d["initial"]["path"]))
        return d

    def with_override(self, section: str, key: str, value) -> "RunConfig":
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError(f"unknown key {section}.{key}")
        raw = copy.deepcopy(self.data)
        raw[section][key] = value
        return RunConfig.from_dict(raw, self.base_dir)

    def find_key(self, name: str) -> tuple[str, str]:
        """Resolve ``section.key`` or a bare key that is unique across tables."""
        if "." in name:
            section, key = name.split(".", 1)
            if section in SCHEMA and key in SCHEMA[section]:
                return section, key
            raise ConfigError(f"unknown key {name}")
        hits = [(s, name) for s, keys in SCHEMA.items() if name in keys]
        if len(hits) != 1:
            raise ConfigError(f"key {name!r} is {'ambiguous' if hits else 'unknown'}; use table.key")
        return hits[0]

    def resolve(self, p: str) -> Path:
        q = Path(p)
        return q if q.is_absolute() else (self.base_dir / q)

    # -- builders ----------------------------------------------------------

    def flux(self) -> FluxModel:
        return flux_from_dict(self.data["flux"])

    def params(self) -> ModelParams:
        m = self.data["model"]
        return ModelParams(a=m["a"], m=m["m"], M=m["M"], flux=self.flux())

    def scheme(self) -> SchemeConfig:
        g, t = self.data["grid"], self.data["time"]
        return SchemeConfig(N=g["N"], eps=g["eps"], kappa_bc=g["kappa_bc"], lambda_env=g["lambda_env"],
                            cfl=g["cfl"], t_end=t["t_end"], snapshot_dt=t["snapshot_dt"],
                            mean=g["mean"], ell_floor_frac=g["ell_floor_frac"],
                            max_steps=g["max_steps"])

    def initial(self, params: ModelParams | None = None,
                scheme: SchemeConfig | None = None) -> np.ndarray:
        """Initial dual datum on the cell centres."""
        params = params or self.params()
        scheme = scheme or self.scheme()
        ini = self.data["initial"]
        kind, N, M = ini["kind"], scheme.N, params.M
        eta = (np.arange(N) + 0.5) * M / N
        if kind == "jump_wave":
            return np.array(steady_jump_profile(params, ini["v_edge"], N).v)
        if kind == "constant":
            def v0(x):
                return np.full(np.shape(x), ini["value"])
        elif kind == "ramp":
            def v0(x):
                return ini["left"] + (ini["right"] - ini["left"]) * np.asarray(x) / M
        else:
            ex, ev = self._read_initial_file()

            def v0(x):
                return np.interp(x, ex, ev)
        if ini["compatibilize"]:
            return np.array(compatibilize_initial(v0, params, scheme.eps_for(M), scheme.kappa_bc,
                                                  ini["delta0"], N).v)
        return np.asarray(v0(eta), dtype=float)

    def output_dir(self, override=None) -> Path:
        if override:
            return Path(override)
        if self.data["output"]["directory"]:
            return self.resolve(self.data["output"]["directory"])
        return Path(os.environ.get("SATFLUX_OUT") or DEFAULT_OUT)

    # -- validation --------------------------------------------------------

    def _read_initial_file(self):
        from .io import read_csv

        path = self.data["initial"]["path"]
        if not path:
            raise ConfigError("initial.path is required when initial.kind = 'file'")
        try:
            header, data = read_csv(self.resolve(path))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"initial.path: cannot read {path}: {exc}") from exc
        if header[:2] != ["eta", "v"] or data.shape[1] < 2:
            raise ConfigError("initial.path: expected columns eta,v")
        return data[:, 0], data[:, 1]

    def _revalidate(self) -> None:
        f, ini = self.data["flux"], self.data["initial"]
        if f["family"] not in FLUX_FAMILIES:
            raise ConfigError(f"flux.family: expected one of {FLUX_FAMILIES}, got {f['family']!r}")
        if ini["kind"] not in INITIAL_KINDS:
            raise ConfigError(f"initial.kind: expected one of {INITIAL_KINDS}, got {ini['kind']!r}")
        if ini["kind"] == "jump_wave" and ini["compatibilize"]:
            raise ConfigError("initial.compatibilize: not applicable to jump_wave (already steady)")
        try:
            params = self.params()
            self.scheme()
            if ini["kind"] == "jump_wave":
                steady_jump_profile(params, ini["v_edge"], 8)
            elif ini["kind"] == "file":
                self._read_initial_file()
            elif ini["kind"] == "constant" and not ini["value"] > 0:
                raise ConfigError("initial.value must be positive")
            elif ini["kind"] == "ramp" and not min(ini["left"], ini["right"]) > 0:
                raise ConfigError("initial.left and initial.right must be positive")
        except ConfigError:
            raise
        except SatfluxError as exc:
            raise ConfigError(str(exc)) from exc
