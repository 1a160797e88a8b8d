"""Run configuration: INI-style documents, strict validation, file ingestion.

The same section/key schema backs both the config files consumed by the CLI
and the JSON bodies accepted by the service, so validation lives here in one
place.  Unknown sections or keys are hard errors.
"""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .inverse import TargetShape
from .model import ComplexSignal, CouplingProfile, ModelParams, TimeGrid, validate_params

__all__ = [
    "RunConfig",
    "PumpSpec",
    "parse_config",
    "build_run_config",
    "load_samples",
]

MODES = ("forward", "inverse", "roundtrip", "figures", "validate")

_MODEL_KEYS = {
    "rabi": float,
    "gamma_k": float,
    "gamma_rad": float,
    "delta_k": float,
    "delta_p": float,
    "omega_k_abs": float,
    "coupling": str,
    "coupling_file": str,
}
_GRID_KEYS = {"horizon": float, "steps": int}
_PUMP_KEYS = {"kind": str, "amplitude": float, "center": float, "width": float, "file": str}
_TARGET_KEYS = {
    "kind": str,
    "amp1": float,
    "amp2": float,
    "center1": float,
    "center2": float,
    "width": float,
    "rel_phase": float,
    "eta_target": float,
    "file": str,
}
_OUTPUT_KEYS = {"dir": str, "write_spectrum": bool}

_SECTIONS = {
    "model": _MODEL_KEYS,
    "grid": _GRID_KEYS,
    "pump": _PUMP_KEYS,
    "target": _TARGET_KEYS,
    "output": _OUTPUT_KEYS,
}


@dataclass(frozen=True)
class PumpSpec:
    """Pump shape for forward runs: constant, gaussian, or sampled from file."""

    kind: str
    amplitude: float = 0.0
    center: float = 0.0
    width: float = 1.0
    samples: ComplexSignal | None = None

    def realize(self, grid: TimeGrid) -> ComplexSignal:
        t = grid.times()
        if self.kind == "constant":
            return ComplexSignal.constant(grid, self.amplitude)
        if self.kind == "gaussian":
            vals = self.amplitude * np.exp(-((t - self.center) ** 2) / (2.0 * self.width**2))
            return ComplexSignal(grid, vals)
        src = self.samples
        tt = src.grid.times()
        vals = np.interp(t, tt, src.values.real) + 1j * np.interp(t, tt, src.values.imag)
        return ComplexSignal(grid, vals)


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs for one pipeline invocation."""

    mode: str
    params: ModelParams
    grid: TimeGrid
    coupling: CouplingProfile
    pump: PumpSpec | None = None
    target: TargetShape | None = None
    outdir: str = "out"
    write_spectrum: bool = False
    diagnostics: list[str] = field(default_factory=list)


def load_samples(path: str | Path) -> ComplexSignal:
    """Read a sampled signal from numeric text: columns t, Re [, Im].

    Lines starting with '#' are comments.  The samples are re-gridded by the
    consumer; here they are wrapped on their own uniform grid.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(str(path), "file not found")
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] not in (2, 3):
        raise ConfigError(str(path), f"expected 2 or 3 columns, got {data.shape[1]}")
    t = data[:, 0]
    if len(t) < 3 or t[0] != 0.0:
        raise ConfigError(str(path), "need at least 3 samples starting at t = 0")
    vals = data[:, 1].astype(complex)
    if data.shape[1] == 3:
        vals = vals + 1j * data[:, 2]
    grid = TimeGrid(horizon=float(t[-1]), steps=len(t) - 1)
    if np.abs(t - grid.times()).max() > 1e-9 * grid.horizon:
        raise ConfigError(str(path), "samples must sit on a uniform time grid")
    return ComplexSignal(grid, vals)


def _coerce(section: str, key: str, raw, want):
    if want is bool:
        if isinstance(raw, bool):
            return raw
        if str(raw).lower() in ("true", "1", "yes"):
            return True
        if str(raw).lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"{section}.{key}", f"expected a boolean, got {raw!r}")
    try:
        return want(raw)
    except (TypeError, ValueError):
        raise ConfigError(
            f"{section}.{key}", f"expected {want.__name__}, got {raw!r}"
        ) from None


def _validated_section(name: str, data: dict) -> dict:
    schema = _SECTIONS[name]
    out = {}
    for key, raw in data.items():
        if key not in schema:
            raise ConfigError(f"{name}.{key}", "unknown key")
        out[key] = _coerce(name, key, raw, schema[key])
    return out


def build_run_config(
    mode: str,
    sections: dict[str, dict],
    base_dir: str | Path = ".",
    steps_override: int | None = None,
    outdir_override: str | None = None,
) -> RunConfig:
    """Construct and fully validate a RunConfig from raw section dictionaries."""
    if mode not in MODES:
        raise ConfigError("mode", f"unknown mode {mode!r}")
    base_dir = Path(base_dir)
    for name in sections:
        if name not in _SECTIONS:
            raise ConfigError(name, "unknown section")

    model_raw = _validated_section("model", sections.get("model", {}))
    grid_raw = _validated_section("grid", sections.get("grid", {}))
    out_raw = _validated_section("output", sections.get("output", {}))

    for key in ("rabi",):
        if key not in model_raw:
            raise ConfigError(f"model.{key}", "missing required key")
    for key in ("horizon", "steps"):
        if key not in grid_raw:
            raise ConfigError(f"grid.{key}", "missing required key")

    coupling_kind = model_raw.pop("coupling", "constant")
    coupling_file = model_raw.pop("coupling_file", None)
    params = ModelParams(**model_raw)
    diagnostics = validate_params(params)
    if diagnostics:
        raise ConfigError("model", "; ".join(diagnostics))

    steps = steps_override if steps_override is not None else grid_raw["steps"]
    try:
        grid = TimeGrid(horizon=grid_raw["horizon"], steps=steps)
    except ValueError as exc:
        raise ConfigError("grid", str(exc)) from None

    if coupling_kind == "constant":
        coupling = CouplingProfile.constant(grid)
    elif coupling_kind == "sampled":
        if coupling_file is None:
            raise ConfigError("model.coupling_file", "missing required key")
        sig = load_samples(base_dir / coupling_file)
        t = grid.times()
        vals = np.interp(t, sig.grid.times(), sig.values.real)
        coupling = CouplingProfile(grid, vals)
    else:
        raise ConfigError("model.coupling", f"must be 'constant' or 'sampled', got {coupling_kind!r}")

    needs_pump = mode == "forward"
    needs_target = mode in ("inverse", "roundtrip")
    if "pump" in sections and not needs_pump:
        raise ConfigError("pump", f"section not allowed in {mode} mode")
    if "target" in sections and mode == "forward":
        raise ConfigError("target", "section not allowed in forward mode")

    pump = None
    if needs_pump:
        if "pump" not in sections:
            raise ConfigError("pump", "missing required section")
        pump = _build_pump(_validated_section("pump", sections["pump"]), base_dir)

    target = None
    if "target" in sections:
        target = _build_target(_validated_section("target", sections["target"]), base_dir)
    elif needs_target:
        raise ConfigError("target", "missing required section")

    return RunConfig(
        mode=mode,
        params=params,
        grid=grid,
        coupling=coupling,
        pump=pump,
        target=target,
        outdir=outdir_override or out_raw.get("dir", "out"),
        write_spectrum=out_raw.get("write_spectrum", False),
    )


def _build_pump(raw: dict, base_dir: Path) -> PumpSpec:
    kind = raw.get("kind")
    if kind not in ("constant", "gaussian", "sampled"):
        raise ConfigError("pump.kind", f"must be constant, gaussian or sampled, got {kind!r}")
    if kind == "sampled":
        if "file" not in raw:
            raise ConfigError("pump.file", "missing required key")
        return PumpSpec(kind=kind, samples=load_samples(base_dir / raw["file"]))
    if "amplitude" not in raw:
        raise ConfigError("pump.amplitude", "missing required key")
    if kind == "gaussian":
        for key in ("center", "width"):
            if key not in raw:
                raise ConfigError(f"pump.{key}", "missing required key")
    return PumpSpec(
        kind=kind,
        amplitude=raw["amplitude"],
        center=raw.get("center", 0.0),
        width=raw.get("width", 1.0),
    )


def _build_target(raw: dict, base_dir: Path) -> TargetShape:
    kind = raw.get("kind", "double_gaussian")
    try:
        if kind == "sampled":
            if "file" not in raw:
                raise ConfigError("target.file", "missing required key")
            return TargetShape(
                kind="sampled",
                values=load_samples(base_dir / raw["file"]),
                eta_target=raw.get("eta_target", 0.895),
            )
        kwargs = {k: raw[k] for k in raw if k not in ("kind", "file")}
        return TargetShape(kind=kind, **kwargs)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("target", str(exc)) from None


def parse_config(text: str, mode: str, base_dir: str | Path = ".", **overrides) -> RunConfig:
    """Parse an INI-style config document into a validated RunConfig."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigError("document", f"malformed config: {exc}") from None
    sections = {name: dict(parser[name]) for name in parser.sections()}
    return build_run_config(mode, sections, base_dir=base_dir, **overrides)
