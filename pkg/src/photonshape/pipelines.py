"""Pipeline drivers shared by the CLI and the HTTP service.

Each mode takes a validated RunConfig, runs the relevant computation and
writes CSV artifacts into the output directory.  run() returns a flat
summary dict plus a name -> path map of everything written.
"""
from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np

from . import dynamics, inverse
from .config import RunConfig
from .errors import ConfigError, InversionError
from .inverse import TargetShape
from .model import ComplexSignal

__all__ = ["run", "write_csv", "read_csv"]


def write_csv(path: str | Path, header: list[str], columns: list[np.ndarray]) -> None:
    """Write numeric columns as CSV with one '#' header line and %.16e values."""
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(path, data, fmt="%.16e", delimiter=",", header=",".join(header))


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Read a CSV written by write_csv: returns (header names, 2-D array)."""
    with open(path) as fh:
        first = fh.readline()
    header = first.lstrip("#").strip().split(",")
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    return header, data


def run(config: RunConfig) -> tuple[dict, dict]:
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if config.mode == "forward":
        return _run_forward(config, outdir)
    if config.mode == "inverse":
        return _run_inverse(config, outdir)
    if config.mode == "roundtrip":
        return _run_roundtrip(config, outdir)
    if config.mode == "figures":
        return _run_figures(config, outdir)
    return _run_validate(config)


def _write_spectrum(envelope: ComplexSignal, config, outdir: Path, artifacts: dict) -> None:
    spec = dynamics.spectrum(envelope, config.grid)
    path = outdir / "spectrum.csv"
    write_csv(path, ["omega", "spectral_density"], [spec.omega, np.abs(spec.values) ** 2])
    artifacts["spectrum"] = str(path)


def _run_forward(config: RunConfig, outdir: Path) -> tuple[dict, dict]:
    t = config.grid.times()
    pump = config.pump.realize(config.grid)
    result = dynamics.solve_local(config.params, pump, config.coupling, config.grid)
    artifacts = {}
    path = outdir / "amplitudes.csv"
    write_csv(
        path,
        ["t", "c1_abs", "c2_abs", "cavity_abs"],
        [t, np.abs(result.c1.values), np.abs(result.c2.values), np.abs(result.cavity.values)],
    )
    artifacts["amplitudes"] = str(path)
    path = outdir / "envelope.csv"
    write_csv(
        path,
        ["t", "envelope_re", "envelope_im"],
        [t, result.envelope.values.real, result.envelope.values.imag],
    )
    artifacts["envelope"] = str(path)
    summary = {
        "mode": "forward",
        "efficiency": float(result.efficiency_curve[-1]),
        "norm_residual": float(result.norm_residual),
        "max_envelope": float(np.abs(result.envelope.values).max()),
    }
    if config.write_spectrum:
        try:
            _write_spectrum(result.envelope, config, outdir, artifacts)
        except ValueError as exc:
            summary["spectrum_skipped"] = str(exc)
    return summary, artifacts


def _inverse_chain(config: RunConfig):
    report = inverse.roundtrip(config.target, config.params, config.coupling, config.grid)
    return report.target, report


def _write_pump(plan, grid, outdir: Path, artifacts: dict) -> None:
    t = grid.times()
    path = outdir / "pump.csv"
    write_csv(path, ["t", "rabi_amplitude", "rabi_phase"], [t, plan.amplitude, plan.phase])
    artifacts["pump"] = str(path)


def _run_inverse(config: RunConfig, outdir: Path) -> tuple[dict, dict]:
    target, report = _inverse_chain(config)
    artifacts = {}
    t = config.grid.times()
    _write_pump(report.plan, config.grid, outdir, artifacts)
    path = outdir / "target.csv"
    write_csv(
        path,
        ["t", "target_re", "target_im"],
        [t, target.values.real, target.values.imag],
    )
    artifacts["target"] = str(path)
    summary = {
        "mode": "inverse",
        "eta_target": float(config.target.eta_target),
        "max_rabi": float(report.max_amplitude),
        "pump_residual": float(report.pump_residual),
        "phase_flatness": float(report.plan.residual_phase_flatness),
    }
    return summary, artifacts


def _run_roundtrip(config: RunConfig, outdir: Path) -> tuple[dict, dict]:
    target, report = _inverse_chain(config)
    artifacts = {}
    t = config.grid.times()
    _write_pump(report.plan, config.grid, outdir, artifacts)
    path = outdir / "envelope.csv"
    write_csv(
        path,
        ["t", "target_abs2", "achieved_abs2"],
        [t, np.abs(target.values) ** 2, np.abs(report.envelope.values) ** 2],
    )
    artifacts["envelope"] = str(path)
    summary = {
        "mode": "roundtrip",
        "fidelity": float(report.fidelity),
        "eta_target": float(report.eta_target),
        "eta_achieved": float(report.eta_achieved),
        "max_rabi": float(report.max_amplitude),
        "pump_residual": float(report.pump_residual),
        "norm_residual": float(report.simulation.norm_residual),
    }
    if config.write_spectrum:
        _write_spectrum(report.envelope, config, outdir, artifacts)
    return summary, artifacts


def _run_figures(config: RunConfig, outdir: Path) -> tuple[dict, dict]:
    base = config.target if config.target is not None else TargetShape()
    if base.kind == "sampled":
        raise ConfigError("target.kind", "figures mode needs a parametric target")
    artifacts = {}
    summary = {"mode": "figures"}
    t = config.grid.times()
    for label, phase in (("a", 0.0), ("b", np.pi)):
        shape = replace(base, rel_phase=phase)
        report = inverse.roundtrip(shape, config.params, config.coupling, config.grid)
        target = report.target
        path = outdir / f"fig5{label}.csv"
        write_csv(
            path,
            ["t", "rabi_amplitude", "target_abs2", "achieved_abs2"],
            [t, report.plan.amplitude, np.abs(target.values) ** 2, np.abs(report.envelope.values) ** 2],
        )
        artifacts[f"fig5{label}"] = str(path)
        summary[f"fidelity_{label}"] = float(report.fidelity)
        summary[f"eta_{label}"] = float(report.eta_achieved)
        summary[f"max_rabi_{label}"] = float(report.max_amplitude)
        summary[f"bin_phase_{label}"] = float(report.bin_phase_diff)
    path = outdir / "summary.txt"
    with open(path, "w") as fh:
        for key in sorted(k for k in summary if k != "mode"):
            fh.write(f"{key}: {summary[key]:.12g}\n")
    artifacts["summary"] = str(path)
    return summary, artifacts


def _run_validate(config: RunConfig) -> tuple[dict, dict]:
    issues = list(config.diagnostics)
    if config.target is not None:
        try:
            target = inverse.make_target(config.target, config.grid, config.params)
            issues.extend(inverse.validate_target(target, config.grid, config.params))
        except (ValueError, ConfigError, InversionError) as exc:
            issues.append(str(exc))
    summary = {"mode": "validate", "ok": not issues, "issues": issues}
    return summary, {}
