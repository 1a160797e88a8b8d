"""HTTP front end for the pipelines.

One endpoint per mode.  Request bodies mirror the config file sections;
sampled signals are passed inline as sample arrays instead of file paths.
"""
from __future__ import annotations

import tempfile
from typing import Any

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import pipelines
from .config import build_run_config
from .errors import ConfigError, InversionError, NumericsError, StageError

__all__ = ["app", "create_app", "RunRequest"]


class Samples(BaseModel):
    """Inline sampled signal: uniform times plus real or complex values."""

    model_config = ConfigDict(extra="forbid")
    t: list[float]
    re: list[float]
    im: list[float] | None = None


class ModelSection(BaseModel):
    model_config = ConfigDict(extra="forbid")
    rabi: float
    gamma_k: float = 1.0
    gamma_rad: float = 1.0
    delta_k: float = 0.0
    delta_p: float = 0.0
    omega_k_abs: float | None = None
    coupling: str = "constant"
    coupling_samples: Samples | None = None


class GridSection(BaseModel):
    model_config = ConfigDict(extra="forbid")
    horizon: float
    steps: int


class PumpSection(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: str
    amplitude: float | None = None
    center: float | None = None
    width: float | None = None
    samples: Samples | None = None


class TargetSection(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: str = "double_gaussian"
    amp1: float | None = None
    amp2: float | None = None
    center1: float | None = None
    center2: float | None = None
    width: float | None = None
    rel_phase: float | None = None
    eta_target: float | None = None
    samples: Samples | None = None


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")
    write_spectrum: bool = False


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    model: ModelSection
    grid: GridSection
    pump: PumpSection | None = None
    target: TargetSection | None = None
    output: OutputSection | None = None


def _dump_samples(samples: Samples, tmpdir: str, name: str) -> str:
    t = np.asarray(samples.t)
    cols = [t, np.asarray(samples.re)]
    if samples.im is not None:
        cols.append(np.asarray(samples.im))
    if any(len(c) != len(t) for c in cols):
        raise ConfigError(name, "sample columns must have equal length")
    path = f"{tmpdir}/{name}.csv"
    np.savetxt(path, np.column_stack(cols), fmt="%.16e")
    return path


def _sections_from_request(req: RunRequest, tmpdir: str) -> dict[str, dict]:
    sections: dict[str, dict] = {}
    model = req.model.model_dump(exclude_none=True)
    samples = model.pop("coupling_samples", None)
    if samples is not None:
        model["coupling_file"] = _dump_samples(req.model.coupling_samples, tmpdir, "coupling")
    sections["model"] = model
    sections["grid"] = req.grid.model_dump()
    if req.pump is not None:
        pump = req.pump.model_dump(exclude_none=True)
        if pump.pop("samples", None) is not None:
            pump["file"] = _dump_samples(req.pump.samples, tmpdir, "pump")
        sections["pump"] = pump
    if req.target is not None:
        target = req.target.model_dump(exclude_none=True)
        if target.pop("samples", None) is not None:
            target["file"] = _dump_samples(req.target.samples, tmpdir, "target")
        sections["target"] = target
    if req.output is not None:
        sections["output"] = req.output.model_dump()
    return sections


def _execute(mode: str, req: RunRequest) -> dict[str, Any]:
    with tempfile.TemporaryDirectory() as tmpdir:
        try:
            sections = _sections_from_request(req, tmpdir)
            config = build_run_config(
                mode, sections, base_dir=tmpdir, outdir_override=f"{tmpdir}/out"
            )
            summary, artifact_paths = pipelines.run(config)
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        except StageError as exc:
            raise HTTPException(
                status_code=500, detail=f"stage {exc.stage}: {exc.cause}"
            ) from None
        except (NumericsError, InversionError) as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from None
        artifacts = {}
        for path in artifact_paths.values():
            with open(path) as fh:
                artifacts[path.rsplit("/", 1)[-1]] = fh.read()
    return {"summary": summary, "artifacts": artifacts}


def create_app() -> FastAPI:
    app = FastAPI(title="photonshape", version="1.0.0")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/forward")
    def forward(req: RunRequest) -> dict:
        return _execute("forward", req)

    @app.post("/inverse")
    def inverse(req: RunRequest) -> dict:
        return _execute("inverse", req)

    @app.post("/roundtrip")
    def roundtrip(req: RunRequest) -> dict:
        return _execute("roundtrip", req)

    @app.post("/figures")
    def figures(req: RunRequest) -> dict:
        return _execute("figures", req)

    @app.post("/validate")
    def validate(req: RunRequest) -> dict:
        return _execute("validate", req)

    return app


app = create_app()
