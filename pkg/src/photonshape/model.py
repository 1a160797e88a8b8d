"""Physical parameter types, time grids, sampled signals and the memory kernel.

All rates are dimensionless multiples of the total cavity linewidth and all
times are multiples of its inverse; natural units (hbar = eps0 = c = 1) are
used throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "GeometryParams",
    "TimeGrid",
    "ComplexSignal",
    "CouplingProfile",
    "vacuum_rabi",
    "kernel_eval",
    "validate_params",
]


@dataclass(frozen=True)
class ModelParams:
    """Rates and detunings of the emitter-cavity-pump system.

    ``gamma_k`` is the unit of all rates (canonically 1).  ``omega_k_abs`` is
    the absolute mode frequency; when absent the narrowband limit is used for
    the kernel's cavity term.
    """

    rabi: float
    gamma_k: float = 1.0
    gamma_rad: float = 1.0
    delta_k: float = 0.0
    delta_p: float = 0.0
    omega_k_abs: float | None = None

    def kappa(self) -> complex:
        """Effective cavity-coupling strength in the kernel.

        Narrowband limit by default; the exact complex correction factor
        (1 - i*Gamma_k/(2*omega_k)) is applied when omega_k_abs is given.
        """
        k = self.rabi**2
        if self.omega_k_abs is not None:
            k = k * (1.0 - 0.5j * self.gamma_k / self.omega_k_abs)
        return complex(k)


@dataclass(frozen=True)
class GeometryParams:
    """Cavity geometry entering the emitter-cavity coupling constant."""

    dipole_sq: float
    area: float
    length: float
    z_emitter: float
    omega_k: float


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid on [0, horizon] with ``steps`` intervals."""

    horizon: float
    steps: int

    def __post_init__(self):
        if not (self.horizon > 0):
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.steps < 2:
            raise ValueError(f"steps must be >= 2, got {self.steps}")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.steps + 1)


@dataclass(frozen=True)
class ComplexSignal:
    """A complex-valued function sampled on a uniform time grid."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.steps + 1,):
            raise ValueError(
                f"signal length {vals.shape} does not match grid ({self.grid.steps + 1},)"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("signal contains non-finite entries")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, grid: TimeGrid, value: complex) -> "ComplexSignal":
        return cls(grid, np.full(grid.steps + 1, value, dtype=complex))

    @classmethod
    def from_callable(cls, grid: TimeGrid, fn) -> "ComplexSignal":
        return cls(grid, np.asarray(fn(grid.times()), dtype=complex))

    def sample(self, t: float) -> complex:
        """Linear interpolation at an off-grid time."""
        tt = self.grid.times()
        return complex(
            np.interp(t, tt, self.values.real) + 1j * np.interp(t, tt, self.values.imag)
        )


@dataclass(frozen=True)
class CouplingProfile:
    """Real, nonnegative emitter-cavity interaction shape, peak-normalized to 1."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.steps + 1,):
            raise ValueError("coupling length does not match grid")
        if np.any(vals < 0):
            raise ValueError("coupling must be nonnegative")
        if abs(vals.max() - 1.0) > 1e-12:
            raise ValueError(f"coupling must be peak-normalized to 1, max is {vals.max()}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, grid: TimeGrid) -> "CouplingProfile":
        return cls(grid, np.ones(grid.steps + 1))

    def sample(self, t: float) -> float:
        return float(np.interp(t, self.grid.times(), self.values))


def vacuum_rabi(geom: GeometryParams) -> float:
    """Vacuum Rabi frequency of the emitter-cavity interaction.

    Computed from the geometric coupling constant
    alpha = 4 |d|^2 / (A l) * sin^2(omega_k z_A) in natural units.
    """
    for name in ("dipole_sq", "area", "length", "omega_k"):
        if getattr(geom, name) <= 0:
            raise ValueError(f"{name} must be positive")
    if not (-geom.length < geom.z_emitter < 0):
        raise ValueError(
            f"z_emitter must lie inside the cavity (-length, 0), got {geom.z_emitter}"
        )
    alpha = (
        4.0 * geom.dipole_sq / (geom.area * geom.length)
        * math.sin(geom.omega_k * geom.z_emitter) ** 2
    )
    return math.sqrt(alpha * geom.omega_k)


def kernel_eval(
    params: ModelParams,
    pump: ComplexSignal,
    coupling: CouplingProfile,
    t: float,
    t_prime: float,
) -> complex:
    """Memory kernel K(t, t') of the reduced excited-amplitude equation.

    Sum of a pump-induced term and an exponentially decaying cavity term.  The
    pump samples hold the Rabi amplitude Omega_p(t) (real for the forward
    problem; a complex value encodes extra phase modulation and is conjugated
    at the earlier time).
    """
    if t_prime > t:
        raise ValueError(f"kernel requires t' <= t, got t'={t_prime} > t={t}")
    om_t = pump.sample(t)
    om_tp = pump.sample(t_prime)
    g_t = coupling.sample(t)
    g_tp = coupling.sample(t_prime)
    tau = t - t_prime
    pump_term = -0.25 * om_t * np.conj(om_tp) * np.exp(-1j * params.delta_p * tau)
    cav_term = (
        -0.25 * params.kappa() * g_t * g_tp
        * np.exp(-1j * (params.delta_k - 0.5j * params.gamma_k) * tau)
    )
    return complex(pump_term + cav_term)


def validate_params(params: ModelParams) -> list[str]:
    """Return one diagnostic per violated parameter invariant; empty if valid."""
    out: list[str] = []
    if params.rabi < 0:
        out.append(f"rabi: must be >= 0, got {params.rabi}")
    if not (params.gamma_k > 0):
        out.append(f"gamma_k: must be > 0, got {params.gamma_k}")
    if not (0 < params.gamma_rad <= params.gamma_k):
        out.append(
            f"gamma_rad: must satisfy 0 < gamma_rad <= gamma_k ({params.gamma_k}), "
            f"got {params.gamma_rad}"
        )
    if params.omega_k_abs is not None and params.omega_k_abs < 100.0 * params.gamma_k:
        out.append(
            f"omega_k_abs: high-Q regime requires omega_k_abs >= 100 gamma_k, "
            f"got {params.omega_k_abs}"
        )
    return out
