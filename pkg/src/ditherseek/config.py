"""Experiment configuration: validated file schema and conversion to core types.

Config files are JSON with exact decimal literals, one experiment per file.
Unknown keys are rejected.  The two benchmark experiments ship as package
data (``configs/example1.json``, ``configs/example2.json``) and are loadable
by short name.
"""
from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .aise import AiseParams
from .esc import EscParams, GradientPath
from .harness import (AbsConfig, NoiseSchedule, NoiseSegment, QuadraticConfig,
                      RunConfig)
from .plants import NU_EPS, AbsParams

MODE_TO_PATH = {"esc": GradientPath.HPF, "esc-aise": GradientPath.AISE}
PATH_TO_MODE = {v: k for k, v in MODE_TO_PATH.items()}

EXAMPLE_FILES = {"quadratic": "example1.json", "abs": "example2.json"}

ModeName = Literal["esc", "esc-aise"]


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class EscSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k_g: float = 1.0
    k_esc: float
    omega_esc: float
    dither_unit: Literal["rad", "hz"] = "rad"
    a_esc: float
    omega_l: float
    omega_h: float | None = None
    u0: float

    def omega_esc_rad(self) -> float:
        if self.dither_unit == "hz":
            return 2.0 * math.pi * self.omega_esc
        return self.omega_esc


class AiseSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_e: int
    n_f: int
    r_z: float
    r_d: float
    r_theta: float
    r_inf: float
    eta_vrf: float
    tau_n: int
    tau_d: int
    alpha: float
    eta_l: float
    eta_u: float
    beta: float


class NoiseSegmentModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k_start: int
    k_end: int | None = None
    sigma: float


class AbsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m: float
    radius: float
    j_w: float
    b_f: float
    g: float = 9.81
    lambda_star: float
    mu_star: float
    c: float
    nu0: float
    omega0: float
    nu_eps: float = NU_EPS


class RmseSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k_init: int
    k_end: int | None = None


class ExperimentConfig(BaseModel):
    """One experiment: plant, controller settings, noise, metric window."""

    model_config = ConfigDict(extra="forbid")

    name: str
    plant: Literal["quadratic", "abs"]
    t_s: float
    horizon: int
    u_opt: float
    rmse: RmseSection
    esc: EscSection
    aise: AiseSection | None = None
    abs_params: AbsSection | None = None
    noise: list[NoiseSegmentModel] | None = None
    modes: list[ModeName] = ["esc", "esc-aise"]
    trials: int = 100
    seed: int = 0

    @model_validator(mode="after")
    def _check_sections(self):
        if self.plant == "abs" and self.abs_params is None:
            raise ValueError("plant 'abs' requires the abs_params section")
        if "esc-aise" in self.modes and self.aise is None:
            raise ValueError("mode 'esc-aise' requires the aise section")
        if "esc" in self.modes and self.esc.omega_h is None:
            raise ValueError("mode 'esc' requires esc.omega_h")
        return self


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate a config file; errors name the offending key/path."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(p) for p in first["loc"]) or "<root>"
        raise ConfigError(f"invalid config {path}: {loc}: {first['msg']}") from exc


def example_config(name: str) -> ExperimentConfig:
    """Load one of the shipped benchmark configs ('quadratic' or 'abs')."""
    if name not in EXAMPLE_FILES:
        raise ConfigError(f"unknown example '{name}'; choose from {sorted(EXAMPLE_FILES)}")
    data = resources.files("ditherseek").joinpath(f"configs/{EXAMPLE_FILES[name]}")
    return ExperimentConfig.model_validate(json.loads(data.read_text(encoding="utf-8")))


def build_run_config(cfg: ExperimentConfig, mode: ModeName, seed: int | None = None,
                     no_noise: bool = False, validate: bool = False) -> RunConfig:
    """Instantiate the core run description for one controller mode."""
    if mode not in MODE_TO_PATH:
        raise ConfigError(f"unknown mode '{mode}'")
    path = MODE_TO_PATH[mode]
    if path is GradientPath.AISE and cfg.aise is None:
        raise ConfigError("mode 'esc-aise' requires the aise section")
    if path is GradientPath.HPF and cfg.esc.omega_h is None:
        raise ConfigError("mode 'esc' requires esc.omega_h")

    esc = EscParams(
        k_g=cfg.esc.k_g,
        k_esc=cfg.esc.k_esc,
        omega_esc=cfg.esc.omega_esc_rad(),
        a_esc=cfg.esc.a_esc,
        omega_l=cfg.esc.omega_l,
        omega_h=cfg.esc.omega_h,
        u0=cfg.esc.u0,
        t_s=cfg.t_s,
        mode=path,
    )
    aise = None
    if path is GradientPath.AISE:
        a = cfg.aise
        aise = AiseParams(
            n_e=a.n_e, n_f=a.n_f, r_z=a.r_z, r_d=a.r_d, r_theta=a.r_theta,
            r_inf=a.r_inf, eta_vrf=a.eta_vrf, tau_n=a.tau_n, tau_d=a.tau_d,
            alpha=a.alpha, eta_l=a.eta_l, eta_u=a.eta_u, beta=a.beta,
            t_s=cfg.t_s,
        )
    if cfg.plant == "abs":
        w = cfg.abs_params
        plant = AbsConfig(
            params=AbsParams(m=w.m, radius=w.radius, j_w=w.j_w, b_f=w.b_f, g=w.g,
                             lambda_star=w.lambda_star, mu_star=w.mu_star, c=w.c),
            nu0=w.nu0, omega0=w.omega0, nu_eps=w.nu_eps,
        )
    else:
        plant = QuadraticConfig()

    noise = None
    if cfg.noise is not None and not no_noise:
        segments = tuple(NoiseSegment(s.k_start, s.k_end, s.sigma) for s in cfg.noise)
        noise = NoiseSchedule(segments=segments,
                              seed=cfg.seed if seed is None else seed)
    return RunConfig(
        plant=plant, esc=esc, aise=aise, noise=noise,
        horizon=cfg.horizon, rmse_k_init=cfg.rmse.k_init,
        rmse_k_end=cfg.rmse.k_end, u_opt=cfg.u_opt, validate=validate,
    )


# numeric keys a sweep may vary, and the modes that actually consume them
_ESC_SWEEPABLE = {"k_g", "k_esc", "omega_esc", "a_esc", "omega_l", "omega_h", "u0"}
_AISE_SWEEPABLE = {"r_z", "r_d", "r_theta", "r_inf", "eta_vrf", "alpha",
                   "eta_l", "eta_u", "beta"}


def apply_sweep_value(cfg: ExperimentConfig, parameter: str, value: float,
                      modes: list[str]) -> ExperimentConfig:
    """Copy of cfg with one numeric parameter replaced.

    Rejects unknown parameters and parameters unused by every requested mode
    (omega_h only exists on the high-pass path; AISE weights only on the
    differentiator path).
    """
    if parameter in _ESC_SWEEPABLE:
        if parameter == "omega_h" and "esc" not in modes:
            raise ConfigError("parameter 'omega_h' is unused in esc-aise mode")
        return cfg.model_copy(
            update={"esc": cfg.esc.model_copy(update={parameter: value})}, deep=True)
    if parameter in _AISE_SWEEPABLE:
        if "esc-aise" not in modes:
            raise ConfigError(f"parameter '{parameter}' is unused in esc mode")
        if cfg.aise is None:
            raise ConfigError("config has no aise section to sweep")
        return cfg.model_copy(
            update={"aise": cfg.aise.model_copy(update={parameter: value})}, deep=True)
    raise ConfigError(f"unknown sweep parameter '{parameter}'")
