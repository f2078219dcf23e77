"""REST service wrapping the simulation harness.

Endpoints accept either a shipped example name or a full inline experiment
config, run closed-loop simulations / Monte Carlo batches / parameter sweeps,
and return metrics as JSON.  The CLI reuses the ``execute_*`` functions for
local runs and posts the same request models when pointed at a server.
"""
from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, model_validator

from . import __version__
from .config import (ConfigError, EXAMPLE_FILES, ExperimentConfig, ModeName,
                     apply_sweep_value, build_run_config, example_config)
from .harness import Aggregate, RunError, Trajectory, monte_carlo, run_closed_loop


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    example: Literal["quadratic", "abs"] | None = None
    config: ExperimentConfig | None = None
    mode: ModeName = "esc"
    seed: int | None = None
    no_noise: bool = False
    include_trajectory: bool = False

    @model_validator(mode="after")
    def _one_source(self):
        if (self.example is None) == (self.config is None):
            raise ValueError("provide exactly one of 'example' or 'config'")
        return self

    def experiment(self) -> ExperimentConfig:
        return self.config if self.config is not None else example_config(self.example)


class TrajectoryPayload(BaseModel):
    plant: str
    mode: ModeName
    seed: int | None
    t_s: float
    columns: dict[str, list[float]]


class RunMetrics(BaseModel):
    name: str
    mode: ModeName
    seed: int | None
    rmse: float
    t_stop: float | None
    stopped: bool
    steps: int


class RunResponse(BaseModel):
    metrics: RunMetrics
    trajectory: TrajectoryPayload | None = None


class MonteCarloRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    example: Literal["quadratic", "abs"] | None = None
    config: ExperimentConfig | None = None
    modes: list[ModeName] | None = None
    trials: int | None = None
    seed: int | None = None
    no_noise: bool = False
    workers: int = 1

    @model_validator(mode="after")
    def _one_source(self):
        if (self.example is None) == (self.config is None):
            raise ValueError("provide exactly one of 'example' or 'config'")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be >= 1")
        return self

    def experiment(self) -> ExperimentConfig:
        return self.config if self.config is not None else example_config(self.example)


class AggregatePayload(BaseModel):
    mode: ModeName
    n_trials: int
    base_seed: int
    rmse_mean: float
    rmse_std: float
    t_stop_mean: float | None
    stopped_fraction: float
    rmse_values: list[float]
    t_stop_values: list[float | None]
    stopped_flags: list[bool]
    failures: list[str]


class MonteCarloResponse(BaseModel):
    name: str
    trials: int
    base_seed: int
    results: dict[str, AggregatePayload]


class SweepRequest(MonteCarloRequest):
    parameter: str = ""
    values: list[float] = []

    @model_validator(mode="after")
    def _sweep_fields(self):
        if not self.parameter:
            raise ValueError("parameter must be named")
        if not self.values:
            raise ValueError("values must be non-empty")
        return self


class SweepRow(BaseModel):
    value: float
    mode: ModeName
    rmse_mean: float
    stopped_fraction: float


class SweepResponse(BaseModel):
    name: str
    parameter: str
    rows: list[SweepRow]


def _trajectory_payload(traj: Trajectory, mode: ModeName) -> TrajectoryPayload:
    return TrajectoryPayload(
        plant=traj.plant_kind, mode=mode, seed=traj.seed, t_s=traj.t_s,
        columns={name: traj[name].tolist() for name in traj.column_names()},
    )


def _aggregate_payload(agg: Aggregate, mode: ModeName) -> AggregatePayload:
    return AggregatePayload(
        mode=mode, n_trials=agg.n_trials, base_seed=agg.base_seed,
        rmse_mean=agg.rmse_mean, rmse_std=agg.rmse_std,
        t_stop_mean=agg.t_stop_mean, stopped_fraction=agg.stopped_fraction,
        rmse_values=agg.rmse_values, t_stop_values=agg.t_stop_values,
        stopped_flags=agg.stopped_flags, failures=agg.failures,
    )


def execute_run(request: RunRequest, validate: bool = False) -> RunResponse:
    cfg = request.experiment()
    run_cfg = build_run_config(cfg, request.mode, seed=request.seed,
                               no_noise=request.no_noise, validate=validate)
    traj = run_closed_loop(run_cfg)
    metrics = RunMetrics(
        name=cfg.name, mode=request.mode, seed=traj.seed, rmse=traj.rmse,
        t_stop=traj.t_stop, stopped=traj.stopped, steps=len(traj),
    )
    payload = _trajectory_payload(traj, request.mode) if request.include_trajectory else None
    return RunResponse(metrics=metrics, trajectory=payload)


def execute_montecarlo(request: MonteCarloRequest) -> MonteCarloResponse:
    cfg = request.experiment()
    modes = request.modes if request.modes is not None else cfg.modes
    trials = request.trials if request.trials is not None else cfg.trials
    base_seed = request.seed if request.seed is not None else cfg.seed
    results = {}
    for mode in modes:
        run_cfg = build_run_config(cfg, mode, no_noise=request.no_noise)
        agg = monte_carlo(run_cfg, trials, base_seed, workers=request.workers)
        results[mode] = _aggregate_payload(agg, mode)
    return MonteCarloResponse(name=cfg.name, trials=trials, base_seed=base_seed,
                              results=results)


def execute_sweep(request: SweepRequest) -> SweepResponse:
    cfg = request.experiment()
    modes = request.modes if request.modes is not None else cfg.modes
    rows: list[SweepRow] = []
    for value in request.values:
        swept = apply_sweep_value(cfg, request.parameter, value, modes)
        mc = MonteCarloRequest(config=swept, modes=modes, trials=request.trials,
                               seed=request.seed, no_noise=request.no_noise,
                               workers=request.workers)
        for mode, agg in execute_montecarlo(mc).results.items():
            rows.append(SweepRow(value=value, mode=mode, rmse_mean=agg.rmse_mean,
                                 stopped_fraction=agg.stopped_fraction))
    return SweepResponse(name=cfg.name, parameter=request.parameter, rows=rows)


app = FastAPI(
    title="ditherseek",
    version=__version__,
    description="Extremum-seeking control experiments: single runs, Monte Carlo "
                "batches, and parameter sweeps over the quadratic-cost and "
                "antilock-braking benchmarks.",
)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/examples")
def examples() -> dict:
    return {"examples": sorted(EXAMPLE_FILES)}


@app.post("/run", response_model=RunResponse)
def run_endpoint(request: RunRequest) -> RunResponse:
    try:
        return execute_run(request)
    except (ConfigError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except RunError as exc:
        raise HTTPException(status_code=500, detail=str(exc))


@app.post("/montecarlo", response_model=MonteCarloResponse)
def montecarlo_endpoint(request: MonteCarloRequest) -> MonteCarloResponse:
    try:
        return execute_montecarlo(request)
    except (ConfigError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except RunError as exc:
        raise HTTPException(status_code=500, detail=str(exc))


@app.post("/sweep", response_model=SweepResponse)
def sweep_endpoint(request: SweepRequest) -> SweepResponse:
    try:
        return execute_sweep(request)
    except (ConfigError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except RunError as exc:
        raise HTTPException(status_code=500, detail=str(exc))
