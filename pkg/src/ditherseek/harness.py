"""Sampled-data closed-loop harness.

Runs the discrete-time controller against a plant under synchronous sampling
with zero-order-hold actuation and seeded Gaussian sensor noise, computes the
run metrics (RMSE against the known optimizer, time-to-stop for the wheel
plant), aggregates Monte Carlo batches, and persists runs as CSV/JSON.

Noise is generated by inverse-CDF sampling of 53-bit uniforms from a PCG64
stream, so a (schedule, seed) pair pins the exact sequence; per-trial seeds
derive from the base seed through a splitmix64 mix so trial streams are
uncorrelated.
"""
from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .aise import AiseParams
from .esc import EscController, EscParams, GradientPath
from .plants import (NU_EPS, AbsParams, AbsPlant, QuadraticPlant, WheelStopped,
                     mu_lambda)

FORMAT_VERSION = 1

QUADRATIC_COLUMNS = ("k", "t", "u", "y", "v", "y_n", "y_h", "y_l", "y_esc")
ABS_COLUMNS = QUADRATIC_COLUMNS + ("lambda", "mu", "nu", "omega")

_MASK64 = (1 << 64) - 1


class RunError(RuntimeError):
    """A closed-loop run failed; the message carries the step index."""


def splitmix64(x: int) -> int:
    """One splitmix64 output for input x (64-bit wrap-around)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def trial_seed(base_seed: int, trial: int) -> int:
    """Seed for one Monte Carlo trial: splitmix64 of base_seed + trial."""
    return splitmix64((base_seed + trial) & _MASK64)


class GaussianStream:
    """Deterministic standard-normal stream: PCG64 uniforms through the
    inverse normal CDF.

    The uniform is (n + 0.5) / 2^53 for a 53-bit integer n, so it lies
    strictly inside (0, 1) and the mapping is reproducible from the seed
    alone.
    """

    def __init__(self, seed: int):
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def next(self) -> float:
        u = (int(self._rng.integers(0, 1 << 53)) + 0.5) * 2.0 ** -53
        return float(ndtri(u))


@dataclass(frozen=True)
class NoiseSegment:
    """Half-open-ended run of steps with one noise level; k_end is inclusive
    and None means unbounded."""

    k_start: int
    k_end: int | None
    sigma: float

    def covers(self, k: int) -> bool:
        return k >= self.k_start and (self.k_end is None or k <= self.k_end)


@dataclass(frozen=True)
class NoiseSchedule:
    """Piecewise-constant noise standard deviation over the step axis, plus
    the seed of the underlying Gaussian stream."""

    segments: tuple[NoiseSegment, ...]
    seed: int

    def __post_init__(self):
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        if self.segments[0].k_start != 0:
            raise ValueError("first segment must start at step 0")
        for prev, cur in zip(self.segments, self.segments[1:]):
            if prev.k_end is None or cur.k_start != prev.k_end + 1:
                raise ValueError("segments must be contiguous and ordered")
        if self.segments[-1].k_end is not None:
            raise ValueError("last segment must be unbounded")

    def sigma_at(self, k: int) -> float:
        for seg in self.segments:
            if seg.covers(k):
                return seg.sigma
        raise ValueError(f"step {k} not covered by schedule")


def sample_noise(k: int, schedule: NoiseSchedule, stream: GaussianStream) -> float:
    """Noise sample for step k; the stream must be consumed in step order."""
    return schedule.sigma_at(k) * stream.next()


@dataclass(frozen=True)
class QuadraticConfig:
    """Static quadratic plant; the initial held input is the controller bias."""

    kind: str = "quadratic"


@dataclass(frozen=True)
class AbsConfig:
    """Wheel plant with initial velocities and the stopping threshold."""

    params: AbsParams
    nu0: float
    omega0: float
    nu_eps: float = NU_EPS
    kind: str = "abs"


@dataclass(frozen=True)
class RunConfig:
    """Everything one closed-loop run needs.

    ``rmse_k_end=None`` selects the last recorded step, which for the wheel
    plant equals floor(min(t_stop, horizon * t_s) / t_s).  ``validate``
    enables per-step invariant assertions in the differentiator.
    """

    plant: QuadraticConfig | AbsConfig
    esc: EscParams
    aise: AiseParams | None
    noise: NoiseSchedule | None
    horizon: int
    rmse_k_init: int
    rmse_k_end: int | None
    u_opt: float
    validate: bool = False

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.rmse_k_end is not None and not (
                0 <= self.rmse_k_init < self.rmse_k_end <= self.horizon):
            raise ValueError("need 0 <= rmse_k_init < rmse_k_end <= horizon")
        if self.esc.mode is GradientPath.AISE and self.aise is None:
            raise ValueError("aise mode requires aise parameters")

    def with_mode(self, mode: GradientPath) -> "RunConfig":
        return dataclasses.replace(self, esc=dataclasses.replace(self.esc, mode=mode))

    def with_seed(self, seed: int) -> "RunConfig":
        if self.noise is None:
            return self
        return dataclasses.replace(self, noise=dataclasses.replace(self.noise, seed=seed))


@dataclass
class Trajectory:
    """Column-oriented record of one run plus its derived metrics."""

    plant_kind: str
    mode: str
    t_s: float
    seed: int | None
    columns: dict[str, np.ndarray]
    rmse: float = math.nan
    t_stop: float | None = None
    stopped: bool = False

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return len(self.columns["k"])

    def column_names(self) -> tuple[str, ...]:
        return ABS_COLUMNS if self.plant_kind == "abs" else QUADRATIC_COLUMNS


def rmse(traj: Trajectory, u_opt: float, k_init: int, k_end: int) -> float:
    """Root-mean-square input error over steps [k_init, k_end].

    The divisor is k_end - k_init even though the window holds one more
    sample; this matches the metric used by the benchmark tables.
    """
    n = len(traj)
    if not 0 <= k_init < k_end <= n - 1:
        raise ValueError(
            f"rmse window [{k_init}, {k_end}] outside trajectory of {n} rows")
    err = traj["u"][k_init:k_end + 1] - u_opt
    return float(np.sqrt(np.sum(err * err) / (k_end - k_init)))


def detect_t_stop(traj: Trajectory, nu_eps: float = NU_EPS) -> float | None:
    """First sample time at which the wheel velocity is at or below the
    stopping threshold; None if it never is."""
    if "nu" not in traj.columns:
        raise ValueError("time-to-stop is only defined for wheel-plant runs")
    below = np.nonzero(traj["nu"] <= nu_eps)[0]
    if below.size == 0:
        return None
    return float(traj["t"][below[0]])


def _build_controller(config: RunConfig) -> EscController:
    return EscController(config.esc, config.aise, validate=config.validate)


def _guarded_slip(nu: float, omega: float, radius: float) -> float:
    if abs(nu) <= 1e-12:
        return 1.0
    return (nu - radius * omega) / nu


def run_closed_loop(config: RunConfig) -> Trajectory:
    """Run the sampled-data loop and return the recorded trajectory.

    Per step: sample the plant output, add sensor noise, feed the controller,
    and hold its output over the next sample period (one integration step for
    the wheel plant).  A wheel run ends at the first sample with velocity at
    or below the stopping threshold (that boundary row is recorded with the
    held input) or when the horizon is reached.
    """
    controller = _build_controller(config)
    is_abs = isinstance(config.plant, AbsConfig)
    if is_abs:
        plant = AbsPlant(config.plant.params, config.plant.nu0,
                         config.plant.omega0, config.plant.nu_eps)
    else:
        plant = QuadraticPlant(u_init=config.esc.u0)

    stream = GaussianStream(config.noise.seed) if config.noise is not None else None
    names = ABS_COLUMNS if is_abs else QUADRATIC_COLUMNS
    rows: dict[str, list] = {name: [] for name in names}

    stopped = False
    t_stop: float | None = None
    u_prev = config.esc.u0

    for k in range(config.horizon + 1):
        t = k * config.esc.t_s
        if is_abs:
            nu, omega = plant.state.nu, plant.state.omega
            lam_raw = _guarded_slip(nu, omega, config.plant.params.radius)
            y = mu_lambda(lam_raw, config.plant.params)
        else:
            y = plant.output()
        v = sample_noise(k, config.noise, stream) if stream is not None else 0.0
        y_n = y + v

        if is_abs and plant.stopped():
            # Boundary row: the wheel is stopped, keep the held input.
            rows["k"].append(k); rows["t"].append(t)
            rows["u"].append(u_prev); rows["y"].append(y)
            rows["v"].append(v); rows["y_n"].append(y_n)
            rows["y_h"].append(controller.y_h); rows["y_l"].append(controller.y_l)
            rows["y_esc"].append(controller.y_esc)
            rows["lambda"].append(lam_raw); rows["mu"].append(y)
            rows["nu"].append(nu); rows["omega"].append(omega)
            stopped = True
            t_stop = t
            break

        try:
            u = controller.step(y_n)
        except Exception as exc:
            raise RunError(f"controller failed at step {k}: {exc}") from exc

        rows["k"].append(k); rows["t"].append(t)
        rows["u"].append(u); rows["y"].append(y)
        rows["v"].append(v); rows["y_n"].append(y_n)
        rows["y_h"].append(controller.y_h); rows["y_l"].append(controller.y_l)
        rows["y_esc"].append(controller.y_esc)
        if is_abs:
            rows["lambda"].append(lam_raw); rows["mu"].append(y)
            rows["nu"].append(nu); rows["omega"].append(omega)

        if k < config.horizon:
            try:
                plant.advance(u, config.esc.t_s)
            except Exception as exc:
                raise RunError(f"plant failed at step {k}: {exc}") from exc
        u_prev = u

    traj = Trajectory(
        plant_kind="abs" if is_abs else "quadratic",
        mode=config.esc.mode.value,
        t_s=config.esc.t_s,
        seed=config.noise.seed if config.noise is not None else None,
        columns={name: np.asarray(vals, dtype=float) for name, vals in rows.items()},
        stopped=stopped,
        t_stop=t_stop,
    )
    k_end = config.rmse_k_end if config.rmse_k_end is not None else len(traj) - 1
    traj.rmse = rmse(traj, config.u_opt, config.rmse_k_init, k_end)
    return traj


@dataclass
class Aggregate:
    """Monte Carlo summary for one controller mode."""

    mode: str
    n_trials: int
    base_seed: int
    rmse_mean: float
    rmse_std: float
    t_stop_mean: float | None
    stopped_fraction: float
    rmse_values: list[float] = field(default_factory=list)
    t_stop_values: list[float | None] = field(default_factory=list)
    stopped_flags: list[bool] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def monte_carlo(config: RunConfig, n_trials: int, base_seed: int,
                workers: int = 1) -> Aggregate:
    """Independent seeded trials of one configuration.

    Trial i runs with noise seed splitmix64(base_seed + i).  Results reduce
    in trial order regardless of scheduling, so the aggregate is identical
    for any worker count.  Failed trials are excluded and reported; more than
    10% failures aborts.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")

    def one_trial(i: int):
        try:
            return run_closed_loop(config.with_seed(trial_seed(base_seed, i)))
        except RunError as exc:
            return exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one_trial, range(n_trials)))
    else:
        outcomes = [one_trial(i) for i in range(n_trials)]

    rmse_values: list[float] = []
    t_stop_values: list[float | None] = []
    stopped_flags: list[bool] = []
    failures: list[str] = []
    for i, out in enumerate(outcomes):
        if isinstance(out, RunError):
            failures.append(f"trial {i}: {out}")
            continue
        rmse_values.append(out.rmse)
        t_stop_values.append(out.t_stop)
        stopped_flags.append(out.stopped)
    if len(failures) > 0.1 * n_trials:
        raise RunError(f"{len(failures)}/{n_trials} trials failed: {failures[:3]}")

    stops = [t for t in t_stop_values if t is not None]
    return Aggregate(
        mode=config.esc.mode.value,
        n_trials=n_trials,
        base_seed=base_seed,
        rmse_mean=float(np.mean(rmse_values)),
        rmse_std=float(np.std(rmse_values)),
        t_stop_mean=float(np.mean(stops)) if stops else None,
        stopped_fraction=sum(stopped_flags) / len(stopped_flags),
        rmse_values=rmse_values,
        t_stop_values=t_stop_values,
        stopped_flags=stopped_flags,
        failures=failures,
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_run(traj: Trajectory, path: str | Path) -> Path:
    """Write a trajectory as CSV: '#'-prefixed metadata lines (format
    version, seed, metrics), a header row, then one row per step with 17
    significant digits."""
    path = Path(path)
    names = traj.column_names()
    try:
        with path.open("w", encoding="utf-8") as fh:
            fh.write(f"# ditherseek-run format_version={FORMAT_VERSION}\n")
            fh.write(f"# plant={traj.plant_kind} mode={traj.mode}\n")
            fh.write(f"# seed={'none' if traj.seed is None else traj.seed}\n")
            fh.write(f"# t_s={_fmt(traj.t_s)}\n")
            fh.write(f"# rmse={_fmt(traj.rmse)}\n")
            fh.write(f"# t_stop={'none' if traj.t_stop is None else _fmt(traj.t_stop)}\n")
            fh.write(f"# stopped={'true' if traj.stopped else 'false'}\n")
            fh.write(",".join(names) + "\n")
            cols = [traj[name] for name in names]
            for i in range(len(traj)):
                fh.write(",".join(_fmt(col[i]) for col in cols) + "\n")
    except OSError as exc:
        raise RunError(f"cannot write trajectory to {path}: {exc}") from exc
    return path


def read_run(path: str | Path) -> Trajectory:
    """Read a trajectory CSV produced by :func:`write_run`."""
    path = Path(path)
    meta: dict[str, str] = {}
    try:
        with path.open("r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise RunError(f"cannot read trajectory from {path}: {exc}") from exc
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        for token in line[1:].strip().split():
            if "=" in token:
                key, val = token.split("=", 1)
                meta[key] = val
    header = lines[body_start].split(",")
    data = np.array([[float(x) for x in line.split(",")]
                     for line in lines[body_start + 1:] if line])
    columns = {name: data[:, j] for j, name in enumerate(header)}
    return Trajectory(
        plant_kind=meta.get("plant", "quadratic"),
        mode=meta.get("mode", "hpf"),
        t_s=float(meta["t_s"]),
        seed=None if meta.get("seed") == "none" else int(meta["seed"]),
        columns=columns,
        rmse=float(meta["rmse"]),
        t_stop=None if meta.get("t_stop") == "none" else float(meta["t_stop"]),
        stopped=meta.get("stopped") == "true",
    )


def write_aggregate(aggregates: dict[str, Aggregate], path: str | Path,
                    config_echo: dict | None = None) -> Path:
    """Write Monte Carlo aggregates (one entry per mode) plus the
    configuration echo as JSON."""
    path = Path(path)
    payload = {
        "format_version": FORMAT_VERSION,
        "results": {mode: agg.to_dict() for mode, agg in aggregates.items()},
        "config": config_echo or {},
    }
    try:
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise RunError(f"cannot write aggregate to {path}: {exc}") from exc
    return path


def read_aggregate(path: str | Path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise RunError(f"cannot read aggregate from {path}: {exc}") from exc
