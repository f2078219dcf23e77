"""Command-line front end.

Runs single experiments, Monte Carlo batches, and parameter sweeps, either
in-process (default) or against a running service (``--server URL``), and
writes the CSV/JSON artifacts.  ``ditherseek serve`` starts the service.
"""
from __future__ import annotations

import json
from pathlib import Path

import click
import httpx
import numpy as np

from .config import ConfigError, ExperimentConfig, example_config, load_config
from .harness import (FORMAT_VERSION, Aggregate, RunError, Trajectory,
                      write_aggregate, write_run)
from .service import (AggregatePayload, MonteCarloRequest, MonteCarloResponse,
                      RunRequest, RunResponse, SweepRequest, SweepResponse,
                      execute_montecarlo, execute_run, execute_sweep)


def get_client(server: str) -> httpx.Client:
    """HTTP client for a remote service; tests may monkeypatch this."""
    return httpx.Client(base_url=server, timeout=900.0)


def _post(server: str, path: str, payload: dict, response_model):
    with get_client(server) as client:
        resp = client.post(path, json=payload)
        if resp.status_code != 200:
            raise RunError(f"server returned {resp.status_code}: {resp.text}")
        return response_model.model_validate(resp.json())


def _load_experiment(config_path: str | None, example: str | None) -> ExperimentConfig:
    if (config_path is None) == (example is None):
        raise click.UsageError("provide exactly one of --config or --example")
    try:
        if config_path is not None:
            return load_config(config_path)
        return example_config(example)
    except ConfigError as exc:
        raise click.UsageError(str(exc))


def _trajectory_from_payload(payload) -> Trajectory:
    return Trajectory(
        plant_kind=payload.plant, mode=payload.mode, t_s=payload.t_s,
        seed=payload.seed,
        columns={k: np.asarray(v) for k, v in payload.columns.items()},
    )


def _aggregate_from_payload(p: AggregatePayload) -> Aggregate:
    return Aggregate(
        mode=p.mode, n_trials=p.n_trials, base_seed=p.base_seed,
        rmse_mean=p.rmse_mean, rmse_std=p.rmse_std, t_stop_mean=p.t_stop_mean,
        stopped_fraction=p.stopped_fraction, rmse_values=p.rmse_values,
        t_stop_values=p.t_stop_values, stopped_flags=p.stopped_flags,
        failures=p.failures,
    )


@click.group()
def main():
    """Extremum-seeking control experiments."""


common_options = [
    click.option("--config", "config_path", type=str, default=None,
                 help="Path to an experiment config file (JSON)."),
    click.option("--example", type=click.Choice(["quadratic", "abs"]), default=None,
                 help="Use a shipped benchmark config."),
    click.option("--seed", type=int, default=None, help="Base noise seed override."),
    click.option("--no-noise", is_flag=True, help="Disable sensor noise."),
    click.option("--out", "out_dir", type=str, default="out", help="Output directory."),
    click.option("--server", type=str, default=None,
                 help="Run against a ditherseek service at this URL."),
]


def add_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


@main.command()
@add_options(common_options)
@click.option("--mode", "modes", type=click.Choice(["esc", "esc-aise"]),
              multiple=True, help="Controller mode(s); default from the config.")
def run(config_path, example, seed, no_noise, out_dir, server, modes):
    """Run one closed-loop simulation per mode; write CSV + metrics JSON."""
    cfg = _load_experiment(config_path, example)
    mode_list = list(modes) if modes else cfg.modes
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    used_seed = seed if seed is not None else cfg.seed

    metrics = {}
    for mode in mode_list:
        request = RunRequest(config=cfg, mode=mode, seed=used_seed,
                             no_noise=no_noise, include_trajectory=True)
        try:
            if server is not None:
                response = _post(server, "/run",
                                 request.model_dump(mode="json"), RunResponse)
            else:
                response = execute_run(request)
        except (ConfigError, ValueError) as exc:
            raise click.UsageError(str(exc))
        except RunError as exc:
            raise click.ClickException(str(exc))

        traj = _trajectory_from_payload(response.trajectory)
        traj.rmse = response.metrics.rmse
        traj.t_stop = response.metrics.t_stop
        traj.stopped = response.metrics.stopped
        csv_path = out / f"{cfg.name}_{mode}_{used_seed}.csv"
        write_run(traj, csv_path)
        m = response.metrics
        metrics[mode] = m.model_dump()
        line = f"{cfg.name} {mode}: rmse={m.rmse:.6g}"
        if m.t_stop is not None:
            line += f" t_stop={m.t_stop:.6g} s"
        elif cfg.plant == "abs":
            line += " t_stop=none (horizon reached)"
        click.echo(line)
        click.echo(f"wrote {csv_path}")

    metrics_path = out / "metrics.json"
    payload = {
        "format_version": FORMAT_VERSION,
        "name": cfg.name,
        "seed": used_seed,
        "overrides": {"seed": seed, "no_noise": no_noise, "modes": mode_list},
        "config": cfg.model_dump(mode="json"),
        "runs": metrics,
    }
    metrics_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    click.echo(f"wrote {metrics_path}")


@main.command()
@add_options(common_options)
@click.option("--trials", type=int, default=None, help="Trial count; default from config.")
@click.option("--mode", "modes", type=click.Choice(["esc", "esc-aise"]),
              multiple=True, help="Controller mode(s); default from the config.")
@click.option("--workers", type=int, default=1, help="Parallel trial workers.")
def montecarlo(config_path, example, seed, no_noise, out_dir, server, trials, modes, workers):
    """Paired Monte Carlo trials over the requested modes; write aggregate JSON."""
    cfg = _load_experiment(config_path, example)
    if trials is not None and trials < 1:
        raise click.UsageError("--trials must be >= 1")
    mode_list = list(modes) if modes else cfg.modes
    request = MonteCarloRequest(config=cfg, modes=mode_list, trials=trials,
                                seed=seed, no_noise=no_noise, workers=workers)
    try:
        if server is not None:
            response = _post(server, "/montecarlo",
                             request.model_dump(mode="json"), MonteCarloResponse)
        else:
            response = execute_montecarlo(request)
    except (ConfigError, ValueError) as exc:
        raise click.UsageError(str(exc))
    except RunError as exc:
        raise click.ClickException(str(exc))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    agg_path = out / f"{cfg.name}_montecarlo_{response.base_seed}.json"
    aggregates = {mode: _aggregate_from_payload(p) for mode, p in response.results.items()}
    write_aggregate(aggregates, agg_path, config_echo={
        "name": cfg.name, "trials": response.trials, "base_seed": response.base_seed,
        "overrides": {"seed": seed, "no_noise": no_noise, "trials": trials,
                      "modes": mode_list},
        "config": cfg.model_dump(mode="json"),
    })
    click.echo(f"wrote {agg_path}")
    click.echo(render_table(response))


def render_table(response: MonteCarloResponse) -> str:
    """Comparison table across modes (average RMSE, stop time, stop rate)."""
    modes = list(response.results)
    header = f"{'Metric':<22}" + "".join(f"{m:>14}" for m in modes)
    lines = [header, "-" * len(header)]
    lines.append(f"{'Average RMSE':<22}" + "".join(
        f"{response.results[m].rmse_mean:>14.4g}" for m in modes))
    if any(any(f is not None for f in response.results[m].t_stop_values) for m in modes):
        def fmt_t(m):
            t = response.results[m].t_stop_mean
            return f"{t:>14.4g}" if t is not None else f"{'n/a':>14}"
        lines.append(f"{'Average t_stop (s)':<22}" + "".join(fmt_t(m) for m in modes))
    if any(response.results[m].stopped_flags for m in modes):
        lines.append(f"{'Stopped within limit':<22}" + "".join(
            f"{100 * response.results[m].stopped_fraction:>13.0f}%" for m in modes))
    lines.append(f"{'Trials':<22}" + "".join(
        f"{response.results[m].n_trials:>14d}" for m in modes))
    return "\n".join(lines)


@main.command()
@add_options(common_options)
@click.option("--parameter", required=True, help="Numeric config key to sweep.")
@click.option("--values", required=True, help="Comma-separated numeric values.")
@click.option("--trials", type=int, default=None, help="Trials per value; default from config.")
@click.option("--mode", "modes", type=click.Choice(["esc", "esc-aise"]),
              multiple=True, help="Controller mode(s); default from the config.")
@click.option("--workers", type=int, default=1, help="Parallel trial workers.")
def sweep(config_path, example, seed, no_noise, out_dir, server, parameter, values,
          trials, modes, workers):
    """Monte Carlo aggregate per parameter value; write a combined CSV."""
    cfg = _load_experiment(config_path, example)
    try:
        value_list = [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise click.UsageError(f"cannot parse --values '{values}' as numbers")
    if not value_list:
        raise click.UsageError("--values must list at least one number")
    mode_list = list(modes) if modes else cfg.modes
    request = SweepRequest(config=cfg, modes=mode_list, trials=trials, seed=seed,
                           no_noise=no_noise, workers=workers,
                           parameter=parameter, values=value_list)
    try:
        if server is not None:
            response = _post(server, "/sweep",
                             request.model_dump(mode="json"), SweepResponse)
        else:
            response = execute_sweep(request)
    except (ConfigError, ValueError) as exc:
        raise click.UsageError(str(exc))
    except RunError as exc:
        raise click.ClickException(str(exc))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{cfg.name}_sweep_{parameter}.csv"
    with csv_path.open("w", encoding="utf-8") as fh:
        fh.write(f"# ditherseek-sweep format_version={FORMAT_VERSION} parameter={parameter}\n")
        fh.write("value,mode,rmse_mean,stopped_fraction\n")
        for row in response.rows:
            fh.write(f"{row.value:.17g},{row.mode},{row.rmse_mean:.17g},"
                     f"{row.stopped_fraction:.17g}\n")
    click.echo(f"wrote {csv_path}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Start the REST service."""
    import uvicorn

    from .service import app
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
