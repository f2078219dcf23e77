"""Extremum seeking with a noise-robust adaptive differentiator.

Core pieces: :mod:`ditherseek.esc` (the dither-based controller),
:mod:`ditherseek.aise` (the adaptive input/state estimation differentiator),
:mod:`ditherseek.plants` (quadratic and antilock-braking targets), and
:mod:`ditherseek.harness` (closed-loop runner, Monte Carlo, persistence).
A FastAPI service (:mod:`ditherseek.service`) and a CLI
(:mod:`ditherseek.cli`) wrap the harness.
"""
from .aise import AiseEstimator, AiseParams
from .esc import EscController, EscParams, GradientPath
from .harness import (Aggregate, NoiseSchedule, NoiseSegment, RunConfig,
                      Trajectory, monte_carlo, run_closed_loop)
from .plants import AbsParams, AbsState

__version__ = "0.1.0"

__all__ = [
    "AiseEstimator", "AiseParams", "EscController", "EscParams",
    "GradientPath", "Aggregate", "NoiseSchedule", "NoiseSegment",
    "RunConfig", "Trajectory", "monte_carlo", "run_closed_loop",
    "AbsParams", "AbsState", "__version__",
]
