"""Discrete-time extremum-seeking controller.

A sinusoidal dither probes the unknown input-output map; the measured output
is passed through a gradient surrogate (either a first-order high-pass filter
or the adaptive differentiator from :mod:`ditherseek.aise`), demodulated
against the dither through a low-pass filter, and integrated to steer the
input toward a local extremum.  The output-gain sign selects minimization
(negative) or maximization (positive).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .aise import AiseEstimator, AiseParams


class GradientPath(str, Enum):
    """Which gradient surrogate feeds the demodulator."""

    HPF = "hpf"
    AISE = "aise"


def _always_on(k: int) -> float:
    return 1.0


@dataclass(frozen=True)
class EscParams:
    """Controller gains and dither settings.

    ``k_en`` is a step-indexed enabling gain into {0, 1}; the default keeps
    the integrator updating on every step.  ``omega_h`` is only used on the
    high-pass path.
    """

    k_g: float
    k_esc: float
    omega_l: float
    omega_esc: float
    a_esc: float
    u0: float
    t_s: float
    mode: GradientPath = GradientPath.HPF
    omega_h: float | None = None
    k_en: Callable[[int], float] = field(default=_always_on, repr=False)

    def __post_init__(self):
        if self.k_g <= 0.0:
            raise ValueError("k_g must be positive")
        if self.a_esc <= 0.0 or self.omega_esc <= 0.0:
            raise ValueError("dither amplitude and frequency must be positive")
        if self.t_s <= 0.0:
            raise ValueError("t_s must be positive")
        if not 0.0 < self.omega_l * self.t_s < 1.0:
            raise ValueError("omega_l * t_s must lie in (0, 1)")
        if self.mode is GradientPath.HPF:
            if self.omega_h is None:
                raise ValueError("hpf mode requires omega_h")
            if not 0.0 < self.omega_h * self.t_s < 1.0:
                raise ValueError("omega_h * t_s must lie in (0, 1)")


def highpass_step(y_h_prev: float, y_g: float, y_g_prev: float,
                  omega_h: float, t_s: float) -> float:
    """First-order high-pass update: rejects DC, passes changes."""
    return -omega_h * t_s * y_h_prev + y_g - y_g_prev


def lowpass_demod_step(y_l_prev: float, y_h_prev: float, k: int,
                       params: EscParams) -> float:
    """Low-pass filtered product of the delayed gradient surrogate with the
    delayed dither."""
    a = params.omega_l * params.t_s
    demod = params.k_en(k) * y_h_prev * params.a_esc \
        * math.sin(params.omega_esc * params.t_s * (k - 1))
    return (1.0 - a) * y_l_prev + a * demod


def integrator_step(y_esc_prev: float, y_l_prev: float) -> float:
    """Accumulate the delayed demodulated gradient."""
    return y_esc_prev + y_l_prev


def esc_output(y_esc: float, k: int, params: EscParams) -> float:
    """Control value: scaled integrator state plus dither plus bias."""
    return params.k_esc * y_esc \
        + params.a_esc * math.sin(params.omega_esc * params.t_s * k) \
        + params.u0


class EscController:
    """Stateful controller; one :meth:`step` call per measurement sample.

    Step 0 emits the bias (the dither is zero there) and only primes the
    internal delays; the filter updates run from step 1 on, with all one-step
    delays taken from the previous committed state.
    """

    def __init__(self, params: EscParams, aise_params: AiseParams | None = None,
                 validate: bool = False):
        if params.mode is GradientPath.AISE and aise_params is None:
            raise ValueError("aise mode requires aise_params")
        self.params = params
        self.aise = AiseEstimator(aise_params, validate=validate) \
            if params.mode is GradientPath.AISE else None
        self.y_h = 0.0
        self.y_l = 0.0
        self.y_esc = 0.0
        self.y_g_prev = 0.0
        self.k = 0

    def step(self, y_n: float) -> float:
        if not math.isfinite(y_n):
            raise ValueError(f"non-finite measurement at step {self.k}: {y_n}")
        p = self.params
        k = self.k
        y_g = p.k_g * y_n

        if k == 0:
            # Prime the differentiator with the first sample; its first
            # output is exactly zero, matching the all-zero initial state.
            if self.aise is not None:
                self.y_h = self.aise.step(y_g)
            self.y_g_prev = y_g
            self.k = 1
            return esc_output(0.0, 0, p)

        if self.aise is not None:
            y_h_new = self.aise.step(y_g)
        else:
            y_h_new = highpass_step(self.y_h, y_g, self.y_g_prev, p.omega_h, p.t_s)
        y_l_new = lowpass_demod_step(self.y_l, self.y_h, k, p)
        y_esc_new = integrator_step(self.y_esc, self.y_l)
        u = esc_output(y_esc_new, k, p)

        self.y_h = y_h_new
        self.y_l = y_l_new
        self.y_esc = y_esc_new
        self.y_g_prev = y_g
        self.k = k + 1
        return u
