"""Target systems for the closed-loop experiments.

Two plants: a static quadratic map (output is a quarter of the squared
input), and a single-wheel antilock-braking model whose braking torque is set
by a slip-tracking feedback-linearizing inner loop.  A fixed-step classical
Runge-Kutta integrator advances the wheel dynamics one sample period at a
time under zero-order-hold input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Forward velocity below which the wheel counts as stopped; the slip is
# singular at zero velocity.
NU_EPS = 0.05

_NU_DIV_FLOOR = 1e-12


class WheelStopped(Exception):
    """Raised when the wheel's forward velocity is at or below the stopping
    threshold and slip is no longer well defined."""


def quadratic_eval(u: float) -> float:
    """Static cost map with a single minimum at zero."""
    return 0.25 * u * u


@dataclass(frozen=True)
class AbsParams:
    """Wheel, friction-curve, and inner-loop parameters.

    Defaults are the benchmark values: a 400 kg corner load on a 0.3 m wheel
    with unit inertia, friction peaking at 0.6 for 25% slip, and an inner
    loop that contracts slip error at rate c.
    """

    m: float = 400.0
    radius: float = 0.3
    j_w: float = 1.0
    b_f: float = 0.01
    g: float = 9.81
    lambda_star: float = 0.25
    mu_star: float = 0.6
    c: float = 2.0

    def __post_init__(self):
        for name in ("m", "radius", "j_w", "b_f", "g", "mu_star", "c"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.lambda_star < 1.0:
            raise ValueError("lambda_star must lie in (0, 1)")


@dataclass
class AbsState:
    """Wheel state: forward velocity (m/s), angular velocity (rad/s), time (s)."""

    nu: float
    omega: float
    t: float = 0.0


def slip(nu: float, omega: float, radius: float, nu_eps: float = NU_EPS) -> float:
    """Wheel slip (nu - R*omega) / nu; raises WheelStopped at low velocity."""
    if nu <= nu_eps:
        raise WheelStopped(f"forward velocity {nu} at or below {nu_eps}")
    return (nu - radius * omega) / nu


def mu_lambda(lam: float, params: AbsParams) -> float:
    """Friction coefficient versus slip; peaks at mu_star when lam equals
    lambda_star.

    The curve is evaluated at the slip magnitude: friction always dissipates,
    so the coefficient is symmetric in the sliding direction.  Outside the
    nominal braking range the curve keeps a nonzero gradient back toward the
    peak, which bounds excursions of the slip command under heavy sensor
    noise.
    """
    lam = abs(lam)
    ls = params.lambda_star
    return 2.0 * params.mu_star * ls * lam / (ls * ls + lam * lam)


def abs_rhs(state: AbsState, lambda_d: float, params: AbsParams
            ) -> tuple[float, float, float]:
    """Continuous-time derivatives (nu_dot, omega_dot) and braking torque.

    The torque law cancels the wheel dynamics so slip error contracts at rate
    c toward lambda_d.  The friction curve is evaluated at the raw slip; the
    velocity divisions are floored to stay finite on the already-stopped
    boundary sample.
    """
    nu, omega = state.nu, state.omega
    nu_div = nu if abs(nu) > _NU_DIV_FLOOR else _NU_DIV_FLOOR
    lam_raw = (nu - params.radius * omega) / nu_div
    mu = mu_lambda(lam_raw, params)
    nu_dot = -params.g * mu
    tau_b = -(params.c * params.j_w * nu / params.radius) * (lam_raw - lambda_d) \
        - params.b_f * omega \
        - (params.j_w * omega / nu_div) * nu_dot \
        - params.m * params.radius * nu_dot  # nu_dot = -g * mu, measured by the accelerometer
    omega_dot = -(params.b_f / params.j_w) * omega \
        + (params.m * params.g * params.radius / params.j_w) * mu \
        - tau_b
    return nu_dot, omega_dot, tau_b


def rk4_step(rhs, x: np.ndarray, dt: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta advance of x' = rhs(x)."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    k1 = rhs(x)
    k2 = rhs(x + 0.5 * dt * k1)
    k3 = rhs(x + 0.5 * dt * k2)
    k4 = rhs(x + dt * k3)
    x_new = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(x_new)):
        raise ArithmeticError("non-finite state after integration step")
    return x_new


class QuadraticPlant:
    """Static map under zero-order hold: the output at a sample reflects the
    input held since the previous sample."""

    def __init__(self, u_init: float):
        self.u = u_init

    def output(self) -> float:
        return quadratic_eval(self.u)

    def advance(self, u: float, dt: float) -> None:
        self.u = u


class AbsPlant:
    """Single-wheel plant advanced one sample period per control value."""

    def __init__(self, params: AbsParams, nu0: float, omega0: float,
                 nu_eps: float = NU_EPS):
        self.params = params
        self.state = AbsState(nu=nu0, omega=omega0, t=0.0)
        self.nu_eps = nu_eps

    def stopped(self) -> bool:
        return self.state.nu <= self.nu_eps

    def slip_value(self) -> float:
        return slip(self.state.nu, self.state.omega, self.params.radius,
                    self.nu_eps)

    def output(self) -> float:
        """Measured performance: friction coefficient at the current slip."""
        return mu_lambda(self.slip_value(), self.params)

    def advance(self, lambda_d: float, dt: float) -> None:
        def rhs(x: np.ndarray) -> np.ndarray:
            nu_dot, omega_dot, _ = abs_rhs(AbsState(x[0], x[1]), lambda_d,
                                           self.params)
            return np.array([nu_dot, omega_dot])

        x = np.array([self.state.nu, self.state.omega])
        x_new = rk4_step(rhs, x, dt)
        self.state = AbsState(nu=float(x_new[0]), omega=float(x_new[1]),
                              t=self.state.t + dt)
