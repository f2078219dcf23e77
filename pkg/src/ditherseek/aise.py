"""Adaptive input and state estimation (AISE): a noise-robust streaming
differentiator.

The measured signal is modelled as the output of a discrete-time integrator
(A = 1, B = T_s, C = 1) driven by an unknown input, which is the signal's
time derivative.  A scalar Kalman filter tracks the integrator state while a
recursive-least-squares (RLS) subsystem with variable-rate forgetting
estimates the unknown input from the filter residuals.  The process- and
sensor-noise covariances of the Kalman filter are selected online by matching
the predicted residual variance to the observed one.

Typical use::

    est = AiseEstimator(AiseParams(n_e=1, n_f=2, r_z=1.0, r_d=1e-8,
                                   r_theta=1e-7, r_inf=1e4, eta_vrf=0.02,
                                   tau_n=5, tau_d=25, alpha=0.02,
                                   eta_l=1e-6, eta_u=1.0, beta=0.5, t_s=1.0))
    for y in samples:
        dydt = est.step(y)
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from scipy import stats

logger = logging.getLogger(__name__)

# Forgetting-factor floor: prevents single-step covariance blow-up.
LAMBDA_MIN = 0.01


def _as_spd_matrix(value, size: int, name: str) -> np.ndarray:
    """Accept a positive scalar (v * I) or a full SPD matrix."""
    if np.isscalar(value):
        v = float(value)
        if v <= 0.0:
            raise ValueError(f"{name} must be positive, got {v}")
        return v * np.eye(size)
    mat = np.asarray(value, dtype=float)
    if mat.shape != (size, size):
        raise ValueError(f"{name} must be {size}x{size}, got {mat.shape}")
    if not np.allclose(mat, mat.T):
        raise ValueError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(mat).min() <= 0.0:
        raise ValueError(f"{name} must be positive definite")
    return mat


@dataclass(frozen=True)
class AiseParams:
    """Tuning parameters of the adaptive differentiator.

    Args:
        n_e: order of the input-estimation subsystem (>= 1).
        n_f: window length of the residual-shaping filter (>= 1).
        r_z: weight on the retrospective residual (> 0).
        r_d: weight on the input-estimate magnitude (> 0).
        r_theta: coefficient regularization; scalar v means v * I.
        r_inf: covariance resetting matrix; scalar v means v * I.
        eta_vrf: gain mapping the variance-test excess to forgetting.
        tau_n: short-term residual window (>= 1).
        tau_d: long-term residual window (> tau_n).
        alpha: significance level of the variance-ratio test, in (0, 1).
        eta_l, eta_u: process-noise search bounds, 0 <= eta_l <= eta_u.
        beta: interpolation weight of the covariance-matching target, in [0, 1].
        t_s: sample time in seconds (> 0).
    """

    n_e: int
    n_f: int
    r_z: float
    r_d: float
    r_theta: float | np.ndarray
    r_inf: float | np.ndarray
    eta_vrf: float
    tau_n: int
    tau_d: int
    alpha: float
    eta_l: float
    eta_u: float
    beta: float
    t_s: float

    def __post_init__(self):
        if self.n_e < 1:
            raise ValueError("n_e must be a positive integer")
        if self.n_f < 1:
            raise ValueError("n_f must be a positive integer")
        if self.r_z <= 0.0 or self.r_d <= 0.0:
            raise ValueError("r_z and r_d must be strictly positive")
        if self.eta_vrf <= 0.0:
            raise ValueError("eta_vrf must be strictly positive")
        if self.tau_n < 1:
            raise ValueError("tau_n must be >= 1")
        if self.tau_d <= self.tau_n:
            raise ValueError("tau_d must exceed tau_n")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 <= self.eta_l <= self.eta_u:
            raise ValueError("need 0 <= eta_l <= eta_u")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.t_s <= 0.0:
            raise ValueError("t_s must be positive")
        # Validate matrix-valued weights eagerly so bad configs fail fast.
        _as_spd_matrix(self.r_theta, self.l_theta, "r_theta")
        _as_spd_matrix(self.r_inf, self.l_theta, "r_inf")

    @property
    def l_theta(self) -> int:
        """Length of the coefficient vector: 2 * n_e + 1."""
        return 2 * self.n_e + 1

    def r_theta_matrix(self) -> np.ndarray:
        return _as_spd_matrix(self.r_theta, self.l_theta, "r_theta")

    def r_inf_matrix(self) -> np.ndarray:
        return _as_spd_matrix(self.r_inf, self.l_theta, "r_inf")

    def eta_grid(self) -> np.ndarray:
        """Process-noise candidates: the interval endpoints.

        The variance gap is affine in eta, so the positive-gap set is spanned
        by its values at the endpoints; a denser grid only blurs the
        selection between the two noise-attribution extremes.
        """
        if self.eta_l == self.eta_u:
            return np.array([self.eta_l])
        return np.array([self.eta_l, self.eta_u])


@dataclass
class AiseState:
    """Mutable per-stream state of the differentiator.

    Histories are deques with the most recent entry first, so ``dhat_hist[i]``
    is the estimate from i+1 steps ago.  ``eps_hist`` appends on the right
    (oldest first) because the variance test slices trailing windows.
    """

    theta: np.ndarray
    p_inv: np.ndarray  # information matrix; covariance P = inv(p_inv)
    x_fc: float = 0.0
    x_da: float = 0.0
    p_fc: float = 0.0
    p_da: float = 0.0
    k_da: float = 0.0
    eta: float = 0.0
    v2: float = 0.0
    lam: float = 1.0
    k: int = 0
    # residual running statistics (one-pass Welford recurrences)
    z_count: int = 0
    z_mean: float = 0.0
    z_m2: float = 0.0
    dhat_hist: deque = field(default_factory=deque)
    z_hist: deque = field(default_factory=deque)
    phi_hist: deque = field(default_factory=deque)
    gain_hist: deque = field(default_factory=deque)
    eps_hist: deque = field(default_factory=deque)

    @property
    def p(self) -> np.ndarray:
        """Coefficient covariance matrix (inverse of the information matrix)."""
        return np.linalg.inv(self.p_inv)

    @property
    def s_hat(self) -> float | None:
        """Running sample variance of the residuals; None until two samples."""
        if self.z_count < 2:
            return None
        return self.z_m2 / (self.z_count - 1)


def init_state(params: AiseParams) -> AiseState:
    """Fresh state: theta = 0, P = r_theta^-1, zero filter state, empty histories."""
    n = params.l_theta
    hist = params.n_e + params.n_f
    return AiseState(
        theta=np.zeros(n),
        p_inv=params.r_theta_matrix().copy(),
        eta=params.eta_l,
        dhat_hist=deque(maxlen=hist),
        z_hist=deque(maxlen=hist),
        phi_hist=deque(maxlen=params.n_f),
        gain_hist=deque(maxlen=max(params.n_f - 1, 1)),
        eps_hist=deque(maxlen=params.tau_d),
    )


def kf_forecast(x_da: float, dhat_prev: float, t_s: float) -> tuple[float, float]:
    """One-step state forecast of the integrator model.

    Returns (x_fc, y_fc); with A = C = 1 and B = t_s the forecast output
    equals the forecast state.
    """
    x_fc = x_da + t_s * dhat_prev
    return x_fc, x_fc


def residual(y_fc: float, y_meas: float) -> float:
    """Forecast-minus-measurement residual (note the sign convention)."""
    return y_fc - y_meas


def input_estimate(phi: np.ndarray, theta: np.ndarray) -> float:
    """Inner product of the regressor row with the coefficient vector."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if phi.shape != theta.shape:
        raise ValueError(f"regressor/coefficient size mismatch: {phi.shape} vs {theta.shape}")
    return float(phi @ theta)


def assemble_regressor(state: AiseState, z: float, n_e: int) -> np.ndarray:
    """Regressor row [dhat_{k-1}..dhat_{k-n_e}, z_k, z_{k-1}..z_{k-n_e}].

    Entries from before step 0 are zero.
    """
    phi = np.zeros(2 * n_e + 1)
    for i, d in enumerate(state.dhat_hist):
        if i >= n_e:
            break
        phi[i] = d
    phi[n_e] = z
    for i, zi in enumerate(state.z_hist):
        if i >= n_e:
            break
        phi[n_e + 1 + i] = zi
    return phi


def markov_coefficients(gain_hist, n_f: int, t_s: float, k: int) -> np.ndarray:
    """Impulse coefficients H_i of the residual-shaping filter at step k.

    H_1 = t_s once k >= 1; H_i for i >= 2 chains the closed-loop factors
    (1 + K_da) over the previous i-1 steps; H_i = 0 whenever i > k.
    ``gain_hist[0]`` must be the Kalman gain from step k-1.
    """
    h = np.zeros(n_f)
    if k >= 1:
        h[0] = t_s
    prod = t_s
    for i in range(2, n_f + 1):
        if i > k:
            break
        prod *= 1.0 + gain_hist[i - 2]
        h[i - 1] = prod
    return h


def filter_signals(phi_hist, dhat_hist, markov: np.ndarray,
                   l_theta: int) -> tuple[np.ndarray, float]:
    """Filtered regressor and filtered input estimate.

    Both are convolutions of the trailing histories with the Markov
    coefficients; missing history entries contribute zero.
    """
    phi_f = np.zeros(l_theta)
    dhat_f = 0.0
    for i, h in enumerate(markov):
        if h == 0.0:
            continue
        if i < len(phi_hist):
            phi_f += h * phi_hist[i]
        if i < len(dhat_hist):
            dhat_f += h * dhat_hist[i]
    return phi_f, dhat_f


def vrf_lambda(eps_window, params: AiseParams) -> float:
    """Forgetting factor from the variance-ratio (F) test on residual errors.

    Compares the trailing short-window variance of the 2-vector residual
    errors against the long-window variance.  Returns 1 until the window
    holds tau_d entries, when the long-window variance vanishes, or when the
    test does not reject; otherwise maps the excess over the rejection
    threshold to a factor in [LAMBDA_MIN, 1).
    """
    if len(eps_window) < params.tau_d:
        return 1.0
    eps = np.asarray(eps_window, dtype=float)

    def trace_var(block: np.ndarray) -> float:
        centered = block - block.mean(axis=0)
        return float((centered * centered).sum()) / len(block)

    var_long = trace_var(eps[-params.tau_d:])
    if var_long == 0.0:
        return 1.0
    f_stat = trace_var(eps[-params.tau_n:]) / var_long
    threshold = stats.f.ppf(1.0 - params.alpha, params.tau_n, params.tau_d)
    if f_stat <= threshold:
        return 1.0
    lam = 1.0 / (1.0 + params.eta_vrf * (f_stat - threshold))
    return max(lam, LAMBDA_MIN)


def rls_update(p_inv: np.ndarray, theta: np.ndarray, phi_f: np.ndarray,
               phi: np.ndarray, z: float, dhat_f: float, lam: float,
               params: AiseParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One RLS step on the stacked retrospective regression.

    Works in information form: p_inv is the inverse of the coefficient
    covariance.  Returns (p_inv', theta', eps) where eps is the 2-vector
    residual error fed to the forgetting-factor test.  If the updated
    information matrix loses positive definiteness it is reset to r_theta
    (covariance reset to r_theta^-1) with a warning.
    """
    phi_t = np.vstack((phi_f, phi))                 # (2, l_theta)
    z_t = np.array([z - dhat_f, 0.0])
    r_t = np.array([params.r_z, params.r_d])
    eps = z_t + phi_t @ theta

    p_inv_new = lam * p_inv + (1.0 - lam) * params.r_inf_matrix() \
        + phi_t.T @ (r_t[:, None] * phi_t)
    p_inv_new = 0.5 * (p_inv_new + p_inv_new.T)
    try:
        chol = sla.cho_factor(p_inv_new, lower=True)
    except np.linalg.LinAlgError:
        logger.warning("information matrix lost positive definiteness; resetting")
        p_inv_new = params.r_theta_matrix().copy()
        chol = sla.cho_factor(p_inv_new, lower=True)
    theta_new = theta - sla.cho_solve(chol, phi_t.T @ (r_t * eps))
    return p_inv_new, theta_new, eps


def select_covariances(s_hat: float, p_da_prev: float, eta_grid: np.ndarray,
                       beta: float) -> tuple[float, float]:
    """Pick (eta, v2) by covariance matching over a candidate grid.

    The gap s_hat - (p_da_prev + eta) is evaluated on the grid.  If any
    candidate leaves a positive gap, the target is the beta-weighted blend of
    the smallest and largest positive gaps and v2 absorbs the gap at the
    chosen eta; otherwise v2 = 0 and eta minimizes the absolute gap.  Ties
    resolve to the smaller eta (grid is ascending, argmin takes the first).
    """
    gap = s_hat - (p_da_prev + eta_grid)
    positive = gap > 0.0
    if positive.any():
        target = beta * gap[positive].min() + (1.0 - beta) * gap[positive].max()
        idx = int(np.argmin(np.abs(gap - target)))
        return float(eta_grid[idx]), float(gap[idx])
    idx = int(np.argmin(np.abs(gap)))
    return float(eta_grid[idx]), 0.0


def adapt_covariances(state: AiseState, params: AiseParams) -> tuple[float, float]:
    """Process/sensor noise levels for the current step.

    Uses the running residual variance and the previous data-assimilation
    covariance; before any variance is available the previous values are
    kept.
    """
    s_hat = state.s_hat
    if state.k == 0 or s_hat is None:
        return state.eta, state.v2
    return select_covariances(s_hat, state.p_da, params.eta_grid(), params.beta)


def kf_data_assim(x_fc: float, p_fc: float, z: float, v2: float,
                  eta: float) -> tuple[float, float, float, float]:
    """Kalman gain, data assimilation, and covariance propagation.

    Returns (x_da, k_da, p_da, p_fc_next).  A vanishing innovation variance
    (no prior uncertainty and no measurement noise) yields zero gain.
    """
    denom = p_fc + v2
    k_da = 0.0 if denom <= 0.0 else -p_fc / denom
    x_da = x_fc + k_da * z
    p_da = (1.0 + k_da) * p_fc
    return x_da, k_da, p_da, p_da + eta


def aise_step(params: AiseParams, state: AiseState, y: float) -> float:
    """Advance the differentiator by one sample and return the derivative
    estimate.

    The in-step order is: forecast output and residual; forgetting factor;
    regressor assembly; signal filtering; RLS coefficient update; input
    estimate; covariance adaptation; data assimilation; forecast propagation;
    history pushes.  Non-finite measurements are rejected.
    """
    if not math.isfinite(y):
        raise ValueError(f"non-finite measurement at step {state.k}: {y}")

    k = state.k
    x_fc = state.x_fc
    z = residual(x_fc, y)

    # running residual statistics (Welford)
    state.z_count += 1
    delta = z - state.z_mean
    state.z_mean += delta / state.z_count
    state.z_m2 += delta * (z - state.z_mean)

    lam = vrf_lambda(state.eps_hist, params)
    phi = assemble_regressor(state, z, params.n_e)
    markov = markov_coefficients(state.gain_hist, params.n_f, params.t_s, k)
    phi_f, dhat_f = filter_signals(state.phi_hist, state.dhat_hist, markov,
                                   params.l_theta)
    p_inv_new, theta_new, eps = rls_update(state.p_inv, state.theta, phi_f,
                                           phi, z, dhat_f, lam, params)
    dhat = input_estimate(phi, theta_new)
    eta, v2 = adapt_covariances(state, params)
    x_da, k_da, p_da, p_fc_next = kf_data_assim(x_fc, state.p_fc, z, v2, eta)

    state.p_inv = p_inv_new
    state.theta = theta_new
    state.x_da = x_da
    state.k_da = k_da
    state.p_da = p_da
    state.p_fc = p_fc_next
    state.x_fc, _ = kf_forecast(x_da, dhat, params.t_s)
    state.eta = eta
    state.v2 = v2
    state.lam = lam
    state.phi_hist.appendleft(phi)
    state.dhat_hist.appendleft(dhat)
    state.z_hist.appendleft(z)
    state.gain_hist.appendleft(k_da)
    state.eps_hist.append(eps)
    state.k = k + 1
    return dhat


class AiseEstimator:
    """Streaming differentiator: feed samples, get derivative estimates.

    With ``validate=True`` every step asserts the internal invariants
    (positive-definite coefficient covariance, forgetting factor in (0, 1],
    Kalman gain in [-1, 0], covariance contraction, bounded noise levels);
    intended for tests and acceptance runs.  ``tap``, when set, receives one
    CSV row per step with the internals (k, z, lambda, eta, v2, then theta).
    """

    def __init__(self, params: AiseParams, validate: bool = False, tap=None):
        self.params = params
        self.state = init_state(params)
        self.validate = validate
        self.tap = tap

    def step(self, y: float) -> float:
        dhat = aise_step(self.params, self.state, y)
        if self.validate:
            self.check_invariants()
        if self.tap is not None:
            s = self.state
            fields = [s.k - 1, s.z_hist[0], s.lam, s.eta, s.v2, *s.theta]
            self.tap(",".join(f"{x:.17g}" for x in fields))
        return dhat

    def check_invariants(self) -> None:
        s = self.state
        p = self.params
        if not np.allclose(s.p_inv, s.p_inv.T):
            raise AssertionError("information matrix not symmetric")
        if np.linalg.eigvalsh(s.p_inv).min() <= 0.0:
            raise AssertionError("information matrix not positive definite")
        if not 0.0 < s.lam <= 1.0:
            raise AssertionError(f"forgetting factor out of range: {s.lam}")
        if not -1.0 <= s.k_da <= 0.0:
            raise AssertionError(f"Kalman gain out of range: {s.k_da}")
        if s.p_da < 0.0 or s.p_fc < 0.0:
            raise AssertionError("negative filter covariance")
        if s.v2 < 0.0:
            raise AssertionError(f"negative sensor-noise level: {s.v2}")
        if not p.eta_l <= s.eta <= p.eta_u:
            raise AssertionError(f"process-noise level out of bounds: {s.eta}")

    def reset(self) -> None:
        self.state = init_state(self.params)
