"""Dev probe: AISE derivative tracking on ramp/sinusoid, both theta timings."""
import math
import numpy as np

from ditherseek.aise import (AiseParams, AiseEstimator, init_state, residual,
                             assemble_regressor, markov_coefficients,
                             filter_signals, rls_update, vrf_lambda,
                             adapt_covariances, kf_data_assim, kf_forecast,
                             input_estimate)

EX2 = AiseParams(n_e=10, n_f=20, r_z=1.0, r_d=10.0, r_theta=1e-2, r_inf=1e4,
                 eta_vrf=0.001, tau_n=2, tau_d=10, alpha=0.02,
                 eta_l=1e-8, eta_u=1e4, beta=0.55, t_s=0.01)
EX1 = AiseParams(n_e=1, n_f=2, r_z=1.0, r_d=1e-8, r_theta=1e-7, r_inf=1e4,
                 eta_vrf=0.02, tau_n=5, tau_d=25, alpha=0.02,
                 eta_l=1e-6, eta_u=1.0, beta=0.5, t_s=1.0)


def step_with_timing(params, state, y, use_new_theta):
    import math as m
    k = state.k
    x_fc = state.x_fc
    z = residual(x_fc, y)
    state.z_count += 1
    delta = z - state.z_mean
    state.z_mean += delta / state.z_count
    state.z_m2 += delta * (z - state.z_mean)
    lam = vrf_lambda(state.eps_hist, params)
    phi = assemble_regressor(state, z, params.n_e)
    markov = markov_coefficients(state.gain_hist, params.n_f, params.t_s, k)
    phi_f, dhat_f = filter_signals(state.phi_hist, state.dhat_hist, markov, params.l_theta)
    p_inv_new, theta_new, eps = rls_update(state.p_inv, state.theta, phi_f, phi, z, dhat_f, lam, params)
    dhat = input_estimate(phi, theta_new if use_new_theta else state.theta)
    eta, v2 = adapt_covariances(state, params)
    x_da, k_da, p_da, p_fc_next = kf_data_assim(x_fc, state.p_fc, z, v2, eta)
    state.p_inv = p_inv_new; state.theta = theta_new
    state.x_da = x_da; state.k_da = k_da; state.p_da = p_da; state.p_fc = p_fc_next
    state.x_fc, _ = kf_forecast(x_da, dhat, params.t_s)
    state.eta = eta; state.v2 = v2; state.lam = lam
    state.phi_hist.appendleft(phi); state.dhat_hist.appendleft(dhat)
    state.z_hist.appendleft(z); state.gain_hist.appendleft(k_da)
    state.eps_hist.append(eps)
    state.k = k + 1
    return dhat


def run_signal(params, ys, use_new_theta):
    state = init_state(params)
    return np.array([step_with_timing(params, state, y, use_new_theta) for y in ys])


def report(name, dhat, truth, sl):
    err = dhat[sl] - truth[sl]
    print(f"  {name}: rmse={np.sqrt(np.mean(err**2)):.5f} "
          f"maxabs={np.max(np.abs(err)):.5f} last={dhat[-1]:.5f}")


ts = 0.01
ks = np.arange(2001)
ramp = ks * ts
print("ramp (truth 1), Ex2 params:")
for tag, flag in (("theta_new", True), ("theta_old", False)):
    d = run_signal(EX2, ramp, flag)
    report(tag, d, np.ones_like(ramp), slice(500, None))

t = ks * ts
sine = np.sin(2 * np.pi * 0.5 * t)
dsine = np.pi * np.cos(2 * np.pi * 0.5 * t)
print("sinusoid (truth pi*cos), Ex2 params, steps 500-2000:")
for tag, flag in (("theta_new", True), ("theta_old", False)):
    d = run_signal(EX2, sine, flag)
    report(tag, d, dsine, slice(500, 2001))

print("constant (truth 0), Ex2 params:")
for tag, flag in (("theta_new", True), ("theta_old", False)):
    d = run_signal(EX2, np.full(2001, 3.7), flag)
    report(tag, d, np.zeros(2001), slice(500, None))

print("constant (truth 0), Ex1 params (t_s=1):")
for tag, flag in (("theta_new", True), ("theta_old", False)):
    d = run_signal(EX1, np.full(2001, 3.7), flag)
    report(tag, d, np.zeros(2001), slice(500, None))
