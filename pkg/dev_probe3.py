"""Dev probe: noiseless Example-1/2 closed loops, both controller modes."""
import time
import numpy as np

from ditherseek.aise import AiseParams
from ditherseek.esc import EscParams, GradientPath
from ditherseek.harness import (AbsConfig, QuadraticConfig, RunConfig,
                                run_closed_loop)
from ditherseek.plants import AbsParams

ESC1 = dict(k_g=1.0, k_esc=-1.5, omega_esc=np.pi / 4, a_esc=0.2,
            omega_l=2 * np.pi / 1000, omega_h=2 * np.pi / 100, u0=10.0, t_s=1.0)
AISE1 = AiseParams(n_e=1, n_f=2, r_z=1.0, r_d=1e-8, r_theta=1e-7, r_inf=1e4,
                   eta_vrf=0.02, tau_n=5, tau_d=25, alpha=0.02,
                   eta_l=1e-6, eta_u=1.0, beta=0.5, t_s=1.0)

ESC2 = dict(k_g=1.0, k_esc=1500.0, omega_esc=10.0, a_esc=0.01,
            omega_l=8.0, omega_h=6.0, u0=0.1, t_s=0.01)
AISE2 = AiseParams(n_e=10, n_f=20, r_z=1.0, r_d=10.0, r_theta=1e-2, r_inf=1e4,
                   eta_vrf=0.001, tau_n=2, tau_d=10, alpha=0.02,
                   eta_l=1e-8, eta_u=1e4, beta=0.55, t_s=0.01)

ABS = AbsParams()


def quad_config(mode):
    esc = EscParams(mode=mode, **ESC1)
    return RunConfig(plant=QuadraticConfig(), esc=esc,
                     aise=AISE1 if mode is GradientPath.AISE else None,
                     noise=None, horizon=6000, rmse_k_init=2000,
                     rmse_k_end=6000, u_opt=0.0)


def abs_config(mode):
    esc = EscParams(mode=mode, **ESC2)
    return RunConfig(plant=AbsConfig(params=ABS, nu0=336 / 3.6, omega0=1120 / 3.6),
                     esc=esc, aise=AISE2 if mode is GradientPath.AISE else None,
                     noise=None, horizon=5000, rmse_k_init=500,
                     rmse_k_end=None, u_opt=0.25)


for mode in (GradientPath.HPF, GradientPath.AISE):
    t0 = time.time()
    traj = run_closed_loop(quad_config(mode))
    dt = time.time() - t0
    tail = np.abs(traj["u"][2000:])
    print(f"quadratic {mode.value}: rmse={traj.rmse:.4f} max|u| k>=2000 {tail.max():.4f} "
          f"u_end={traj['u'][-1]:.4f} [{dt:.2f}s]")

for mode in (GradientPath.HPF, GradientPath.AISE):
    t0 = time.time()
    traj = run_closed_loop(abs_config(mode))
    dt = time.time() - t0
    print(f"abs {mode.value}: rmse={traj.rmse:.5f} t_stop={traj.t_stop} stopped={traj.stopped} "
          f"u_end={traj['u'][-1]:.4f} mu_end={traj['mu'][-1]:.4f} [{dt:.2f}s]")
