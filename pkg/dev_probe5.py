"""Dev probe: step-by-step trace of the ABS + ESC(HPF) loop."""
import numpy as np
from ditherseek.esc import EscParams, GradientPath
from ditherseek.harness import AbsConfig, RunConfig, run_closed_loop
from ditherseek.plants import AbsParams

esc = EscParams(k_g=1.0, k_esc=1500.0, omega_esc=10.0, a_esc=0.01,
                omega_l=8.0, omega_h=6.0, u0=0.1, t_s=0.01,
                mode=GradientPath.HPF)
cfg = RunConfig(plant=AbsConfig(params=AbsParams(), nu0=336 / 3.6, omega0=1120 / 3.6),
                esc=esc, aise=None, noise=None, horizon=5000,
                rmse_k_init=500, rmse_k_end=None, u_opt=0.25)
traj = run_closed_loop(cfg)
for k in list(range(0, 400, 25)) + list(range(400, 3400, 200)):
    if k >= len(traj):
        break
    print(f"k={k:5d} t={traj['t'][k]:6.2f} u={traj['u'][k]: .4f} lam={traj['lambda'][k]: .4f} "
          f"mu={traj['mu'][k]: .4f} y_h={traj['y_h'][k]: .2e} y_l={traj['y_l'][k]: .2e} "
          f"y_esc={traj['y_esc'][k]: .4e} nu={traj['nu'][k]:7.2f}")
