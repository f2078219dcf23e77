"""Dev probe: internal diagnostics of the AISE loop on a ramp."""
import numpy as np
from ditherseek.aise import AiseParams, AiseEstimator

EX2 = AiseParams(n_e=10, n_f=20, r_z=1.0, r_d=10.0, r_theta=1e-2, r_inf=1e4,
                 eta_vrf=0.001, tau_n=2, tau_d=10, alpha=0.02,
                 eta_l=1e-8, eta_u=1e4, beta=0.55, t_s=0.01)

est = AiseEstimator(EX2)
ts = 0.01
for k in range(2001):
    y = k * ts
    d = est.step(y)
    s = est.state
    if k in (1, 2, 3, 5, 10, 20, 50, 100, 200, 500, 1000, 2000):
        z = s.z_hist[0]
        print(f"k={k:5d} dhat={d: .6f} z={z: .6e} S_hat={s.s_hat if s.s_hat is not None else float('nan'): .3e} "
              f"eta={s.eta:.3e} v2={s.v2:.3e} k_da={s.k_da: .4f} p_fc={s.p_fc:.3e} p_da={s.p_da:.3e} lam={s.lam:.3f} "
              f"|theta|={np.linalg.norm(s.theta):.4f}")
