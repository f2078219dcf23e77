"""Dev probe: ABS inner loop under constant slip commands (no ESC)."""
import numpy as np
from ditherseek.plants import AbsParams, AbsPlant

P = AbsParams()

# slip tracking: lambda(t) - lambda_d should decay like exp(-c t)
plant = AbsPlant(P, nu0=336 / 3.6, omega0=1120 / 3.6)
lam0 = plant.slip_value()
lam_d = 0.25
vals = []
for k in range(120):
    plant.advance(lam_d, 0.01)
    vals.append((plant.state.t, plant.slip_value()))
t_half = 1.0 / P.c
lam_at = min(vals, key=lambda p: abs(p[0] - t_half))[1]
ratio = (lam_at - lam_d) / (lam0 - lam_d)
print(f"lambda(0)={lam0:.4f}  lambda(1/c)={lam_at:.6f} ratio={ratio:.6f} e^-1={np.exp(-1):.6f}")

# time-to-stop under constant lambda_d
for lam_d in (0.1, 0.2, 0.25, 0.3, 0.5, 1.0):
    plant = AbsPlant(P, nu0=336 / 3.6, omega0=1120 / 3.6)
    t_stop = None
    for k in range(5001):
        if plant.stopped():
            t_stop = plant.state.t
            break
        plant.advance(lam_d, 0.01)
    lam_end = (plant.state.nu - P.radius * plant.state.omega) / max(plant.state.nu, 1e-9)
    print(f"lambda_d={lam_d:.2f}: t_stop={t_stop}  final slip={lam_end:.4f}")
