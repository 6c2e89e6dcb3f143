# %% [markdown]
# # Random telegraph noise
#
# A bistable fluctuator flips between +1 and -1 at rate gamma. A qubit
# coupled to it with strength nu picks up the phase eta(t) = nu * int theta.
# Its characteristic function beta_kappa(t) = <cos(kappa eta)> drives every
# noisy state in this package.

# %%
import numpy as np

from qnoise import NoiseParams, beta, sample_phases, sample_trajectory

t = np.linspace(0, 20, 201)

# %% [markdown]
# One realization. The phase is integrated exactly between switches, so it is
# piecewise linear with slope +/- nu.

# %%
traj = sample_trajectory(NoiseParams(gamma=0.5), t, rng_seed=1)
print("initial sign:", traj.theta0)
print("first switches:", np.round(traj.switch_times[:5], 3))
print("eta at t=0,5,10:", traj.eta[[0, 50, 100]])

# %% [markdown]
# Slow switching (gamma/nu = 0.1) leaves beta oscillating, fast switching
# (gamma/nu = 10) makes it decay monotonically. Compare each closed form with
# the average over 20 000 sampled phases.

# %%
for ratio in (0.1, 10.0):
    p = NoiseParams.from_ratio(ratio)
    eta = sample_phases(p, t, 20000, master_seed=7)[:, 0, :]
    for kappa in (2, 4, 8):
        mc = np.cos(kappa * eta).mean(axis=0)
        err = np.abs(mc - beta(kappa, p, t)).max()
        print(f"gamma/nu={ratio:5}  kappa={kappa}  markovian={p.is_markovian(kappa)!s:5}  max|MC-beta|={err:.4f}")

# %% [markdown]
# At gamma = kappa*nu the two branches meet; the limit exp(-gamma t)(1 + gamma t)
# is used there directly.

# %%
for g in (1.999999, 2.0, 2.000001):
    print(g, beta(2, NoiseParams(gamma=g), 3.0))
