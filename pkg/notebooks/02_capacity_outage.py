# %% [markdown]
# # Capacity outage of a probe link
#
# A probe link at distance `r0` sees Rayleigh fading, log-normal shadowing and
# the aggregate interference of the field. Its fading-averaged capacity falls
# below the target rate `R` exactly when the SINR drops below a threshold
# `eta*`, so outage reduces to a comparison per Monte Carlo trial.

# %%
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from poissonfield import capacity
from poissonfield.capacity import ProbeLink

# %% [markdown]
# Two closed forms for the ergodic capacity circulate. They differ only in
# the argument of the exponential integral. The rederived one matches direct
# quadrature; both are available.

# %%
for eta in (0.1, 1.0, 10.0):
    print(eta, capacity.capacity_closed_form(eta, "published"),
          capacity.capacity_closed_form(eta, "rederived"), capacity.capacity_numeric(eta))
print("eta* for R = 1:", capacity.invert_capacity(1.0))

# %% [markdown]
# ## Outage against SNR for several interference levels

# %%
snr_db = np.linspace(0, 40, 21)
fig, ax = plt.subplots()
for inr in ("-inf", 10.0, 20.0, 30.0):
    link = ProbeLink.from_db(20.0, inr, 10.0, rate=1.0, lam=0.01)
    ests = capacity.sweep(link, "snr", [capacity.db_to_linear(s) for s in snr_db], 50_000, seed=3)
    ax.semilogy(snr_db, [max(e.p_out, 1e-5) for e in ests], label=f"INR = {inr} dB")
ax.set_xlabel("SNR (dB)")
ax.set_ylabel("capacity outage probability")
ax.legend()
fig.savefig("outage_vs_snr.svg")

# %% [markdown]
# ## Outage against rate for several densities

# %%
rates = np.linspace(0.1, 6, 30)
fig, ax = plt.subplots()
for lam in (1e-4, 1e-3, 1e-2, 1e-1):
    link = ProbeLink.from_db(20.0, 20.0, 10.0, lam=lam)
    ests = capacity.sweep(link, "rate", rates, 50_000, seed=4)
    ax.plot(rates, [e.p_out for e in ests], label=f"lambda = {lam:g}")
ax.set_xlabel("rate (bit/s/Hz)")
ax.set_ylabel("capacity outage probability")
ax.legend()
fig.savefig("outage_vs_rate.svg")
