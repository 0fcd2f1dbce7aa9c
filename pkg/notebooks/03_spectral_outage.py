# %% [markdown]
# # Spectral outage
#
# Every interferer emits a linearly modulated signal whose PSD is
# `P |G(f)|^2 / T`. The received aggregate PSD is that shape times the stable
# variable `A`, so the probability it exceeds a mask `m(f)` is one stable
# tail evaluation per frequency.

# %%
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from poissonfield import field, spectrum, stable
from poissonfield.field import FieldModel
from poissonfield.spectrum import EmissionModel, PulseShape, SpectralMask

T = 1e-6
sigma = stable.sigma_from_db(10.0)
mask = SpectralMask.constant(-60.0)
f = spectrum.figure_grid(T, n=801)

# %% [markdown]
# ## Pulse shape matters away from the carrier

# %%
fig, ax = plt.subplots()
for pulse in ("square", "hanning"):
    em = EmissionModel(spectrum.dbm_to_watt(10.0), PulseShape(pulse, T), 0.1, 2.0, sigma)
    curve = spectrum.sop_curve(em, mask, f)
    ax.semilogy(f * T, np.maximum(curve.sop, 1e-8), label=pulse)
ax.set_xlabel("f T")
ax.set_ylabel("spectral outage probability")
ax.legend()
fig.savefig("sop_vs_frequency.svg")

# %% [markdown]
# ## Cross-check at the carrier against a brute-force field

# %%
em = EmissionModel(spectrum.dbm_to_watt(10.0), PulseShape("square", T), 0.1, 2.0, sigma)
a = field.simulate_A(FieldModel(0.1, 2.0, sigma), 50_000, seed=5)
print("analytic:", spectrum.sop(em, mask, 0.0))
print("simulated:", np.mean(a > mask(0.0) / em.received_psd(0.0)))

# %% [markdown]
# ## Transmit power sweep at the carrier

# %%
power_dbm = np.linspace(-40, 40, 41)
fig, ax = plt.subplots()
for lam in (0.01, 0.1, 1.0):
    vals = [spectrum.sop(EmissionModel(spectrum.dbm_to_watt(p), PulseShape("square", T), lam, 2.0, sigma),
                         mask, 0.0) for p in power_dbm]
    ax.plot(power_dbm, vals, label=f"lambda = {lam:g}")
ax.set_xlabel("transmit power (dBm)")
ax.set_ylabel("spectral outage probability")
ax.legend()
fig.savefig("sop_vs_power.svg")
