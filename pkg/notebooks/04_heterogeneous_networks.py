# %% [markdown]
# # Mixed pulse shapes and time-varying channels
#
# When a fraction `p_k` of the nodes uses pulse shape `k`, the sub-fields are
# independent and share the same exponent, so their dispersions simply add.
# A time-varying channel smears each emission by its Doppler spectrum, which
# leaves the total power unchanged.

# %%
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from poissonfield import spectrum, stable
from poissonfield.spectrum import DopplerSpectrum, EmissionModel, PulseShape, SpectralMask

T = 1e-6
sigma = stable.sigma_from_db(10.0)
mask = SpectralMask.constant(-60.0)
square = EmissionModel(spectrum.dbm_to_watt(10.0), PulseShape("square", T), 0.1, 2.0, sigma)
hanning = EmissionModel(spectrum.dbm_to_watt(10.0), PulseShape("hanning", T), 0.1, 2.0, sigma)

# %% [markdown]
# ## Outage as the share of Hanning nodes grows

# %%
f = np.linspace(0.05, 4, 200) / T
fig, ax = plt.subplots()
for share in (0.0, 0.5, 0.9, 1.0):
    nets = [(1 - share, square), (share, hanning)]
    vals = [spectrum.sop_heterogeneous(nets, 0.1, mask, v) for v in f]
    ax.semilogy(f * T, np.maximum(vals, 1e-8), label=f"Hanning share {share:g}")
ax.set_xlabel("f T")
ax.set_ylabel("spectral outage probability")
ax.legend()
fig.savefig("heterogeneous_sop.svg")

# %% [markdown]
# ## Doppler spreading fills the spectral nulls

# %%
tx = lambda v: spectrum.tx_psd(0.01, PulseShape("square", T), v)
grid = np.linspace(-4 / T, 4 / T, 1601)
fig, ax = plt.subplots()
ax.semilogy(grid * T, tx(grid), label="time-invariant")
for fd in (0.1 / T, 0.5 / T):
    ax.semilogy(grid * T, spectrum.wssus_output_psd(DopplerSpectrum.jakes(fd), tx, grid),
                label=f"Jakes, f_d T = {fd * T:g}")
ax.set_xlabel("f T")
ax.set_ylabel("PSD (W/Hz)")
ax.legend()
fig.savefig("doppler_psd.svg")
