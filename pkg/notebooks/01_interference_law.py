# %% [markdown]
# # Aggregate interference from a Poisson field
#
# Interferers are scattered as a planar Poisson process of density `lam`.
# Each contributes `exp(2 sigma G) / R**(2 b)` to the aggregate `A`. The sum
# is a totally skewed stable variable with characteristic exponent `1/b`.
# This script checks that by brute force and shows how the law changes with
# the path-loss exponent.

# %%
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from poissonfield import field, stable
from poissonfield.field import FieldModel

# %% [markdown]
# ## Free-space amplitude loss, no shadowing
#
# With `b = 2` the exponent is one half and the CDF is the Levy closed form
# `erfc(gamma / sqrt(2 x))`.

# %%
lam, b, sigma = 0.1, 2.0, 0.0
params = stable.interference_stable_params(lam, b, sigma)
model = FieldModel(lam, b, sigma)
print(f"gamma = {params.gamma:.6f}, simulation radius = {model.radius:.1f} m")

sample = field.empirical_A_cdf(model, 50_000, seed=1)
x = np.logspace(-3, 3, 200)
ecdf = np.searchsorted(sample, x, side="right") / sample.size
levy = [stable.levy_cdf(params.gamma, v) for v in x]

fig, ax = plt.subplots()
ax.semilogx(x, ecdf, label="field simulation")
ax.semilogx(x, levy, "--", label="Levy closed form")
ax.set_xlabel("A")
ax.set_ylabel("P{A <= x}")
ax.legend()
fig.savefig("interference_levy.svg")

# %% [markdown]
# ## Other exponents and shadowing
#
# For `b != 2` there is no closed form, so the CDF comes from numerical
# inversion of the characteristic function. Shadowing only rescales the
# dispersion by `exp(2 sigma^2 / b^2)`.

# %%
fig, ax = plt.subplots()
for b_, s_ in [(1.5, 0.0), (1.5, 0.5), (2.5, 0.5)]:
    p = stable.interference_stable_params(0.05, b_, s_)
    sample = field.empirical_A_cdf(FieldModel(0.05, b_, s_), 20_000, seed=2)
    d = field.ks_distance(sample, lambda v: stable.cdf(p, v))
    print(f"b={b_}, sigma={s_}: alpha={p.alpha:.3f}, gamma={p.gamma:.4f}, KS <= {d:.4f}")
    ax.semilogx(x, stable.cdf(p, x), label=f"b={b_}, sigma={s_}")
ax.set_xlabel("A")
ax.set_ylabel("P{A <= x}")
ax.legend()
fig.savefig("interference_general_b.svg")
