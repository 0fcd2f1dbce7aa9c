"""Skewed stable law of the aggregate interference.

Parameterization: ``S(alpha, beta, gamma)`` with characteristic function

    phi(w) = exp(-gamma |w|^alpha (1 - j beta sign(w) tan(pi alpha / 2)))     alpha != 1
    phi(w) = exp(-gamma |w| (1 + j (2/pi) beta sign(w) ln|w|))               alpha == 1

so ``gamma`` is a dispersion (scale ** alpha) and there is no location term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import DEFAULT_QUAD, QuadratureSpec, erfc_fn, gamma_fn, integrate

# Right-tail probability below which cdf() returns exactly 1.
TAIL_CUTOFF = 1e-9
# Below this total phase of e^{-jwx} over the support of phi, cdf()
# integrates directly instead of with Fourier weights.
_MAX_PHASE = 2000.0


@dataclass(frozen=True)
class StableParams:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not 0 < self.alpha <= 2:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not -1 <= self.beta <= 1:
            raise ValueError(f"beta must lie in [-1, 1], got {self.beta}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")

    @property
    def scale(self) -> float:
        """Scale parameter ``gamma ** (1/alpha)``."""
        return self.gamma ** (1.0 / self.alpha)

    def char_fn(self, w):
        w = np.asarray(w, dtype=float)
        aw = np.abs(w)
        if self.alpha == 1:
            with np.errstate(divide="ignore", invalid="ignore"):
                logw = np.where(aw > 0, np.log(aw), 0.0)
            expo = -self.gamma * aw * (1 + 1j * (2 / np.pi) * self.beta * np.sign(w) * logw)
        else:
            t = math.tan(math.pi * self.alpha / 2)
            expo = -self.gamma * aw ** self.alpha * (1 - 1j * self.beta * np.sign(w) * t)
        return np.exp(expo)


def cx_constant(x: float) -> float:
    """``C_x = (1 - x) / (Gamma(2 - x) cos(pi x / 2))``, ``2/pi`` at ``x = 1``."""
    if not 0 < x < 2:
        raise ValueError(f"C_x is defined for 0 < x < 2, got {x}")
    if x == 1:
        return 2 / math.pi
    return (1 - x) / (gamma_fn(2 - x) * math.cos(math.pi * x / 2))


def interference_stable_params(lam: float, b: float, sigma: float) -> StableParams:
    """Stable law of the aggregate interference for a Poisson field.

    Parameters
    ----------
    lam : float
        Interferer density in nodes per m^2.
    b : float
        Amplitude loss exponent, must exceed 1.
    sigma : float
        Shadowing coefficient in nepers (see :func:`sigma_from_db`).
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if not b > 1:
        raise ValueError("the aggregate interference is stable only for b > 1")
    if not sigma >= 0:
        raise ValueError("sigma must be non-negative")
    alpha = 1.0 / b
    gamma = lam * math.pi / cx_constant(alpha) * math.exp(2 * sigma ** 2 / b ** 2)
    return StableParams(alpha, 1.0, gamma)


def sigma_from_db(sigma_db: float) -> float:
    """Shadowing in nepers from its dB value: ``sigma = ln(10)/20 * sigma_db``."""
    return math.log(10) / 20 * sigma_db


def sample(params: StableParams, rng: np.random.Generator, size=None):
    """Draw stable variates by the Chambers-Mallows-Stuck transform.

    Returns a float when ``size`` is None, otherwise an array. The output
    is ``scale * Z`` with ``Z`` standard, so reusing a generator state
    with a larger ``gamma`` yields pointwise larger (beta=1) draws.
    """
    v = rng.uniform(-np.pi / 2, np.pi / 2, size=size)
    w = rng.standard_exponential(size=size)
    z = _cms_standard(params.alpha, params.beta, v, w)
    if params.alpha == 1:
        s = params.gamma
        out = s * z + (2 / np.pi) * params.beta * s * math.log(s) if s > 0 else 0.0 * z
    else:
        out = params.scale * z
    return float(out) if size is None else out


def _cms_standard(alpha, beta, v, w):
    if alpha == 1:
        hp = np.pi / 2 + beta * v
        return (2 / np.pi) * (hp * np.tan(v) - beta * np.log((np.pi / 2) * w * np.cos(v) / hp))
    t = beta * math.tan(math.pi * alpha / 2)
    shift = math.atan(t) / alpha
    factor = (1 + t * t) ** (1 / (2 * alpha))
    arg = alpha * (v + shift)
    return (factor * np.sin(arg) / np.cos(v) ** (1 / alpha)
            * (np.cos(v - arg) / w) ** ((1 - alpha) / alpha))


def levy_cdf(gamma: float, x: float) -> float:
    """CDF of ``S(1/2, 1, gamma)``: ``erfc(gamma / sqrt(2 x))`` for ``x > 0``."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return erfc_fn(gamma / math.sqrt(2 * x))


def tail_estimate(params: StableParams, x: float) -> float:
    """Pareto approximation ``gamma C_alpha (1+beta)/2 x^-alpha`` of ``P{X > x}``."""
    if params.alpha >= 2 or x <= 0:
        return math.inf
    return params.gamma * cx_constant(params.alpha) * (1 + params.beta) / 2 * x ** -params.alpha


def cdf(params: StableParams, x, spec: QuadratureSpec = DEFAULT_QUAD):
    """``P{X <= x}`` by Gil-Pelaez inversion of the characteristic function.

    Accepts a scalar or an array of ``x``. For ``alpha < 1, beta = 1`` the
    support is ``[0, inf)`` and points ``x <= 0`` give exactly 0.
    """
    if np.ndim(x) == 0:
        return _cdf_scalar(params, float(x), spec)
    xs = np.asarray(x, dtype=float)
    return np.array([_cdf_scalar(params, float(v), spec) for v in xs.ravel()]).reshape(xs.shape)


def sf(params: StableParams, x, spec: QuadratureSpec = DEFAULT_QUAD):
    """Survival function ``1 - cdf``."""
    return 1.0 - cdf(params, x, spec)


def _cdf_scalar(params: StableParams, x: float, spec: QuadratureSpec) -> float:
    if params.gamma <= 0:
        raise ValueError("cdf requires gamma > 0")
    if math.isnan(x):
        return math.nan
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    alpha, beta = params.alpha, params.beta
    totally_skewed = alpha < 1 and beta == 1
    if totally_skewed and x <= 0:
        return 0.0
    if x > 0 and beta > -1 and tail_estimate(params, x) < TAIL_CUTOFF:
        return 1.0
    if totally_skewed:
        return _cdf_positive_stable(alpha, x / params.scale, spec)
    if alpha != 1:
        z, p = x / params.scale, StableParams(alpha, beta, 1.0)
    else:
        z, p = x, params
    return _cdf_real_axis(p, z, spec)


def _cdf_real_axis(params: StableParams, x: float, spec: QuadratureSpec) -> float:
    """Gil-Pelaez along the real frequency axis.

    Writing ``phi(w) = rho(w) exp(j psi(w))`` for ``w > 0``,

        Im[exp(-j w x) phi(w)] = rho sin(psi) cos(w x) - rho cos(psi) sin(w x),

    and each term goes to the oscillatory (Fourier-weighted) quadrature,
    which stays accurate however far into the tails ``x`` lies.
    """
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    skew = (beta * math.tan(math.pi * alpha / 2)) if alpha != 1 else 0.0

    def rho_psi(w):
        if alpha == 1:
            return math.exp(-gamma * w), -gamma * w * (2 / math.pi) * beta * math.log(w)
        wa = w ** alpha
        return math.exp(-gamma * wa), gamma * wa * skew

    def f_sin(w):
        if w <= 0.0:
            return 0.0
        r, p = rho_psi(w)
        return r * math.sin(p) / w

    def f_cos(w):
        if w <= 0.0:
            return 0.0
        r, p = rho_psi(w)
        return r * math.cos(p) / w

    def f_full(w):
        if w <= 0.0:
            return 0.0
        r, p = rho_psi(w)
        return r * math.sin(p - w * x) / w

    # Split at the characteristic-function knee so the near-origin
    # singularity and the decaying tail are handled separately; beyond
    # w_end the modulus is below e^-40.
    knee = gamma ** (-1.0 / alpha)
    w_end = (40.0 / gamma) ** (1.0 / alpha)
    if abs(x) * w_end < _MAX_PHASE:
        # Few oscillations before phi dies out: the weighted rules would
        # need ~1/|x| cycles to converge, plain quadrature does not.
        total = integrate(f_full, 0.0, knee, spec) + integrate(f_full, knee, w_end, spec)
    else:
        ax, sgn = abs(x), math.copysign(1.0, x)
        total = (integrate(f_sin, 0.0, knee, spec, weight="cos", wvar=ax)
                 + integrate(f_sin, knee, math.inf, spec, weight="cos", wvar=ax)
                 - sgn * integrate(f_cos, 0.0, knee, spec, weight="sin", wvar=ax)
                 - sgn * integrate(f_cos, knee, math.inf, spec, weight="sin", wvar=ax))
    return min(1.0, max(0.0, 0.5 - total / math.pi))


def _cdf_positive_stable(alpha: float, x: float, spec: QuadratureSpec) -> float:
    """Gil-Pelaez for ``S(alpha<1, 1, 1)`` with the frequency path rotated.

    The inversion integrand ``exp(-j w x) phi(w) / w`` continues
    analytically into the sector ``-theta_max < arg w < 0``, where both
    factors decay. Integrating along ``w = r exp(-j theta)`` removes the
    oscillation that otherwise makes large ``x`` intractable; the arc at
    infinity contributes ``theta``:

        F(x) = 1/2 + theta/pi - (1/pi) int_0^inf Im[g(r e^{-j theta})] dr / r.

    Substituting ``r = s ** (1/alpha)`` smooths the origin.
    """
    theta_max = min(math.pi / 2, math.pi / (2 * alpha) - math.pi / 2)
    theta = 0.5 * theta_max
    rot = complex(math.cos(theta), -math.sin(theta))
    rot_a = rot ** alpha
    coef = (1 - 1j * math.tan(math.pi * alpha / 2)) * rot_a
    jx = 1j * x * rot
    inv_a = 1.0 / alpha

    def integrand(s):
        if s <= 0.0:
            return 0.0
        r = s ** inv_a
        val = np.exp(-jx * r - coef * s)
        return val.imag / s

    # Rough extent of the integrand: the slower of the two decay scales.
    decay_phi = coef.real
    decay_x = x * math.sin(theta)
    s_hi = 50.0 / decay_phi
    if decay_x > 0:
        s_hi = min(s_hi, (50.0 / decay_x) ** alpha)
    s_hi = max(s_hi, 1e-300)
    total = integrate(integrand, 0.0, s_hi, spec) + integrate(integrand, s_hi, math.inf, spec)
    f = 0.5 + theta / math.pi - inv_a * total / math.pi
    return min(1.0, max(0.0, f))
