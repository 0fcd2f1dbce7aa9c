"""SINR, ergodic capacity with receiver CSI, and capacity outage of the probe link."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from . import stable
from ._streams import chunk_bounds, chunk_generator, map_chunks
from .numerics import DEFAULT_QUAD, QuadratureSpec, exp_e1, integrate

Variant = Literal["published", "rederived"]

# Sentinel for INR = -inf dB (no interference).
NO_INTERFERENCE = None
CHUNK_SIZE = 8192

_LN2 = math.log(2)
_ETA_MAX = 1e300


def db_to_linear(x_db) -> float:
    """``10**(x/10)``; accepts ``-inf`` (or the string ``"-inf"``) for zero."""
    if isinstance(x_db, str):
        x_db = float(x_db)
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class ProbeLink:
    """Probe link and interferer field seen by the probe receiver.

    ``inr=None`` means no interference. ``vx`` selects the interferer
    symbol-variance convention: ``None`` for symmetric constellations
    (``V_X = E/3``) or an explicit ``V_X / N0`` ratio.
    """

    snr: float
    inr: float | None
    r0: float = 1.0
    b: float = 2.0
    sigma: float = 0.0
    rate: float = 1.0
    lam: float = 0.01
    vx: float | None = None

    def __post_init__(self):
        if not (self.snr >= 0 and math.isfinite(self.snr)):
            raise ValueError("snr must be finite and non-negative")
        if self.inr is not None and not (self.inr >= 0 and math.isfinite(self.inr)):
            raise ValueError("inr must be finite and non-negative, or None")
        if not (self.r0 > 0 and math.isfinite(self.r0)):
            raise ValueError("r0 must be positive")
        if not self.b > 1:
            raise ValueError("b must exceed 1")
        if not self.sigma >= 0:
            raise ValueError("sigma must be non-negative")
        if not (self.rate >= 0 and math.isfinite(self.rate)):
            raise ValueError("rate must be finite and non-negative")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.vx is not None and not self.vx >= 0:
            raise ValueError("explicit V_X must be non-negative")

    @classmethod
    def from_db(cls, snr_db, inr_db, sigma_db=0.0, **kw) -> "ProbeLink":
        inr = None if float(inr_db) == -math.inf else db_to_linear(inr_db)
        return cls(snr=db_to_linear(snr_db), inr=inr, sigma=stable.sigma_from_db(sigma_db), **kw)

    @property
    def interference_weight(self) -> float:
        """Coefficient ``c`` in the noise term ``c A + 1`` (i.e. ``2 V_X / N0``)."""
        if self.inr is None:
            return 0.0
        if self.vx is None:
            return 2.0 * self.inr / 3.0
        return 2.0 * self.vx

    def stable_params(self) -> stable.StableParams:
        return stable.interference_stable_params(self.lam, self.b, self.sigma)


@dataclass(frozen=True)
class OutageEstimate:
    p_out: float
    std_err: float
    n_trials: int

    @classmethod
    def from_count(cls, n_out: int, n_trials: int) -> "OutageEstimate":
        p = n_out / n_trials
        return cls(p, math.sqrt(p * (1 - p) / n_trials), n_trials)


def sinr_eta(g0, a_value, link: ProbeLink):
    """Fading-averaged SINR for shadowing ``g0`` and aggregate interference ``a_value``."""
    a_value = np.asarray(a_value, dtype=float)
    if np.any(a_value < 0):
        raise ValueError("aggregate interference must be non-negative")
    num = np.exp(2 * link.sigma * np.asarray(g0, dtype=float)) * link.snr
    out = num / (link.r0 ** (2 * link.b) * (link.interference_weight * a_value + 1.0))
    return float(out) if out.ndim == 0 else out


def _shift(variant: str) -> float:
    if variant == "published":
        return math.sqrt(2.0)
    if variant == "rederived":
        return 1.0
    raise ValueError(f"unknown capacity variant {variant!r}")


def capacity_closed_form(eta: float, variant: Variant = "published") -> float:
    """Rayleigh-fading capacity in bits per complex symbol.

    ``variant="published"`` keeps the ``sqrt(2)/eta`` argument of the published
    expression, ``-exp(k/eta) Ei(-k/eta) / ln 2`` with ``k = sqrt(2)``;
    ``"rederived"`` uses ``k = 1``, which is what the expectation of
    ``log2(1 + eta t)`` over ``t ~ Exp(1)`` gives.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    k = _shift(variant)
    return exp_e1(k / eta) / _LN2


def capacity_numeric(eta: float, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``E[log2(1 + eta t)]`` for ``t ~ Exp(1)``, by quadrature."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    # Split at the mean so the log term's knee is resolved for large eta.
    f = lambda t: math.exp(-t) * math.log1p(eta * t) / _LN2
    return integrate(f, 0.0, 1.0, spec) + integrate(f, 1.0, math.inf, spec)


def invert_capacity(rate: float, variant: Variant = "published", rtol: float = 1e-10) -> float:
    """SINR threshold ``eta*`` at which the capacity equals ``rate``."""
    if not rate > 0:
        raise ValueError("rate must be positive")
    if rate >= capacity_closed_form(_ETA_MAX, variant):
        raise ValueError(f"rate {rate} exceeds the representable capacity range")
    lo, hi = 1.0, 1.0
    while capacity_closed_form(lo, variant) > rate:
        lo /= 16.0
        if lo < 1e-300:
            raise ValueError(f"could not bracket the SINR for rate {rate}")
    while capacity_closed_form(hi, variant) < rate:
        hi = min(hi * 16.0, _ETA_MAX)
    # Bisection in log space; capacity is strictly increasing in eta.
    while hi - lo > rtol * hi:
        mid = math.sqrt(lo * hi)
        if mid <= lo or mid >= hi:
            break
        if capacity_closed_form(mid, variant) < rate:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def _outage_chunk(args) -> int:
    link, eta_star, seed, index, n = args
    rng = chunk_generator(seed, index, tag=2)
    g0 = rng.standard_normal(n)
    if link.inr is None:
        a = np.zeros(n)
    else:
        a = stable.sample(link.stable_params(), rng, size=n)
    return int(np.count_nonzero(sinr_eta(g0, a, link) < eta_star))


def capacity_outage(link: ProbeLink, n_trials: int, seed, variant: Variant = "published",
                    workers: int = 1) -> OutageEstimate:
    """Monte Carlo capacity-outage probability.

    Shadowing ``G0`` and the aggregate interference ``A`` are drawn per
    trial (``A`` from its stable law, not from a simulated field); each
    trial is in outage when its SINR falls below :func:`invert_capacity`.
    The same ``seed`` reproduces the same underlying draws for any link,
    so sweeps over SNR, INR, rate or density use common random numbers.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if link.rate == 0:
        return OutageEstimate(0.0, 0.0, n_trials)
    eta_star = invert_capacity(link.rate, variant)
    tasks = [(link, eta_star, seed, i, stop - start)
             for i, (start, stop) in enumerate(chunk_bounds(n_trials, CHUNK_SIZE))]
    n_out = sum(map_chunks(_outage_chunk, tasks, workers))
    return OutageEstimate.from_count(n_out, n_trials)


def no_interference_outage(link: ProbeLink, variant: Variant = "published") -> float:
    """Exact outage without interferers: ``Phi(ln(eta*/SNR r0^-2b) / (2 sigma))``."""
    eta_star = invert_capacity(link.rate, variant)
    mean_eta = link.snr / link.r0 ** (2 * link.b)
    if link.sigma == 0:
        return 1.0 if mean_eta < eta_star else 0.0
    z = math.log(eta_star / mean_eta) / (2 * link.sigma)
    return 0.5 * math.erfc(-z / math.sqrt(2))


def sweep(link: ProbeLink, axis: str, values, n_trials: int, seed,
          variant: Variant = "published", workers: int = 1) -> list[OutageEstimate]:
    """Outage estimates with one ``ProbeLink`` field varied over ``values``.

    ``axis`` names a field (``snr``, ``inr``, ``rate``, ``lam``, ``r0``,
    ``sigma``, ``b``). Every point reuses ``seed``.
    """
    return [capacity_outage(replace(link, **{axis: v}), n_trials, seed, variant, workers)
            for v in values]
