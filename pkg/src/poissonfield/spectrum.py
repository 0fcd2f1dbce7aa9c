"""Transmit PSDs, Doppler propagation, spectral masks and spectral outage.

Frequencies are in Hz, PSDs in W/Hz, mask levels in dBm/Hz at the
boundary and W/Hz internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import stable
from .numerics import DEFAULT_QUAD, QuadratureError, QuadratureSpec, integrate

UNIT_MASS_TOL = 1e-6


def dbm_to_watt(x_dbm):
    return 10.0 ** ((np.asarray(x_dbm, dtype=float) - 30.0) / 10.0)


def watt_to_dbm(x_w):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(x_w, dtype=float)) + 30.0


def load_table(path) -> np.ndarray:
    """Two-column numeric text file (``#`` comments) as an ``(n, 2)`` array."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, found {data.shape[1]}")
    if np.any(np.diff(data[:, 0]) <= 0):
        raise ValueError(f"{path}: first column must be strictly increasing")
    return data


def _as_table(table) -> np.ndarray:
    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise ValueError("table must be a sequence of at least two (x, value) pairs")
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise ValueError("table abscissae must be strictly increasing")
    return arr


# --------------------------------------------------------------------------
# Pulse shapes


@dataclass(frozen=True)
class PulseShape:
    """Unit-energy baseband pulse of duration ``T``.

    ``square``: ``1/sqrt(T)`` on ``[0, T]``.
    ``hanning``: ``sqrt(2/(3T)) (1 - cos(2 pi t / T))`` on ``[0, T]``.
    ``tabulated``: ``|G(f)|^2`` given as ``(f, value)`` pairs, linearly
    interpolated and zero outside the table.
    """

    kind: str
    T: float = 1e-6
    table: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("square", "hanning", "tabulated"):
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if not self.T > 0:
            raise ValueError("symbol period T must be positive")
        if self.kind == "tabulated":
            if self.table is None:
                raise ValueError("tabulated pulse needs a table")
            object.__setattr__(self, "table", _as_table(self.table))
            if np.any(self.table[:, 1] < 0):
                raise ValueError("|G(f)|^2 cannot be negative")
        energy = self.energy()
        if abs(energy - 1.0) > UNIT_MASS_TOL:
            raise ValueError(f"pulse energy is {energy!r}, expected 1")

    def waveform(self, t):
        """Time-domain ``g(t)`` for the closed-form kinds."""
        t = np.asarray(t, dtype=float)
        inside = (t >= 0) & (t <= self.T)
        if self.kind == "square":
            return np.where(inside, 1.0 / math.sqrt(self.T), 0.0)
        if self.kind == "hanning":
            amp = math.sqrt(2.0 / (3.0 * self.T))
            return np.where(inside, amp * (1 - np.cos(2 * np.pi * t / self.T)), 0.0)
        raise ValueError("tabulated pulses carry no waveform")

    def energy(self) -> float:
        if self.kind == "tabulated":
            return float(np.trapezoid(self.table[:, 1], self.table[:, 0]))
        # Parseval: the time-domain energy of the closed-form pulse.
        return integrate(lambda t: float(self.waveform(t)) ** 2, 0.0, self.T,
                         QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12))


def pulse_energy_spectrum(pulse: PulseShape, f):
    """``|G(f)|^2`` in 1/Hz."""
    f = np.asarray(f, dtype=float)
    x = f * pulse.T
    if pulse.kind == "square":
        out = pulse.T * np.sinc(x) ** 2
    elif pulse.kind == "hanning":
        out = (2 * pulse.T / 3) * (np.sinc(x) + 0.5 * np.sinc(x - 1) + 0.5 * np.sinc(x + 1)) ** 2
    else:
        out = np.interp(f, pulse.table[:, 0], pulse.table[:, 1], left=0.0, right=0.0)
    return float(out) if out.ndim == 0 else out


def tx_psd(power: float, pulse: PulseShape, f):
    """Transmit PSD ``P |G(f)|^2`` in W/Hz."""
    if not power > 0:
        raise ValueError("transmit power must be positive")
    return power * pulse_energy_spectrum(pulse, f)


# --------------------------------------------------------------------------
# Doppler spectra


@dataclass(frozen=True)
class DopplerSpectrum:
    """Unit-mass Doppler power spectrum.

    ``delta`` (time-invariant channel), ``shifted_delta`` (a pure Doppler
    shift of ``f0`` Hz) or ``tabulated`` ``(nu, density)`` pairs that must
    integrate to one.
    """

    kind: str = "delta"
    f0: float = 0.0
    table: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("delta", "shifted_delta", "tabulated"):
            raise ValueError(f"unknown Doppler spectrum kind {self.kind!r}")
        if self.kind == "tabulated":
            if self.table is None:
                raise ValueError("tabulated Doppler spectrum needs a table")
            object.__setattr__(self, "table", _as_table(self.table))
            if np.any(self.table[:, 1] < 0):
                raise ValueError("Doppler density cannot be negative")
            mass = float(np.trapezoid(self.table[:, 1], self.table[:, 0]))
            if abs(mass - 1.0) > UNIT_MASS_TOL:
                raise ValueError(f"Doppler spectrum integrates to {mass!r}, expected 1")

    @classmethod
    def rectangular(cls, width: float, n: int = 2001) -> "DopplerSpectrum":
        """Uniform density on ``[-width/2, width/2]`` (with steep unit-mass edges)."""
        half = width / 2
        edge = width * 1e-9
        nu = np.linspace(-half, half, n)
        nu = np.r_[-half - edge, nu, half + edge]
        dens = np.r_[0.0, np.full(n, 1.0), 0.0]
        dens /= np.trapezoid(dens, nu)
        return cls("tabulated", table=np.column_stack([nu, dens]))

    @classmethod
    def jakes(cls, f_d: float, n: int = 4001) -> "DopplerSpectrum":
        """Clarke/Jakes U-shaped spectrum, tabulated and renormalized to unit mass."""
        u = np.cos(np.linspace(np.pi, 0.0, n))  # clusters points at the band edges
        nu = f_d * u
        with np.errstate(divide="ignore"):
            dens = 1.0 / (np.pi * f_d * np.sqrt(np.clip(1 - u ** 2, 1e-12, None)))
        dens[[0, -1]] = 0.0
        dens /= np.trapezoid(dens, nu)
        return cls("tabulated", table=np.column_stack([nu, dens]))

    def density(self, nu):
        if self.kind != "tabulated":
            raise ValueError("delta spectra have no pointwise density")
        return np.interp(nu, self.table[:, 0], self.table[:, 1], left=0.0, right=0.0)


def wssus_output_psd(doppler: DopplerSpectrum, input_psd: Callable, f,
                     spec: QuadratureSpec = DEFAULT_QUAD):
    """Output PSD of a WSSUS channel: the Doppler spectrum convolved with the input PSD."""
    if doppler.kind == "delta":
        return input_psd(f)
    if doppler.kind == "shifted_delta":
        return input_psd(np.asarray(f, dtype=float) - doppler.f0) if np.ndim(f) else input_psd(f - doppler.f0)
    if np.ndim(f):
        return np.array([_convolve_tabulated(doppler, input_psd, float(v), spec)
                         for v in np.ravel(f)]).reshape(np.shape(f))
    return _convolve_tabulated(doppler, input_psd, float(f), spec)


def _convolve_tabulated(doppler, input_psd, f, spec):
    # The density is piecewise linear, so integrate segment by segment with
    # Gauss-Legendre and use a lower-order rule as the error estimate.
    nu = doppler.table[:, 0]
    dens = doppler.table[:, 1]
    fine = _segment_rule(nu, dens, input_psd, f, _GL_FINE)
    coarse = _segment_rule(nu, dens, input_psd, f, _GL_COARSE)
    if abs(fine - coarse) > max(spec.abs_tol * abs(fine), spec.rel_tol * abs(fine)):
        raise QuadratureError(
            f"Doppler convolution at f={f} not resolved: {fine!r} vs {coarse!r}")
    return fine


_GL_FINE = np.polynomial.legendre.leggauss(16)
_GL_COARSE = np.polynomial.legendre.leggauss(10)


def _segment_rule(nu, dens, input_psd, f, rule):
    x, w = rule
    lo, hi = nu[:-1, None], nu[1:, None]
    half = (hi - lo) / 2
    v = lo + half * (x[None, :] + 1)
    t = (v - lo) / (2 * half)
    d = dens[:-1, None] * (1 - t) + dens[1:, None] * t
    vals = d * np.asarray(input_psd(f - v), dtype=float)
    return float(np.sum(half * (vals @ w[:, None])))


# --------------------------------------------------------------------------
# Spectral masks


@dataclass(frozen=True)
class SpectralMask:
    """Frequency-dependent outage (or detection) threshold.

    ``constant``: ``levels_dbm=(level,)``.
    ``piecewise_linear``: ``freqs`` breakpoints with ``levels_dbm``; linear
    in dB between breakpoints, held constant beyond the ends.
    ``gaussian``: ``levels_dbm=(center, edge)`` and ``width`` Hz; the dB
    level moves from ``center`` at ``f = 0`` toward ``edge`` as
    ``exp(-f^2 / (2 width^2))`` decays.
    """

    kind: str
    levels_dbm: tuple = ()
    freqs: tuple = ()
    width: float = 0.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "levels_dbm", tuple(float(v) for v in self.levels_dbm))
        object.__setattr__(self, "freqs", tuple(float(v) for v in self.freqs))
        if any(not math.isfinite(v) for v in self.levels_dbm):
            raise ValueError("mask levels must be finite")
        if self.kind == "constant":
            if len(self.levels_dbm) != 1:
                raise ValueError("constant mask takes one level")
        elif self.kind == "piecewise_linear":
            if len(self.freqs) != len(self.levels_dbm) or len(self.freqs) < 1:
                raise ValueError("piecewise-linear mask needs matching freqs and levels")
            if np.any(np.diff(self.freqs) <= 0):
                raise ValueError("mask breakpoints must be strictly increasing")
        elif self.kind == "gaussian":
            if len(self.levels_dbm) != 2 or not self.width > 0:
                raise ValueError("gaussian mask takes (center, edge) levels and a positive width")
        else:
            raise ValueError(f"unknown mask kind {self.kind!r}")

    @classmethod
    def constant(cls, level_dbm: float, name: str = "") -> "SpectralMask":
        return cls("constant", (level_dbm,), name=name)

    @classmethod
    def from_file(cls, path, name: str = "") -> "SpectralMask":
        data = load_table(path)
        return cls("piecewise_linear", tuple(data[:, 1]), tuple(data[:, 0]), name=name or str(path))

    def level_dbm(self, f):
        f = np.asarray(f, dtype=float)
        if self.kind == "constant":
            out = np.full(f.shape, self.levels_dbm[0])
        elif self.kind == "piecewise_linear":
            out = np.interp(f, self.freqs, self.levels_dbm)
        else:
            center, edge = self.levels_dbm
            out = edge + (center - edge) * np.exp(-f ** 2 / (2 * self.width ** 2))
        return float(out) if out.ndim == 0 else out

    def __call__(self, f):
        """Mask value in W/Hz."""
        out = dbm_to_watt(self.level_dbm(f))
        return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Emission model and spectral outage


@dataclass(frozen=True)
class EmissionModel:
    """Emitting network: per-node power and pulse, channel Doppler, field density."""

    power: float
    pulse: PulseShape
    lam: float
    b: float = 2.0
    sigma: float = 0.0
    doppler: DopplerSpectrum = field(default_factory=DopplerSpectrum)
    name: str = ""

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError("transmit power must be positive")
        p = self.stable_params
        if not (p.beta == 1 and 0 < p.alpha < 1):
            raise ValueError("emission model needs alpha in (0, 1) and beta = 1")

    @property
    def stable_params(self) -> stable.StableParams:
        return stable.interference_stable_params(self.lam, self.b, self.sigma)

    def received_psd(self, f, spec: QuadratureSpec = DEFAULT_QUAD):
        """Per-node PSD after the channel: Doppler spectrum convolved with the transmit PSD."""
        return wssus_output_psd(self.doppler, lambda v: tx_psd(self.power, self.pulse, v), f, spec)


@dataclass(frozen=True)
class SopCurve:
    frequencies: np.ndarray
    sop: np.ndarray
    mask_id: str = ""
    model_id: str = ""

    def __post_init__(self):
        if len(self.frequencies) != len(self.sop):
            raise ValueError("frequencies and sop must have equal length")
        if np.any((np.asarray(self.sop) < 0) | (np.asarray(self.sop) > 1)):
            raise ValueError("sop values must lie in [0, 1]")


def aggregate_psd_sample(a_value: float, emission: EmissionModel, f):
    """One sample path ``A * (D * S_X)(f)`` of the aggregate emission PSD."""
    if a_value < 0:
        raise ValueError("aggregate interference must be non-negative")
    return a_value * emission.received_psd(f)


def _outage_from_threshold(params: stable.StableParams, threshold: float, spec) -> float:
    if threshold == math.inf:
        return 0.0
    return 1.0 - stable.cdf(params, threshold, spec)


def sop(emission: EmissionModel, mask: SpectralMask, f: float,
        spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Spectral outage probability ``P{A s(f) > m(f)} = 1 - F_A(m(f) / s(f))``."""
    s = float(emission.received_psd(f, spec))
    if s <= 0:
        return 0.0
    return _outage_from_threshold(emission.stable_params, mask(f) / s, spec)


def combined_params(networks: Sequence, total_lambda: float, f: float,
                    spec: QuadratureSpec = DEFAULT_QUAD) -> stable.StableParams:
    """Stable law of ``sum_k A_k s_k(f)`` over independent sub-networks.

    ``networks`` holds ``(p_k, EmissionModel)`` pairs; sub-network ``k`` has
    density ``total_lambda * p_k`` (the models' own ``lam`` is ignored).
    Positive scaling maps ``S(alpha, 1, g)`` to ``S(alpha, 1, c^alpha g)``,
    and dispersions of independent same-``alpha`` summands add.
    """
    if not networks:
        raise ValueError("at least one network is required")
    weights = [float(p) for p, _ in networks]
    if any(p < 0 for p in weights) or abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("network weights must be non-negative and sum to 1")
    models = [m for _, m in networks]
    b, sigma = models[0].b, models[0].sigma
    if any(m.b != b or m.sigma != sigma for m in models):
        raise ValueError("all networks must share b and sigma")
    alpha = 1.0 / b
    disp = 0.0
    for p, m in zip(weights, models):
        if p == 0:
            continue
        g_k = stable.interference_stable_params(total_lambda * p, b, sigma).gamma
        s_k = float(m.received_psd(f, spec))
        disp += g_k * s_k ** alpha
    return stable.StableParams(alpha, 1.0, disp)


def sop_heterogeneous(networks: Sequence, total_lambda: float, mask: SpectralMask, f: float,
                      spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Spectral outage probability for ``K`` independent sub-networks.

    See :func:`combined_params` for the meaning of ``networks``.
    """
    params = combined_params(networks, total_lambda, f, spec)
    if params.gamma <= 0:
        return 0.0
    return _outage_from_threshold(params, mask(f), spec)


def sop_curve(emission: EmissionModel, mask: SpectralMask, f_grid,
              spec: QuadratureSpec = DEFAULT_QUAD) -> SopCurve:
    """Pointwise SOP over ``f_grid``; CDF evaluations are cached by threshold."""
    f_grid = np.asarray(f_grid, dtype=float)
    if f_grid.size == 0 or np.any(np.diff(f_grid) <= 0):
        raise ValueError("f_grid must be non-empty and strictly increasing")
    params = emission.stable_params
    s = np.asarray(emission.received_psd(f_grid, spec), dtype=float)
    m = np.asarray(mask(f_grid), dtype=float)
    cache: dict[float, float] = {}
    out = np.zeros(f_grid.size)
    for i in range(f_grid.size):
        if s[i] <= 0:
            continue
        thr = float(m[i] / s[i])
        if thr not in cache:
            cache[thr] = _outage_from_threshold(params, thr, spec)
        out[i] = cache[thr]
    return SopCurve(f_grid, out, mask.name or mask.kind, emission.name)


def figure_grid(T: float, n: int = 1001, span: float = 4.0) -> np.ndarray:
    """Uniform grid over ``[-span/T, span/T]`` (first four sinc lobes by default)."""
    return np.linspace(-span / T, span / T, n)
