# impairments_main.py
"""
Channel and hardware impairments for the full-duplex link:

- oscillator phase noise (Wiener / free-running, Ornstein-Uhlenbeck / PLL)
- multiplicative application of a phase path, combined TX+RX phase
- Rician multipath channels and Gaussian channel-estimate error
- AWGN and scalar dB attenuation stages (antenna separation, analog SIC)

Phase paths are kept unwrapped; every consumer uses e^{j phi}.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import signal as sps

from Signal_Core.errors import ConfigurationError, InputError
from Signal_Core.rng_streams import RngStream
from Signal_Core.signal_core_main import ComplexSignal, SignalLike, as_samples


# ============================================
# Types
# ============================================

class OscillatorMode(str, Enum):
    COMMON = "common"
    INDEPENDENT = "independent"


class PhaseNoiseParams(BaseModel):
    """
    beta_hz: 3-dB Lorentzian linewidth; ts_s: sampling interval.
    model "ou" adds a PLL loop corner (pll_corner_hz) that pulls the phase back to 0.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    beta_hz: float = Field(10.0, ge=0)
    ts_s: float = Field(1.0 / 15.36e6, gt=0)
    model: Literal["wiener", "ou"] = "wiener"
    pll_corner_hz: float = Field(1.0e3, gt=0)

    @property
    def increment_variance(self) -> float:
        return 2.0 * np.pi * self.beta_hz * self.ts_s


@dataclass(frozen=True, eq=False)
class PhasePath:
    """Per-sample oscillator phase in radians (unwrapped)."""

    phases: np.ndarray

    def __post_init__(self):
        arr = np.array(self.phases, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise InputError("PhasePath contains NaN or Inf")
        arr.flags.writeable = False
        object.__setattr__(self, "phases", arr)

    def __len__(self) -> int:
        return self.phases.size

    def __neg__(self) -> "PhasePath":
        return PhasePath(-self.phases)

    @classmethod
    def constant(cls, value: float, n: int) -> "PhasePath":
        return cls(np.full(n, float(value)))


@dataclass(frozen=True, eq=False)
class ChannelModel:
    taps: np.ndarray
    rician_k_db: float = float("inf")

    def __post_init__(self):
        arr = np.array(self.taps, dtype=np.complex128).reshape(-1)
        if arr.size == 0 or not np.all(np.isfinite(arr)):
            raise ConfigurationError("channel taps must be non-empty and finite")
        arr.flags.writeable = False
        object.__setattr__(self, "taps", arr)

    @property
    def n_taps(self) -> int:
        return self.taps.size

    def power(self) -> float:
        return float(np.sum(np.abs(self.taps) ** 2))


@dataclass(frozen=True, eq=False)
class ChannelEstimate:
    taps_hat: np.ndarray
    err_rel_db: float

    def __post_init__(self):
        arr = np.array(self.taps_hat, dtype=np.complex128).reshape(-1)
        arr.flags.writeable = False
        object.__setattr__(self, "taps_hat", arr)

    def as_channel(self) -> ChannelModel:
        return ChannelModel(self.taps_hat)


class ChannelParams(BaseModel):
    """Rician tapped-delay-line settings; the power profile decays exponentially per tap."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    k_db: float = Field(30.0, allow_inf_nan=False)
    n_taps: int = Field(2, ge=1)
    decay_db: float = Field(20.0, ge=0)

    def pdp(self) -> np.ndarray:
        return exponential_pdp(self.n_taps, self.decay_db)


def exponential_pdp(n_taps: int, decay_db: float) -> np.ndarray:
    """Unit-sum power-delay profile decaying by `decay_db` per tap."""
    profile = 10.0 ** (-decay_db * np.arange(n_taps) / 10.0)
    return profile / profile.sum()


# ============================================
# Phase noise
# ============================================

def gen_wiener_pn(p: PhaseNoiseParams, n: int, rng: RngStream) -> PhasePath:
    """
    Free-running oscillator phase: phi_0 = 0, phi_{n+1} = phi_n + g_n,
    g_n ~ N(0, 2*pi*beta*Ts) i.i.d.
    """
    if n < 1:
        raise ConfigurationError(f"phase path length must be >= 1, got {n}")
    increments = np.sqrt(p.increment_variance) * rng.standard_normal(n - 1)
    phases = np.concatenate(([0.0], np.cumsum(increments)))
    return PhasePath(phases)


def gen_ou_pn(p: PhaseNoiseParams, n: int, rng: RngStream) -> PhasePath:
    """
    PLL-disciplined oscillator: phi_{n+1} = rho*phi_n + g_n with
    rho = exp(-2*pi*f_c*Ts) and the same increment variance as the Wiener model.
    """
    if n < 1:
        raise ConfigurationError(f"phase path length must be >= 1, got {n}")
    rho = float(np.exp(-2.0 * np.pi * p.pll_corner_hz * p.ts_s))
    increments = np.sqrt(p.increment_variance) * rng.standard_normal(n - 1)
    phases = np.zeros(n)
    if n > 1:
        phases[1:] = sps.lfilter([1.0], [1.0, -rho], increments)
    return PhasePath(phases)


def gen_phase_noise(p: PhaseNoiseParams, n: int, rng: RngStream) -> PhasePath:
    if p.model == "ou":
        return gen_ou_pn(p, n, rng)
    return gen_wiener_pn(p, n, rng)


def _rate_of(x: SignalLike) -> float:
    return x.sample_rate if isinstance(x, ComplexSignal) else 15.36e6


def apply_pn(x: SignalLike, path: PhasePath) -> ComplexSignal:
    samples = as_samples(x)
    if samples.size != len(path):
        raise InputError(f"signal length {samples.size} != phase path length {len(path)}")
    rate = _rate_of(x)
    return ComplexSignal(samples * np.exp(1j * path.phases), rate)


def combined_pn(tx: PhasePath, rx: PhasePath) -> PhasePath:
    """Combined TX+RX phase; with a common oscillator pass the same path twice."""
    if len(tx) != len(rx):
        raise InputError(f"phase path lengths differ: {len(tx)} vs {len(rx)}")
    return PhasePath(tx.phases + rx.phases)


# ============================================
# Channels
# ============================================

def gen_rician_channel(k_db: float, n_taps: int, pdp: Optional[Sequence[float]],
                       rng: RngStream) -> ChannelModel:
    """
    Tap 0 = sqrt(p0) * (sqrt(K/(K+1)) e^{j theta} + sqrt(1/(K+1)) CN(0,1)),
    taps 1.. = sqrt(p_i) * CN(0,1). Mean total power is 1.
    """
    if n_taps < 1:
        raise ConfigurationError(f"n_taps must be >= 1, got {n_taps}")
    if not np.isfinite(k_db):
        raise ConfigurationError(f"k_db must be finite, got {k_db}")
    if pdp is None:
        profile = np.full(n_taps, 1.0 / n_taps)
    else:
        profile = np.asarray(pdp, dtype=np.float64).reshape(-1)
    if profile.size != n_taps:
        raise ConfigurationError(f"power profile has {profile.size} entries, expected {n_taps}")
    if np.any(profile < 0) or not np.isclose(profile.sum(), 1.0, rtol=1e-9):
        raise ConfigurationError("power profile must be non-negative and sum to 1")

    k_lin = 10.0 ** (k_db / 10.0)
    los_weight = np.sqrt(k_lin / (k_lin + 1.0))
    nlos_weight = np.sqrt(1.0 / (k_lin + 1.0))

    theta = rng.uniform(-np.pi, np.pi)
    diffuse = rng.complex_normal(n_taps)
    taps = np.sqrt(profile) * diffuse
    taps[0] = np.sqrt(profile[0]) * (los_weight * np.exp(1j * theta) + nlos_weight * diffuse[0])
    return ChannelModel(taps, rician_k_db=k_db)


def apply_channel(x: SignalLike, h: ChannelModel) -> ComplexSignal:
    """Linear convolution truncated to the input length."""
    samples = as_samples(x)
    rate = _rate_of(x)
    if samples.size == 0:
        return ComplexSignal(samples, rate)
    return ComplexSignal(np.convolve(samples, h.taps)[: samples.size], rate)


def perturb_channel_estimate(h: ChannelModel, err_rel_db: float, rng: RngStream) -> ChannelEstimate:
    """h_hat = h + eps, eps circular Gaussian with per-tap power |h_i|^2 * 10^(err/10)."""
    ratio = 10.0 ** (err_rel_db / 10.0)
    eps = np.abs(h.taps) * np.sqrt(ratio) * rng.complex_normal(h.n_taps)
    return ChannelEstimate(h.taps + eps, err_rel_db)


# ============================================
# Noise and scalar stages
# ============================================

def awgn(n: int, power: float, rng: RngStream) -> np.ndarray:
    return rng.complex_normal(n, power)


def add_awgn(x: SignalLike, snr_db: float, ref_power: float, rng: RngStream) -> ComplexSignal:
    """x + z, E|z|^2 = ref_power * 10^(-snr_db/10)."""
    if not ref_power > 0:
        raise ConfigurationError(f"ref_power must be > 0, got {ref_power}")
    samples = as_samples(x)
    rate = _rate_of(x)
    noise = awgn(samples.size, ref_power * 10.0 ** (-snr_db / 10.0), rng)
    return ComplexSignal(samples + noise, rate)


def attenuate(x: SignalLike, db: float) -> ComplexSignal:
    samples = as_samples(x)
    rate = _rate_of(x)
    return ComplexSignal(samples * 10.0 ** (-db / 20.0), rate)
