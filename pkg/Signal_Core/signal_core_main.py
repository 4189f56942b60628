# signal_core_main.py
"""
Complex-signal containers, DFT pair, Gray-coded QAM and CP-OFDM framing.

DFT convention (used everywhere in the simulator):
    X_k = sum_n x_n e^{-j2pi nk/N}          (unnormalized forward)
    x_n = (1/N) sum_k X_k e^{+j2pi nk/N}    (inverse carries the 1/N)
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from Signal_Core.errors import ConfigurationError, InputError
from Signal_Core.rng_streams import RngStream

QamOrder = Literal[4, 16, 64]


def _frozen_complex(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or Inf samples")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ComplexSignal:
    """Finite complex baseband samples at a given sampling rate (Hz)."""

    samples: np.ndarray
    sample_rate: float = 15.36e6

    def __post_init__(self):
        if not self.sample_rate > 0:
            raise ConfigurationError(f"sample_rate must be > 0, got {self.sample_rate}")
        object.__setattr__(self, "samples", _frozen_complex(self.samples, "ComplexSignal"))

    def __len__(self) -> int:
        return self.samples.size

    def power(self) -> float:
        """Mean sample power (0 for an empty signal)."""
        if self.samples.size == 0:
            return 0.0
        return float(np.mean(np.abs(self.samples) ** 2))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2))

    def with_samples(self, samples) -> "ComplexSignal":
        return ComplexSignal(samples, self.sample_rate)


@dataclass(frozen=True, eq=False)
class SpectrumVector:
    """N DFT bins indexed by subcarrier k."""

    bins: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bins", _frozen_complex(self.bins, "SpectrumVector"))

    def __len__(self) -> int:
        return self.bins.size


SignalLike = Union[ComplexSignal, np.ndarray, list, tuple]


def as_samples(x: SignalLike) -> np.ndarray:
    if isinstance(x, ComplexSignal):
        return x.samples
    return np.asarray(x, dtype=np.complex128).reshape(-1)


class OfdmConfig(BaseModel):
    """
    CP-OFDM numerology. Defaults follow the LTE-downlink-like setup:
    1024-point DFT, 300 used subcarriers, 16-QAM, 15.36 MHz, 64 symbols/frame.

    When `used_subcarriers` is not given, `n_used` indices are placed
    symmetrically about DC with DC excluded: {1..ceil(n/2)} U {N-floor(n/2)..N-1}.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_fft: int = Field(1024, ge=1)
    n_used: int = Field(300, ge=0)
    used_subcarriers: Optional[Tuple[int, ...]] = None
    cp_len: int = Field(72, ge=0)
    qam_order: QamOrder = 16
    sample_rate: float = Field(15.36e6, gt=0)
    n_symbols: int = Field(64, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _count_explicit_layout(cls, data):
        if isinstance(data, dict) and data.get("used_subcarriers") is not None:
            data = dict(data)
            data["n_used"] = len(tuple(data["used_subcarriers"]))
        return data

    @model_validator(mode="after")
    def _check_layout(self) -> "OfdmConfig":
        if self.cp_len >= self.n_fft:
            raise ValueError(f"cp_len ({self.cp_len}) must be < n_fft ({self.n_fft})")
        if self.used_subcarriers is not None:
            idx = self.used_subcarriers
            if len(set(idx)) != len(idx):
                raise ValueError("used_subcarriers must be distinct")
            if any(k < 0 or k >= self.n_fft for k in idx):
                raise ValueError(f"used_subcarriers must lie in [0, {self.n_fft})")
        elif self.n_used > self.n_fft - 1:
            raise ValueError(
                f"n_used ({self.n_used}) must leave DC free: at most n_fft - 1 = {self.n_fft - 1}"
            )
        return self

    @property
    def used_indices(self) -> np.ndarray:
        if self.used_subcarriers is not None:
            return np.array(self.used_subcarriers, dtype=np.int64)
        return _default_used(self.n_fft, self.n_used)

    @property
    def symbol_len(self) -> int:
        return self.n_fft + self.cp_len

    @property
    def frame_len(self) -> int:
        return self.n_symbols * self.symbol_len

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.qam_order))

    @property
    def n_data_symbols(self) -> int:
        return self.n_used * self.n_symbols

    @property
    def ts(self) -> float:
        return 1.0 / self.sample_rate


@lru_cache(maxsize=16)
def _default_used_cached(n_fft: int, n_used: int) -> Tuple[int, ...]:
    n_pos = (n_used + 1) // 2
    n_neg = n_used // 2
    pos = list(range(1, n_pos + 1))
    neg = list(range(n_fft - n_neg, n_fft))
    return tuple(pos + neg)


def _default_used(n_fft: int, n_used: int) -> np.ndarray:
    return np.array(_default_used_cached(n_fft, n_used), dtype=np.int64)


# ============================================
# DFT pair
# ============================================

def dft(x: SignalLike, n: Optional[int] = None) -> SpectrumVector:
    """Unnormalized forward DFT of one block. `n`, if given, must equal the block length."""
    samples = as_samples(x)
    if samples.size == 0:
        raise InputError("dft needs a non-empty block")
    if n is not None and samples.size != n:
        raise ConfigurationError(f"dft block length {samples.size} != N={n}")
    return SpectrumVector(np.fft.fft(samples))


def idft(spectrum: Union[SpectrumVector, np.ndarray], n: Optional[int] = None,
         sample_rate: float = 15.36e6) -> ComplexSignal:
    """Inverse DFT with the 1/N factor."""
    bins = spectrum.bins if isinstance(spectrum, SpectrumVector) else np.asarray(spectrum, dtype=np.complex128)
    if bins.size == 0:
        raise InputError("idft needs a non-empty block")
    if n is not None and bins.size != n:
        raise ConfigurationError(f"idft block length {bins.size} != N={n}")
    return ComplexSignal(np.fft.ifft(bins), sample_rate)


# ============================================
# Gray-coded square QAM
# ============================================

def _gray_to_int(g: int) -> int:
    value = g
    shift = g >> 1
    while shift:
        value ^= shift
        shift >>= 1
    return value


@lru_cache(maxsize=8)
def _constellation_cached(order: int) -> Tuple[complex, ...]:
    if order not in (4, 16, 64):
        raise ConfigurationError(f"QAM order must be one of 4, 16, 64, got {order}")
    bits = int(np.log2(order))
    half = bits // 2
    side = 2 ** half
    scale = np.sqrt(2.0 * (order - 1) / 3.0)
    points = []
    for pattern in range(order):
        i_bits = pattern >> half
        q_bits = pattern & (side - 1)
        i_level = (side - 1) - 2 * _gray_to_int(i_bits)
        q_level = (side - 1) - 2 * _gray_to_int(q_bits)
        points.append(complex(i_level, q_level) / scale)
    return tuple(points)


def qam_constellation(order: int) -> np.ndarray:
    """Unit-energy Gray-coded constellation indexed by the MSB-first bit pattern."""
    return np.array(_constellation_cached(int(order)), dtype=np.complex128)


def qam_map(bits, order: int) -> np.ndarray:
    """Map a bit sequence (MSB first per symbol) onto Gray-coded square QAM, E|s|^2 = 1."""
    table = qam_constellation(order)
    m = int(np.log2(order))
    b = np.asarray(bits, dtype=np.int64).reshape(-1)
    if b.size % m:
        raise InputError(f"bit count {b.size} is not divisible by log2({order}) = {m}")
    if b.size and (b.min() < 0 or b.max() > 1):
        raise InputError("bits must be 0 or 1")
    weights = 1 << np.arange(m - 1, -1, -1)
    patterns = b.reshape(-1, m) @ weights
    return table[patterns]


def random_qam_symbols(cfg: OfdmConfig, rng: RngStream) -> np.ndarray:
    """One frame's worth of random data symbols for `cfg`."""
    bits = rng.bits(cfg.n_data_symbols * cfg.bits_per_symbol)
    return qam_map(bits, cfg.qam_order)


# ============================================
# CP-OFDM framing
# ============================================

def ofdm_modulate(symbols, cfg: OfdmConfig) -> ComplexSignal:
    data = np.asarray(symbols, dtype=np.complex128).reshape(-1)
    if data.size != cfg.n_data_symbols:
        raise InputError(
            f"expected {cfg.n_data_symbols} symbols ({cfg.n_used} x {cfg.n_symbols}), got {data.size}"
        )
    grid = np.zeros((cfg.n_symbols, cfg.n_fft), dtype=np.complex128)
    grid[:, cfg.used_indices] = data.reshape(cfg.n_symbols, cfg.n_used)
    body = np.fft.ifft(grid, axis=1)
    prefix = body[:, cfg.n_fft - cfg.cp_len:]
    frame = np.concatenate([prefix, body], axis=1)
    return ComplexSignal(frame.reshape(-1), cfg.sample_rate)


def ofdm_demodulate(x: SignalLike, cfg: OfdmConfig) -> np.ndarray:
    samples = as_samples(x)
    if samples.size != cfg.frame_len:
        raise InputError(
            f"frame length {samples.size} != n_symbols x (n_fft + cp_len) = {cfg.frame_len}"
        )
    blocks = samples.reshape(cfg.n_symbols, cfg.symbol_len)[:, cfg.cp_len:]
    grid = np.fft.fft(blocks, axis=1)
    return grid[:, cfg.used_indices].reshape(-1)
