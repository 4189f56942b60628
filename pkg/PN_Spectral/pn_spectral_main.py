# pn_spectral_main.py
"""
Frequency-domain view of phase noise over one OFDM block.

    J_k = sum_n e^{j phi_n} e^{-j2pi nk/N}

Multiplication by e^{j phi} in time is (1/N)-normalized circular convolution
with J in frequency. J_0 / N is the common phase error (CPE) rotation; the
k != 0 bins leak energy across subcarriers (ICI). The explicit 1/N is kept
everywhere so the CPE + ICI split rebuilds the time-domain product exactly.
"""
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from Impairments.impairments_main import PhasePath
from Signal_Core.errors import ConfigurationError, InputError
from Signal_Core.signal_core_main import SpectrumVector


@dataclass(frozen=True, eq=False)
class PnSpectrum:
    j: SpectrumVector

    @property
    def bins(self) -> np.ndarray:
        return self.j.bins

    def __len__(self) -> int:
        return len(self.j)

    @property
    def cpe(self) -> complex:
        """J_0 / N, the common rotation of the block (|cpe| <= 1)."""
        return complex(self.bins[0] / len(self))


def _phases(path: Union[PhasePath, np.ndarray]) -> np.ndarray:
    if isinstance(path, PhasePath):
        return path.phases
    return np.asarray(path, dtype=np.float64).reshape(-1)


def circular_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unnormalized circular convolution c_k = sum_m a_m b_{(k-m) mod N}."""
    if a.size != b.size:
        raise InputError(f"circular convolution needs equal lengths: {a.size} vs {b.size}")
    return np.fft.fft(np.fft.ifft(a) * np.fft.ifft(b)) * a.size


def pn_dft(path: Union[PhasePath, np.ndarray], n: int = None) -> PnSpectrum:
    phases = _phases(path)
    if n is not None and phases.size != n:
        raise ConfigurationError(f"phase block length {phases.size} != N={n}")
    return PnSpectrum(SpectrumVector(np.fft.fft(np.exp(1j * phases))))


def combine_spectra(jt: PnSpectrum, jr: PnSpectrum) -> PnSpectrum:
    """J^c_k = (1/N) sum_m J^t_m J^r_{k-m}; equals pn_dft of the summed phases."""
    if len(jt) != len(jr):
        raise InputError(f"spectrum lengths differ: {len(jt)} vs {len(jr)}")
    n = len(jt)
    return PnSpectrum(SpectrumVector(circular_convolve(jt.bins, jr.bins) / n))


def cpe_ici_split(x_spec: SpectrumVector, h_spec: SpectrumVector,
                  jc: PnSpectrum) -> Tuple[SpectrumVector, SpectrumVector]:
    """
    Per-subcarrier decomposition of the phase-noisy SI block:
      cpe_k = X_k H_k J^c_0 / N
      ici_k = (1/N) sum_{l != k} X_l H_l J^c_{k-l}
    """
    n = len(x_spec)
    if len(h_spec) != n or len(jc) != n:
        raise InputError(
            f"lengths must agree: X={n}, H={len(h_spec)}, J={len(jc)}"
        )
    xh = x_spec.bins * h_spec.bins
    cpe_term = xh * jc.bins[0] / n
    total = circular_convolve(xh, jc.bins) / n
    ici_term = total - cpe_term
    return SpectrumVector(cpe_term), SpectrumVector(ici_term)
