# estimators_main.py
"""
Digital SIC phase-noise estimators.

All three estimators work on the same observation pair:
    y_n  received samples at the digital canceller input
    u_n  reference = known SI transmit samples convolved with the SI channel estimate

WfWindow   one Wiener weight per block of M samples,
           w = sum(y u*) / sum(|u|^2), phi_hat = arg(w) held over the block
OnlyCpe    the same weight over a whole OFDM symbol (CP included)
LpfBased   per-sample correlation y u*, zero-phase low-pass FIR, arg after filtering
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import signal as sps

from Impairments.impairments_main import ChannelEstimate, apply_channel
from Signal_Core.errors import InputError
from Signal_Core.signal_core_main import ComplexSignal, OfdmConfig, SignalLike, as_samples

logger = logging.getLogger(__name__)


class EstimatorKind(str, Enum):
    WF_WINDOW = "wf_window"
    ONLY_CPE = "only_cpe"
    LPF_BASED = "lpf_based"
    # complexity-table row only, never run
    TD_MMSE = "td_mmse"


class LpfKind(str, Enum):
    MOVING_AVERAGE = "moving_average"
    WINDOWED_SINC = "windowed_sinc"


RUNNABLE_KINDS = (EstimatorKind.WF_WINDOW, EstimatorKind.ONLY_CPE, EstimatorKind.LPF_BASED)


class EstimatorConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: EstimatorKind = EstimatorKind.WF_WINDOW
    window_m: int = Field(35, ge=1)
    lpf_len_l: int = Field(50, ge=1)
    lpf_kind: LpfKind = LpfKind.MOVING_AVERAGE
    lpf_alignment: Literal["centered", "causal"] = "centered"
    # windowed-sinc cutoff, normalized to Nyquist
    lpf_cutoff: float = Field(0.1, gt=0, lt=1)

    @property
    def label(self) -> str:
        return self.kind.value


class DegenerateWindowError(InputError):
    """A window carries no reference energy, so its weight is undefined."""


@dataclass(frozen=True, eq=False)
class PhaseEstimate:
    """
    phases: one estimate per input sample (radians, not unwrapped).
    degenerate: indices of windows (WF/CPE) or samples (LPF) that carried
    no reference energy and were given phase 0.
    """

    phases: np.ndarray
    degenerate: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        arr = np.array(self.phases, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise InputError("PhaseEstimate contains NaN or Inf")
        arr.flags.writeable = False
        object.__setattr__(self, "phases", arr)
        object.__setattr__(self, "degenerate", tuple(int(i) for i in self.degenerate))

    def __len__(self) -> int:
        return self.phases.size

    @property
    def flagged(self) -> bool:
        return bool(self.degenerate)


def _pair(y: SignalLike, u: SignalLike) -> Tuple[np.ndarray, np.ndarray]:
    ys, us = as_samples(y), as_samples(u)
    if ys.size != us.size:
        raise InputError(f"y and u lengths differ: {ys.size} vs {us.size}")
    return ys, us


# ============================================
# Reference
# ============================================

def reference_signal(x_si: SignalLike, h_hat: ChannelEstimate) -> ComplexSignal:
    """u = x_si * h_hat, truncated to the input length."""
    return apply_channel(x_si, h_hat.as_channel())


# ============================================
# Windowed Wiener filter
# ============================================

def wf_window_weight(y: SignalLike, u: SignalLike) -> complex:
    ys, us = _pair(y, u)
    if ys.size < 1:
        raise InputError("window must hold at least one sample")
    energy = float(np.vdot(us, us).real)
    if energy == 0.0:
        raise DegenerateWindowError("window reference energy is zero")
    return complex(np.vdot(us, ys) / energy)


def _window_sums(values: np.ndarray, window_m: int) -> np.ndarray:
    n = values.size
    n_full = n // window_m
    sums = values[: n_full * window_m].reshape(n_full, window_m).sum(axis=1)
    if n_full * window_m < n:
        sums = np.append(sums, values[n_full * window_m:].sum())
    return sums


def wf_estimate(y: SignalLike, u: SignalLike, window_m: int) -> PhaseEstimate:
    """
    Window w covers samples [w*M, (w+1)*M - 1]; every sample of the window
    gets arg(sum y u* / sum |u|^2). A trailing partial window uses its own sums.
    """
    if window_m < 1:
        raise InputError(f"window_m must be >= 1, got {window_m}")
    ys, us = _pair(y, u)
    if ys.size == 0:
        return PhaseEstimate(np.zeros(0))

    cross = _window_sums(ys * np.conj(us), window_m)
    energy = _window_sums((us * np.conj(us)).real, window_m)

    live = energy > 0.0
    window_phase = np.zeros(cross.size)
    window_phase[live] = np.angle(cross[live] / energy[live])
    degenerate = np.flatnonzero(~live)
    if degenerate.size:
        logger.debug("[Estimators] %d degenerate WF windows (zero reference energy)", degenerate.size)

    phases = np.repeat(window_phase, window_m)[: ys.size]
    return PhaseEstimate(phases, tuple(degenerate))


def only_cpe_estimate(y: SignalLike, u: SignalLike, cfg: OfdmConfig) -> PhaseEstimate:
    """One phase per OFDM symbol (CP included): the WF weight with M = n_fft + cp_len."""
    ys, _ = _pair(y, u)
    if ys.size % cfg.symbol_len:
        raise InputError(
            f"length {ys.size} is not a whole number of OFDM symbols of {cfg.symbol_len} samples"
        )
    return wf_estimate(y, u, cfg.symbol_len)


# ============================================
# LPF baseline
# ============================================

def lpf_kernel(l: int, kind: LpfKind = LpfKind.MOVING_AVERAGE, cutoff: float = 0.1) -> np.ndarray:
    """Unit-DC-gain FIR of length l."""
    if l < 1:
        raise InputError(f"lpf length must be >= 1, got {l}")
    kind = LpfKind(kind)
    if kind is LpfKind.MOVING_AVERAGE or l == 1:
        taps = np.ones(l)
    else:
        taps = sps.firwin(l, cutoff)
    return taps / taps.sum()


def _edge_value(c: np.ndarray, kernel: np.ndarray, idx: int, left: int, right: int,
                causal: bool) -> complex:
    n = c.size
    if causal:
        back, ahead = min(left, idx), 0
    else:
        reach = min(idx, n - 1 - idx)
        back, ahead = min(left, reach), min(right, reach)
    taps = kernel[left - back: left + ahead + 1]
    return complex(np.dot(taps, c[idx - back: idx + ahead + 1]) / taps.sum())


def lpf_estimate(y: SignalLike, u: SignalLike, l: int,
                 kind: LpfKind = LpfKind.MOVING_AVERAGE,
                 alignment: Literal["centered", "causal"] = "centered",
                 cutoff: float = 0.1) -> PhaseEstimate:
    """
    c_n = y_n u_n*, filtered by a length-l FIR and phi_hat_n = arg(filtered c_n).
    Centered alignment uses offsets [-l//2, l-1-l//2]; near the frame edges the
    window shrinks symmetrically. Causal alignment uses the current and l-1 past
    correlations, truncated at the frame start.
    """
    ys, us = _pair(y, u)
    n = ys.size
    if n == 0:
        return PhaseEstimate(np.zeros(0))
    if not np.any(us):
        logger.debug("[Estimators] LPF reference is all-zero; returning zero phases")
        return PhaseEstimate(np.zeros(n), tuple(range(n)))

    kernel = lpf_kernel(l, kind, cutoff)
    causal = alignment == "causal"
    left, right = (l - 1, 0) if causal else (l // 2, l - 1 - l // 2)

    corr = ys * np.conj(us)
    filtered = np.convolve(corr, kernel[::-1])[right: right + n]
    edges = set(range(min(left, n))) | set(range(max(n - right, 0), n))
    for i in sorted(edges):
        filtered[i] = _edge_value(corr, kernel, i, left, right, causal)

    dead = np.flatnonzero(filtered == 0)
    return PhaseEstimate(np.angle(filtered), tuple(dead))


# ============================================
# Dispatch, mitigation, diagnostics
# ============================================

def estimate_phase(y: SignalLike, u: SignalLike, cfg: EstimatorConfig, ofdm: OfdmConfig) -> PhaseEstimate:
    if cfg.kind is EstimatorKind.WF_WINDOW:
        return wf_estimate(y, u, cfg.window_m)
    if cfg.kind is EstimatorKind.ONLY_CPE:
        return only_cpe_estimate(y, u, ofdm)
    if cfg.kind is EstimatorKind.LPF_BASED:
        return lpf_estimate(y, u, cfg.lpf_len_l, cfg.lpf_kind, cfg.lpf_alignment, cfg.lpf_cutoff)
    raise InputError(f"estimator kind {cfg.kind.value!r} has a complexity model only")


def mitigate_and_cancel(y: SignalLike, u: SignalLike, phi: PhaseEstimate) -> ComplexSignal:
    """Digital SIC output e_n = y_n - u_n e^{j phi_hat_n}."""
    ys, us = _pair(y, u)
    if len(phi) != ys.size:
        raise InputError(f"phase estimate length {len(phi)} != signal length {ys.size}")
    rate = y.sample_rate if isinstance(y, ComplexSignal) else 15.36e6
    return ComplexSignal(ys - us * np.exp(1j * phi.phases), rate)


def phase_mse(true_phase, estimate) -> float:
    """Mean squared phase error, wrapped to (-pi, pi]."""
    truth = np.asarray(getattr(true_phase, "phases", true_phase), dtype=np.float64)
    est = np.asarray(getattr(estimate, "phases", estimate), dtype=np.float64)
    if truth.size != est.size:
        raise InputError(f"phase lengths differ: {truth.size} vs {est.size}")
    err = np.angle(np.exp(1j * (est - truth)))
    return float(np.mean(err ** 2))
