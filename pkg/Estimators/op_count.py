# op_count.py
"""
Arithmetic-operation accounting for the phase-noise estimators.

Counting rules (fixed, so figures are comparable across estimators):
- a complex x complex multiply counts 4 real-op equivalents; when it feeds a
  running sum (multiply-accumulate) the accumulation is folded into those 4
- an FIR tap on complex data counts 1 multiply (one real coefficient applied to
  the I/Q pair) and 2 real adds (I and Q accumulators)
- each arg() evaluation counts 1, each complex/real division counts 1
- the LPF baseline pays one extra add per sample for interpolation
- the TD-MMSE row is analytic only: N^2 per OFDM symbol with N = K/2
  estimated samples and K samples per symbol
- mitigation (one complex multiply per sample) is excluded unless requested
"""
import math
from dataclasses import dataclass
from typing import Optional

from Estimators.estimators_main import EstimatorKind, LpfKind
from Signal_Core.errors import InputError


@dataclass(frozen=True)
class OpCount:
    kind: EstimatorKind
    n_samples: int
    real_mults: int
    real_adds: int
    divisions: int
    arg_evals: int

    @property
    def total(self) -> int:
        return self.real_mults + self.real_adds + self.divisions + self.arg_evals

    @property
    def per_sample(self) -> float:
        return self.total / self.n_samples


def op_count(kind, n_samples: int, window_m: int = 35, lpf_len_l: int = 50,
             lpf_kind: LpfKind = LpfKind.MOVING_AVERAGE, samples_per_symbol: int = 1024,
             symbol_len: Optional[int] = None, include_mitigation: bool = False) -> OpCount:
    kind = EstimatorKind(kind)
    if n_samples < 1:
        raise InputError(f"n_samples must be >= 1, got {n_samples}")
    mitigation = 4 * n_samples if include_mitigation else 0

    if kind in (EstimatorKind.WF_WINDOW, EstimatorKind.ONLY_CPE):
        m = window_m if kind is EstimatorKind.WF_WINDOW else (symbol_len or samples_per_symbol)
        if m < 1:
            raise InputError(f"window must be >= 1, got {m}")
        n_windows = math.ceil(n_samples / m)
        return OpCount(kind, n_samples, 4 * n_samples + mitigation, 0, n_windows, n_windows)

    if kind is EstimatorKind.LPF_BASED:
        if lpf_len_l < 1:
            raise InputError(f"lpf length must be >= 1, got {lpf_len_l}")
        # the moving average is counted in direct form like any other FIR
        LpfKind(lpf_kind)
        mults = 4 * n_samples + lpf_len_l * n_samples + mitigation
        adds = 2 * lpf_len_l * n_samples + n_samples
        return OpCount(kind, n_samples, mults, adds, 0, n_samples)

    k = samples_per_symbol
    n_est = k // 2
    return OpCount(kind, n_samples, round(n_est * n_est * n_samples / k) + mitigation, 0, 0, 0)
