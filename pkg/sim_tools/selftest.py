# selftest.py
"""
Small-size checks that must hold on any install: the frequency-domain
phase-noise identities, the windowed Wiener weight against a direct
per-window evaluation, and exact cancellation with all impairments off or
with a constant injected phase.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np

from Estimators.estimators_main import RUNNABLE_KINDS, EstimatorConfig, wf_estimate
from Impairments.impairments_main import PhasePath, apply_pn
from PN_Spectral.pn_spectral_main import circular_convolve, cpe_ici_split, pn_dft
from sim_State.link_state import LinkScenario, PnSettings
from sim_State.workflow_main import SUPPRESSION_CAP_DB, run_trial, si_suppression_db
from Signal_Core.rng_streams import RngStream
from Signal_Core.signal_core_main import OfdmConfig, SpectrumVector, dft

logger = logging.getLogger(__name__)

ORACLE_N = 8
ORACLE_SEEDS = 20
INJECTED_PHASES = (math.pi / 7, -2.9, 3.1)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SelftestReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> List[str]:
        return [f"{'PASS' if c.passed else 'FAIL'}\t{c.name}\t{c.detail}" for c in self.checks]


def _rel_err(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


def _oracle_inputs(seed: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    rng = RngStream(seed, "selftest")
    x = rng.fork("x").complex_normal(ORACLE_N)
    h = rng.fork("h").complex_normal(ORACLE_N)
    phi = rng.fork("phi").uniform(-math.pi, math.pi, ORACLE_N)
    return x, h, phi


def check_pn_duality() -> CheckResult:
    worst = 0.0
    for seed in range(ORACLE_SEEDS):
        x, _, phi = _oracle_inputs(seed)
        lhs = dft(apply_pn(x, PhasePath(phi))).bins
        rhs = circular_convolve(dft(x).bins, pn_dft(phi).bins) / ORACLE_N
        worst = max(worst, _rel_err(lhs, rhs))
    return CheckResult("pn_duality", worst <= 1e-9, f"max_rel_err={worst:.3e}")


def check_cpe_ici_reconstruction() -> CheckResult:
    worst = 0.0
    for seed in range(ORACLE_SEEDS):
        x, h, phi = _oracle_inputs(seed)
        xs, hs, jc = SpectrumVector(np.fft.fft(x)), SpectrumVector(np.fft.fft(h)), pn_dft(phi)
        cpe, ici = cpe_ici_split(xs, hs, jc)
        direct = np.fft.fft(np.fft.ifft(xs.bins * hs.bins) * np.exp(1j * phi))
        worst = max(worst, _rel_err(cpe.bins + ici.bins, direct))
    return CheckResult("cpe_ici_reconstruction", worst <= 1e-9, f"max_rel_err={worst:.3e}")


def brute_force_wf(y: np.ndarray, u: np.ndarray, window_m: int) -> np.ndarray:
    """Per-window weight evaluated sample by sample."""
    out = np.zeros(y.size)
    for start in range(0, y.size, window_m):
        num, den = 0j, 0.0
        for n in range(start, min(start + window_m, y.size)):
            num += y[n] * np.conj(u[n])
            den += abs(u[n]) ** 2
        out[start:start + window_m] = np.angle(num / den) if den > 0 else 0.0
    return out


def check_wf_brute_force() -> CheckResult:
    worst = 0.0
    for seed in range(ORACLE_SEEDS):
        y, u, _ = _oracle_inputs(seed)
        for m in (1, 3, ORACLE_N):
            fast = wf_estimate(y, u, m).phases
            diff = np.angle(np.exp(1j * (fast - brute_force_wf(y, u, m))))
            worst = max(worst, float(np.max(np.abs(diff))))
    return CheckResult("wf_brute_force", worst <= 1e-12, f"max_abs_err={worst:.3e}")


def exactness_scenario(inject_phase=None, seed: int = 7) -> LinkScenario:
    """Two-symbol frame with every impairment switched off."""
    return LinkScenario(
        ofdm=OfdmConfig(n_symbols=2),
        pn=PnSettings(beta_hz=0.0, inject_phase=inject_phase),
        ch_err_rel_db=-300.0,
        sir_at_digital_db=-300.0,
        snr_soi_db=300.0,
        seed=seed,
        n_trials=1,
    )


def _estimator_scenarios(base: LinkScenario):
    for kind in RUNNABLE_KINDS:
        yield kind.value, base.model_copy(update={"estimator": EstimatorConfig(kind=kind)})


def check_zero_impairment() -> CheckResult:
    values = {label: si_suppression_db(run_trial(s, 0)) for label, s in _estimator_scenarios(exactness_scenario())}
    ok = all(v == SUPPRESSION_CAP_DB for v in values.values())
    return CheckResult("zero_impairment_cap", ok, ", ".join(f"{k}={v:g}" for k, v in values.items()))


def check_constant_phase() -> CheckResult:
    worst = 0.0
    capped = True
    for c in INJECTED_PHASES:
        for _, s in _estimator_scenarios(exactness_scenario(inject_phase=c)):
            a = run_trial(s, 0)
            worst = max(worst, float(np.max(np.abs(np.angle(np.exp(1j * (a.phi_hat.phases - c)))))))
            capped = capped and si_suppression_db(a) == SUPPRESSION_CAP_DB
    return CheckResult("constant_phase", worst <= 1e-9 and capped, f"max_phase_err={worst:.3e} capped={capped}")


CHECKS: Tuple[Callable[[], CheckResult], ...] = (
    check_pn_duality,
    check_cpe_ici_reconstruction,
    check_wf_brute_force,
    check_zero_impairment,
    check_constant_phase,
)


def run_selftest() -> SelftestReport:
    report = SelftestReport()
    for check in CHECKS:
        result = check()
        logger.info("[Selftest] %s: %s %s", result.name, "ok" if result.passed else "FAILED", result.detail)
        report.checks.append(result)
    return report
