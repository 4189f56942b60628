# trial_stages.py
"""
Stage nodes of the per-trial signal chain. Each node takes the shared
TrialState, fills in its own fields and hands the state back to the graph.

Received baseband at the digital canceller input:

    y = g * ((x_si e^{j phi_t}) * h_si) e^{j phi_r}       (SI, unit power)
      + a * ((x_soi e^{j phi_s}) * h_soi) e^{j phi_r}     (SOI, power = SIR)
      + z                                                  (AWGN, power = SIR / SNR)

and the canceller reference is u = g * (x_si * h_hat).
"""
import logging

import numpy as np

from Estimators.estimators_main import (
    EstimatorKind,
    lpf_estimate,
    mitigate_and_cancel,
    only_cpe_estimate,
    reference_signal,
    wf_estimate,
)
from Impairments.impairments_main import (
    OscillatorMode,
    PhasePath,
    apply_channel,
    apply_pn,
    awgn,
    gen_phase_noise,
    gen_rician_channel,
    perturb_channel_estimate,
)
from sim_State.link_state import TrialState
from Signal_Core.errors import SimulationError
from Signal_Core.signal_core_main import ComplexSignal, ofdm_modulate, random_qam_symbols

logger = logging.getLogger(__name__)


def transmitter(state: TrialState) -> TrialState:
    state["active_stage"] = "transmitter"
    s = state["scenario"]
    rng = state["rng"]
    state["x_si"] = ofdm_modulate(random_qam_symbols(s.ofdm, rng.fork("si-bits")), s.ofdm)
    state["x_soi"] = ofdm_modulate(random_qam_symbols(s.ofdm, rng.fork("soi-bits")), s.ofdm)
    return state


def oscillators(state: TrialState) -> TrialState:
    """
    Common mode: SI TX and RX run off one oscillator, so both see the same path.
    Independent mode: separate TX and RX oscillators.
    The remote SOI transmitter always has its own oscillator.
    """
    state["active_stage"] = "oscillators"
    s = state["scenario"]
    rng = state["rng"]
    n = s.ofdm.frame_len
    p = s.pn_params()

    state["phase_soi_tx"] = gen_phase_noise(p, n, rng.fork("pn-soi"))

    if s.pn.inject_phase is not None:
        state["phase_si_tx"] = PhasePath.constant(s.pn.inject_phase, n)
        state["phase_rx"] = PhasePath.constant(0.0, n)
        return state

    if s.osc_mode is OscillatorMode.COMMON:
        shared = gen_phase_noise(p, n, rng.fork("pn-tx"))
        state["phase_si_tx"] = shared
        state["phase_rx"] = shared
    else:
        state["phase_si_tx"] = gen_phase_noise(p, n, rng.fork("pn-tx"))
        state["phase_rx"] = gen_phase_noise(p, n, rng.fork("pn-rx"))
    return state


def channels(state: TrialState) -> TrialState:
    state["active_stage"] = "channels"
    s = state["scenario"]
    rng = state["rng"]
    si = s.si_channel
    soi = s.soi_channel
    h_si = gen_rician_channel(si.k_db, si.n_taps, si.pdp(), rng.fork("si-channel"))
    state["si_channel"] = h_si
    state["soi_channel"] = gen_rician_channel(soi.k_db, soi.n_taps, soi.pdp(), rng.fork("soi-channel"))
    state["si_estimate"] = perturb_channel_estimate(h_si, s.ch_err_rel_db, rng.fork("ch-err"))
    return state


def receiver(state: TrialState) -> TrialState:
    """Power calibration, composition of y and the canceller reference u."""
    state["active_stage"] = "receiver"
    s = state["scenario"]
    rng = state["rng"]
    rate = s.ofdm.sample_rate

    si_raw = apply_pn(apply_channel(apply_pn(state["x_si"], state["phase_si_tx"]), state["si_channel"]),
                      state["phase_rx"])
    soi_raw = apply_pn(apply_channel(apply_pn(state["x_soi"], state["phase_soi_tx"]), state["soi_channel"]),
                       state["phase_rx"])

    si_power = si_raw.power()
    soi_power = soi_raw.power()
    if si_power <= 0.0 or soi_power <= 0.0:
        raise SimulationError("received SI or SOI frame carries no power")

    gain = 1.0 / np.sqrt(si_power)
    sir_lin = 10.0 ** (s.sir_db / 10.0)
    noise_power = sir_lin * 10.0 ** (-s.snr_soi_db / 10.0)

    si_true = ComplexSignal(si_raw.samples * gain, rate)
    soi = ComplexSignal(soi_raw.samples * np.sqrt(sir_lin / soi_power), rate)
    noise = ComplexSignal(awgn(len(si_true), noise_power, rng.fork("awgn")), rate)

    state["si_true"] = si_true
    state["soi"] = soi
    state["noise"] = noise
    state["y"] = ComplexSignal(si_true.samples + soi.samples + noise.samples, rate)

    reference = reference_signal(state["x_si"], state["si_estimate"])
    state["u"] = ComplexSignal(reference.samples * gain, rate)

    state["next_node"] = s.estimator.kind.value
    return state


def wf_window(state: TrialState) -> TrialState:
    state["active_stage"] = "wf_window"
    state["phi_hat"] = wf_estimate(state["y"], state["u"], state["scenario"].estimator.window_m)
    return state


def only_cpe(state: TrialState) -> TrialState:
    state["active_stage"] = "only_cpe"
    state["phi_hat"] = only_cpe_estimate(state["y"], state["u"], state["scenario"].ofdm)
    return state


def lpf_based(state: TrialState) -> TrialState:
    state["active_stage"] = "lpf_based"
    cfg = state["scenario"].estimator
    state["phi_hat"] = lpf_estimate(
        state["y"], state["u"], cfg.lpf_len_l, cfg.lpf_kind, cfg.lpf_alignment, cfg.lpf_cutoff
    )
    return state


def canceller(state: TrialState) -> TrialState:
    state["active_stage"] = "canceller"
    phi_hat = state["phi_hat"]
    if phi_hat.flagged:
        logger.debug("[LinkSim] trial %d: %d degenerate estimator windows",
                     state["trial_index"], len(phi_hat.degenerate))
    state["residual"] = mitigate_and_cancel(state["y"], state["u"], phi_hat)
    state["done"] = True
    return state


ESTIMATOR_NODES = {
    EstimatorKind.WF_WINDOW.value: wf_window,
    EstimatorKind.ONLY_CPE.value: only_cpe,
    EstimatorKind.LPF_BASED.value: lpf_based,
}
