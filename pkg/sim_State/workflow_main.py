# workflow_main.py
import logging
import math
from functools import lru_cache
from typing import Union

import numpy as np
from langgraph.graph import END, StateGraph
from pydantic import ValidationError

from sim_State.link_state import LinkScenario, TrialArtifacts, TrialState
from sim_State.trial_stages import (
    ESTIMATOR_NODES,
    canceller,
    channels,
    oscillators,
    receiver,
    transmitter,
)
from Impairments.impairments_main import combined_pn
from Signal_Core.errors import ConfigurationError, InputError, UndefinedMetricError
from Signal_Core.rng_streams import RngStream

logger = logging.getLogger(__name__)

# Reported value when the residual SI is at round-off level.
SUPPRESSION_CAP_DB = 300.0
# Residual below this fraction of the SI power counts as round-off.
ROUNDOFF_FLOOR = 1e-25

METRIC_DEFINITION = (
    "si_suppression_db = 10*log10(sum|si_true|^2 / sum|si_true - u*exp(j*phi_hat)|^2); "
    f"reported as {SUPPRESSION_CAP_DB:g} when the residual is at most {ROUNDOFF_FLOOR:g} of the SI power "
    f"(everything above {-10 * math.log10(ROUNDOFF_FLOOR):g} dB reads as the cap)"
)


def estimator_router(state: TrialState) -> str:
    """Receiver hands over to the estimator named in the scenario."""
    next_node = (state.get("next_node") or "").strip().lower()
    if next_node not in ESTIMATOR_NODES:
        raise InputError(f"estimator {next_node!r} cannot run inside a trial")
    return next_node


def create_trial_graph():
    """transmitter -> oscillators -> channels -> receiver -> estimator -> canceller -> END"""
    graph = StateGraph(TrialState)

    graph.add_node("transmitter", transmitter)
    graph.add_node("oscillators", oscillators)
    graph.add_node("channels", channels)
    graph.add_node("receiver", receiver)
    for name, node in ESTIMATOR_NODES.items():
        graph.add_node(name, node)
    graph.add_node("canceller", canceller)

    graph.set_entry_point("transmitter")
    graph.add_edge("transmitter", "oscillators")
    graph.add_edge("oscillators", "channels")
    graph.add_edge("channels", "receiver")

    graph.add_conditional_edges(
        "receiver",
        estimator_router,
        {name: name for name in ESTIMATOR_NODES},
    )
    for name in ESTIMATOR_NODES:
        graph.add_edge(name, "canceller")

    graph.add_edge("canceller", END)
    return graph.compile()


@lru_cache(maxsize=1)
def get_trial_graph():
    return create_trial_graph()


def as_scenario(scenario: Union[LinkScenario, dict]) -> LinkScenario:
    if isinstance(scenario, LinkScenario):
        return scenario
    try:
        return LinkScenario.model_validate(scenario)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid scenario: {exc}") from exc


def create_initial_state(scenario: LinkScenario, trial_index: int) -> TrialState:
    return {
        "scenario": scenario,
        "trial_index": trial_index,
        "rng": RngStream(scenario.seed).fork(f"trial-{trial_index}"),
        "active_stage": None,
        "next_node": None,
        "x_si": None,
        "x_soi": None,
        "phase_si_tx": None,
        "phase_soi_tx": None,
        "phase_rx": None,
        "si_channel": None,
        "soi_channel": None,
        "si_estimate": None,
        "si_true": None,
        "soi": None,
        "noise": None,
        "y": None,
        "u": None,
        "phi_hat": None,
        "residual": None,
        "done": False,
    }


def run_trial(scenario: Union[LinkScenario, dict], trial_index: int = 0) -> TrialArtifacts:
    """
    One frame through the full chain. All randomness comes from the stream
    (seed, "trial-<index>"), so estimators and sweep points that share a seed
    and trial index see the same data, channels and phase-noise increments.
    """
    s = as_scenario(scenario)
    if trial_index < 0:
        raise ConfigurationError(f"trial_index must be >= 0, got {trial_index}")

    final = get_trial_graph().invoke(create_initial_state(s, trial_index))
    logger.debug("[LinkSim] trial %d finished at stage %s", trial_index, final.get("active_stage"))
    if not final.get("done"):
        raise ConfigurationError(f"trial {trial_index} stopped at stage {final.get('active_stage')!r}")

    return TrialArtifacts(
        trial_index=trial_index,
        estimator=s.estimator.label,
        y=final["y"],
        u=final["u"],
        si_true=final["si_true"],
        soi=final["soi"],
        noise=final["noise"],
        residual=final["residual"],
        phi_hat=final["phi_hat"],
        true_phase=combined_pn(final["phase_si_tx"], final["phase_rx"]),
    )


def si_suppression_db(a: TrialArtifacts) -> float:
    """
    SI power before digital SIC over SI power left after it, in dB.
    Only the SI component is measured; SOI and noise do not enter the metric.
    """
    si = a.si_true.samples
    leftover = si - a.u.samples * np.exp(1j * a.phi_hat.phases)
    before = float(np.sum(np.abs(si) ** 2))
    after = float(np.sum(np.abs(leftover) ** 2))
    if before <= 0.0:
        raise UndefinedMetricError("SI component has zero power")
    if after <= before * ROUNDOFF_FLOOR:
        return SUPPRESSION_CAP_DB
    return float(min(10.0 * np.log10(before / after), SUPPRESSION_CAP_DB))
