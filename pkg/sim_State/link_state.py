from dataclasses import dataclass
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import TypedDict

from Estimators.estimators_main import EstimatorConfig, PhaseEstimate
from Impairments.impairments_main import (
    ChannelEstimate,
    ChannelModel,
    ChannelParams,
    OscillatorMode,
    PhaseNoiseParams,
    PhasePath,
)
from Signal_Core.rng_streams import RngStream
from Signal_Core.signal_core_main import ComplexSignal, OfdmConfig


class PnSettings(BaseModel):
    """Oscillator settings; the sampling interval comes from the OFDM numerology."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    beta_hz: float = Field(10.0, ge=0)
    model: Literal["wiener", "ou"] = "wiener"
    pll_corner_hz: float = Field(1.0e3, gt=0)
    # constant SI phase in radians replacing the Wiener paths (exactness runs)
    inject_phase: Optional[float] = None


class LinkScenario(BaseModel):
    """
    Full description of one link experiment.

    The SOI-to-SI ratio at the digital canceller input is given either directly
    (sir_at_digital_db) or as the channel attenuation difference before antenna
    separation and analog SIC (atten_diff_db):
        sir_at_digital = atten_diff + antenna_sep + analog_sic
    Setting neither selects sir_at_digital_db = -30 dB.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    ofdm: OfdmConfig = OfdmConfig()
    pn: PnSettings = PnSettings()
    osc_mode: OscillatorMode = OscillatorMode.COMMON
    si_channel: ChannelParams = ChannelParams(k_db=30.0, n_taps=2, decay_db=20.0)
    soi_channel: ChannelParams = ChannelParams(k_db=6.0, n_taps=4, decay_db=3.0)
    ch_err_rel_db: float = -40.0
    antenna_sep_db: float = 30.0
    analog_sic_db: float = 30.0
    sir_at_digital_db: Optional[float] = None
    atten_diff_db: Optional[float] = None
    snr_soi_db: float = 25.0
    estimator: EstimatorConfig = EstimatorConfig()
    seed: int = Field(1, ge=0, lt=2**64)
    n_trials: int = Field(200, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _default_sir(cls, data):
        if isinstance(data, dict):
            if data.get("sir_at_digital_db") is None and data.get("atten_diff_db") is None:
                data = dict(data)
                data["sir_at_digital_db"] = -30.0
        return data

    @model_validator(mode="after")
    def _one_power_reference(self) -> "LinkScenario":
        if self.sir_at_digital_db is not None and self.atten_diff_db is not None:
            raise ValueError("set exactly one of sir_at_digital_db / atten_diff_db")
        return self

    @property
    def sir_db(self) -> float:
        if self.sir_at_digital_db is not None:
            return self.sir_at_digital_db
        return self.atten_diff_db + self.antenna_sep_db + self.analog_sic_db

    @property
    def attenuation_difference_db(self) -> float:
        return self.sir_db - self.antenna_sep_db - self.analog_sic_db

    def pn_params(self) -> PhaseNoiseParams:
        return PhaseNoiseParams(
            beta_hz=self.pn.beta_hz,
            ts_s=self.ofdm.ts,
            model=self.pn.model,
            pll_corner_hz=self.pn.pll_corner_hz,
        )


class TrialState(TypedDict):
    """
    Shared state of the per-trial graph. Every stage node reads from and
    writes to this state; the router reads `next_node`.
    """

    scenario: LinkScenario
    trial_index: int
    # root stream of this trial; stages fork their own children from it
    rng: RngStream

    # Name of the stage currently running and the one the router should pick.
    active_stage: Optional[str]
    next_node: Optional[str]

    # Transmit frames (before any impairment).
    x_si: Optional[ComplexSignal]
    x_soi: Optional[ComplexSignal]

    # Oscillator phases: SI transmitter, SOI transmitter, shared receiver.
    phase_si_tx: Optional[PhasePath]
    phase_soi_tx: Optional[PhasePath]
    phase_rx: Optional[PhasePath]

    si_channel: Optional[ChannelModel]
    soi_channel: Optional[ChannelModel]
    si_estimate: Optional[ChannelEstimate]

    # Calibrated components at the digital canceller input; y = si_true + soi + noise.
    si_true: Optional[ComplexSignal]
    soi: Optional[ComplexSignal]
    noise: Optional[ComplexSignal]
    y: Optional[ComplexSignal]
    u: Optional[ComplexSignal]

    phi_hat: Optional[PhaseEstimate]
    residual: Optional[ComplexSignal]

    done: bool


@dataclass(frozen=True, eq=False)
class TrialArtifacts:
    """Everything one trial produced; `si_true` is the oracle SI component."""

    trial_index: int
    estimator: str
    y: ComplexSignal
    u: ComplexSignal
    si_true: ComplexSignal
    soi: ComplexSignal
    noise: ComplexSignal
    residual: ComplexSignal
    phi_hat: PhaseEstimate
    true_phase: PhasePath
