# conftest.py
import pytest

from sim_State.link_state import LinkScenario, PnSettings
from Signal_Core.rng_streams import RngStream
from Signal_Core.signal_core_main import OfdmConfig


@pytest.fixture
def rng():
    return RngStream(1234, "tests")


@pytest.fixture
def small_ofdm():
    """Two-symbol frame on the default numerology."""
    return OfdmConfig(n_symbols=2)


@pytest.fixture
def clean_scenario(small_ofdm):
    """Every impairment off: no PN, exact channel estimate, no SOI, no noise."""
    return LinkScenario(
        ofdm=small_ofdm,
        pn=PnSettings(beta_hz=0.0),
        ch_err_rel_db=-300.0,
        sir_at_digital_db=-300.0,
        snr_soi_db=300.0,
        seed=11,
        n_trials=1,
    )


@pytest.fixture
def desk_scenario():
    """Desk-scale link: 8 OFDM symbols per frame, SIR -30 dB at the canceller."""
    return LinkScenario(
        ofdm=OfdmConfig(n_symbols=8),
        pn=PnSettings(beta_hz=10.0),
        sir_at_digital_db=-30.0,
        seed=2024,
        n_trials=40,
    )
