import numpy as np
import pytest

from Estimators.estimators_main import EstimatorConfig, EstimatorKind
from sim_State.link_state import LinkScenario, PnSettings
from sim_State.sweeps import (
    best_window,
    default_estimators,
    flatten_scenario,
    run_point,
    scenario_with,
    sweep_atten_diff,
    sweep_beta,
    sweep_window,
    window_label,
)
from Signal_Core.errors import ConfigurationError, InputError
from Signal_Core.signal_core_main import OfdmConfig

WF = EstimatorKind.WF_WINDOW.value
CPE = EstimatorKind.ONLY_CPE.value
LPF = EstimatorKind.LPF_BASED.value

BETAS = [1.0, 10.0, 100.0, 1000.0, 10000.0]
# attenuation differences around the WF / CPE crossover
DIFFS = [float(d) for d in range(-93, -32, 6)]
WINDOWS = [1, 5, 15, 35, 70, 150, 548, 1096]


def _fig3_estimators():
    return [
        EstimatorConfig(kind=EstimatorKind.WF_WINDOW, window_m=35),
        EstimatorConfig(kind=EstimatorKind.ONLY_CPE),
        EstimatorConfig(kind=EstimatorKind.LPF_BASED, lpf_len_l=50, lpf_alignment="causal"),
    ]


class TestSweepPlumbing:
    def test_scenario_with_revalidates(self, desk_scenario):
        s = scenario_with(desk_scenario, pn__beta_hz=1000.0)
        assert s.pn.beta_hz == 1000.0
        assert s.seed == desk_scenario.seed
        with pytest.raises(ConfigurationError):
            scenario_with(desk_scenario, pn__beta_hz=-1.0)

    def test_default_estimators_follow_template(self, desk_scenario):
        kinds = [e.kind for e in default_estimators(desk_scenario)]
        assert kinds == [EstimatorKind.WF_WINDOW, EstimatorKind.ONLY_CPE, EstimatorKind.LPF_BASED]
        assert all(e.window_m == desk_scenario.estimator.window_m for e in default_estimators(desk_scenario))

    def test_duplicate_estimators_rejected(self, desk_scenario):
        twice = [EstimatorConfig(), EstimatorConfig(window_m=5)]
        with pytest.raises(ConfigurationError):
            sweep_beta(desk_scenario, [10.0], twice)

    def test_flatten_has_every_field(self, desk_scenario):
        flat = flatten_scenario(desk_scenario)
        assert flat["pn.beta_hz"] == "10.0"
        assert flat["ofdm.n_symbols"] == "8"
        assert flat["atten_diff_db"] == "none"
        assert flat["estimator.kind"] == "wf_window"

    def test_run_point_statistics(self, clean_scenario):
        stats = run_point(clean_scenario.model_copy(update={"n_trials": 3}))
        assert stats.values == (300.0, 300.0, 300.0)
        assert stats.mean_db == 300.0 and stats.ci95_db == 0.0

    def test_thread_count_does_not_change_results(self, desk_scenario):
        s = desk_scenario.model_copy(update={"n_trials": 6})
        assert run_point(s, threads=1) == run_point(s, threads=3)

    def test_deterministic(self, desk_scenario):
        s = desk_scenario.model_copy(update={"n_trials": 4})
        a = sweep_beta(s, [10.0, 100.0])
        b = sweep_beta(s, [10.0, 100.0])
        assert a.rows == b.rows and a.metadata == b.metadata

    def test_every_row_has_every_label(self, desk_scenario):
        result = sweep_beta(desk_scenario.model_copy(update={"n_trials": 2}), [0.0, 100.0])
        assert result.labels == (WF, CPE, LPF)
        assert all(set(row.cells) == set(result.labels) for row in result.rows)
        assert result.metadata["seed"] == str(desk_scenario.seed)
        assert "metric" in result.metadata

    def test_explicit_columns_recorded(self, clean_scenario):
        result = sweep_beta(clean_scenario, [0.0], _fig3_estimators())
        meta = result.metadata
        assert meta[f"estimator.{LPF}.lpf_alignment"] == "causal"
        assert meta[f"estimator.{LPF}.lpf_len_l"] == "50"
        assert meta[f"estimator.{WF}.window_m"] == "35"
        assert meta["scenario.estimator.lpf_alignment"] == "centered"

    def test_window_columns_recorded(self, clean_scenario):
        meta = sweep_window(clean_scenario, [1, 1096]).metadata
        assert meta[f"estimator.{window_label(WF, -300.0)}.window_m"] == "x_value"
        assert meta[f"estimator.{window_label(CPE, -300.0)}.kind"] == CPE

    def test_all_impairments_off_caps(self, clean_scenario):
        result = sweep_beta(clean_scenario, [0.0])
        assert len(result.rows) == 1
        assert all(mean == 300.0 for mean, _ in result.rows[0].cells.values())

    def test_atten_sweep_sets_linkage(self, desk_scenario):
        result = sweep_atten_diff(desk_scenario.model_copy(update={"n_trials": 2}), [-75.0])
        assert result.x_name == "atten_diff_db"
        assert result.x_values == [-75.0]

    def test_best_window(self, desk_scenario):
        result = sweep_window(desk_scenario.model_copy(update={"n_trials": 2}), [5, 35])
        assert best_window(result) in (5.0, 35.0)
        with pytest.raises(InputError):
            best_window(result, "nope")

    def test_window_sweep_rejects_bad_sizes(self, desk_scenario):
        with pytest.raises(ConfigurationError):
            sweep_window(desk_scenario, [0, 5])


@pytest.mark.slow
class TestLinewidthSweep:
    @pytest.fixture(scope="class")
    def result(self):
        s = LinkScenario(ofdm=OfdmConfig(n_symbols=8), pn=PnSettings(beta_hz=10.0),
                         sir_at_digital_db=-30.0, seed=2024, n_trials=200)
        return sweep_beta(s, BETAS, _fig3_estimators())

    def test_non_increasing_in_linewidth(self, result):
        for label in result.labels:
            means = result.column(label)
            assert all(b <= a + 0.5 for a, b in zip(means, means[1:])), (label, means)

    def test_wf_beats_lpf_at_large_linewidth(self, result):
        wf, lpf = result.column(WF), result.column(LPF)
        assert wf[-2] >= lpf[-2]
        assert wf[-1] >= lpf[-1] + 2.0

    def test_wf_beats_cpe_from_100_hz(self, result):
        wf, cpe = result.column(WF), result.column(CPE)
        for x, a, b in zip(result.x_values, wf, cpe):
            if x >= 100.0:
                assert a >= b


@pytest.mark.slow
def test_zero_linewidth_estimators_agree():
    s = LinkScenario(ofdm=OfdmConfig(n_symbols=8), pn=PnSettings(beta_hz=0.0),
                     sir_at_digital_db=-300.0, seed=77, n_trials=200)
    row = sweep_beta(s, [0.0]).rows[0]
    means = [mean for mean, _ in row.cells.values()]
    assert max(means) - min(means) <= 0.5
    # channel-estimate error at -40 dB bounds what any phase estimator can reach
    assert min(means) >= 38.0


@pytest.mark.slow
class TestAttenuationSweep:
    @pytest.fixture(scope="class")
    def result(self):
        s = LinkScenario(ofdm=OfdmConfig(n_symbols=8), pn=PnSettings(beta_hz=10.0), seed=4242, n_trials=200)
        return sweep_atten_diff(s, DIFFS)

    def test_cpe_leads_at_highest_difference(self, result):
        last = result.rows[-1].cells
        assert last[CPE][0] > last[WF][0]
        assert last[CPE][0] > last[LPF][0]

    def test_single_crossover(self, result):
        wf_ahead = [a > b for a, b in zip(result.column(WF), result.column(CPE))]
        flips = [i for i in range(1, len(wf_ahead)) if wf_ahead[i] != wf_ahead[i - 1]]
        assert wf_ahead[0] and len(flips) == 1
        assert -81.0 <= result.x_values[flips[0] - 1] and result.x_values[flips[0]] <= -57.0

    def test_wf_degrades_with_soi(self, result):
        wf = result.column(WF)
        assert all(b <= a + 0.5 for a, b in zip(wf, wf[1:]))

    def test_no_soi_wf_beats_cpe(self):
        s = LinkScenario(ofdm=OfdmConfig(n_symbols=8), pn=PnSettings(beta_hz=10.0),
                         atten_diff_db=-300.0, seed=4242, n_trials=30)
        row = sweep_atten_diff(s, [-300.0]).rows[0].cells
        assert row[WF][0] >= row[CPE][0]


@pytest.mark.slow
class TestWindowSweep:
    @pytest.fixture(scope="class")
    def result(self):
        s = LinkScenario(ofdm=OfdmConfig(n_symbols=8), pn=PnSettings(beta_hz=10.0),
                         sir_at_digital_db=-30.0, seed=555, n_trials=200)
        return sweep_window(s, WINDOWS, sirs=[-30.0, -10.0])

    def test_interior_optimum(self, result):
        best = best_window(result, window_label(WF, -30.0))
        assert 10.0 <= best <= 100.0
        assert result.metadata[f"best_window.{window_label(WF, -30.0)}"] == f"{best:g}"

    def test_symbol_window_equals_only_cpe(self, result):
        for sir in (-30.0, -10.0):
            last = result.rows[-1].cells
            assert last[window_label(WF, sir)] == last[window_label(CPE, sir)]

    def test_stronger_soi_lowers_the_curve(self, result):
        high = result.column(window_label(WF, -10.0))
        low = result.column(window_label(WF, -30.0))
        assert all(h <= l for h, l in zip(high, low))

    def test_window_one_matches_per_sample_lpf(self):
        s = LinkScenario(ofdm=OfdmConfig(n_symbols=8), pn=PnSettings(beta_hz=10.0),
                         sir_at_digital_db=-30.0, seed=555, n_trials=20)
        wf1 = sweep_window(s, [1]).rows[0].cells[window_label(WF, -30.0)][0]
        lpf1 = run_point(s.model_copy(update={"estimator": EstimatorConfig(kind=EstimatorKind.LPF_BASED,
                                                                           lpf_len_l=1)})).mean_db
        assert abs(wf1 - lpf1) <= 1.0
        assert np.isfinite(wf1)
