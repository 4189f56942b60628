import pytest

from Estimators.estimators_main import EstimatorKind
from sim_State.sweeps import SweepResult, SweepRow
from sim_tools.csv_tools import parse_sweep_csv, render_sweep_csv
from sim_tools.run_config import RunConfig, load_run_config, parse_run_config, with_seed
from Signal_Core.errors import ConfigFileError

GOOD = """\
# desk-scale linewidth sweep
pn.beta_hz = 100
ofdm.n_symbols = 8
estimator.window_m = 15
estimator.lpf_alignment = causal
sweep.betas = 1, 10, 100
sweep.estimators = wf_window, only_cpe
seed = 17
n_trials = 25
output.csv = out/fig3.csv
"""


class TestParse:
    def test_values_reach_the_scenario(self):
        cfg = parse_run_config(GOOD)
        s = cfg.scenario
        assert s.pn.beta_hz == 100.0
        assert s.ofdm.n_symbols == 8
        assert s.estimator.window_m == 15
        assert s.estimator.lpf_alignment == "causal"
        assert s.seed == 17 and s.n_trials == 25
        assert cfg.sweep.betas == (1.0, 10.0, 100.0)
        assert cfg.sweep.estimators == (EstimatorKind.WF_WINDOW, EstimatorKind.ONLY_CPE)
        assert cfg.output.csv == "out/fig3.csv"

    def test_defaults_when_empty(self):
        cfg = parse_run_config("")
        assert cfg.scenario.sir_db == -30.0
        assert cfg.sweep.windows == (1, 5, 15, 35, 70, 150, 548, 1096)
        assert cfg.sweep.diffs[0] == -60.0 and cfg.sweep.diffs[-1] == -30.0

    def test_atten_reference(self):
        cfg = parse_run_config("atten_diff_db = -45\n")
        assert cfg.scenario.sir_db == pytest.approx(15.0)

    def test_explicit_subcarriers(self):
        cfg = parse_run_config("ofdm.n_fft = 16\nofdm.cp_len = 4\nofdm.used_subcarriers = 1, 2, 15\n")
        assert cfg.scenario.ofdm.used_subcarriers == (1, 2, 15)
        assert cfg.scenario.ofdm.n_used == 3

    def test_none_clears_optional(self):
        cfg = parse_run_config("pn.inject_phase = none\n")
        assert cfg.scenario.pn.inject_phase is None


class TestErrors:
    @pytest.mark.parametrize("text, line", [
        ("pn.beta_hz = 10\npn.betahz = 10\n", 2),
        ("seed = 1\n\nseed = 2\n", 3),
        ("# ok\nthis line has no equals\n", 2),
        ("ofdm.n_fft = 64\nestimator.window_m = 0\n", 2),
        ("pn.beta_hz = fast\n", 1),
        ("sweep.windows = 5, x\n", 1),
        ("= 4\n", 1),
        ("seed = 3\nsi_channel.k_db = inf\n", 2),
        ("pn.model = brownian\n", 1),
    ])
    def test_line_numbers(self, text, line):
        with pytest.raises(ConfigFileError) as info:
            parse_run_config(text, "run.cfg")
        assert info.value.line_no == line
        assert f"run.cfg:{line}" in str(info.value)

    def test_both_power_references(self):
        with pytest.raises(ConfigFileError) as info:
            parse_run_config("sir_at_digital_db = -30\natten_diff_db = -45\n")
        assert info.value.line_no == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_run_config(str(tmp_path / "absent.cfg"))


class TestEcho:
    def test_echo_is_verbatim_and_complete(self):
        cfg = parse_run_config(GOOD, "fig3.cfg")
        meta = cfg.echo()
        assert meta["config.path"] == "fig3.cfg"
        assert meta["config.line.1"] == "# desk-scale linewidth sweep"
        assert meta["config.line.2"] == "pn.beta_hz = 100"
        assert meta["config.effective.pn.beta_hz"] == "100.0"
        assert meta["config.effective.snr_soi_db"] == "25.0"
        assert meta["config.effective.sweep.estimators"] == "wf_window,only_cpe"

    def test_seed_override(self):
        cfg = with_seed(parse_run_config(GOOD), 99)
        assert cfg.scenario.seed == 99
        assert with_seed(cfg, None) is cfg
        with pytest.raises(ConfigFileError):
            with_seed(cfg, -5)

    def test_load_defaults(self):
        assert load_run_config(None) == RunConfig()


class TestCsvRoundTrip:
    def test_render_and_parse(self):
        result = SweepResult(
            "beta_hz", ("wf_window", "only_cpe"),
            [SweepRow(10.0, {"wf_window": (36.123456789012, 0.25), "only_cpe": (25.5, 0.125)}),
             SweepRow(100.0, {"wf_window": (29.0, 0.5), "only_cpe": (-1.0e-3, 0.0)})],
            {"sweep": "beta", "seed": "3", "metric": "a: b"},
        )
        text = render_sweep_csv(result, {"config.line.1": "seed = 3"})
        lines = text.split("\n")
        assert lines[0].startswith("# ")
        header = next(l for l in lines if not l.startswith("#"))
        assert header == "x_value,wf_window_mean_db,wf_window_ci95_db,only_cpe_mean_db,only_cpe_ci95_db"
        assert "3.61234567890e+01" in text

        back = parse_sweep_csv(text)
        assert back.labels == result.labels
        assert back.x_name == "beta_hz"
        assert back.metadata["metric"] == "a: b"
        assert back.metadata["config.line.1"] == "seed = 3"
        for a, b in zip(back.rows, result.rows):
            assert a.x_value == b.x_value
            for label in result.labels:
                assert a.cells[label][0] == pytest.approx(b.cells[label][0], rel=1e-11)
                assert a.cells[label][1] == pytest.approx(b.cells[label][1], rel=1e-11)

    def test_reparse_is_stable(self):
        result = SweepResult("window_m", ("x",), [SweepRow(35.0, {"x": (1 / 3, 2 / 3)})], {})
        once = render_sweep_csv(result)
        assert render_sweep_csv(parse_sweep_csv(once)) == once
