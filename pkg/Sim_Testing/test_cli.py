import csv
import io

import numpy as np
import pytest

import cli
from sim_tools.csv_tools import read_sweep_csv, read_trial_dump

CLEAN = """\
ofdm.n_symbols = 2
pn.beta_hz = 0
ch_err_rel_db = -300
sir_at_digital_db = -300
snr_soi_db = 300
seed = 5
n_trials = 2
"""


def _write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _tsv(text):
    return list(csv.reader(io.StringIO(text), delimiter="\t"))


class TestOpcount:
    def test_default_table(self, capsys):
        assert cli.main(["opcount"]) == 0
        rows = _tsv(capsys.readouterr().out)
        header, body = rows[0], {r[0]: r for r in rows[1:]}
        per_sample = header.index("per_sample")
        assert set(body) == {"wf_window", "only_cpe", "lpf_based", "td_mmse"}
        assert 3.0 <= float(body["wf_window"][per_sample]) <= 6.0
        assert 150.0 <= float(body["lpf_based"][per_sample]) <= 160.0
        assert float(body["td_mmse"][per_sample]) == pytest.approx(256.0)

    def test_window_one(self, tmp_path, capsys):
        assert cli.main(["opcount", "--config", _write(tmp_path, "estimator.window_m = 1\n")]) == 0
        rows = _tsv(capsys.readouterr().out)
        wf = next(r for r in rows if r[0] == "wf_window")
        assert float(wf[rows[0].index("per_sample")]) == pytest.approx(6.0)


class TestSweepCommands:
    def test_clean_beta_sweep_caps(self, tmp_path):
        cfg = _write(tmp_path, CLEAN + "sweep.betas = 0\n")
        out = tmp_path / "beta.csv"
        assert cli.main(["sweep-beta", "--config", cfg, "--out", str(out)]) == 0
        result = read_sweep_csv(out)
        assert len(result.rows) == 1
        assert all(mean == 300.0 for mean, _ in result.rows[0].cells.values())
        assert result.metadata["config.line.1"] == "ofdm.n_symbols = 2"
        assert result.metadata["seed"] == "5"

    def test_byte_identical_reruns(self, tmp_path):
        cfg = _write(tmp_path, "ofdm.n_symbols = 2\nn_trials = 3\nsweep.betas = 10, 1000\n")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["sweep-beta", "--config", cfg, "--out", str(a)]) == 0
        assert cli.main(["sweep-beta", "--config", cfg, "--out", str(b), "--threads", "2"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        cfg = _write(tmp_path, "ofdm.n_symbols = 2\nn_trials = 2\nsweep.betas = 100\n")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["sweep-beta", "--config", cfg, "--out", str(a)]) == 0
        assert cli.main(["sweep-beta", "--config", cfg, "--out", str(b), "--seed", "6"]) == 0
        assert read_sweep_csv(b).metadata["seed"] == "6"
        assert a.read_bytes() != b.read_bytes()

    def test_window_sweep_symbol_length_matches_cpe(self, tmp_path):
        cfg = _write(tmp_path, "ofdm.n_symbols = 2\nn_trials = 3\nsweep.windows = 35, 1096\n")
        out = tmp_path / "window.csv"
        assert cli.main(["sweep-window", "--config", cfg, "--out", str(out)]) == 0
        result = read_sweep_csv(out)
        last = result.rows[-1]
        assert last.x_value == 1096.0
        assert last.cells["wf_window@-30dB"] == last.cells["only_cpe@-30dB"]

    def test_atten_sweep_to_stdout(self, tmp_path, capsys):
        cfg = _write(tmp_path, "ofdm.n_symbols = 2\nn_trials = 2\nsweep.diffs = -60\n")
        assert cli.main(["sweep-atten", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert "x_value,wf_window_mean_db" in out
        assert "# x_name: atten_diff_db" in out


class TestSingle:
    def test_zero_linewidth_dump(self, tmp_path):
        out = tmp_path / "trial.csv"
        assert cli.main(["single", "--config", _write(tmp_path, CLEAN), "--out", str(out)]) == 0
        dump = read_trial_dump(out)
        assert dump.shape == (2 * 1096, 4)
        np.testing.assert_array_equal(dump[:, 0], np.arange(2 * 1096))
        np.testing.assert_allclose(dump[:, 2], 0.0, atol=1e-12)

    def test_injected_phase_dump(self, tmp_path):
        out = tmp_path / "trial.csv"
        cfg = _write(tmp_path, CLEAN + "pn.inject_phase = 0.7\nestimator.kind = lpf_based\n")
        assert cli.main(["single", "--config", cfg, "--out", str(out)]) == 0
        dump = read_trial_dump(out)
        np.testing.assert_allclose(dump[:, 2], 0.7, atol=1e-9)
        np.testing.assert_allclose(dump[:, 1], 0.7)


class TestExitCodes:
    def test_malformed_config(self, tmp_path, capsys):
        cfg = _write(tmp_path, "seed = 1\nnot a key value line\n")
        assert cli.main(["sweep-beta", "--config", cfg]) == 2
        assert "run.cfg:2" in capsys.readouterr().err

    def test_unknown_key(self, tmp_path, capsys):
        cfg = _write(tmp_path, "pn.bta_hz = 1\n")
        assert cli.main(["single", "--config", cfg]) == 2
        assert "unknown key" in capsys.readouterr().err

    def test_missing_config(self, tmp_path):
        assert cli.main(["opcount", "--config", str(tmp_path / "nope.cfg")]) == 3

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        cfg = _write(tmp_path, CLEAN + "sweep.betas = 0\n")
        assert cli.main(["sweep-beta", "--config", cfg, "--out", str(blocker / "x.csv")]) == 3

    def test_bad_threads(self, tmp_path):
        assert cli.main(["sweep-beta", "--config", _write(tmp_path, CLEAN), "--threads", "0"]) == 2

    def test_selftest(self, capsys):
        assert cli.main(["selftest"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines and all(line.startswith("PASS") for line in lines)


class TestSettings:
    def test_environment(self, monkeypatch):
        from sim_config import get_settings

        monkeypatch.setenv("FDSIC_THREADS", "4")
        monkeypatch.setenv("FDSIC_PROGRESS", "true")
        monkeypatch.setenv("FDSIC_LOG_LEVEL", "debug")
        s = get_settings()
        assert (s.threads, s.progress, s.log_level) == (4, True, "DEBUG")

    def test_bad_thread_count_falls_back(self, monkeypatch):
        from sim_config import get_settings

        monkeypatch.setenv("FDSIC_THREADS", "many")
        assert get_settings().threads == 1
