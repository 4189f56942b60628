# cli.py
"""
Command-line front end.

    python cli.py sweep-beta   --config fig3.cfg --out fig3.csv
    python cli.py sweep-atten  --config fig4.cfg --out fig4.csv
    python cli.py sweep-window --config fig5.cfg --out fig5.csv
    python cli.py single       --config one.cfg  --out trial.csv
    python cli.py opcount      --config table.cfg
    python cli.py selftest

Exit status: 0 success, 1 selftest failure, 2 configuration error, 3 I/O error.
"""
import argparse
import logging
import sys
from typing import List, Optional

from Estimators.op_count import op_count
from Estimators.estimators_main import EstimatorKind
from sim_config import get_settings, setup_logging
from sim_State import __version__
from sim_State.sweeps import sweep_atten_diff, sweep_beta, sweep_window
from sim_State.workflow_main import METRIC_DEFINITION, run_trial, si_suppression_db
from sim_tools.csv_tools import fmt, render_sweep_csv, render_trial_dump, write_sweep_csv, write_trial_dump
from sim_tools.run_config import RunConfig, load_run_config, with_seed
from sim_tools.selftest import run_selftest
from Signal_Core.errors import ConfigurationError, SimulationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SELFTEST_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdsic", description="Full-duplex phase-noise SIC simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, out: bool = True) -> None:
        p.add_argument("--config", metavar="PATH", help="key = value run configuration")
        if out:
            p.add_argument("--out", metavar="PATH", help="output CSV (default: output.* key, else stdout)")
        p.add_argument("--seed", type=int, metavar="U64", help="override scenario seed")
        p.add_argument("--threads", type=int, metavar="N", help="worker threads for trials")

    common(sub.add_parser("sweep-beta", help="suppression vs. PN 3-dB bandwidth"))
    common(sub.add_parser("sweep-atten", help="suppression vs. channel attenuation difference"))
    common(sub.add_parser("sweep-window", help="suppression vs. WF window size"))
    single = sub.add_parser("single", help="per-sample dump of one trial")
    common(single)
    single.add_argument("--trial", type=int, default=0, help="trial index (default 0)")
    common(sub.add_parser("opcount", help="estimator complexity table (TSV on stdout)"), out=False)
    sub.add_parser("selftest", help="exact small-size oracles")
    return parser


def _load(args) -> RunConfig:
    cfg = load_run_config(getattr(args, "config", None))
    return with_seed(cfg, getattr(args, "seed", None))


def _threads(args, default: int) -> int:
    threads = getattr(args, "threads", None)
    if threads is None:
        return default
    if threads < 1:
        raise ConfigurationError(f"--threads must be >= 1, got {threads}")
    return threads


def cmd_sweep(kind: str, args, settings) -> int:
    cfg = _load(args)
    s = cfg.scenario
    threads = _threads(args, settings.threads)
    estimators = [s.estimator.model_copy(update={"kind": k}) for k in cfg.sweep.estimators]

    logger.info("[Sweep] %s: seed=%d n_trials=%d threads=%d", kind, s.seed, s.n_trials, threads)
    if kind == "beta":
        result = sweep_beta(s, cfg.sweep.betas, estimators, threads, settings.progress)
    elif kind == "atten":
        result = sweep_atten_diff(s, cfg.sweep.diffs, estimators, threads, settings.progress)
    else:
        result = sweep_window(s, cfg.sweep.windows, cfg.sweep.sirs, threads, settings.progress)

    out = args.out or cfg.output.csv
    if out:
        write_sweep_csv(result, out, cfg.echo())
    else:
        sys.stdout.write(render_sweep_csv(result, cfg.echo()))
    return EXIT_OK


def cmd_single(args, settings) -> int:
    cfg = _load(args)
    a = run_trial(cfg.scenario, args.trial)
    meta = dict(cfg.echo())
    meta["trial_index"] = str(args.trial)
    meta["estimator"] = a.estimator
    meta["metric"] = METRIC_DEFINITION
    meta["si_suppression_db"] = fmt(si_suppression_db(a))

    out = args.out or cfg.output.dump
    if out:
        write_trial_dump(a, out, meta)
    else:
        sys.stdout.write(render_trial_dump(a, meta))
    return EXIT_OK


OPCOUNT_HEADER = ("estimator", "n_samples", "real_mults", "real_adds", "divisions", "arg_evals",
                  "total", "per_sample")


def opcount_table(cfg: RunConfig) -> List[str]:
    s = cfg.scenario
    est = s.estimator
    rows = ["\t".join(OPCOUNT_HEADER)]
    for kind in (EstimatorKind.WF_WINDOW, EstimatorKind.ONLY_CPE, EstimatorKind.LPF_BASED, EstimatorKind.TD_MMSE):
        c = op_count(kind, s.ofdm.frame_len, window_m=est.window_m, lpf_len_l=est.lpf_len_l,
                     lpf_kind=est.lpf_kind, samples_per_symbol=s.ofdm.n_fft, symbol_len=s.ofdm.symbol_len)
        rows.append("\t".join([kind.value, str(c.n_samples), str(c.real_mults), str(c.real_adds),
                               str(c.divisions), str(c.arg_evals), str(c.total), fmt(c.per_sample)]))
    return rows


def cmd_opcount(args, settings) -> int:
    for line in opcount_table(_load(args)):
        sys.stdout.write(line + "\n")
    return EXIT_OK


def cmd_selftest(args, settings) -> int:
    report = run_selftest()
    for line in report.lines():
        sys.stdout.write(line + "\n")
    return EXIT_OK if report.passed else EXIT_SELFTEST_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(settings.log_level)

    try:
        if args.command.startswith("sweep-"):
            return cmd_sweep(args.command.split("-", 1)[1], args, settings)
        if args.command == "single":
            return cmd_single(args, settings)
        if args.command == "opcount":
            return cmd_opcount(args, settings)
        return cmd_selftest(args, settings)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
