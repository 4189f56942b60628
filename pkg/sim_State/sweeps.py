# sweeps.py
"""
Monte-Carlo sweeps over the link scenario.

Every point runs trials 0..n_trials-1 with the scenario seed, so all
estimators and all x values of one sweep share channels, data and
phase-noise increments (common random numbers). Per-trial results are
collected by index and reduced in index order, which keeps the mean
independent of the thread count.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from Estimators.estimators_main import RUNNABLE_KINDS, EstimatorConfig, EstimatorKind
from sim_State import __version__
from sim_State.link_state import LinkScenario
from sim_State.workflow_main import METRIC_DEFINITION, as_scenario, run_trial, si_suppression_db
from Signal_Core.errors import ConfigurationError, InputError

logger = logging.getLogger(__name__)

CI_Z = 1.96


@dataclass(frozen=True)
class PointStats:
    mean_db: float
    ci95_db: float
    values: Tuple[float, ...]


@dataclass(frozen=True)
class SweepRow:
    x_value: float
    # label -> (mean_suppression_db, ci95_halfwidth_db)
    cells: Dict[str, Tuple[float, float]]


@dataclass
class SweepResult:
    x_name: str
    labels: Tuple[str, ...]
    rows: List[SweepRow] = field(default_factory=list)
    metadata: Dict[str, str] = field(default_factory=dict)

    def column(self, label: str) -> List[float]:
        if label not in self.labels:
            raise InputError(f"no column {label!r}; have {', '.join(self.labels)}")
        return [row.cells[label][0] for row in self.rows]

    @property
    def x_values(self) -> List[float]:
        return [row.x_value for row in self.rows]


# ============================================
# Scenario helpers
# ============================================

def flatten_scenario(s: LinkScenario) -> Dict[str, str]:
    """Dotted key -> value text for every scenario field, defaults included."""
    flat: Dict[str, str] = {}

    def walk(prefix: str, value):
        if isinstance(value, dict):
            for key, item in value.items():
                walk(f"{prefix}.{key}" if prefix else key, item)
        elif isinstance(value, (list, tuple)):
            flat[prefix] = ",".join(str(v) for v in value)
        else:
            flat[prefix] = "none" if value is None else str(value)

    walk("", s.model_dump(mode="json"))
    return flat


def scenario_with(template: LinkScenario, **updates) -> LinkScenario:
    """Copy of `template` with dotted-path updates ("pn__beta_hz" -> pn.beta_hz), revalidated."""
    data = template.model_dump()
    for key, value in updates.items():
        parts = key.split("__")
        node = data
        for part in parts[:-1]:
            node = node[part]
        node[parts[-1]] = value
    return as_scenario(data)


def default_estimators(template: LinkScenario) -> List[EstimatorConfig]:
    """WfWindow(M), OnlyCpe and LpfBased(L) with the template's window and filter settings."""
    return [template.estimator.model_copy(update={"kind": kind}) for kind in RUNNABLE_KINDS]


def _check_labels(estimators: Sequence[EstimatorConfig]) -> List[str]:
    labels = [e.label for e in estimators]
    if not labels:
        raise ConfigurationError("a sweep needs at least one estimator")
    if len(set(labels)) != len(labels):
        raise ConfigurationError(f"duplicate estimator kinds in sweep: {labels}")
    for e in estimators:
        if e.kind is EstimatorKind.TD_MMSE:
            raise ConfigurationError("td_mmse has a complexity model only and cannot be swept")
    return labels


# ============================================
# Trial execution
# ============================================

def run_point(s: LinkScenario, threads: int = 1) -> PointStats:
    """Mean suppression over trials 0..n_trials-1 with a 95% normal-approximation CI."""
    if threads < 1:
        raise ConfigurationError(f"threads must be >= 1, got {threads}")

    def one(i: int) -> float:
        return si_suppression_db(run_trial(s, i))

    indices = range(s.n_trials)
    if threads == 1:
        values = [one(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, indices))

    n = len(values)
    mean = math.fsum(values) / n
    ci = CI_Z * float(np.std(values, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    return PointStats(mean, ci, tuple(values))


def _base_metadata(sweep: str, template: LinkScenario) -> Dict[str, str]:
    meta = {
        "sweep": sweep,
        "code_version": __version__,
        "metric": METRIC_DEFINITION,
        "seed": str(template.seed),
        "n_trials": str(template.n_trials),
    }
    for key, value in flatten_scenario(template).items():
        meta[f"scenario.{key}"] = value
    return meta


def _estimator_metadata(label: str, est: EstimatorConfig, **overrides: str) -> Dict[str, str]:
    """estimator.<label>.<field> for one sweep column."""
    fields = {key: str(value) for key, value in est.model_dump(mode="json").items()}
    fields.update(overrides)
    return {f"estimator.{label}.{key}": value for key, value in fields.items()}


def _progress(total: int, desc: str, enabled: bool):
    return tqdm(total=total, desc=desc, disable=not enabled, leave=False)


def _sweep_estimators(sweep: str, x_name: str, template: LinkScenario, xs: Sequence[float],
                      scenario_for_x, estimators: Optional[Sequence[EstimatorConfig]],
                      threads: int, progress: bool) -> SweepResult:
    estimators = list(estimators) if estimators is not None else default_estimators(template)
    labels = _check_labels(estimators)
    result = SweepResult(x_name, tuple(labels), metadata=_base_metadata(sweep, template))
    for est in estimators:
        result.metadata.update(_estimator_metadata(est.label, est))

    with _progress(len(xs) * len(estimators), f"[Sweep] {sweep}", progress) as bar:
        for x in xs:
            base = scenario_for_x(float(x))
            cells = {}
            for est in estimators:
                stats = run_point(base.model_copy(update={"estimator": est}), threads)
                cells[est.label] = (stats.mean_db, stats.ci95_db)
                logger.info("[Sweep] %s=%g %s: %.2f dB +/- %.2f", x_name, x, est.label,
                            stats.mean_db, stats.ci95_db)
                bar.update(1)
            result.rows.append(SweepRow(float(x), cells))
    return result


# ============================================
# Sweeps
# ============================================

def sweep_beta(template: LinkScenario, betas: Sequence[float],
               estimators: Optional[Sequence[EstimatorConfig]] = None,
               threads: int = 1, progress: bool = False) -> SweepResult:
    """Suppression vs. PN 3-dB bandwidth at the template's SIR."""
    template = as_scenario(template)
    return _sweep_estimators(
        "beta", "beta_hz", template, betas,
        lambda beta: scenario_with(template, pn__beta_hz=beta),
        estimators, threads, progress,
    )


def sweep_atten_diff(template: LinkScenario, diffs: Sequence[float],
                     estimators: Optional[Sequence[EstimatorConfig]] = None,
                     threads: int = 1, progress: bool = False) -> SweepResult:
    """Suppression vs. channel attenuation difference; SOI/SI at the canceller = diff + separation + analog SIC."""
    template = as_scenario(template)
    return _sweep_estimators(
        "atten", "atten_diff_db", template, diffs,
        lambda diff: scenario_with(template, atten_diff_db=diff, sir_at_digital_db=None),
        estimators, threads, progress,
    )


def window_label(kind: str, sir_db: float) -> str:
    return f"{kind}@{sir_db:g}dB"


def sweep_window(template: LinkScenario, ms: Sequence[int], sirs: Optional[Sequence[float]] = None,
                 threads: int = 1, progress: bool = False) -> SweepResult:
    """
    WfWindow suppression vs. window size, one curve per SOI-to-SI ratio.
    Each curve comes with its OnlyCpe reference column (same value on every row).
    """
    template = as_scenario(template)
    if not ms:
        raise ConfigurationError("window sweep needs at least one window size")
    if any(int(m) < 1 for m in ms):
        raise ConfigurationError(f"window sizes must be >= 1, got {list(ms)}")
    sirs = [template.sir_db] if not sirs else [float(v) for v in sirs]

    labels = []
    for sir in sirs:
        labels += [window_label(EstimatorKind.WF_WINDOW.value, sir),
                   window_label(EstimatorKind.ONLY_CPE.value, sir)]
    if len(set(labels)) != len(labels):
        raise ConfigurationError(f"duplicate SIR values in window sweep: {sirs}")

    result = SweepResult("window_m", tuple(labels), metadata=_base_metadata("window", template))
    result.metadata["sirs_db"] = ",".join(f"{v:g}" for v in sirs)
    cells: Dict[int, Dict[str, Tuple[float, float]]] = {int(m): {} for m in ms}

    with _progress(len(sirs) * (len(ms) + 1), "[Sweep] window", progress) as bar:
        for sir in sirs:
            at_sir = scenario_with(template, sir_at_digital_db=sir, atten_diff_db=None)
            cpe_cfg = at_sir.estimator.model_copy(update={"kind": EstimatorKind.ONLY_CPE})
            result.metadata.update(_estimator_metadata(window_label(EstimatorKind.ONLY_CPE.value, sir), cpe_cfg))
            result.metadata.update(_estimator_metadata(
                window_label(EstimatorKind.WF_WINDOW.value, sir),
                at_sir.estimator.model_copy(update={"kind": EstimatorKind.WF_WINDOW}),
                window_m="x_value",
            ))
            cpe = run_point(at_sir.model_copy(update={"estimator": cpe_cfg}), threads)
            bar.update(1)
            for m in ms:
                wf_cfg = at_sir.estimator.model_copy(
                    update={"kind": EstimatorKind.WF_WINDOW, "window_m": int(m)}
                )
                stats = run_point(at_sir.model_copy(update={"estimator": wf_cfg}), threads)
                cells[int(m)][window_label(EstimatorKind.WF_WINDOW.value, sir)] = (stats.mean_db, stats.ci95_db)
                cells[int(m)][window_label(EstimatorKind.ONLY_CPE.value, sir)] = (cpe.mean_db, cpe.ci95_db)
                logger.info("[Sweep] sir=%g dB M=%d: %.2f dB +/- %.2f", sir, int(m), stats.mean_db, stats.ci95_db)
                bar.update(1)

    for m in ms:
        result.rows.append(SweepRow(float(int(m)), cells[int(m)]))
    for sir in sirs:
        label = window_label(EstimatorKind.WF_WINDOW.value, sir)
        result.metadata[f"best_window.{label}"] = f"{best_window(result, label):g}"
    return result


def best_window(result: SweepResult, label: Optional[str] = None) -> float:
    """Window size with the highest mean suppression on one curve (smallest on ties)."""
    if not result.rows:
        raise InputError("empty sweep result")
    if label is None:
        label = next((l for l in result.labels if l.startswith(EstimatorKind.WF_WINDOW.value)), None)
        if label is None:
            raise InputError("sweep result has no wf_window column")
    means = result.column(label)
    best = max(range(len(means)), key=lambda i: (means[i], -result.rows[i].x_value))
    return result.rows[best].x_value
