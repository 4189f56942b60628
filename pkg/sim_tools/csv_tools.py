# csv_tools.py
"""
CSV emission for sweep results and single-trial dumps.

Layout: `#`-prefixed `key: value` metadata lines, one header row, data rows.
Numbers are printed as `{:.11e}` (12 significant digits), comma separated,
`\n` line endings.
"""
import csv
import io
import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from sim_State.link_state import TrialArtifacts
from sim_State.sweeps import SweepResult, SweepRow
from Signal_Core.errors import InputError

logger = logging.getLogger(__name__)

NUMBER_FORMAT = "{:.11e}"


def fmt(value: float) -> str:
    return NUMBER_FORMAT.format(float(value))


def _metadata_lines(metadata: Dict[str, str]) -> List[str]:
    lines = []
    for key, value in metadata.items():
        # keep every metadata entry on a single comment line
        text = str(value).replace("\r", " ").replace("\n", " ")
        lines.append(f"# {key}: {text}\n")
    return lines


def sweep_header(result: SweepResult) -> List[str]:
    header = ["x_value"]
    for label in result.labels:
        header += [f"{label}_mean_db", f"{label}_ci95_db"]
    return header


def render_sweep_csv(result: SweepResult, extra_metadata: Dict[str, str] = None) -> str:
    meta = dict(result.metadata)
    meta["x_name"] = result.x_name
    meta["labels"] = ",".join(result.labels)
    if extra_metadata:
        meta.update(extra_metadata)

    buf = io.StringIO()
    buf.writelines(_metadata_lines(meta))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(sweep_header(result))
    for row in result.rows:
        out = [fmt(row.x_value)]
        for label in result.labels:
            mean, ci = row.cells[label]
            out += [fmt(mean), fmt(ci)]
        writer.writerow(out)
    return buf.getvalue()


def _write_text(path: Union[str, Path], text: str) -> None:
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_sweep_csv(result: SweepResult, path: Union[str, Path],
                    extra_metadata: Dict[str, str] = None) -> None:
    _write_text(path, render_sweep_csv(result, extra_metadata))
    logger.info("[Sweep] wrote %d rows to %s", len(result.rows), path)


def parse_sweep_csv(text: str) -> SweepResult:
    """Inverse of render_sweep_csv at printed precision."""
    metadata: Dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            content = line[2:] if line.startswith("# ") else line[1:]
            key, _, value = content.partition(": ")
            metadata[key] = value
        elif line.strip():
            body.append(line)
    if not body:
        raise InputError("CSV has no header row")

    rows = list(csv.reader(body))
    header = rows[0]
    if not header or header[0] != "x_value" or (len(header) - 1) % 2:
        raise InputError(f"unexpected CSV header: {header}")
    labels: List[str] = []
    for name in header[1::2]:
        if not name.endswith("_mean_db"):
            raise InputError(f"unexpected column {name!r}")
        labels.append(name[: -len("_mean_db")])

    result_rows = []
    for values in rows[1:]:
        if len(values) != len(header):
            raise InputError(f"row has {len(values)} fields, header has {len(header)}")
        cells: Dict[str, Tuple[float, float]] = {}
        for i, label in enumerate(labels):
            cells[label] = (float(values[1 + 2 * i]), float(values[2 + 2 * i]))
        result_rows.append(SweepRow(float(values[0]), cells))

    x_name = metadata.pop("x_name", "x_value")
    metadata.pop("labels", None)
    return SweepResult(x_name, tuple(labels), result_rows, metadata)


def read_sweep_csv(path: Union[str, Path]) -> SweepResult:
    return parse_sweep_csv(Path(path).read_text(encoding="utf-8"))


# ============================================
# Single-trial dump
# ============================================

DUMP_HEADER = ["n", "true_phase_rad", "phi_hat_rad", "residual_power"]


def render_trial_dump(a: TrialArtifacts, metadata: Dict[str, str] = None) -> str:
    buf = io.StringIO()
    if metadata:
        buf.writelines(_metadata_lines(metadata))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DUMP_HEADER)
    residual_power = np.abs(a.residual.samples) ** 2
    for n, (truth, est, power) in enumerate(zip(a.true_phase.phases, a.phi_hat.phases, residual_power)):
        writer.writerow([n, fmt(truth), fmt(est), fmt(power)])
    return buf.getvalue()


def write_trial_dump(a: TrialArtifacts, path: Union[str, Path], metadata: Dict[str, str] = None) -> None:
    _write_text(path, render_trial_dump(a, metadata))
    logger.info("[LinkSim] wrote %d-sample trial dump to %s", len(a.residual), path)


def read_trial_dump(path: Union[str, Path]) -> np.ndarray:
    """Dump columns as a (n_samples, 4) float array."""
    lines = [l for l in Path(path).read_text(encoding="utf-8").splitlines()
             if l.strip() and not l.startswith("#")]
    rows = list(csv.reader(lines))
    if rows[0] != DUMP_HEADER:
        raise InputError(f"unexpected dump header: {rows[0]}")
    return np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64).reshape(-1, len(DUMP_HEADER))
