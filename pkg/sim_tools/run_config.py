# run_config.py
"""
Line-oriented run configuration:

    # comment
    pn.beta_hz = 10
    estimator.window_m = 35
    sweep.betas = 1, 10, 100, 1000, 10000
    output.csv = results/fig3.csv

Keys are dotted paths onto LinkScenario plus the `sweep.*` and `output.*`
sections. Every key is optional. Unknown keys, repeated keys, lines without
`=` and values that fail validation are reported with their line number.
`none` clears an optional value.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from Estimators.estimators_main import RUNNABLE_KINDS, EstimatorKind
from sim_State.link_state import LinkScenario
from sim_State.sweeps import flatten_scenario
from Signal_Core.errors import ConfigFileError

logger = logging.getLogger(__name__)


class SweepSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    betas: Tuple[float, ...] = (1.0, 10.0, 100.0, 1000.0, 10000.0)
    diffs: Tuple[float, ...] = tuple(float(d) for d in range(-60, -27, 3))
    windows: Tuple[int, ...] = (1, 5, 15, 35, 70, 150, 548, 1096)
    # empty -> the scenario's own SIR
    sirs: Tuple[float, ...] = ()
    estimators: Tuple[EstimatorKind, ...] = RUNNABLE_KINDS


class OutputSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    csv: Optional[str] = None
    dump: Optional[str] = None


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: LinkScenario = Field(default_factory=LinkScenario)
    sweep: SweepSettings = SweepSettings()
    output: OutputSettings = OutputSettings()
    source_path: Optional[str] = None
    source_lines: Tuple[str, ...] = ()

    def echo(self) -> Dict[str, str]:
        """Verbatim source lines followed by every effective key."""
        meta: Dict[str, str] = {}
        if self.source_path:
            meta["config.path"] = self.source_path
        for i, line in enumerate(self.source_lines, start=1):
            meta[f"config.line.{i}"] = line
        for key, value in sorted(_flatten_sections(self).items()):
            meta[f"config.effective.{key}"] = value
        return meta


SECTION_KEYS = {f"sweep.{name}" for name in SweepSettings.model_fields} | {
    f"output.{name}" for name in OutputSettings.model_fields
}
LIST_KEYS = {f"sweep.{name}" for name in SweepSettings.model_fields} | {"ofdm.used_subcarriers"}


def scenario_keys() -> set:
    return set(flatten_scenario(LinkScenario()))


def _flatten_sections(cfg: RunConfig) -> Dict[str, str]:
    flat = dict(flatten_scenario(cfg.scenario))
    for section in ("sweep", "output"):
        for key, value in getattr(cfg, section).model_dump(mode="json").items():
            if isinstance(value, (list, tuple)):
                flat[f"{section}.{key}"] = ",".join(str(v) for v in value)
            else:
                flat[f"{section}.{key}"] = "none" if value is None else str(value)
    return flat


def _convert(key: str, raw: str):
    if raw.lower() == "none":
        return None
    if key in LIST_KEYS:
        return [item.strip() for item in raw.split(",") if item.strip()]
    return raw


def _set_nested(tree: dict, key: str, value) -> None:
    parts = key.split(".")
    node = tree
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value


def _line_for(error: dict, section: str, lines_by_key: Dict[str, int]) -> Optional[int]:
    loc = ".".join(str(p) for p in error.get("loc", ()) if not isinstance(p, int))
    parts = [section] if section != "scenario" else []
    if loc:
        parts.append(loc)
    key = ".".join(parts)
    if key in lines_by_key:
        return lines_by_key[key]
    # model-level errors: blame the last line inside the failing model
    in_section = [
        (k, n) for k, n in lines_by_key.items()
        if (k.split(".", 1)[0] == section) or (section == "scenario" and k.split(".", 1)[0] not in ("sweep", "output"))
    ]
    candidates = [n for k, n in in_section if not key or k == key or k.startswith(key + ".")]
    return max(candidates) if candidates else None


def parse_run_config(text: str, path: Optional[str] = None) -> RunConfig:
    known = scenario_keys() | SECTION_KEYS
    lines_by_key: Dict[str, int] = {}
    trees: Dict[str, dict] = {"scenario": {}, "sweep": {}, "output": {}}
    source: List[str] = text.splitlines()

    for line_no, raw_line in enumerate(source, start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigFileError(f"expected 'key = value', got {line!r}", line_no, path)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigFileError("missing key before '='", line_no, path)
        if key not in known:
            raise ConfigFileError(f"unknown key {key!r}", line_no, path)
        if key in lines_by_key:
            raise ConfigFileError(f"duplicate key {key!r} (first set on line {lines_by_key[key]})", line_no, path)
        lines_by_key[key] = line_no

        head = key.split(".", 1)[0]
        if head in ("sweep", "output"):
            _set_nested(trees[head], key.split(".", 1)[1], _convert(key, value))
        else:
            _set_nested(trees["scenario"], key, _convert(key, value))

    built = {}
    for section, model in (("scenario", LinkScenario), ("sweep", SweepSettings), ("output", OutputSettings)):
        try:
            built[section] = model.model_validate(trees[section])
        except ValidationError as exc:
            first = exc.errors()[0]
            msg = first.get("msg", str(exc))
            loc = ".".join(str(p) for p in first.get("loc", ()))
            raise ConfigFileError(
                f"invalid value for {section}{'.' + loc if loc else ''}: {msg}",
                _line_for(first, section, lines_by_key), path,
            ) from exc

    logger.debug("[RunConfig] parsed %d keys from %s", len(lines_by_key), path or "<text>")
    return RunConfig(**built, source_path=path, source_lines=tuple(source))


def load_run_config(path: Optional[str]) -> RunConfig:
    """Read and parse a config file; `None` gives the all-defaults configuration."""
    if path is None:
        return RunConfig()
    text = Path(path).read_text(encoding="utf-8")
    return parse_run_config(text, str(path))


def with_seed(cfg: RunConfig, seed: Optional[int]) -> RunConfig:
    """Apply a --seed override, revalidating the scenario."""
    if seed is None:
        return cfg
    data = cfg.scenario.model_dump()
    data["seed"] = seed
    try:
        scenario = LinkScenario.model_validate(data)
    except ValidationError as exc:
        raise ConfigFileError(f"invalid seed override {seed!r}: {exc.errors()[0]['msg']}") from exc
    return cfg.model_copy(update={"scenario": scenario})
