# sim_config.py
import logging
import os
import sys
from dataclasses import dataclass

from dotenv import load_dotenv

from sim_State import __version__

load_dotenv()

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass(frozen=True)
class RuntimeSettings:
    """Process-level knobs read from the environment (.env supported)."""

    threads: int = 1
    log_level: str = "INFO"
    progress: bool = False
    version: str = __version__


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("[Config] ignoring %s=%r (not an integer)", name, raw)
        return default
    return max(value, 1)


def get_settings() -> RuntimeSettings:
    return RuntimeSettings(
        threads=_env_int("FDSIC_THREADS", 1),
        log_level=os.getenv("FDSIC_LOG_LEVEL", "INFO").upper(),
        progress=_env_bool("FDSIC_PROGRESS", False),
    )


_handler = None


def setup_logging(level: str = "INFO") -> None:
    """One stderr handler on the root logger; stdout stays data-only."""
    global _handler
    root = logging.getLogger()
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    if _handler is not None:
        root.removeHandler(_handler)
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(_handler)
