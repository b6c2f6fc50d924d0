#!/usr/bin/env python3
"""
Configuration utilities - numerical defaults loaded from the environment / .env
"""

import os
import logging
from dataclasses import dataclass, asdict
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from dotenv import load_dotenv

from ..errors import ConfigError

logger = logging.getLogger(__name__)

_LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


@dataclass(frozen=True)
class Defaults:
    """Documented defaults echoed into every report."""
    depth: int = 50
    tail_window: int = 10
    tolerance: float = 1e-12
    residual_limit: float = 1e-10
    scale_base: float = 1.0 / 3.0
    trend_tolerance: float = 1e-2
    enumeration_limit: int = 1_000_000
    materialize_limit: int = 4_194_304
    max_workers: int = 4
    log_level: str = "WARNING"

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


_ENV_KEYS: Dict[str, Callable[[str], Any]] = {
    'depth': int,
    'tail_window': int,
    'tolerance': float,
    'residual_limit': float,
    'scale_base': float,
    'trend_tolerance': float,
    'enumeration_limit': int,
    'materialize_limit': int,
    'max_workers': int,
    'log_level': str,
}


def load_env_file(env_file_path: str = ".env") -> None:
    """
    Load environment variables from a .env file without overriding the process env.

    Args:
        env_file_path: Path to the .env file
    """
    possible_paths = [
        Path(env_file_path),  # Current directory
        Path(__file__).parent.parent.parent / env_file_path,  # Project root
    ]

    for path in possible_paths:
        if path.exists():
            logger.debug(f"Loading environment variables from {path}")
            load_dotenv(path, override=False)
            return

    logger.debug("No .env file found in any of the expected locations")


@lru_cache(maxsize=1)
def get_defaults() -> Defaults:
    """
    Resolve defaults from MORANLAB_* environment variables.

    Returns:
        Defaults with environment overrides applied

    Raises:
        ConfigError: If a variable cannot be converted
    """
    load_env_file()

    values: Dict[str, Any] = {}
    for key, convert in _ENV_KEYS.items():
        env_name = f"MORANLAB_{key.upper()}"
        raw = os.getenv(env_name)
        if raw is None or raw.strip() == '':
            continue
        try:
            if key == 'scale_base' and '/' in raw:
                numerator, denominator = raw.split('/', 1)
                values[key] = float(numerator) / float(denominator)
            else:
                values[key] = convert(raw.strip())
        except ValueError as e:
            raise ConfigError(f"{env_name}={raw!r} is not a valid {convert.__name__}: {e}",
                              key_paths=[env_name])

    defaults = Defaults(**values)
    if defaults.depth < 1 or defaults.tail_window < 1 or defaults.tail_window > defaults.depth:
        raise ConfigError("MORANLAB_DEPTH and MORANLAB_TAIL_WINDOW must satisfy 1 <= tail_window <= depth",
                          key_paths=['MORANLAB_DEPTH', 'MORANLAB_TAIL_WINDOW'])
    if not 0.0 < defaults.scale_base < 1.0:
        raise ConfigError("MORANLAB_SCALE_BASE must lie in (0, 1)", key_paths=['MORANLAB_SCALE_BASE'])
    return defaults


def setup_logging(level: Optional[str] = None) -> None:
    """Configure root logging once; level defaults to MORANLAB_LOG_LEVEL."""
    resolved = (level or get_defaults().log_level).upper()
    logging.basicConfig(level=getattr(logging, resolved, logging.WARNING), format=_LOG_FORMAT)
    logging.getLogger().setLevel(getattr(logging, resolved, logging.WARNING))
