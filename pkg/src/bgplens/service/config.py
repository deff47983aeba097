"""Declarative run configuration, loaded from a single TOML file.

Every knob has a default; a replay can run with nothing but a store path.
See README for the documented file format.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    store_dir: Path | None = None
    window_interval: int = 300        # seconds per analysis window
    rank_freq_windows: int = 288      # trailing windows for rank-change frequency
    rare_history_windows: int = 2016  # trailing windows a prefix must be absent
    allowed_skew: int = 60            # seconds of tolerated out-of-order arrival
    special_use_file: Path | None = None   # default: packaged RFC 5735 list
    allocated_file: Path | None = None     # absent: unallocated detector disabled
    ipv6_detectors: bool = False
    log_events: bool = True
    listen_host: str = "127.0.0.1"
    listen_port: int = 8747
    api_token: str | None = None
    console_dir: Path | None = None

    def __post_init__(self) -> None:
        if self.window_interval <= 0:
            raise ConfigError("window_interval must be positive")
        if self.rank_freq_windows < 2:
            raise ConfigError("rank_freq_windows must be at least 2")
        if self.rare_history_windows < 1:
            raise ConfigError("rare_history_windows must be at least 1")
        if self.allowed_skew < 0:
            raise ConfigError("allowed_skew must be non-negative")
        for name in ("store_dir", "special_use_file", "allocated_file", "console_dir"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, Path):
                setattr(self, name, Path(value))


def load_config(path: Path | str) -> Config:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config {path} is not valid TOML: {exc}") from exc
    known = {f.name for f in fields(Config)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return Config(**data)
