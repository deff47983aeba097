"""Command-line entry points: replay, serve, export, topn."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .api import create_app
from .config import Config, ConfigError, load_config
from .replay import InputError, run_replay
from .store import Store


def _load(config_path: Path | None, store_path: Path | None) -> Config:
    try:
        config = load_config(config_path) if config_path else Config()
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc
    if store_path is not None:
        config.store_dir = store_path
    return config


def _store(config: Config) -> Store:
    if config.store_dir is None:
        raise click.ClickException("no store directory; pass --store or set it in the config")
    return Store(config.store_dir)


@click.group()
def main() -> None:
    """BGP update-stream deep analysis."""


@main.command()
@click.argument("inputs", nargs=-1, type=click.Path(path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@click.option("--store", "store_path", type=click.Path(path_type=Path))
def replay(inputs: tuple[Path, ...], config_path: Path | None, store_path: Path | None) -> None:
    """Replay MRT or event-line files window by window into the store."""
    config = _load(config_path, store_path)
    store = _store(config) if config.store_dir else None
    try:
        summary = run_replay(inputs, config, store)
    except InputError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(json.dumps(summary.to_dict(), indent=2, sort_keys=True))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@click.option("--store", "store_path", type=click.Path(exists=True, path_type=Path))
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(
    config_path: Path | None,
    store_path: Path | None,
    host: str | None,
    port: int | None,
) -> None:
    """Serve the query API (and console, if built) over a sealed store."""
    import uvicorn

    config = _load(config_path, store_path)
    app = create_app(_store(config), config)
    uvicorn.run(
        app,
        host=host if host is not None else config.listen_host,
        port=port if port is not None else config.listen_port,
        log_level="warning",
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@click.option("--store", "store_path", type=click.Path(exists=True, path_type=Path))
@click.option(
    "--window-range",
    "window_range",
    default=None,
    help="from:to window starts (inclusive), either side optional",
)
def export(config_path: Path | None, store_path: Path | None, window_range: str | None) -> None:
    """Write sealed WindowResults to stdout, one canonical JSON per line."""
    config = _load(config_path, store_path)
    store = _store(config)
    lo = hi = None
    if window_range:
        lo_text, _, hi_text = window_range.partition(":")
        try:
            lo = int(lo_text) if lo_text else None
            hi = int(hi_text) if hi_text else None
        except ValueError:
            raise click.ClickException(f"bad --window-range {window_range!r}")
    for chunk in store.export_windows(lo, hi):
        sys.stdout.buffer.write(chunk)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@click.option("--store", "store_path", type=click.Path(exists=True, path_type=Path))
@click.option("--metric", required=True)
@click.option("--n", type=int, default=10, show_default=True)
@click.option("--window", type=int, default=None, help="window start (default: latest)")
def topn(
    config_path: Path | None,
    store_path: Path | None,
    metric: str,
    n: int,
    window: int | None,
) -> None:
    """Print the top-N ASes for a metric from a sealed window."""
    from .api import _metric_values
    from ..analysis import top_n as rank_top_n

    config = _load(config_path, store_path)
    store = _store(config)
    starts = store.window_starts()
    if not starts:
        raise click.ClickException("store has no sealed windows")
    start = window if window is not None else starts[-1]
    if start not in starts:
        raise click.ClickException(f"window {start} not sealed")
    try:
        values = _metric_values(store.read_window(start), metric)
    except Exception as exc:  # HTTPException from the shared helper
        raise click.ClickException(getattr(exc, "detail", str(exc))) from exc
    result = {
        "window": start,
        "metric": metric,
        "entries": [
            {"subject": subject, "value": value}
            for subject, value in rank_top_n(values, n)
        ],
    }
    click.echo(json.dumps(result, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
