"""Command line entry points: ``serve`` and ``run-scenario``."""

from __future__ import annotations

import sys
import threading

import click

from . import scheduler as scheduler_mod
from .api import build_app
from .clock import WallClock
from .config import load_config
from .engine import Engine
from .scenario import MalformedScript, load_scenario, run_scenario
from .store import MissionLogStore
from .transport import SimulatedFeed, WebhookTransport


@click.group()
def main():
    """Collective-action mission orchestrator."""


@main.command()
@click.option("--listen", default="127.0.0.1:8000", show_default=True,
              help="host:port for the HTTP API")
@click.option("--data-dir", default="data", show_default=True,
              envvar="RALLYPOINT_DATA_DIR", type=click.Path(),
              help="event log directory")
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True), help="JSON config file")
@click.option("--transport", "transport_kind", default="sim",
              type=click.Choice(["sim", "webhook"]), show_default=True)
@click.option("--outbound-url", default=None,
              help="delivery URL for the webhook transport")
@click.option("--ui-dir", default=None, type=click.Path(),
              help="static web UI bundle to serve at /")
def serve(listen, data_dir, config_path, transport_kind, outbound_url, ui_dir):
    """Start transport ingest, the scheduler loop, and the HTTP API."""
    import uvicorn

    config = load_config(config_path)
    if transport_kind == "webhook":
        if not outbound_url:
            raise click.UsageError("--outbound-url is required for webhook")

        def deliver(record):
            import httpx
            httpx.post(outbound_url, json=record, timeout=10.0)

        transport = WebhookTransport(deliver)
    else:
        transport = SimulatedFeed()

    engine = Engine(MissionLogStore(data_dir), transport, WallClock(), config)
    app = build_app(engine, ui_dir=ui_dir)

    stop = threading.Event()
    loop = threading.Thread(target=scheduler_mod.drive, args=(engine, stop),
                            daemon=True, name="scheduler")
    loop.start()

    host, _, port = listen.rpartition(":")
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    finally:
        stop.set()
        loop.join(timeout=5)
        engine.store.close()


@main.command("run-scenario")
@click.argument("scenario_file", type=click.Path(exists=True))
@click.option("--data-dir", default=None, type=click.Path(),
              help="keep logs here instead of a temp dir")
def run_scenario_cmd(scenario_file, data_dir):
    """Execute a scenario script headlessly; nonzero exit on any failure."""
    try:
        scenario = load_scenario(scenario_file)
        report = run_scenario(scenario, data_dir=data_dir)
    except MalformedScript as exc:
        click.echo(f"malformed script: {exc}", err=True)
        sys.exit(2)
    for line in report.to_lines():
        click.echo(line)
    if not report.ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
