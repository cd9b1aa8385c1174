"""Command-line front end."""

from __future__ import annotations

import json
import sys

import click

from .knowledge import (
    CorpusError, duplicate_definitions, ingest as run_ingest, load_project,
    reuse_report,
)
from .service.config import ServiceConfig
from .service.core import AdvisorState, UnknownProject
from .service.transcript import render_event


def _state(ctx) -> AdvisorState:
    cfg = ctx.obj["config"]
    return AdvisorState(cfg)


def _load(projects_root, name):
    try:
        return load_project(projects_root, name)
    except FileNotFoundError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="service configuration file (JSON)")
@click.option("--projects", "projects_root", default=None,
              help="project root directory")
@click.pass_context
def main(ctx, config_path, projects_root):
    """Machine-learned proof advice over formal-math corpora."""
    cfg = ServiceConfig.from_file(config_path) if config_path \
        else ServiceConfig.from_env()
    if projects_root:
        cfg.project_root = projects_root
    ctx.ensure_object(dict)
    ctx.obj["config"] = cfg


@main.command("ingest")
@click.argument("name")
@click.argument("corpus", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.pass_context
def ingest_cmd(ctx, name, corpus):
    """Create project NAME from corpus files."""
    cfg = ctx.obj["config"]
    texts = [open(p, encoding="utf-8").read() for p in corpus]
    try:
        proj = run_ingest(cfg.project_root, name, texts,
                          progress=lambda s: click.echo(f"[{s}]"))
    except CorpusError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(1)
    click.echo(json.dumps(proj.stats(), indent=1))


@main.command("serve")
@click.option("--tcp/--no-tcp", default=True)
@click.option("--http/--no-http", default=True)
@click.option("--status-trailer", is_flag=True, default=False)
@click.pass_context
def serve_cmd(ctx, tcp, http, status_trailer):
    """Run the advisory service."""
    import uvicorn
    from .service.http import create_app
    from .service.tcp import TcpServer
    cfg = ctx.obj["config"]
    cfg.status_trailer = cfg.status_trailer or status_trailer
    state = AdvisorState(cfg)
    if tcp:
        server = TcpServer(state).start()
        click.echo(f"tcp on {server.address}")
    if http:
        uvicorn.run(create_app(state), host="0.0.0.0", port=cfg.http_port)
    elif tcp:
        import threading
        threading.Event().wait()


@main.command("query")
@click.option("-p", "--project", "project_name", required=True)
@click.option("--budget", type=float, default=None)
@click.argument("goal")
@click.pass_context
def query_cmd(ctx, project_name, budget, goal):
    """Ask for advice; prints the full transcript."""
    state = _state(ctx)
    status = "noproof"
    try:
        for e in state.query(project_name, goal, budget_s=budget):
            if e["kind"] == "outcome":
                status = e["status"]
            frag = render_event(e, state.config.replay_token)
            if frag is not None:
                click.echo(frag, nl=False)
    except UnknownProject as e:
        click.echo(f"error: unknown project {e}", err=True)
        sys.exit(2)
    sys.exit(0 if status == "theorem" else 1)


@main.command("advice")
@click.option("-p", "--project", "project_name", required=True)
@click.option("--budget", type=float, default=None)
@click.argument("goal")
@click.pass_context
def advice_cmd(ctx, project_name, budget, goal):
    """Ask for advice; prints only the suggested tactic."""
    state = _state(ctx)
    try:
        for e in state.query(project_name, goal, budget_s=budget):
            if e["kind"] == "tactic":
                click.echo(e["tactic"])
                sys.exit(0)
    except UnknownProject as e:
        click.echo(f"error: unknown project {e}", err=True)
        sys.exit(2)
    click.echo("no proof found", err=True)
    sys.exit(1)


@main.group("report")
def report_grp():
    """Reuse and duplication reports."""


@report_grp.command("reuse")
@click.argument("project_name")
@click.argument("previous_name")
@click.pass_context
def report_reuse(ctx, project_name, previous_name):
    cfg = ctx.obj["config"]
    proj = _load(cfg.project_root, project_name)
    prev = _load(cfg.project_root, previous_name)
    click.echo(json.dumps(reuse_report(proj, prev).as_dict(), indent=1))


@report_grp.command("dupes")
@click.argument("project_name")
@click.pass_context
def report_dupes(ctx, project_name):
    cfg = ctx.obj["config"]
    proj = _load(cfg.project_root, project_name)
    for group in duplicate_definitions(proj):
        click.echo(" ".join(group))


if __name__ == "__main__":
    main()
