"""Command line front-end: ``liftlab validate | run | explain``."""
from __future__ import annotations

import sys

import click

from .tasks import EXPLANATIONS, explain as explain_text, report_failed, run_tasks
from .workspace import WorkspaceError, dumps, load_workspace

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


def _load(path):
    try:
        return load_workspace(path)
    except WorkspaceError as exc:
        for loc, msg in exc.errors:
            click.echo(f"{path}: {loc}: {msg}", err=True)
        sys.exit(EXIT_INVALID)
    except OSError as exc:
        click.echo(f"{path}: {exc.strerror}", err=True)
        sys.exit(EXIT_INVALID)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Lifting structures in finite presheaf categories."""


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
def validate(file):
    """Parse and validate a workspace document."""
    ws = _load(file)
    click.echo(f"ok: {len(ws.presheaves)} presheaves, {len(ws.morphisms)} morphisms, "
               f"{len(ws.tasks)} tasks")


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--budget", type=int, default=None, help="Enumeration budget per task.")
@click.option("--bound", type=int, default=1, show_default=True,
              help="Largest set size for bounded parameter universes.")
@click.option("--parallel", is_flag=True, help="Run tasks concurrently.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the report here instead of stdout.")
@click.option("--timing", is_flag=True, help="Include wall-clock seconds per task.")
def run(file, budget, bound, parallel, out, timing):
    """Run every task of a workspace and emit a JSON report."""
    ws = _load(file)
    report = run_tasks(ws, budget_limit=budget, bound=bound, parallel=parallel, timing=timing)
    text = dumps(report)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    for r in report["tasks"]:
        click.echo(f"{r['id']}: {r['status']}", err=True)
    sys.exit(EXIT_FAILED if report_failed(report) else EXIT_OK)


@main.command()
@click.argument("task_id")
@click.option("--workspace", type=click.Path(dir_okay=False), default=None,
              help="Look the task id up in this workspace.")
def explain(task_id, workspace):
    """Describe what a task kind (or a task of a workspace) computes."""
    key = task_id
    if workspace:
        ws = _load(workspace)
        try:
            t = ws.task(task_id)
        except KeyError:
            click.echo(f"no task {task_id!r} in {workspace}", err=True)
            sys.exit(EXIT_INVALID)
        sub = t.inputs.get("op") or t.inputs.get("transform") or t.inputs.get("relation")
        if t.kind == "witness" and t.inputs.get("method") == "construct":
            sub = "construct"
        key = f"{t.kind}:{sub}" if sub and f"{t.kind}:{sub}" in EXPLANATIONS else t.kind
    text = explain_text(key)
    if text is None:
        click.echo(f"unknown task {task_id!r}; known: {', '.join(sorted(EXPLANATIONS))}",
                   err=True)
        sys.exit(EXIT_INVALID)
    click.echo(f"{key}: {text}")


if __name__ == "__main__":
    main()
