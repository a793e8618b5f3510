"""Admin command-line interface.

Exit codes: 0 on success, 1 on a domain error (bad state, unknown panel,
malformed file, ...), 2 on a usage error. All configuration flags fall
back to environment variables (DELPHIRANK_STORE, DELPHIRANK_HOST,
DELPHIRANK_PORT); an explicit flag wins.

Email is out of scope: ``tokens`` and ``remind`` print mailing lists
(expert, email, questionnaire link) as CSV for an external dispatcher.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click

from .errors import DomainError
from .ranking import Scope
from .sampling import SamplingParams
from .service import PanelService
from .store import PanelStore


@click.group()
@click.option(
    "--store",
    "store_path",
    envvar="DELPHIRANK_STORE",
    default="delphirank.db",
    show_default=True,
    help="Path of the embedded data store.",
)
@click.pass_context
def cli(ctx: click.Context, store_path: str) -> None:
    """Delphi consultation service over indicator-based publisher rankings."""
    ctx.obj = store_path


def _service(ctx: click.Context) -> PanelService:
    return PanelService(PanelStore(ctx.obj))


def _mailing_csv(rows: list[tuple[str, str, str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["expert_id", "email", "url"])
    writer.writerows(rows)
    return buf.getvalue()


@cli.command()
@click.option("--host", envvar="DELPHIRANK_HOST", default="127.0.0.1", show_default=True)
@click.option("--port", envvar="DELPHIRANK_PORT", default=8000, show_default=True, type=int)
@click.option(
    "--static-dir",
    default=None,
    help="Directory with the built web UI; served at / when given.",
)
@click.pass_context
def serve(ctx: click.Context, host: str, port: int, static_dir: str | None) -> None:
    """Run the HTTP gateway."""
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(ctx.obj, static_dir), host=host, port=port, log_level="info")


@cli.command("import-ranking")
@click.option("--field", required=True, help="Subject field the ranking belongs to.")
@click.option("--scope", required=True, type=click.Choice(["domestic", "foreign"]))
@click.argument("csvfile", type=click.File("r", encoding="utf-8"))
@click.pass_context
def import_ranking(ctx: click.Context, field: str, scope: str, csvfile) -> None:
    """Import a `publisher,icee` ranking CSV."""
    ranked = _service(ctx).import_ranking_csv(csvfile.read(), field, Scope.parse(scope))
    click.echo(f"imported {len(ranked.entries)} publishers for {field} ({scope})")


@cli.command("import-roster")
@click.option("--field", required=True)
@click.argument("csvfile", type=click.File("r", encoding="utf-8"))
@click.pass_context
def import_roster(ctx: click.Context, field: str, csvfile) -> None:
    """Import an `expert_id,field,email` roster CSV."""
    roster = _service(ctx).import_roster_csv(csvfile.read(), field)
    click.echo(f"imported {len(roster)} experts for {field}")


@cli.command("create-panel")
@click.option("--field", required=True)
@click.option("--seed", required=True, type=int, help="Seed for the expert draw.")
@click.option("--confidence", type=float, default=None, help="z value (default 1.96).")
@click.option("--margin", type=float, default=None, help="Margin of error e (default 0.05).")
@click.option("--p", "proportion", type=float, default=None, help="Proportion p (default 0.5).")
@click.option("--id", "panel_id", default=None, help="Panel id (default panel-<field>).")
@click.pass_context
def create_panel(
    ctx: click.Context,
    field: str,
    seed: int,
    confidence: float | None,
    margin: float | None,
    proportion: float | None,
    panel_id: str | None,
) -> None:
    """Draw a sample from the field's roster and create a draft panel."""
    overrides = {
        key: value
        for key, value in {
            "confidence_z": confidence,
            "margin_e": margin,
            "proportion_p": proportion,
        }.items()
        if value is not None
    }
    params = SamplingParams(**overrides) if overrides else None
    panel = _service(ctx).create_panel(field, seed, params=params, panel_id=panel_id)
    click.echo(f"created {panel.id}: {len(panel.experts)} experts sampled (seed {seed})")


@cli.command("extend-panel")
@click.option("--panel", "panel_id", required=True)
@click.option("--extra", required=True, type=int, help="How many experts to add.")
@click.option("--seed", required=True, type=int)
@click.pass_context
def extend_panel(ctx: click.Context, panel_id: str, extra: int, seed: int) -> None:
    """Draw additional experts from the remaining roster."""
    panel = _service(ctx).extend_panel(panel_id, extra, seed)
    click.echo(f"extended {panel.id} to {len(panel.experts)} experts")


@cli.command("open-round")
@click.option("--panel", "panel_id", required=True)
@click.option("--round", "round_index", required=True, type=click.IntRange(1, 2))
@click.pass_context
def open_round(ctx: click.Context, panel_id: str, round_index: int) -> None:
    """Open round 1 or 2 for responses."""
    panel = _service(ctx).open_round(panel_id, round_index)
    click.echo(f"{panel.id}: {panel.state.value}")


@cli.command("close-round")
@click.option("--panel", "panel_id", required=True)
@click.option("--round", "round_index", required=True, type=click.IntRange(1, 2))
@click.pass_context
def close_round(ctx: click.Context, panel_id: str, round_index: int) -> None:
    """Close a round and snapshot its aggregates."""
    panel = _service(ctx).close_round(panel_id, round_index)
    click.echo(f"{panel.id}: {panel.state.value}")


@cli.command()
@click.option("--panel", "panel_id", required=True)
@click.option("--base-url", default="", help="Prefix for questionnaire links.")
@click.pass_context
def tokens(ctx: click.Context, panel_id: str, base_url: str) -> None:
    """Print the panel's mailing list: expert, email, questionnaire link."""
    click.echo(_mailing_csv(_service(ctx).mailing_list(panel_id, base_url)), nl=False)


@cli.command()
@click.option("--panel", "panel_id", required=True)
@click.option("--round", "round_index", required=True, type=click.IntRange(1, 2))
@click.option("--base-url", default="")
@click.pass_context
def remind(ctx: click.Context, panel_id: str, round_index: int, base_url: str) -> None:
    """Print the mailing list of the round's nonrespondents."""
    click.echo(_mailing_csv(_service(ctx).reminders(panel_id, round_index, base_url)), nl=False)


@cli.command()
@click.option("--panel", "panel_id", required=True)
@click.pass_context
def finalize(ctx: click.Context, panel_id: str) -> None:
    """Average the two rounds into final categories."""
    panel = _service(ctx).finalize(panel_id)
    click.echo(f"{panel.id}: finalized {len(panel.finals)} publishers")


@cli.command()
@click.option("--panel", "panel_id", required=True)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["csv", "structured"]),
    default="structured",
    show_default=True,
)
@click.pass_context
def report(ctx: click.Context, panel_id: str, fmt: str) -> None:
    """Response rates (csv) or the full analytics document (structured)."""
    service = _service(ctx)
    if fmt == "structured":
        click.echo(json.dumps(service.analytics_document(panel_id), indent=2, sort_keys=True))
        return
    doc = service.response_rates_document(panel_id)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["field", "round", "sample_n", "answers", "rate_percent"])
    for row in doc["rows"] + doc["totals"]:
        writer.writerow(
            [row["field"], row["round"], row["sample_n"], row["answers"], row["rate_percent"]]
        )
    click.echo(buf.getvalue(), nl=False)


@cli.command()
@click.option("--panel", "panel_id", required=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Write to a file.")
@click.pass_context
def export(ctx: click.Context, panel_id: str, output: str | None) -> None:
    """Export the final categorization as CSV."""
    text = _service(ctx).final_csv(panel_id)
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        click.echo(f"wrote {output}")
    else:
        click.echo(text, nl=False)


def main() -> None:
    try:
        cli(prog_name="delphirank")
    except DomainError as exc:
        click.echo(f"error [{exc.code}]: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
