"""Operator command line: sizing, planning, audit lifecycle, simulation.

Machine-readable output (JSON or CSV) goes to stdout; human messages go to
stderr. Exit codes: 0 success, 1 validation error, 2 I/O error,
3 incomplete audit. Randomized subcommands require an explicit --seed; there
is no silent entropy source.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import planning, simulate, stats
from .errors import AuditError, IncompleteAuditError, StorageError, ValidationError
from .models import AuditConfig, SimScenario
from .service import AuditService
from .store import DecisionStore, load_documents

EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INCOMPLETE = 3

_DATA_DIR_OPTION = click.option(
    "--data-dir",
    envvar="BLINDAUDIT_DATA_DIR",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Audit data directory (or set BLINDAUDIT_DATA_DIR).",
)


def _emit(payload: dict) -> None:
    click.echo(json.dumps(payload, sort_keys=True))


def _mapped_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except IncompleteAuditError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INCOMPLETE)
        except (StorageError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_IO)
        except (ValidationError, AuditError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)

    return wrapper


def _service(data_dir: Path) -> AuditService:
    return AuditService(DecisionStore(data_dir))


@click.group()
def main():
    """Single-blind equivalence audits of a classifier against experts."""


@main.command()
@click.option("--delta", type=float, required=True, help="Equivalence margin.")
@click.option("--p", type=float, required=True, help="Assumed expert accuracy.")
@click.option("--alpha", type=float, required=True, help="Type-I level.")
@click.option("--beta", type=float, required=True, help="Type-II level.")
@_mapped_errors
def samplesize(delta: float, p: float, alpha: float, beta: float):
    """Required audit size with the intermediate quantities."""
    result = stats.sample_size_breakdown(delta, p, alpha, beta)
    if result.n == 0:
        click.echo(
            "warning: p = 1 gives zero variance and a sample size of 0", err=True
        )
    _emit(
        {
            "n": result.n,
            "z_half_alpha": result.z_half_alpha,
            "z_beta": result.z_beta,
            "raw": result.raw,
        }
    )


@main.command()
@click.option("--n", type=int, required=True, help="Total items to audit.")
@click.option("--chunks", type=int, required=True, help="Number of chunks.")
@_mapped_errors
def plan(n: int, chunks: int):
    """Balanced chunk plan for n items."""
    _emit(planning.partition_chunks(n, chunks).to_dict())


@main.command()
@_DATA_DIR_OPTION
@click.option("--pool", "pool_path", required=True, type=click.Path(path_type=Path))
@click.option("--seed", type=int, required=True)
@click.option("--delta", type=float, required=True)
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, required=True)
@click.option("--p", "p_assumed", type=float, required=True)
@click.option("--chunks", type=int, default=12, show_default=True)
@click.option("--per-item-seconds", type=int, default=60, show_default=True)
@_mapped_errors
def create(
    data_dir: Path,
    pool_path: Path,
    seed: int,
    delta: float,
    alpha: float,
    beta: float,
    p_assumed: float,
    chunks: int,
    per_item_seconds: int,
):
    """Create an audit: size it, draw the blinded sample, persist the queue."""
    config = AuditConfig(
        delta=delta,
        alpha=alpha,
        beta=beta,
        p_assumed=p_assumed,
        chunk_count=chunks,
        per_item_seconds=per_item_seconds,
    )
    pool = load_documents(pool_path)
    audit_id, n = _service(data_dir).create_audit(config, pool, seed)
    _emit({"audit_id": audit_id, "n_required": n})


@main.command()
@_DATA_DIR_OPTION
@click.option("--audit", "audit_id", required=True)
@click.option(
    "--file",
    "batch_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="JSONL of model/upstream/gold decision records.",
)
@_mapped_errors
def ingest(data_dir: Path, audit_id: str, batch_path: Path):
    """Ingest a batch of machine decisions (idempotent)."""
    rows = []
    for line in batch_path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError:
                rows.append({})
    counts = _service(data_dir).ingest_decisions(audit_id, rows)
    _emit(counts.to_dict())


@main.command()
@_DATA_DIR_OPTION
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--token", default=None, help="Static reviewer token (optional).")
@_mapped_errors
def serve(data_dir: Path, host: str, port: int, token: str | None):
    """Run the audit HTTP API."""
    import uvicorn

    from .api import create_app

    app = create_app(_service(data_dir), token=token)
    click.echo(f"serving audits from {data_dir} on {host}:{port}", err=True)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command(name="simulate")
@click.option("--delta", "deltas", type=float, multiple=True, required=True,
              help="Equivalence margin; repeat to sweep.")
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, required=True)
@click.option("--p", "p_assumed", type=float, required=True)
@click.option("--p-sme", type=float, required=True, help="True SME accuracy.")
@click.option("--p-model", type=float, required=True, help="True model accuracy.")
@click.option("--trials", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, required=True)
@_mapped_errors
def simulate_cmd(
    deltas: tuple[float, ...],
    alpha: float,
    beta: float,
    p_assumed: float,
    p_sme: float,
    p_model: float,
    trials: int,
    seed: int,
):
    """Monte Carlo operating characteristics, one CSV row per scenario."""
    scenarios = [
        SimScenario(
            p_sme=p_sme,
            p_model=p_model,
            config=AuditConfig(
                delta=delta, alpha=alpha, beta=beta, p_assumed=p_assumed
            ),
            trials=trials,
            seed=seed,
        )
        for delta in deltas
    ]
    click.echo(simulate.INDEPENDENCE_NOTE, err=True)
    click.echo(simulate.sweep_csv(scenarios), nl=False)


@main.command()
@_DATA_DIR_OPTION
@click.option("--audit", "audit_id", required=True)
@click.option(
    "--mode",
    type=click.Choice(["interim", "final"]),
    default="interim",
    show_default=True,
)
@_mapped_errors
def report(data_dir: Path, audit_id: str, mode: str):
    """Equivalence report for an audit (exit 3 if final but incomplete)."""
    _emit(_service(data_dir).report(audit_id, mode).to_dict())


if __name__ == "__main__":
    main()
