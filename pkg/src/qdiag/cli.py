"""Command-line front end: batch diagnosis, query computation, simulated
sessions, benchmarking, and the embedded HTTP session service."""

from __future__ import annotations

import csv
import statistics
import sys
import time
from pathlib import Path

import click

from .diagnosis import DiagnosisOrder, compute_diagnoses, diag_key
from .dpi import DPI, DPIError, load_dpi
from .logic import EntailmentType, FormulaSyntaxError, Reasoner
from .measures import QCMKind, QCMSpec, QSMKind, QSMSpec, outcome_probability, qsm_value, qcm_value
from .p1 import optimize_qpartition
from .p2 import optimize_query_for_qpartition
from .p3 import expand_query, opti_minimize_query
from .qspace import count_cqps
from .randgen import random_dpi
from .session import SessionConfig, SimulatedOracle, run_session

_ET_CHOICES = {"atoms": EntailmentType.ATOMS, "defclause": EntailmentType.SINGLETON_BODY_DEFINITE}

BENCH_COLUMNS = [
    "dpi",
    "name",
    "|D|",
    "cqp_count",
    "time_p1p2_ms",
    "time_p3_ms",
    "reasoner_calls_p1p2",
    "reasoner_calls_p3",
    "query_size",
    "m_value",
    "c_value",
]


def _load(path: str) -> DPI:
    try:
        return load_dpi(Path(path).read_bytes())
    except FileNotFoundError as exc:
        raise click.ClickException(f"no such file: {path}") from exc
    except (DPIError, FormulaSyntaxError) as exc:
        raise click.ClickException(str(exc)) from exc


def _qsm_option(f):
    f = click.option("--qsm", type=click.Choice(["ent", "spl"]), default="ent", show_default=True)(f)
    f = click.option("--qcm", type=click.Choice(["sum", "max", "card"]), default="card", show_default=True)(f)
    f = click.option("--tm", type=float, default=0.0, show_default=True, help="QSM optimality threshold.")(f)
    f = click.option("--leading", type=int, default=9, show_default=True, help="Leading diagnoses cap.")(f)
    f = click.option("--enhance", is_flag=True, help="Run the reasoner-backed expansion phase.")(f)
    f = click.option("--et", type=click.Choice(sorted(_ET_CHOICES)), multiple=True, default=("defclause",), show_default=True)(f)
    f = click.option("--seed", type=int, default=0, show_default=True)(f)
    return f


@click.group()
def main() -> None:
    """Sequential model-based diagnosis with optimized measurement queries."""


@main.command()
@click.argument("dpi_path", type=click.Path())
@click.option("--max", "max_count", type=int, default=10, show_default=True)
@click.option("--order", type=click.Choice(["bfs", "prob"]), default="bfs", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def diagnose(dpi_path: str, max_count: int, order: str, seed: int) -> None:
    """Print the minimal diagnoses of a problem instance."""
    dpi = _load(dpi_path)
    result = compute_diagnoses(dpi, max_count=max_count, order=DiagnosisOrder(order), rng_seed=seed)
    for d in result:
        click.echo(f"{{{', '.join(diag_key(d))}}}  p={result.probability(d):.4f}")
    click.echo(f"{len(result)} diagnosis(es){' (exhaustive)' if result.exhaustive else ''}")


@main.command()
@click.argument("dpi_path", type=click.Path())
@_qsm_option
def query(dpi_path: str, qsm: str, qcm: str, tm: float, leading: int, enhance: bool, et: tuple[str, ...], seed: int) -> None:
    """Compute one optimized query for the leading diagnoses."""
    dpi = _load(dpi_path)
    reasoner = Reasoner()
    diagnoses = compute_diagnoses(
        dpi, max_count=leading, order=DiagnosisOrder.UNIFORM_COST_PROBABILITY,
        rng_seed=seed, reasoner=reasoner,
    )
    if len(diagnoses) < 2:
        raise click.ClickException("fewer than two diagnoses; nothing to discriminate")
    qsm_spec = QSMSpec(kind=QSMKind(qsm), threshold=tm)
    qcm_spec = QCMSpec(kind=QCMKind(qcm))
    partition, stats = optimize_qpartition(dpi, diagnoses, qsm_spec)
    chosen = optimize_query_for_qpartition(dpi, partition, qcm_spec)
    if enhance:
        types = frozenset(_ET_CHOICES[name] for name in et)
        expansion = expand_query(dpi, diagnoses, partition, types, reasoner, qcm_spec)
        chosen = opti_minimize_query(dpi, diagnoses, partition, expansion, reasoner)

    click.echo("query:")
    for sentence in sorted(str(f) for f in chosen.sentences):
        click.echo(f"  {sentence}")
    click.echo(f"m={stats.best_value:.4f}  c={qcm_value(qcm_spec, chosen):.4f}  "
               f"p(true)={outcome_probability(partition, diagnoses):.4f}")
    click.echo("accepted by: " + "; ".join("{" + ", ".join(diag_key(d)) + "}" for d in partition.dplus))
    click.echo("rejected by: " + "; ".join("{" + ", ".join(diag_key(d)) + "}" for d in partition.dminus))


@main.command()
@click.argument("dpi_path", type=click.Path())
@click.option("--actual", required=True, help="Comma-separated components of the planted diagnosis.")
@click.option("--max-queries", type=int, default=50, show_default=True)
@_qsm_option
def session(dpi_path: str, actual: str, max_queries: int, qsm: str, qcm: str, tm: float,
            leading: int, enhance: bool, et: tuple[str, ...], seed: int) -> None:
    """Run a simulated diagnosis session against a planted fault state."""
    dpi = _load(dpi_path)
    config = SessionConfig(
        qsm=QSMSpec(kind=QSMKind(qsm), threshold=tm),
        qcm=QCMSpec(kind=QCMKind(qcm)),
        enhance=enhance,
        et=frozenset(_ET_CHOICES[name] for name in et),
        leading_count=max(leading, 2),
        max_queries=max_queries,
        rng_seed=seed,
    )
    planted = frozenset(part.strip() for part in actual.split(",") if part.strip())
    try:
        state = run_session(dpi, config, SimulatedOracle(dpi, planted, Reasoner()))
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    for i, entry in enumerate(state.history, start=1):
        sentences = ", ".join(sorted(str(f) for f in entry.query.sentences))
        click.echo(f"q{i}: {{{sentences}}} -> {'true' if entry.answer else 'false'}")
    if state.converged:
        final = next(iter(state.diagnoses))
        click.echo(f"converged after {len(state.history)} queries: {{{', '.join(diag_key(final))}}}")
    else:
        click.echo(f"budget exhausted after {len(state.history)} queries without convergence")
        sys.exit(1)


@main.command()
@click.option("--dpi", "dpi_path", type=click.Path(), default=None, help="Benchmark this instance.")
@click.option("--random", "random_count", type=int, default=0, help="Benchmark N generated instances.")
@click.option("--comps", type=int, default=20, show_default=True, help="Components per generated instance.")
@click.option("--density", type=float, default=0.4, show_default=True, help="Two-atom body probability.")
@click.option("--neg-count", type=int, default=2, show_default=True, help="Negative measurements per generated instance.")
@click.option("--repeat", type=int, default=1, show_default=True, help="Leading-diagnosis draws per instance.")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write CSV here (default stdout).")
@_qsm_option
def bench(dpi_path: str | None, random_count: int, comps: int, density: float, neg_count: int,
          repeat: int, out_path: str | None, qsm: str, qcm: str, tm: float, leading: int,
          enhance: bool, et: tuple[str, ...], seed: int) -> None:
    """Benchmark query computation; one CSV row per instance and draw."""
    instances: list[tuple[str, str, DPI]] = []
    if dpi_path:
        base = Path(dpi_path).stem
        instances.append((dpi_path, base, _load(dpi_path)))
    for i in range(random_count):
        instances.append(("random", f"rand-{seed}-{i}", random_dpi(comps, seed=seed + i, density=density, n_neg=neg_count)))
    if not instances:
        raise click.ClickException("nothing to benchmark: pass --dpi and/or --random N")

    qsm_spec = QSMSpec(kind=QSMKind(qsm), threshold=tm)
    qcm_spec = QCMSpec(kind=QCMKind(qcm))
    types = frozenset(_ET_CHOICES[name] for name in et)

    rows = []
    for source, name, dpi in instances:
        for draw in range(repeat):
            reasoner = Reasoner()
            diagnoses = compute_diagnoses(
                dpi, max_count=leading, order=DiagnosisOrder.UNIFORM_COST_PROBABILITY,
                rng_seed=seed + draw, reasoner=reasoner,
            )
            if len(diagnoses) < 2:
                continue
            calls_before = reasoner.calls
            started = time.perf_counter()
            partition, _ = optimize_qpartition(dpi, diagnoses, qsm_spec)
            chosen = optimize_query_for_qpartition(dpi, partition, qcm_spec)
            p1p2_ms = (time.perf_counter() - started) * 1000.0
            calls_p1p2 = reasoner.calls - calls_before

            p3_ms = 0.0
            calls_p3 = 0
            if enhance:
                calls_before = reasoner.calls
                started = time.perf_counter()
                expansion = expand_query(dpi, diagnoses, partition, types, reasoner, qcm_spec)
                chosen = opti_minimize_query(dpi, diagnoses, partition, expansion, reasoner)
                p3_ms = (time.perf_counter() - started) * 1000.0
                calls_p3 = reasoner.calls - calls_before

            rows.append({
                "dpi": source,
                "name": f"{name}#{draw}",
                "|D|": len(diagnoses),
                "cqp_count": count_cqps(dpi, diagnoses),
                "time_p1p2_ms": f"{p1p2_ms:.3f}",
                "time_p3_ms": f"{p3_ms:.3f}",
                "reasoner_calls_p1p2": calls_p1p2,
                "reasoner_calls_p3": calls_p3,
                "query_size": len(chosen.sentences),
                "m_value": f"{qsm_value(qsm_spec, partition, diagnoses):.6f}",
                "c_value": f"{qcm_value(qcm_spec, chosen):.4f}",
            })

    if not rows:
        raise click.ClickException("no instance produced at least two diagnoses")

    handle = open(out_path, "w", newline="") if out_path else sys.stdout
    try:
        writer = csv.DictWriter(handle, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out_path:
            handle.close()
    median_size = statistics.median(row["query_size"] for row in rows)
    click.echo(f"rows: {len(rows)}  median query size: {median_size}", err=out_path is None)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--frontend", "frontend_dir", type=click.Path(), default=None,
              help="Static UI directory to serve at /.")
def serve(host: str, port: int, frontend_dir: str | None) -> None:
    """Run the HTTP session service."""
    from .service import serve_api

    if frontend_dir is None:
        default_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        frontend_dir = str(default_dir) if default_dir.is_dir() else None
    serve_api(host=host, port=port, frontend_dir=frontend_dir)


if __name__ == "__main__":
    main()
