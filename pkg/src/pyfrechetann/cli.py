"""CLI interface for pyfrechetann."""

import json
import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import click
import yaml
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from .bench import BenchRow, fit_log_linear, read_csv, run_benchmark, write_csv, write_plot_data
from .config import load_experiment_config, save_config_template
from .doubling import generate_lower_bound_family, packing_estimate
from .errors import ConstraintError, CurveFileError, DimensionMismatchError, FrechetANNError
from .frechet import discrete_frechet, frechet_distance
from .io import format_curves, load_index, read_curves, save_index
from .pipeline import build_additive, build_multiplicative
from .stats import bundledness_spread_ratio, dataset_stats
from .types import CurveRecord, FrechetConfig

console = Console()

EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_CONSTRAINT = 4


@contextmanager
def _cli_errors() -> Iterator[None]:
    """Translate library errors into exit codes."""
    try:
        yield
    except DimensionMismatchError as e:
        console.print(f"[red]Dimension mismatch: {e}[/red]")
        sys.exit(EXIT_DIMENSION)
    except (CurveFileError, FileNotFoundError, yaml.YAMLError, ValidationError) as e:
        console.print(f"[red]Parse error: {e}[/red]")
        sys.exit(EXIT_PARSE)
    except FrechetANNError as e:
        console.print(f"[red]Error: {e}[/red]")
        sys.exit(EXIT_CONSTRAINT)
    except ValueError as e:
        # Non-mapping YAML documents
        console.print(f"[red]Parse error: {e}[/red]")
        sys.exit(EXIT_PARSE)
    except Exception as e:
        console.print(f"[red]Unexpected error: {e}[/red]")
        sys.exit(1)


def _setup_logging(verbose: bool) -> None:
    package_logger = logging.getLogger("pyfrechetann")
    if not verbose:
        return
    package_logger.setLevel(logging.DEBUG)
    if not any(isinstance(h, RichHandler) for h in package_logger.handlers):
        package_logger.addHandler(RichHandler(console=Console(stderr=True), show_path=False))


def _pick(records: list[CurveRecord], curve_id: str | None, source: Path) -> CurveRecord:
    if curve_id is None:
        return records[0]
    for record in records:
        if record.id == curve_id:
            return record
    raise ConstraintError(f"{source} has no curve with id {curve_id!r}")


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log parameter cascades and counts")
def cli(verbose: bool) -> None:
    """PyFrechetANN - approximate nearest neighbours for polygonal curves."""
    _setup_logging(verbose)


@cli.command()
@click.argument("file_a", type=click.Path(path_type=Path))
@click.argument("file_b", type=click.Path(path_type=Path))
@click.option(
    "--discrete/--continuous", default=False, help="Discrete or continuous Frechet distance"
)
@click.option("--tol", type=float, default=1e-7, show_default=True, help="Absolute tolerance")
@click.option("--id-a", help="Curve id in FILE_A (default: first record)")
@click.option("--id-b", help="Curve id in FILE_B (default: first record)")
def dist(
    file_a: Path, file_b: Path, discrete: bool, tol: float, id_a: str | None, id_b: str | None
) -> None:
    """Frechet distance between one curve of FILE_A and one of FILE_B."""
    with _cli_errors():
        a = _pick(read_curves(file_a), id_a, file_a)
        b = _pick(read_curves(file_b), id_b, file_b)
        if discrete:
            value = discrete_frechet(a.curve, b.curve)
            console.print(f"{value!r} (discrete, exact)")
        else:
            cfg = FrechetConfig(tol_abs=tol)
            value = frechet_distance(a.curve, b.curve, cfg)
            bound = cfg.tolerance_for(discrete_frechet(a.curve, b.curve))
            console.print(f"{value!r} (continuous, +/- {bound:g})")


@cli.command()
@click.argument("curve_file", type=click.Path(path_type=Path))
@click.option("--tol", type=float, default=1e-7, show_default=True, help="Absolute tolerance")
@click.option("--delta-min", type=float, help="Known minimum pairwise distance")
def stats(curve_file: Path, tol: float, delta_min: float | None) -> None:
    """Edge lengths, minimum pairwise distance, bundledness and spread of a curve file."""
    with _cli_errors():
        records = read_curves(curve_file)
        result = dataset_stats([r.curve for r in records], FrechetConfig(tol_abs=tol), delta_min)

        table = Table(title=f"Dataset statistics: {curve_file.name}")
        table.add_column("Statistic", style="cyan")
        table.add_column("Value", justify="right")
        table.add_row("distinct curves", str(result.n))
        table.add_row("max complexity", str(result.k_max))
        table.add_row("lambda_max", f"{result.lambda_max:.9g}")
        exact = "" if result.delta_min_exact else " (given)"
        table.add_row("delta_min", f"{result.delta_min:.9g}{exact}")
        table.add_row("bundledness", f"{result.bundledness:.9g}")
        table.add_row("spread", f"{result.spread:.9g}")
        table.add_row("1/bundledness / spread", f"{bundledness_spread_ratio(result):.6g}")
        console.print(table)


@cli.command()
@click.argument("curve_file", type=click.Path(path_type=Path))
@click.option("--eps", type=float, required=True, help="Approximation factor")
@click.option(
    "--mode",
    type=click.Choice(["additive", "mult", "multiplicative"]),
    default="mult",
    show_default=True,
    help="Guarantee type",
)
@click.option("--eps-add", type=float, help="Additive slack (additive mode)")
@click.option("--tol", type=float, default=1e-7, show_default=True, help="Absolute tolerance")
@click.option(
    "--out", type=click.Path(path_type=Path), required=True, help="Index file to write"
)
def build(
    curve_file: Path, eps: float, mode: str, eps_add: float | None, tol: float, out: Path
) -> None:
    """Build an index over a curve file."""
    with _cli_errors():
        records = read_curves(curve_file)
        curves = [r.curve for r in records]
        ids = [r.id for r in records]
        cfg = FrechetConfig(tol_abs=tol)
        with console.status("Building index..."):
            if mode == "additive":
                if eps_add is None:
                    raise ConstraintError("--eps-add is required in additive mode")
                index = build_additive(curves, eps, eps_add, cfg, ids)
            else:
                index = build_multiplicative(curves, eps, cfg, ids)
        save_index(index, out)

        params = index.params
        table = Table(title="Index")
        table.add_column("Parameter", style="cyan")
        table.add_column("Value", justify="right")
        table.add_row("mode", params.mode)
        table.add_row("curves", f"{len(index)} ({len(index.merges.merged)} duplicates merged)")
        table.add_row("tree items", str(len(index.tree)))
        table.add_row("eps / tree eps", f"{params.eps:g} / {params.ann_eps:g}")
        table.add_row("eps_add", f"{params.eps_add:.9g}")
        table.add_row("eps_hat", f"{params.eps_hat:.9g}")
        table.add_row("mu", str(params.mu))
        table.add_row("slack budget", f"{params.slack_budget:.3g}")
        console.print(table)
        if index.collisions:
            console.print(f"[yellow]Snapping collisions:[/yellow] {index.collisions}")
        console.print(f"[green]✓[/green] Index saved to {out}")


@cli.command()
@click.argument("index_file", type=click.Path(path_type=Path))
@click.argument("curve_file", type=click.Path(path_type=Path))
@click.option(
    "--output",
    type=click.Choice(["table", "json"]),
    default="table",
    show_default=True,
    help="Output format",
)
def query(index_file: Path, curve_file: Path, output: str) -> None:
    """Answer a nearest-neighbour query for every curve of CURVE_FILE."""
    with _cli_errors():
        index = load_index(index_file)
        records = read_curves(curve_file)
        answers = []
        for record in records:
            _, _, certificate = index.query(record.curve)
            answers.append((record.id, certificate))

        if output == "json":
            payload = [
                {"query": qid, **certificate.model_dump(mode="json")}
                for qid, certificate in answers
            ]
            click.echo(json.dumps(payload, indent=2))
            return

        table = Table(title=f"{index.params.mode} queries (eps={index.params.eps:g})")
        table.add_column("Query", style="cyan")
        table.add_column("Answer", style="green")
        table.add_column("Distance", justify="right")
        table.add_column("Snapped", justify="right")
        table.add_column("Evals", justify="right")
        table.add_column("Collisions")
        for qid, certificate in answers:
            table.add_row(
                qid,
                certificate.answer_id,
                f"{certificate.distance:.9g}",
                f"{certificate.snapped_distance:.9g}",
                str(certificate.evaluations),
                ", ".join(certificate.collisions) or "[dim]-[/dim]",
            )
        console.print(table)


@cli.command("gen-lower")
@click.option("--mu", type=int, required=True, help="Edge multiplier cap (> 1)")
@click.option("--k", type=int, required=True, help="Curve complexity")
@click.option("--m", type=int, required=True, help="Number of zig-zags per curve")
@click.option("--limit", type=int, help="Emit at most this many members")
@click.option("--out", type=click.Path(path_type=Path), help="Curve file (default: stdout)")
@click.option("--center/--no-center", default=True, help="Include the center curve as 'C'")
def gen_lower(
    mu: int, k: int, m: int, limit: int | None, out: Path | None, center: bool
) -> None:
    """Write the zig-zag lower-bound family as a curve file."""
    with _cli_errors():
        family = generate_lower_bound_family(mu, k, m, limit)
        records = [CurveRecord(id="C", curve=family.center)] if center else []
        records += [
            CurveRecord(id="G" + "_".join(map(str, member.indices)), curve=member.curve)
            for member in family.members
        ]
        text = format_curves(records)
        if out is None:
            click.echo(text, nl=False)
            return
        out.write_text(text)
        console.print(
            f"[green]✓[/green] {len(family.members)} of {family.total} members written to {out}"
        )


@cli.command()
@click.argument("curve_file", type=click.Path(path_type=Path))
@click.option("--center-id", required=True, help="Id of the ball centre")
@click.option("--r", "radius", type=float, required=True, help="Ball radius")
@click.option("--sep", type=float, required=True, help="Packing separation")
@click.option("--seed", type=int, help="Shuffle candidates with this seed")
@click.option("--tol", type=float, default=1e-7, show_default=True, help="Absolute tolerance")
def doubling(
    curve_file: Path, center_id: str, radius: float, sep: float, seed: int | None, tol: float
) -> None:
    """Greedy packing count inside a Frechet ball around one curve of the file."""
    with _cli_errors():
        records = read_curves(curve_file)
        center = _pick(records, center_id, curve_file)
        report = packing_estimate(
            [r.curve for r in records], center.curve, radius, sep, FrechetConfig(tol_abs=tol), seed
        )

        table = Table(title=f"Packing around {center_id}")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", justify="right")
        table.add_row("radius", f"{report.radius:.9g}")
        table.add_row("separation", f"{report.net_separation:.9g}")
        table.add_row("inside ball", str(report.candidates))
        table.add_row("packing count", str(report.packing_count))
        table.add_row("log2 count", f"{report.log2_count:.4f}")
        console.print(table)


def _output_bench(rows: list[BenchRow]) -> None:
    table = Table(title="Benchmark")
    for column in ("n", "eps", "build s", "query s", "evals mean", "evals max", "violations"):
        table.add_column(column, justify="right")
    for row in rows:
        violations = f"[red]{row.violations}[/red]" if row.violations else "0"
        table.add_row(
            str(row.n),
            f"{row.eps:g}",
            f"{row.build_seconds:.3f}",
            f"{row.query_seconds_mean * 1000:.2f}ms",
            f"{row.evaluations_mean:.1f}",
            str(row.evaluations_max),
            violations,
        )
    console.print(table)

    for eps in sorted({row.eps for row in rows}):
        series = [row for row in rows if row.eps == eps]
        if len({row.n for row in series}) < 2:
            continue
        a, b, r2 = fit_log_linear([r.n for r in series], [r.evaluations_mean for r in series])
        console.print(f"eps={eps:g}: evaluations ~ {a:.2f} + {b:.2f} log2 n (R^2 = {r2:.3f})")


@cli.command()
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option(
    "--out", type=click.Path(path_type=Path), default="bench.csv", show_default=True
)
@click.option("--plot-dir", type=click.Path(path_type=Path), help="Also write plot data here")
def bench(config_path: Path, out: Path, plot_dir: Path | None) -> None:
    """Run a benchmark configuration and write a CSV of build and query costs."""
    with _cli_errors():
        config = load_experiment_config(config_path)
        total = len(config.sizes) * len(config.eps)
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            console=console,
        ) as progress:
            task = progress.add_task(f"Benchmark ({config.mode})", total=total)
            rows = run_benchmark(config, on_row=lambda _: progress.advance(task))
        write_csv(rows, out)
        _output_bench(rows)
        console.print(f"Results saved to: {out}")
        if plot_dir is not None:
            for path in write_plot_data(rows, plot_dir):
                console.print(f"Plot data: {path}")
        if any(row.violations for row in rows):
            sys.exit(1)


@cli.command()
@click.argument("csv_path", type=click.Path(path_type=Path))
@click.option(
    "--out-dir", type=click.Path(path_type=Path), default="plots", show_default=True
)
def plot(csv_path: Path, out_dir: Path) -> None:
    """Write gnuplot data files from a benchmark CSV."""
    with _cli_errors():
        if not csv_path.exists():
            raise FileNotFoundError(f"Benchmark CSV not found: {csv_path}")
        for path in write_plot_data(read_csv(csv_path), out_dir):
            console.print(f"[green]✓[/green] {path}")


@cli.command("init")
@click.argument("output_path", type=click.Path(path_type=Path), default="bench.yaml")
def init_config(output_path: Path) -> None:
    """Create a template benchmark configuration file."""
    try:
        save_config_template(output_path)
        console.print(f"[green]✓[/green] Configuration template created: {output_path}")
        console.print(f"\nEdit the file and run: [bold]pyfrechetann bench {output_path}[/bold]")
    except Exception as e:
        console.print(f"[red]Error creating template: {e}[/red]")
        sys.exit(1)


def main() -> None:
    """Entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
