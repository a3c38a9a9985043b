"""
hermite-kinetics command-line runner.

Parses a flat config, validates it completely, then creates the run directory
and dispatches to the advection or Vlasov-Poisson driver. Every run directory
holds manifest.json (resolved config + version; pass it back to --config to
repeat the run), diagnostics.csv, summary.json and optional snapshots/.

Exit codes: 0 ok, 2 config error, 3 validation error, 4 solver failure.

Usage:
    hermite-kinetics vp --config configs/landau.cfg --out runs/landau
    hermite-kinetics advect --config configs/advection_aw.cfg --set nu=2
    hermite-kinetics stability-calc --M 2 --nu 1 --N 8
    hermite-kinetics lb-table --basis AW --k 2 --N 6
"""
from __future__ import annotations

import argparse
import logging
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterator, Optional

import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from src import __version__
from src.advection.initial import initial_coefficients
from src.advection.model import AdvectionSystem
from src.config import default_out_dir, log_level, resolve_config
from src.diagnostics.sink import DiagnosticsSink, lb_table_frame
from src.errors import ConfigError, HermiteKineticsError, SolverError, ValidationError
from src.hermite.core import HermiteBasis
from src.integrators.trapezoidal import TrapezoidalIntegrator
from src.models import AdvectionConfig, BasisKind, Command, RunManifest, SimConfig, VPConfig
from src.operators.lenard_bernstein import build_lb
from src.vlasov.solver import VlasovPoissonSolver
from src.vlasov.stability import stability_bounds

logger = logging.getLogger(__name__)
console = Console()

LB_TABLE_FILE = "lb_table.csv"

ERROR_LABELS = {
    ConfigError: "Configuration error",
    ValidationError: "Validation error",
    SolverError: "Solver failure",
}


# =============================================================================
# Setup helpers
# =============================================================================


def configure_logging(verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else log_level(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def prepare_out_dir(out: Optional[Path], command: Command, force: bool) -> Path:
    """Create the run directory; a non-empty existing one needs --force."""
    if out is None:
        stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
        out = default_out_dir() / f"{command.value}-{stamp}"
    out = Path(out)
    if out.exists() and not out.is_dir():
        raise ValidationError(f"Output path {out} exists and is not a directory")
    if out.is_dir() and any(out.iterdir()) and not force:
        raise ValidationError(f"Output directory {out} is not empty; pass --force to reuse it")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _resolve(args: argparse.Namespace, model_cls: type[SimConfig]) -> SimConfig:
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    return resolve_config(model_cls, args.config, overrides)


def _write_manifest(out: Path, command: Command, cfg: SimConfig, deterministic: bool) -> None:
    manifest = RunManifest(
        command=command,
        config=cfg.model_dump(mode="json"),
        version=__version__,
        seed=cfg.seed,
        deterministic=deterministic,
    )
    (out / "manifest.json").write_text(manifest.model_dump_json(indent=2))


@contextmanager
def _progress(total: int, label: str) -> Iterator[Callable[..., None]]:
    progress = Progress(
        TextColumn("[bold blue]{task.description}"),
        BarColumn(),
        TextColumn("{task.completed}/{task.total}"),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    )
    with progress:
        task = progress.add_task(label, total=total)
        yield lambda *_: progress.advance(task)


def _print_summary(sink: DiagnosticsSink, out: Path) -> None:
    summary = sink.summary()
    table = Table(title="Run Summary")
    table.add_column("Quantity", style="cyan")
    table.add_column("Initial", justify="right")
    table.add_column("Final", justify="right")
    table.add_column("Max drift", style="green", justify="right")
    for name, stats in summary.items():
        if isinstance(stats, dict):
            table.add_row(
                name, f"{stats['initial']:.10g}", f"{stats['final']:.10g}",
                f"{stats['max_drift']:.3e}",
            )
    console.print(table)
    console.print(f"[green]✓[/green] Results written to [cyan]{out}[/cyan]")


# =============================================================================
# Commands
# =============================================================================


def run_advect(args: argparse.Namespace) -> int:
    cfg = _resolve(args, AdvectionConfig)
    basis = HermiteBasis.build(cfg.basis, cfg.N)
    initial = initial_coefficients(cfg, basis, np.random.default_rng(cfg.seed))
    lb = build_lb(cfg.basis, cfg.k, cfg.nu, cfg.N) if cfg.lb else None
    system = AdvectionSystem.create(initial, lb=lb, freeze_mean=cfg.freeze_mean)
    integrator = TrapezoidalIntegrator(system, cfg.resolved_dt)
    out = prepare_out_dir(args.out, Command.ADVECT, args.force)
    _write_manifest(out, Command.ADVECT, cfg, args.deterministic)

    sink = DiagnosticsSink()
    with _progress(cfg.steps, "advect") as advance:
        integrator.run(cfg.steps, sink=sink, record_every=cfg.record_every, on_step=advance)
    sink.write_csv(out / "diagnostics.csv")
    sink.write_summary(out / "summary.json")
    _print_summary(sink, out)
    return 0


def run_vp(args: argparse.Namespace) -> int:
    cfg = _resolve(args, VPConfig)
    solver = VlasovPoissonSolver(cfg, deterministic=args.deterministic)
    initial = solver.initial_state()
    out = prepare_out_dir(args.out, Command.VP, args.force)
    _write_manifest(out, Command.VP, cfg, args.deterministic)
    snapshot_dir = None
    if cfg.snapshot_every:
        snapshot_dir = out / "snapshots"
        snapshot_dir.mkdir(exist_ok=True)

    sink = DiagnosticsSink()
    try:
        with _progress(cfg.steps, "vlasov-poisson") as advance:
            solver.run(initial, sink=sink, snapshot_dir=snapshot_dir, on_step=advance)
    finally:
        # keep whatever was computed before a solver failure
        if len(sink):
            sink.write_csv(out / "diagnostics.csv")
            sink.write_summary(out / "summary.json")
    _print_summary(sink, out)
    return 0


def run_project_ic(args: argparse.Namespace) -> int:
    cfg = _resolve(args, AdvectionConfig)
    basis = HermiteBasis.build(cfg.basis, cfg.N)
    c = initial_coefficients(cfg, basis, np.random.default_rng(cfg.seed))

    table = Table(title=f"Initial coefficients ({cfg.basis.value}, ic={cfg.ic.value})")
    table.add_column("n", style="cyan", justify="right")
    table.add_column("C_n", justify="right")
    table.add_column("C_n*", style="green", justify="right")
    for n, (poly, norm) in enumerate(zip(c.polynomial_values, c.normalized_values)):
        table.add_row(str(n), f"{poly:.17g}", f"{norm:.17g}")
    console.print(table)

    if args.out is not None:
        out = prepare_out_dir(args.out, Command.PROJECT_IC, args.force)
        _write_manifest(out, Command.PROJECT_IC, cfg, args.deterministic)
        sink = DiagnosticsSink()
        for n, (poly, norm) in enumerate(zip(c.polynomial_values, c.normalized_values)):
            sink.append({"n": n, "polynomial": poly, "normalized": norm})
        sink.write_csv(out / "initial.csv")
    return 0


def run_stability_calc(args: argparse.Namespace) -> int:
    try:
        bounds = stability_bounds(args.M, args.nu, args.N)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    console.print(f"dt_visc={bounds.dt_visc:.12g}", highlight=False)
    console.print(f"dt_spec={bounds.dt_spec:.12g}", highlight=False)
    console.print(f"nu_suggested={bounds.nu_suggested:.12g}", highlight=False)
    return 0


def run_lb_table(args: argparse.Namespace) -> int:
    if args.k < 1 or args.N < 0:
        raise ValidationError(f"lb-table needs k >= 1 and N >= 0, got k={args.k}, N={args.N}")
    frame = lb_table_frame(args.basis, args.k, args.N)

    table = Table(title=f"Lenard-Bernstein eigenvalues ({args.basis.value}, k={args.k})")
    table.add_column("n", style="cyan", justify="right")
    table.add_column("lambda_n", justify="right")
    table.add_column("conserved moment", style="green")
    for row in frame.itertuples(index=False):
        value = "overflow" if row.overflow else f"{row.eigenvalue:.17g}"
        table.add_row(str(row.n), value, "yes" if row.annihilated_moment else "")
    console.print(table)

    if args.out is not None:
        out = Path(args.out)
        if out.exists() and not out.is_dir():
            raise ValidationError(f"Output path {out} exists and is not a directory")
        out.mkdir(parents=True, exist_ok=True)
        path = out / LB_TABLE_FILE
        frame.to_csv(path, index=False)
        logger.info(f"Wrote eigenvalue table to {path}")
    return 0


COMMANDS: dict[Command, Callable[[argparse.Namespace], int]] = {
    Command.ADVECT: run_advect,
    Command.VP: run_vp,
    Command.PROJECT_IC: run_project_ic,
    Command.STABILITY_CALC: run_stability_calc,
    Command.LB_TABLE: run_lb_table,
}


# =============================================================================
# CLI Entry Point
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hermite-kinetics",
        description="Hermite spectral solvers for kinetic equations",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  hermite-kinetics vp --config configs/landau.cfg --out runs/landau
  hermite-kinetics advect --config configs/advection_sw.cfg --set T=5
  hermite-kinetics vp --config runs/landau/manifest.json --out runs/again --deterministic
  hermite-kinetics stability-calc --M 2 --nu 1 --N 8
  hermite-kinetics lb-table --basis SW --k 1 --N 4
        """,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    run_options = argparse.ArgumentParser(add_help=False)
    run_options.add_argument("--config", type=Path, help="key=value config or run manifest")
    run_options.add_argument("--out", type=Path, help="Run directory")
    run_options.add_argument(
        "--force", action="store_true", help="Reuse a non-empty run directory"
    )
    run_options.add_argument("--seed", type=int, help="Seed for randomized initial data")
    run_options.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a config value (repeatable)",
    )
    run_options.add_argument(
        "--deterministic", action="store_true", help="Fixed reduction order in diagnostics"
    )

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser(Command.ADVECT.value, parents=[run_options], help="1-D advection model")
    sub.add_parser(Command.VP.value, parents=[run_options], help="Vlasov-Poisson run")
    sub.add_parser(
        Command.PROJECT_IC.value, parents=[run_options], help="Project an initial condition"
    )

    calc = sub.add_parser(Command.STABILITY_CALC.value, help="Advisory time-step bounds")
    calc.add_argument("--M", type=float, required=True, help="Field magnitude max|E^j + E^{j-1}|")
    calc.add_argument("--nu", type=float, required=True, help="Artificial viscosity")
    calc.add_argument("--N", type=int, required=True, help="Hermite truncation")

    lb = sub.add_parser(Command.LB_TABLE.value, help="Lenard-Bernstein eigenvalue table")
    lb.add_argument(
        "--basis", type=BasisKind, choices=list(BasisKind), default=BasisKind.AW, metavar="{AW,SW}"
    )
    lb.add_argument("--k", type=int, default=1)
    lb.add_argument("--N", type=int, required=True)
    lb.add_argument("--out", type=Path, help=f"Also write {LB_TABLE_FILE} into this directory")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    command = Command(args.command)
    try:
        return COMMANDS[command](args)
    except HermiteKineticsError as exc:
        label = next(
            (text for cls, text in ERROR_LABELS.items() if isinstance(exc, cls)), "Error"
        )
        console.print(f"[red]{label}: {escape(str(exc))}[/red]")
        return exc.exit_code
    except (ValueError, OverflowError) as exc:
        console.print(f"[red]Validation error: {escape(str(exc))}[/red]")
        return ValidationError.exit_code
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted by user[/yellow]")
        return 130


if __name__ == "__main__":
    raise SystemExit(main())
