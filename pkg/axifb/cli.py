"""Command-line interface for axifb."""

import sys
from contextlib import contextmanager
from dataclasses import replace
from typing import Optional

import numpy as np
import typer
from rich.console import Console
from rich.markup import escape
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table

from axifb import __version__
from axifb.banners import print_command_banner, print_main_banner
from axifb.catenoid import Catenoid, CatenoidConvention, PlanarCurve, catenoid_graph, mean_curvature
from axifb.errors import ConfigError, WorkbenchError
from axifb.exporter import load_field, write_curve_csv, write_field, write_profile_csv
from axifb.flow import GradientFlow, build_vertical_initial
from axifb.freeboundary import FitModel, Side, blowup, extract, fit_asymptote, theorem_shape_checks
from axifb.mountainpass import build_path, minimax, pass_residual
from axifb.pipeline import STAGES, RunConfig, domain_from_config, parse_config, relax_anchors, run_pipeline
from axifb.potential import build_potential, delta_eps, e_eps, heteroclinic_build
from axifb.reporter import create_console_report, create_json_report
from axifb.utils import ensure_dir, normalize_path, setup_logging
from axifb.verifier import LemmaVerifier

EXIT_CONFIG = 2
EXIT_STAGE = 3
EXIT_ACCEPTANCE = 4

app = typer.Typer(
    name="axifb",
    help="axifb - Numerical workbench for axisymmetric one-phase free boundary problems",
    add_completion=False,
)

console = Console()


@app.callback()
def _root(
    verbose: bool = typer.Option(False, "--verbose", "-V", help="Log at DEBUG level"),
):
    setup_logging(verbose)


def show_welcome():
    """Show welcome message and basic usage instructions."""
    print_main_banner(console)

    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("Command", style="cyan")
    table.add_column("Description")
    table.add_column("Example", style="green")

    table.add_row("profile", "Build the heteroclinic profile", "axifb profile --eps 0.05")
    table.add_row("catenoid", "Sample a catenoid profile", "axifb catenoid --dim 4 --scale 1")
    table.add_row("relax", "Relax an anchor state by gradient flow", "axifb relax -c run.yaml --init omega")
    table.add_row("mpass", "Mountain-pass minimax between the anchors", "axifb mpass -c run.yaml -o mp")
    table.add_row("fbfit", "Fit the free-boundary asymptote", "axifb fbfit --in pass.bin")
    table.add_row("blowup", "Blow-up rescaling at the origin", "axifb blowup --in pass.bin")
    table.add_row("pipeline", "Run every stage end to end", "axifb pipeline -c run.yaml")
    table.add_row("verify", "Run the lemma verifier suite", "axifb verify")
    table.add_row("version", "Show version information", "axifb version")

    console.print(table)
    console.print("\n[bold]For command-specific help:[/bold]")
    console.print("  axifb [command] --help")


@contextmanager
def _exit_codes():
    """Map workbench errors onto the CLI exit codes."""
    try:
        yield
    except ConfigError as exc:
        console.print(f"[bold red]Config error:[/bold red] {escape(str(exc))}")
        raise typer.Exit(code=EXIT_CONFIG)
    except WorkbenchError as exc:
        console.print(f"[bold red]Error:[/bold red] {escape(str(exc))}")
        raise typer.Exit(code=EXIT_STAGE)


def _load_config(config: Optional[str]) -> RunConfig:
    if config is None:
        return RunConfig()
    path = normalize_path(config)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    return parse_config(path)


@app.command("version")
def version():
    """Show version information."""
    print_command_banner("version", console)
    console.print(f"[bold]axifb[/bold] version: [green]{__version__}[/green]")


@app.command("profile")
def profile(
    eps: float = typer.Option(0.1, "--eps", "-e", help="Regularization parameter in (0, 0.25]"),
    x_max: float = typer.Option(6.0, "--xmax", "--x-max", help="Half-width of the sample window"),
    samples: int = typer.Option(2001, "--samples", "-n", help="Number of tabulated samples"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Write the profile CSV here"),
):
    """Build H_eps and report its constants."""
    print_command_banner("profile", console)
    with _exit_codes():
        spec = build_potential(eps)
        prof = heteroclinic_build(spec, x_max=x_max, n_samples=samples)
        ee = e_eps(spec)
        rows = {
            "eps": eps,
            "t_eps": prof.t_eps,
            "delta_eps": delta_eps(spec, prof),
            "e_eps": ee,
            "4 - e_eps": 4.0 - ee,
        }
        create_console_report("Heteroclinic profile", {"Constants": rows}, console=console)
        if out:
            path = write_profile_csv(prof, out, {"e_eps": ee, "delta_eps": rows["delta_eps"]})
            console.print(f"[green]Profile written to {path}[/green]")


@app.command("catenoid")
def catenoid(
    dim: int = typer.Option(3, "--dim", "-d", help="Ambient dimension n >= 3"),
    scale: float = typer.Option(1.0, "--scale", "-s", help="Neck radius or limiting height"),
    convention: str = typer.Option("centered", "--convention", help="centered or asymptotic"),
    rmax: float = typer.Option(10.0, "--rmax", "-r", help="Outer radius"),
    points: int = typer.Option(1000, "--points", "-p", help="Number of samples"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Write r,z,H CSV here"),
):
    """Sample a catenoid graph and its mean curvature."""
    print_command_banner("catenoid", console)
    with _exit_codes():
        try:
            conv = CatenoidConvention(convention)
        except ValueError:
            raise ConfigError(f"unknown convention '{convention}'", ["convention"])
        c = Catenoid(dim, scale, conv)
        if rmax <= c.neck:
            raise ConfigError(f"rmax must exceed the neck {c.neck:.6g}", ["rmax"])
        r = c.neck + (rmax - c.neck) * np.geomspace(1e-6, 1.0, points)
        curve = PlanarCurve.from_graph(catenoid_graph(c), r)
        h = mean_curvature(curve, dim)
        rows = {
            "neck": c.neck,
            "height_limit": c.height_limit,
            f"z({rmax:g})": float(curve.z[-1]),
            "max |H|": float(np.max(np.abs(h))),
        }
        create_console_report("Catenoid", {"Profile": rows}, console=console)
        if out:
            path = write_curve_csv(curve.r, curve.z, out, h)
            console.print(f"[green]Curve written to {path}[/green]")


@app.command("relax")
def relax(
    config: Optional[str] = typer.Option(None, "--config", "-c", help="Run configuration (YAML or JSON)"),
    init: str = typer.Option("omega", "--init", help="omega, vertical (U_2 built on --from) or file (--from)"),
    source: Optional[str] = typer.Option(None, "--from", "-f", help="Field dump used by --init vertical/file"),
    out_dir: str = typer.Option("relax", "--out", "-o", help="Output directory"),
    snapshots: bool = typer.Option(False, "--snapshots", help="Dump the field at every energy checkpoint"),
    check_energy: bool = typer.Option(False, "--check-energy", help="Fail on any per-step energy increase"),
):
    """Relax an initial state to a steady state of the gradient flow."""
    print_command_banner("relax", console)
    with _exit_codes():
        cfg = _load_config(config)
        if check_energy:
            cfg = replace(cfg, check_step_energy=True)
        grid, u0 = domain_from_config(cfg)
        if init in ("vertical", "file"):
            if source is None:
                raise ConfigError(f"--init {init} needs --from", ["from"])
            loaded = load_field(source, grid)
            u0 = build_vertical_initial(loaded, grid.profile) if init == "vertical" else loaded
        elif init != "omega":
            raise ConfigError(f"unknown initial state '{init}'", ["init"])
        out = ensure_dir(out_dir)
        flow = GradientFlow(grid, cfg.flow_config())

        def snapshot(step, u, residual):
            write_field(u, out / f"snapshot_{step:09d}.bin")

        with console.status(f"Relaxing from {init} (dt={flow.dt:.3g})..."):
            u, report = flow.relax(u0, snapshot if snapshots else None)
        path = write_field(u, out / "relaxed.bin")
        create_console_report(
            f"Relaxation from {init}",
            {"Flow": {
                "steps": report.steps,
                "dt": report.dt,
                "energy": report.energies[-1],
                "residual": report.residuals[-1],
                "steady": report.steady,
            }},
            console=console,
        )
        create_json_report({"grid": grid.describe(), "flow": report.to_dict()}, out / "report.json",
                           summary={"energy": report.energies[-1], "steady": report.steady})
        console.print(f"[green]Field written to {path}[/green]")


@app.command("mpass")
def mpass(
    config: Optional[str] = typer.Option(None, "--config", "-c", help="Run configuration (YAML or JSON)"),
    u1_path: Optional[str] = typer.Option(None, "--u1", help="Relaxed u1 dump (default: relax from the config)"),
    u2_path: Optional[str] = typer.Option(None, "--u2", help="Relaxed u2 dump (default: relax from u1)"),
    out_dir: str = typer.Option("mpass", "--out", "-o", help="Output directory"),
):
    """Mountain-pass minimax over monotone paths between u1 and u2."""
    print_command_banner("mpass", console)
    with _exit_codes():
        cfg = _load_config(config)
        u1 = load_field(u1_path) if u1_path else None
        u2 = load_field(u2_path, u1.grid if u1 is not None else None) if u2_path else None
        if u1 is None and u2 is not None:
            raise ConfigError("--u2 needs --u1", ["u1"])
        if u1 is None or u2 is None:
            with console.status("Relaxing the anchor states..."):
                u1, u2 = relax_anchors(cfg, u1, u2)
        path = build_path(u1, u2, cfg.members - 1)
        with console.status("Running minimax rounds..."):
            result = minimax(path, cfg.flow_config(), cfg.rounds, cfg.refine, cfg.block_time, cfg.workers)
        out = ensure_dir(out_dir)
        write_field(result.pass_state, out / "pass.bin")
        summary = {
            "c_star": result.c_star,
            "argmax_s": result.argmax_s,
            "energy_u1": result.energy_u1,
            "energy_u2": result.energy_u2,
            "bracket_gap": result.bracket_gap,
            "pass_residual": pass_residual(result),
            "rounds": len(result.history),
        }
        create_console_report("Mountain pass", {"Minimax": summary}, console=console)
        create_json_report({"rounds": [h.to_dict() for h in result.history]}, out / "mpass.json", summary)
        console.print(f"[green]Pass state written to {out / 'pass.bin'}[/green]")


@app.command("fbfit")
def fbfit(
    field_path: str = typer.Option(..., "--in", "-i", help="Field dump"),
    side: str = typer.Option("minus", "--side", "-s", help="minus or plus"),
    model: Optional[str] = typer.Option(None, "--model", "-m", help="log or power (default by dimension)"),
    fit_lo: float = typer.Option(0.3, "--fit-lo", help="Window start as a fraction of a"),
    fit_hi: float = typer.Option(0.8, "--fit-hi", help="Window end as a fraction of a"),
    theta: Optional[float] = typer.Option(None, "--theta", help="Extraction offset (default eps/2)"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Save the fit as JSON"),
    curve_out: Optional[str] = typer.Option(None, "--curve", help="Save the extracted curve as CSV"),
):
    """Extract a free boundary and fit its asymptote."""
    print_command_banner("fbfit", console)
    with _exit_codes():
        try:
            which = Side(side)
            fit_model = FitModel(model) if model is not None else None
        except ValueError:
            raise ConfigError("invalid side or model", ["side", "model"])
        u = load_field(field_path)
        curve = extract(u, which, theta)
        window = (fit_lo * u.grid.a, fit_hi * u.grid.a)
        fit = fit_asymptote(curve, u.grid.dim, window, fit_model)
        rows = {f"{k}": v for k, v in fit.params.items()}
        rows.update({"rms": fit.rms, "samples": fit.n_samples})
        create_console_report(f"Asymptotic fit ({which})", {str(fit.model): rows}, console=console)
        if out:
            create_json_report({"fit": fit.to_dict(), "grid": u.grid.describe()}, out, summary=fit.params)
        if curve_out:
            write_curve_csv(curve.r, curve.z, curve_out)


@app.command("blowup")
def blowup_cmd(
    field_path: str = typer.Option(..., "--in", "-i", help="Field dump"),
    scale: float = typer.Option(4.0, "--scale", "-s", help="Window size in units of rho"),
    out_dir: Optional[str] = typer.Option(None, "--out", "-o", help="Directory for psi and stats"),
):
    """Rescale around the origin by the distance of F- and check the one-phase shape."""
    print_command_banner("blowup", console)
    with _exit_codes():
        u = load_field(field_path)
        result = blowup(u, scale)
        shape = theorem_shape_checks(result, u.grid.dim)
        create_console_report("Blow-up", {"Rescaling": result.stats(), "Shape": shape}, console=console)
        if out_dir:
            out = ensure_dir(out_dir)
            np.savez(out / "blowup.npz", x_r=result.x_r, x_z=result.x_z, psi=result.psi,
                     boundary_r=result.boundary_r, boundary_z=result.boundary_z)
            create_json_report({"shape": shape}, out / "blowup.json", summary=result.stats())
            console.print(f"[green]Blow-up written to {out}[/green]")


@app.command("pipeline")
def pipeline(
    config: Optional[str] = typer.Option(None, "--config", "-c", help="Run configuration (YAML or JSON)"),
    out_dir: Optional[str] = typer.Option(None, "--out", "-o", help="Override output_dir"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Override workers"),
):
    """Run the whole construction and record every check."""
    print_command_banner("pipeline", console)
    with _exit_codes():
        cfg = _load_config(config)
        if out_dir is not None:
            cfg.output_dir = out_dir
        if workers is not None:
            cfg.workers = workers
        progress = Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(bar_width=40),
            TimeElapsedColumn(),
            console=console,
        )
        with progress:
            task = progress.add_task("pipeline", total=len(STAGES))
            started = []

            def on_stage(name: str):
                if started:
                    progress.advance(task)
                started.append(name)
                progress.update(task, description=f"stage: {name}")

            report = run_pipeline(cfg, on_stage)
            progress.update(task, completed=len(STAGES))
        create_console_report(
            "Pipeline",
            {"Summary": report.summary(), "Wall clock (s)": report.wall_clock},
            checks=[c.row() for c in report.checks],
            console=console,
        )
        console.print(f"[green]Report written to {report.artifacts['report']}[/green]")
    if not report.passed:
        raise typer.Exit(code=EXIT_ACCEPTANCE)


@app.command("verify")
def verify(
    skip_bounds: bool = typer.Option(False, "--skip-bounds", help="Skip the competitor-search bounds"),
    workers: int = typer.Option(1, "--workers", "-w", help="Threads for competitor restarts"),
    seed: int = typer.Option(0, "--seed", help="Seed for random competitors"),
    json_output: Optional[str] = typer.Option(None, "--json", "-j", help="Save results to JSON file"),
):
    """Run the lemma verifier suite."""
    print_command_banner("verify", console)
    with _exit_codes():
        verifier = LemmaVerifier(workers=workers, progress=not skip_bounds, seed=seed)
        results = verifier.run(
            include_bounds=not skip_bounds,
            on_check=lambda name: console.print(f"[cyan]Checking {name}...[/cyan]"),
        )
        create_console_report("Lemma verifier", {}, checks=[r.row() for r in results], console=console)
        if json_output:
            create_json_report(
                {"checks": [r.to_dict() for r in results]},
                json_output,
                summary={"failed": sum(r.failed for r in results), "total": len(results)},
            )
    if any(r.failed for r in results):
        raise typer.Exit(code=EXIT_ACCEPTANCE)


def main():
    """Command entrypoint."""
    try:
        if len(sys.argv) == 1:
            show_welcome()
            return
        app()
    except Exception as e:
        console.print(f"[bold red]Error:[/bold red] {str(e)}")
        sys.exit(1)


if __name__ == "__main__":
    main()
