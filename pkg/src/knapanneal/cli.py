"""Command-line front end for reproducible experiments.

Every run is fully determined by its flags plus the instance files it reads;
commands that produce data write a JSON manifest next to their outputs that
is sufficient to re-run bit-identically. Exit codes: 0 success, 2 validation
error, 3 size-guard violation, 4 numerical failure.
"""

from __future__ import annotations

import functools
import os
import sys
import time
from pathlib import Path

import click

from . import adiabatic, analysis, knapsack, qubo, samplers
from .errors import NumericalError, SizeLimitError, ValidationError
from .rng import child_seed

OUTDIR_ENV = "KNAPANNEAL_OUTDIR"

EXIT_VALIDATION = 2
EXIT_SIZE_GUARD = 3
EXIT_NUMERICAL = 4


def _guarded(fn):
    """Map package exceptions onto the documented exit codes."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
        except SizeLimitError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_SIZE_GUARD)
        except NumericalError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)
    return wrapper


def _outdir(value: str | None) -> Path:
    path = Path(value or os.environ.get(OUTDIR_ENV, "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _resolve_penalties(instance, a: int | None, b: int, regime: int | None):
    if a is not None:
        return qubo.PenaltyConstants(A=a, B=b)
    return qubo.penalty_regimes(instance, b)[(regime or 2) - 1]


def _schedule(sweeps: int, beta0: float, beta1: float, interp: str):
    return samplers.AnnealSchedule(sweeps=sweeps, beta_initial=beta0,
                                   beta_final=beta1, interpolation=interp)


_penalty_options = [
    click.option("--A", "pen_a", type=int, default=None,
                 help="Constraint weight A (overrides --regime)."),
    click.option("--B", "pen_b", type=int, default=1, show_default=True,
                 help="Value weight B."),
    click.option("--regime", type=click.IntRange(1, 3), default=None,
                 help="Pick A as regime 1..3: B*max(v)+2, 2*B*max(v), 100*B*max(v) "
                      "[default: 2]."),
]

_schedule_options = [
    click.option("--sweeps", type=int, default=samplers.DEFAULT_SWEEPS,
                 show_default=True),
    click.option("--beta0", type=float, default=samplers.DEFAULT_BETA_INITIAL,
                 show_default=True, help="Initial inverse temperature."),
    click.option("--beta1", type=float, default=samplers.DEFAULT_BETA_FINAL,
                 show_default=True, help="Final inverse temperature."),
    click.option("--interp", type=click.Choice(["linear", "geometric"]),
                 default="geometric", show_default=True),
]


def _add_options(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return deco


@click.group()
def main():
    """Knapsack-to-QUBO optimization toolkit."""


@main.command()
@click.option("--n", "n_items", type=int, required=True, help="Number of items.")
@click.option("--wmin", type=int, default=knapsack.DEFAULT_WEIGHT_RANGE[0],
              show_default=True)
@click.option("--wmax", type=int, default=knapsack.DEFAULT_WEIGHT_RANGE[1],
              show_default=True)
@click.option("--vmin", type=int, default=knapsack.DEFAULT_VALUE_RANGE[0],
              show_default=True)
@click.option("--vmax", type=int, default=knapsack.DEFAULT_VALUE_RANGE[1],
              show_default=True)
@click.option("--cap", default="auto", show_default=True,
              help="Capacity W, or 'auto' for the largest W with N+W <= 64.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--id", "ident", default=None, help="Instance id token.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output file [default: <outdir>/<id>.knap].")
@click.option("--outdir", type=click.Path(file_okay=False), default=None,
              help=f"Output directory [env: {OUTDIR_ENV}].")
@_guarded
def gen(n_items, wmin, wmax, vmin, vmax, cap, seed, ident, out, outdir):
    """Generate a random instance and write its canonical file."""
    rule = cap if cap == "auto" else int(cap)
    params = knapsack.GeneratorParams(n_items=n_items, weight_range=(wmin, wmax),
                                      value_range=(vmin, vmax), capacity_rule=rule,
                                      seed=seed)
    instance = knapsack.generate_random(params)
    if ident:
        instance = knapsack.KnapsackInstance(id=ident, weights=instance.weights,
                                             values=instance.values,
                                             capacity=instance.capacity)
    path = Path(out) if out else _outdir(outdir) / f"{instance.id}.knap"
    knapsack.save_instance(instance, path)
    click.echo(str(path))


@main.command()
@click.option("--instance", "instance_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--method", type=click.Choice(["dp", "bb", "brute"]), default="dp",
              show_default=True)
@_guarded
def solve(instance_path, method):
    """Solve an instance exactly and print the answer."""
    instance = knapsack.load_instance(instance_path)
    solver = {"dp": knapsack.solve_dp, "bb": knapsack.solve_branch_bound,
              "brute": knapsack.brute_force_knapsack}[method]
    start = time.perf_counter()
    sol = solver(instance)
    elapsed = time.perf_counter() - start
    click.echo(f"instance {instance.id} method {method}")
    click.echo(f"value {sol.total_value}")
    click.echo(f"weight {sol.total_weight}")
    click.echo(f"selection {''.join(str(x) for x in sol.selection)}")
    click.echo(f"wall_time_s {elapsed:.6f}")


@main.command()
@click.option("--instance", "instance_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@_add_options(_penalty_options)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output file [default: <outdir>/<id>.qubo].")
@click.option("--outdir", type=click.Path(file_okay=False), default=None)
@_guarded
def encode(instance_path, pen_a, pen_b, regime, out, outdir):
    """Encode an instance as a QUBO and write the text export."""
    instance = knapsack.load_instance(instance_path)
    pen = _resolve_penalties(instance, pen_a, pen_b, regime)
    problem = qubo.encode(instance, pen)
    path = Path(out) if out else _outdir(outdir) / f"{instance.id}.qubo"
    qubo.save_qubo(problem, path)
    click.echo(str(path))


@main.command()
@click.option("--instance", "instance_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@_add_options(_penalty_options)
@_add_options(_schedule_options)
@click.option("--reads", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--record", type=click.Choice(["final", "best"]), default="final",
              show_default=True)
@click.option("--outdir", type=click.Path(file_okay=False), default=None)
@_guarded
def sa(instance_path, pen_a, pen_b, regime, sweeps, beta0, beta1, interp, reads,
       seed, record, outdir):
    """Run simulated annealing and export the sample set."""
    instance = knapsack.load_instance(instance_path)
    pen = _resolve_penalties(instance, pen_a, pen_b, regime)
    problem = qubo.encode(instance, pen)
    schedule = _schedule(sweeps, beta0, beta1, interp)
    samples = samplers.simulated_anneal(problem, schedule, reads, seed, record)
    outdir_path = _outdir(outdir)
    sample_path = outdir_path / f"{instance.id}-sa.samples"
    samplers.save_sampleset(samples, sample_path)
    analysis.write_manifest(
        outdir_path / f"{instance.id}-sa.manifest.json",
        command="sa", seed=seed,
        parameters={"instance": instance.id, "A": pen.A, "B": pen.B,
                    "sweeps": sweeps, "beta0": beta0, "beta1": beta1,
                    "interp": interp, "reads": reads, "record": record},
        outputs=[sample_path.name],
    )
    best = samples.best
    click.echo(f"best_energy {best.energy}")
    click.echo(f"best_state {''.join(str(b) for b in best.z)}")
    click.echo(str(sample_path))


@main.command()
@click.option("--instance", "instance_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@_add_options(_penalty_options)
@click.option("--grid", type=int, default=101, show_default=True,
              help="Number of schedule points.")
@click.option("--outdir", type=click.Path(file_okay=False), default=None)
@_guarded
def gap(instance_path, pen_a, pen_b, regime, grid, outdir):
    """Scan the spectral gap over the anneal schedule."""
    instance = knapsack.load_instance(instance_path)
    pen = _resolve_penalties(instance, pen_a, pen_b, regime)
    problem = adiabatic.AnnealProblem.from_qubo(qubo.encode(instance, pen))
    profile = adiabatic.gap_scan(problem, grid)
    outdir_path = _outdir(outdir)
    csv_path = outdir_path / f"{instance.id}-gap.csv"
    adiabatic.write_gap_csv(profile, csv_path)
    analysis.write_manifest(
        outdir_path / f"{instance.id}-gap.manifest.json",
        command="gap", seed=0,
        parameters={"instance": instance.id, "A": pen.A, "B": pen.B, "grid": grid},
        outputs=[csv_path.name],
    )
    click.echo(f"min_gap {profile.min_gap!r} at s {profile.argmin!r}")
    click.echo(str(csv_path))


@main.command()
@click.option("--instance", "instance_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@_add_options(_penalty_options)
@click.option("--T", "anneal_times", type=float, multiple=True, required=True,
              help="Anneal time; repeat for a curve.")
@click.option("--dt", type=float, default=None,
              help="Integration step [default: stability-based suggestion].")
@click.option("--outdir", type=click.Path(file_okay=False), default=None)
@_guarded
def evolve(instance_path, pen_a, pen_b, regime, anneal_times, dt, outdir):
    """Integrate the annealing dynamics and report success probabilities."""
    instance = knapsack.load_instance(instance_path)
    pen = _resolve_penalties(instance, pen_a, pen_b, regime)
    problem = adiabatic.AnnealProblem.from_qubo(qubo.encode(instance, pen))
    if dt is not None:
        worst = max(anneal_times)
        suggested = adiabatic.suggest_dt(problem, worst)
        if dt > 2 * suggested:
            click.echo(
                f"warning: dt={dt} is large for this penalty scale; "
                f"suggest dt <= {suggested:.3g}", err=True)
    curve = adiabatic.success_curve(problem, list(anneal_times), dt)
    outdir_path = _outdir(outdir)
    csv_path = outdir_path / f"{instance.id}-evolve.csv"
    adiabatic.write_success_csv(curve, csv_path)
    analysis.write_manifest(
        outdir_path / f"{instance.id}-evolve.manifest.json",
        command="evolve", seed=0,
        parameters={"instance": instance.id, "A": pen.A, "B": pen.B,
                    "T": list(anneal_times), "dt": dt},
        outputs=[csv_path.name],
    )
    for res in curve:
        click.echo(f"T {res.anneal_time!r} success {res.success_probability!r} "
                   f"drift {res.norm_drift!r}")
    click.echo(str(csv_path))


@main.group()
def sweep():
    """Experiment sweeps producing CSV tables plus manifests."""


def _sweep_instances(instance_paths, catalog, seed):
    if catalog:
        return knapsack.catalog_instances(seed)
    if not instance_paths:
        raise ValidationError("provide --instance files or --catalog")
    return [knapsack.load_instance(p) for p in instance_paths]


_sweep_base = [
    click.option("--instance", "instance_paths", type=click.Path(exists=True, dir_okay=False),
                 multiple=True),
    click.option("--catalog", is_flag=True,
                 help="Use the four built-in benchmark shapes (seeded)."),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--trials", type=int, default=10, show_default=True),
    click.option("--outdir", type=click.Path(file_okay=False), default=None),
]

_reads_option = click.option("--reads", type=int, default=100, show_default=True)


@sweep.command("size")
@_add_options(_sweep_base)
@_reads_option
@_guarded
def sweep_size(instance_paths, catalog, seed, trials, outdir, reads):
    """Distance-vs-problem-size table (one row per instance)."""
    instances = _sweep_instances(instance_paths, catalog, seed)
    rows = analysis.size_sweep(instances, trials=trials, reads=reads, seed=seed)
    outdir_path = _outdir(outdir)
    csv_path = outdir_path / "size-sweep.csv"
    analysis.write_size_csv(rows, csv_path)
    analysis.write_manifest(
        outdir_path / "size-sweep.manifest.json",
        command="sweep size", seed=seed,
        parameters={"catalog": catalog,
                    "instances": [inst.id for inst in instances],
                    "trials": trials, "reads": reads},
        outputs=[csv_path.name],
    )
    click.echo(str(csv_path))


@sweep.command("penalty")
@_add_options(_sweep_base)
@_reads_option
@click.option("--B", "b_list", type=int, multiple=True, default=(1, 10, 100),
              show_default=True, help="Value weights to cross with the regimes.")
@_guarded
def sweep_penalty(instance_paths, catalog, seed, trials, outdir, reads, b_list):
    """Distances across penalty regimes and B magnitudes."""
    instances = _sweep_instances(instance_paths, catalog, seed)
    outdir_path = _outdir(outdir)
    paths = []
    for inst in instances:
        rows = analysis.penalty_sweep(inst, b_list, trials=trials, reads=reads,
                                      seed=child_seed(seed, inst.n_variables))
        csv_path = outdir_path / f"penalty-sweep-{inst.id}.csv"
        analysis.write_penalty_csv(rows, csv_path)
        paths.append(csv_path)
    analysis.write_manifest(
        outdir_path / "penalty-sweep.manifest.json",
        command="sweep penalty", seed=seed,
        parameters={"catalog": catalog,
                    "instances": [inst.id for inst in instances],
                    "B": list(b_list), "trials": trials, "reads": reads},
        outputs=[p.name for p in paths],
    )
    for p in paths:
        click.echo(str(p))


@sweep.command("reads")
@_add_options(_sweep_base)
@click.option("--counts", "reads_list", type=int, multiple=True,
              default=analysis.DEFAULT_READS_LIST, show_default=True,
              help="Read counts to sweep.")
@_guarded
def sweep_reads(instance_paths, catalog, seed, trials, outdir, reads_list):
    """Best-energy and hit-rate table across read counts."""
    instances = _sweep_instances(instance_paths, catalog, seed)
    outdir_path = _outdir(outdir)
    paths = []
    for inst in instances:
        rows = analysis.reads_sweep(inst, reads_list, trials=trials,
                                    seed=child_seed(seed, inst.n_variables))
        csv_path = outdir_path / f"reads-sweep-{inst.id}.csv"
        analysis.write_reads_csv(rows, csv_path)
        paths.append(csv_path)
    analysis.write_manifest(
        outdir_path / "reads-sweep.manifest.json",
        command="sweep reads", seed=seed,
        parameters={"catalog": catalog,
                    "instances": [inst.id for inst in instances],
                    "counts": list(reads_list), "trials": trials},
        outputs=[p.name for p in paths],
    )
    for p in paths:
        click.echo(str(p))


if __name__ == "__main__":
    main()
