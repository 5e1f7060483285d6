"""Command-line entry point.

Subcommands: solve-pinn, solve-fem, compare, ode-bench, sample-points.
Every run writes CSV outputs plus a manifest copy of the resolved
configuration into the output directory.  Exit codes: 0 success, 1 usage or
configuration problem, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config, write_manifest
from .domain import DomainError, refine_near_interface, sample_collocation
from .estimators import FemSolver, PinnSolver
from .fem import SolverError
from .fields import FieldGrid, compare
from .network import save_params
from .ode import run_sweep
from .optimizer import TERMS, TrainingError

USAGE_EXIT, NUMERICAL_EXIT = 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def build_parser():
    parser = _Parser(prog="mixedpinn",
                     description="Mesh-free mixed-formulation solver for 2-D "
                                 "heterogeneous solids with an FEM reference.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add_run_command(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="run configuration (INI)")
        p.add_argument("--seed", type=int, help="override [run] seed")
        p.add_argument("--epochs", type=int, help="override [optimizer] epochs")
        p.add_argument("--variant", help="override [problem] variant")
        p.add_argument("--out-dir", default=".", help="output directory")
        return p

    add_run_command("solve-pinn", "train the collocation solver")
    add_run_command("solve-fem", "run the finite-element reference")
    add_run_command("ode-bench", "derivative-order benchmark sweep")
    add_run_command("sample-points", "write the collocation point set")

    p = sub.add_parser("compare", help="relative differences of two field CSVs")
    p.add_argument("field_csv_a")
    p.add_argument("field_csv_b", help="reference grid")
    p.add_argument("--out-dir", default=".", help="output directory")
    return parser


def _load(args) -> RunConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.epochs is not None:
        cfg.epochs = args.epochs
    if args.variant is not None:
        cfg.variant = args.variant.upper()
    return cfg


def _outdir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve_pinn(args):
    cfg = _load(args)
    if cfg.problem == "ode":
        raise ConfigError("solve-pinn expects an elastic or thermal problem")
    out = _outdir(args)
    solver = PinnSolver(
        problem=cfg.problem, variant=cfg.variant,
        phase_map=cfg.phase_map_path, materials=cfg.material_table(),
        bcs=cfg.boundary_spec(), n_interior=cfg.n_interior,
        n_per_edge=cfg.n_per_edge, strategy=cfg.strategy,
        inclusion_density=cfg.inclusion_density,
        refine_extra=cfg.refine_extra, refine_radius=cfg.refine_radius,
        hidden_layers=cfg.hidden_layers, neurons=cfg.neurons,
        learning_rate=cfg.learning_rate, epochs=cfg.epochs,
        stopping=cfg.stopping, beta1=cfg.beta1, beta2=cfg.beta2,
        adam_eps=cfg.adam_eps, energy_form=cfg.energy_form, seed=cfg.seed)
    t0 = time.perf_counter()
    solver.fit()
    elapsed = time.perf_counter() - t0
    grid = solver.evaluate_grid(cfg.grid_nx, cfg.grid_ny)
    grid.write_csv(out / "fields_pinn.csv")
    solver.record_.to_csv(out / "history.csv")
    save_params(solver.heads_.nets, out / "params.txt")
    write_manifest(cfg, out / "manifest.ini")
    breakdown = solver.loss_breakdown_
    print(f"trained {solver.record_.n_epochs} epochs in {elapsed:.1f} s "
          f"(variant {cfg.variant}, {cfg.problem})")
    print("  ".join(f"L_{t}={breakdown[t]:.3e}" for t in TERMS)
          + f"  L_total={breakdown['total']:.3e}")
    if not np.isfinite(breakdown["total"]) or solver.record_.aborted:
        raise TrainingError("training aborted on non-finite loss")
    print(f"wrote {out / 'fields_pinn.csv'}")
    return 0


def cmd_solve_fem(args):
    cfg = _load(args)
    if cfg.problem == "ode":
        raise ConfigError("solve-fem expects an elastic or thermal problem")
    out = _outdir(args)
    solver = FemSolver(problem=cfg.problem, phase_map=cfg.phase_map_path,
                       materials=cfg.material_table(), bcs=cfg.boundary_spec())
    solver.fit()
    grid = solver.evaluate_grid(cfg.grid_nx, cfg.grid_ny)
    grid.provenance = "fem"
    grid.write_csv(out / "fields_fem.csv")
    write_manifest(cfg, out / "manifest.ini")
    print(f"solved {solver.system_.n_dofs} dofs "
          f"({cfg.problem}, {solver.pmap_.n_x}x{solver.pmap_.n_y} cells)")
    print(f"wrote {out / 'fields_fem.csv'}")
    return 0


def cmd_compare(args):
    a = FieldGrid.read_csv(args.field_csv_a)
    b = FieldGrid.read_csv(args.field_csv_b)
    report = compare(a, b)
    out = _outdir(args)
    report.write_csv(out / "diff_report.csv")
    for line in report.summary_lines():
        print(line)
    return 0


def cmd_ode_bench(args):
    cfg = _load(args)
    out = _outdir(args)
    epochs = cfg.ode_epochs if args.epochs is None else args.epochs
    seeds = cfg.ode_seeds
    if args.seed is not None:
        seeds = tuple(args.seed + i for i in range(len(seeds)))
    result = run_sweep(cfg.ode_counts, epochs=epochs, seeds=seeds,
                       hidden_layers=cfg.ode_hidden_layers,
                       neurons=cfg.ode_neurons,
                       learning_rate=cfg.learning_rate)
    result.to_csv(out / "ode_sweep.csv")
    write_manifest(cfg, out / "manifest.ini")
    for count, order, mean, std in result.aggregates:
        print(f"count={count:4d} order={order}  "
              f"MAE {mean:.4e} +/- {std:.2e}")
    print(f"wrote {out / 'ode_sweep.csv'}")
    return 0


def cmd_sample_points(args):
    cfg = _load(args)
    out = _outdir(args)
    pmap = cfg.load_map()
    table = cfg.material_table()
    colloc = sample_collocation(pmap, table, cfg.n_interior, cfg.n_per_edge,
                                seed=cfg.seed, strategy=cfg.strategy,
                                inclusion_density=cfg.inclusion_density)
    if cfg.refine_extra:
        colloc = refine_near_interface(colloc, cfg.refine_extra,
                                       cfg.refine_radius, seed=cfg.seed)
    with open(out / "collocation.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "region"])
        for x, y in colloc.interior:
            writer.writerow([f"{x:.17g}", f"{y:.17g}", "interior"])
        for edge, pts in colloc.boundary.items():
            for x, y in pts:
                writer.writerow([f"{x:.17g}", f"{y:.17g}", edge])
    write_manifest(cfg, out / "manifest.ini")
    print(f"sampled {colloc.n_interior} interior + {colloc.n_boundary} "
          f"boundary points")
    print(f"wrote {out / 'collocation.csv'}")
    return 0


COMMANDS = {
    "solve-pinn": cmd_solve_pinn,
    "solve-fem": cmd_solve_fem,
    "compare": cmd_compare,
    "ode-bench": cmd_ode_bench,
    "sample-points": cmd_sample_points,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code if exit_.code is not None else USAGE_EXIT
    if args.command is None:
        parser.print_usage(sys.stderr)
        return USAGE_EXIT
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError, FileNotFoundError) as err:
        print(f"mixedpinn: {err}", file=sys.stderr)
        return USAGE_EXIT
    except (SolverError, TrainingError, FloatingPointError) as err:
        print(f"mixedpinn: numerical failure: {err}", file=sys.stderr)
        return NUMERICAL_EXIT


if __name__ == "__main__":
    sys.exit(main())
