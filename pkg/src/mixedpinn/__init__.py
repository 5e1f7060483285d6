"""Mesh-free mixed-formulation solver for 2-D heterogeneous solids.

Displacement/stress and temperature/flux fields are found by training small
networks against a physics loss (energy form on the primary variables,
strong form on the gradient-variable heads, plus a connection term), and
verified against a built-in Q1 finite-element reference on the same pixel
geometry.
"""

from .autodiff import Dual2, Tape, dual_tanh, tape_gradient
from .domain import (BoundarySpec, CollocationSet, Material, MaterialTable,
                     PhaseMap, eval_grid, load_phase_map, material_at_point,
                     refine_near_interface, sample_collocation)
from .estimators import FemSolver, PinnSolver
from .fields import DiffReport, FieldGrid, compare, evaluate_pinn
from .network import (Mlp, SolverHeads, VARIANTS, assemble_variant, forward,
                      init_params)
from .ode import OdeProblem, ode_loss, run_sweep
from .optimizer import (AdamState, TrainRecord, adam_init, adam_step,
                        repeat_runs, train)

__version__ = "0.1.0"

__all__ = [
    "AdamState", "BoundarySpec", "CollocationSet", "DiffReport", "Dual2",
    "FemSolver", "FieldGrid", "Material", "MaterialTable", "Mlp",
    "OdeProblem", "PhaseMap", "PinnSolver", "SolverHeads", "Tape",
    "TrainRecord", "VARIANTS", "adam_init", "adam_step", "assemble_variant",
    "compare", "dual_tanh", "eval_grid", "evaluate_pinn", "forward",
    "init_params", "load_phase_map", "material_at_point", "ode_loss",
    "refine_near_interface", "repeat_runs", "run_sweep", "sample_collocation",
    "tape_gradient", "train",
]
