"""Estimator front ends: fit a boundary value problem, predict fields.

Both solvers follow the scikit-learn convention: constructor arguments are
stored verbatim (so ``get_params``/``set_params``/``clone`` work), all
validation and heavy lifting happens in ``fit``, and fitted state lives in
trailing-underscore attributes.  ``predict(X)`` returns the canonical field
columns at arbitrary points of the domain.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import autodiff as ad
from . import fem
from .domain import eval_grid, refine_near_interface, sample_collocation
from .elastic import build_elastic_loss
from .fields import CANONICAL_FIELDS, evaluate_pinn
from .network import assemble_variant
from .optimizer import train
from .thermal import build_thermal_loss
from .validation import (as_boundary_spec, as_material_table, as_phase_map,
                         check_points)


class PinnSolver(BaseEstimator):
    """Mesh-free solver: trains networks to minimize the physics loss.

    Parameters mirror the run configuration; see the package README for the
    meaning of the model variants.  ``fit(X)`` optionally takes explicit
    interior collocation points, otherwise ``n_interior`` points are sampled.
    """

    def __init__(self, problem="thermal", variant="E", phase_map=None,
                 materials=None, bcs=None, n_interior=1000, n_per_edge=100,
                 strategy="uniform-random", inclusion_density=2.0,
                 refine_extra=0, refine_radius=0.05, hidden_layers=5,
                 neurons=40, learning_rate=1e-3, epochs=10_000,
                 stopping=1e-12, beta1=0.9, beta2=0.999, adam_eps=1e-8,
                 energy_form="literal", seed=0):
        self.problem = problem
        self.variant = variant
        self.phase_map = phase_map
        self.materials = materials
        self.bcs = bcs
        self.n_interior = n_interior
        self.n_per_edge = n_per_edge
        self.strategy = strategy
        self.inclusion_density = inclusion_density
        self.refine_extra = refine_extra
        self.refine_radius = refine_radius
        self.hidden_layers = hidden_layers
        self.neurons = neurons
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.stopping = stopping
        self.beta1 = beta1
        self.beta2 = beta2
        self.adam_eps = adam_eps
        self.energy_form = energy_form
        self.seed = seed

    # ------------------------------------------------------------------
    def fit(self, X=None, y=None):
        """Sample collocation points (or take them from X) and train."""
        pmap = as_phase_map(self.phase_map)
        table = as_material_table(self.materials)
        bcs = as_boundary_spec(self.bcs, self.problem)
        colloc = sample_collocation(
            pmap, table, self.n_interior, self.n_per_edge, seed=self.seed,
            strategy=self.strategy, inclusion_density=self.inclusion_density)
        if X is not None:
            from .domain import CollocationSet, materials_at
            pts = check_points(X, pmap)
            colloc = CollocationSet(
                pmap, table, pts, colloc.boundary,
                materials_at(pmap, table, pts), colloc.boundary_materials,
                seed=self.seed, strategy="explicit")
        if self.refine_extra:
            colloc = refine_near_interface(colloc, self.refine_extra,
                                           self.refine_radius, seed=self.seed)

        heads = assemble_variant(self.variant, self.problem,
                                 self.hidden_layers, self.neurons, self.seed)
        tape = ad.Tape()
        bound = heads.bind(tape)
        build = (build_elastic_loss if self.problem == "elastic"
                 else build_thermal_loss)
        loss = build(tape, bound, colloc, bcs, self.energy_form)
        _, record = train(loss, self.epochs, self.learning_rate,
                          self.beta1, self.beta2, self.adam_eps,
                          self.stopping, seed=self.seed)
        if record.n_epochs:
            tape.forward()

        self.pmap_ = pmap
        self.table_ = table
        self.bcs_ = bcs
        self.collocation_ = colloc
        self.heads_ = bound.pull_values()
        self.record_ = record
        self.loss_breakdown_ = loss.component_values()
        self.field_names_ = list(CANONICAL_FIELDS[self.problem])
        return self

    def evaluate(self, X, dims=None):
        """FieldGrid (canonical + diagnostic columns) at points ``X``."""
        self._check_fitted()
        pts = check_points(X, self.pmap_)
        return evaluate_pinn(self.heads_, pts, self.pmap_, self.table_,
                             dims=dims)

    def evaluate_grid(self, nx, ny):
        return self.evaluate(eval_grid(self.pmap_, nx, ny), dims=(nx, ny))

    def predict(self, X):
        """Canonical field values at points ``X``, columns as field_names_."""
        grid = self.evaluate(X)
        return np.column_stack([grid.fields[n] for n in self.field_names_])

    def _check_fitted(self):
        if not hasattr(self, "heads_"):
            raise RuntimeError("this solver is not fitted yet; call fit() first")


class FemSolver(BaseEstimator):
    """Q1 finite-element reference on the same pixel geometry."""

    def __init__(self, problem="thermal", phase_map=None, materials=None,
                 bcs=None):
        self.problem = problem
        self.phase_map = phase_map
        self.materials = materials
        self.bcs = bcs

    def fit(self, X=None, y=None):
        pmap = as_phase_map(self.phase_map)
        table = as_material_table(self.materials)
        table.check_covers(pmap)
        bcs = as_boundary_spec(self.bcs, self.problem)
        mesh = fem.build_mesh(pmap)
        system = fem.assemble(mesh, self.problem, table, bcs)
        u = fem.solve(system)
        self.pmap_ = pmap
        self.table_ = table
        self.bcs_ = bcs
        self.mesh_ = mesh
        self.system_ = system
        self.nodal_values_ = u
        self.grid_ = fem.recover_fields(mesh, u, self.problem, table)
        self.field_names_ = list(CANONICAL_FIELDS[self.problem])
        return self

    def evaluate(self, X, dims=None):
        """FieldGrid at points ``X`` (bilinear interpolation of nodal fields)."""
        self._check_fitted()
        pts = check_points(X, self.pmap_)
        grid = fem.interpolate_grid(self.grid_, pts)
        grid.dims = dims
        return grid

    def evaluate_grid(self, nx, ny):
        return self.evaluate(eval_grid(self.pmap_, nx, ny), dims=(nx, ny))

    def predict(self, X):
        grid = self.evaluate(X)
        return np.column_stack([grid.fields[n] for n in self.field_names_])

    def _check_fitted(self):
        if not hasattr(self, "grid_"):
            raise RuntimeError("this solver is not fitted yet; call fit() first")
