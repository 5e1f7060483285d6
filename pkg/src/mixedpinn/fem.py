"""Q1 finite-element reference solver on the pixel grid.

One bilinear quadrilateral element per phase-map cell, so the PINN and the
reference discretize the identical geometry.  Plane-strain elasticity uses
the engineering-shear B matrix with the same constitutive entries as the
collocation pipeline; diffusion uses k (grad N)^T (grad N).  All element
integrals use 2x2 Gauss quadrature, which is exact for these integrands on
rectangles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .domain import EDGES, DomainError
from .elastic import plane_strain_coeffs
from .fields import FieldGrid

GAUSS = 1.0 / np.sqrt(3.0)
# corner order: bottom-left, bottom-right, top-right, top-left (CCW)
CORNERS = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
GAUSS_POINTS = GAUSS * CORNERS


class SolverError(Exception):
    pass


def shape_functions(xi, eta):
    return 0.25 * np.array([(1 - xi) * (1 - eta), (1 + xi) * (1 - eta),
                            (1 + xi) * (1 + eta), (1 - xi) * (1 + eta)])


def shape_gradients(xi, eta):
    """d N / d (xi, eta), shape (4, 2)."""
    return 0.25 * np.array([
        [-(1 - eta), -(1 - xi)],
        [(1 - eta), -(1 + xi)],
        [(1 + eta), (1 + xi)],
        [-(1 + eta), (1 - xi)],
    ])


@dataclass
class FemMesh:
    """Nodal lattice over the pixel grid; one element per cell."""

    pmap: object

    @property
    def nodes_x(self):
        return self.pmap.n_x + 1

    @property
    def nodes_y(self):
        return self.pmap.n_y + 1

    @property
    def n_nodes(self):
        return self.nodes_x * self.nodes_y

    @property
    def n_elements(self):
        return self.pmap.n_x * self.pmap.n_y

    def node_coords(self):
        xs = np.linspace(0.0, self.pmap.length_x, self.nodes_x)
        ys = np.linspace(0.0, self.pmap.length_y, self.nodes_y)
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def element_nodes(self):
        """(n_el, 4) connectivity, counterclockwise from the bottom-left."""
        nx = self.nodes_x
        conn = np.empty((self.n_elements, 4), dtype=int)
        e = 0
        for j in range(self.pmap.n_y):
            for i in range(self.pmap.n_x):
                n0 = j * nx + i
                conn[e] = (n0, n0 + 1, n0 + nx + 1, n0 + nx)
                e += 1
        return conn

    def element_phases(self):
        return self.pmap.ids.ravel()

    def edge_nodes(self, edge):
        nx, ny = self.nodes_x, self.nodes_y
        if edge == "left":
            return np.arange(ny) * nx
        if edge == "right":
            return np.arange(ny) * nx + (nx - 1)
        if edge == "bottom":
            return np.arange(nx)
        if edge == "top":
            return (ny - 1) * nx + np.arange(nx)
        raise DomainError(f"unknown edge {edge!r}")


def build_mesh(pmap):
    return FemMesh(pmap)


# ----------------------------------------------------------------------
# element matrices
def thermal_element_matrix(w, h, k):
    """4x4 conductivity matrix of a w-by-h rectangle."""
    ke = np.zeros((4, 4))
    det_j = w * h / 4.0
    scale = np.array([2.0 / w, 2.0 / h])
    for xi, eta in GAUSS_POINTS:
        grad = shape_gradients(xi, eta) * scale      # dN/dx, dN/dy
        ke += k * grad @ grad.T * det_j
    return ke


def elastic_element_matrix(w, h, E, nu):
    """8x8 plane-strain stiffness; dofs ordered (ux0, uy0, ux1, uy1, ...)."""
    c_d, c_o, c_g = plane_strain_coeffs(E, nu)
    d_mat = np.array([[c_d, c_o, 0.0], [c_o, c_d, 0.0], [0.0, 0.0, c_g]])
    ke = np.zeros((8, 8))
    det_j = w * h / 4.0
    scale = np.array([2.0 / w, 2.0 / h])
    for xi, eta in GAUSS_POINTS:
        grad = shape_gradients(xi, eta) * scale
        b = np.zeros((3, 8))
        b[0, 0::2] = grad[:, 0]
        b[1, 1::2] = grad[:, 1]
        b[2, 0::2] = grad[:, 1]                      # engineering shear row
        b[2, 1::2] = grad[:, 0]
        ke += b.T @ d_mat @ b * det_j
    return ke


@dataclass
class SparseSystem:
    """Assembled K u = f with a Dirichlet constraint set."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    fixed_dofs: np.ndarray
    fixed_values: np.ndarray
    n_dofs: int
    physics: str


def assemble(mesh, physics, table, bcs):
    """Assemble stiffness, load vector and constraints for one problem."""
    if physics not in ("elastic", "thermal"):
        raise DomainError(f"unknown physics {physics!r}")
    if bcs.problem != physics:
        raise DomainError("boundary spec does not match the requested physics")
    pmap = mesh.pmap
    dofs_per_node = 2 if physics == "elastic" else 1
    n_dofs = dofs_per_node * mesh.n_nodes
    w, h = pmap.cell_w, pmap.cell_h

    element_k = {}
    for phase in pmap.phases():
        mat = table[phase]
        if physics == "elastic":
            element_k[phase] = elastic_element_matrix(w, h, mat.E, mat.nu)
        else:
            element_k[phase] = thermal_element_matrix(w, h, mat.k)

    conn = mesh.element_nodes()
    phases = mesh.element_phases()
    block = 4 * dofs_per_node
    n_entries = mesh.n_elements * block * block
    rows = np.empty(n_entries, dtype=int)
    cols_ = np.empty(n_entries, dtype=int)
    vals = np.empty(n_entries)
    pos = 0
    for e in range(mesh.n_elements):
        ke = element_k[int(phases[e])]
        if dofs_per_node == 1:
            dofs = conn[e]
        else:
            dofs = np.empty(8, dtype=int)
            dofs[0::2] = 2 * conn[e]
            dofs[1::2] = 2 * conn[e] + 1
        r = np.repeat(dofs, block)
        c = np.tile(dofs, block)
        rows[pos:pos + block * block] = r
        cols_[pos:pos + block * block] = c
        vals[pos:pos + block * block] = ke.ravel()
        pos += block * block
    matrix = sp.coo_matrix((vals, (rows, cols_)), shape=(n_dofs, n_dofs)).tocsr()

    rhs = np.zeros(n_dofs)
    _apply_neumann_loads(mesh, bcs, rhs, dofs_per_node)

    fixed = {}
    for edge, comp, value in bcs.dirichlet_items():
        nodes = mesh.edge_nodes(edge)
        if physics == "elastic":
            offset = 0 if comp == "x" else 1
            dofs = dofs_per_node * nodes + offset
        else:
            dofs = nodes
        for d in dofs:
            if d in fixed and fixed[d] != value:
                raise DomainError(
                    f"conflicting Dirichlet values at dof {d}: "
                    f"{fixed[d]} vs {value}")
            fixed[int(d)] = float(value)
    fixed_dofs = np.array(sorted(fixed), dtype=int)
    fixed_values = np.array([fixed[d] for d in fixed_dofs])
    return SparseSystem(matrix, rhs, fixed_dofs, fixed_values, n_dofs, physics)


def _apply_neumann_loads(mesh, bcs, rhs, dofs_per_node):
    """Consistent nodal loads for constant nonzero Neumann data."""
    pmap = mesh.pmap
    seg = {"left": pmap.cell_h, "right": pmap.cell_h,
           "top": pmap.cell_w, "bottom": pmap.cell_w}
    for edge, comp, value in bcs.neumann_items():
        if value == 0.0:
            continue
        nodes = mesh.edge_nodes(edge)
        half = 0.5 * value * seg[edge]
        if dofs_per_node == 1:
            half = -half          # outward normal flux q_n drains the domain
            dofs = nodes
        else:
            offset = 0 if comp == "x" else 1
            dofs = dofs_per_node * nodes + offset
        contrib = np.full(len(nodes), 2.0 * half)
        contrib[0] = half
        contrib[-1] = half
        np.add.at(rhs, dofs, contrib)


def solve(system, dense_limit=2000):
    """Nodal solution by constraint reduction.

    Free unknowns below ``dense_limit`` go through a dense direct solve;
    larger systems use Jacobi-preconditioned conjugate gradients to a 1e-10
    relative residual.
    """
    n = system.n_dofs
    free = np.setdiff1d(np.arange(n), system.fixed_dofs, assume_unique=True)
    u = np.zeros(n)
    u[system.fixed_dofs] = system.fixed_values
    k_fc = system.matrix[free][:, system.fixed_dofs]
    rhs = system.rhs[free] - k_fc @ system.fixed_values
    k_ff = system.matrix[free][:, free]
    if len(free) < dense_limit:
        u[free] = np.linalg.solve(k_ff.toarray(), rhs)
    else:
        diag = k_ff.diagonal()
        if np.any(diag <= 0):
            raise SolverError("non-positive diagonal in reduced system")
        precond = spla.LinearOperator(k_ff.shape, matvec=lambda v: v / diag)
        sol, info = spla.cg(k_ff, rhs, rtol=1e-10, atol=0.0,
                            maxiter=20 * len(free), M=precond)
        if info != 0:
            raise SolverError(f"conjugate gradients failed to converge "
                              f"(info={info})")
        u[free] = sol
    return u


def reactions(system, u):
    """K u - f on the constrained dofs (work-conjugate boundary forces)."""
    residual = system.matrix @ u - system.rhs
    return residual[system.fixed_dofs]


# ----------------------------------------------------------------------
# field recovery
def _gauss_to_corner_matrix():
    """Bilinear extrapolation from the 2x2 Gauss points to the corners."""
    v_gauss = np.array([[1.0, xi, eta, xi * eta] for xi, eta in GAUSS_POINTS])
    v_corner = np.array([[1.0, xi, eta, xi * eta] for xi, eta in CORNERS])
    return v_corner @ np.linalg.inv(v_gauss)


_EXTRAP = _gauss_to_corner_matrix()


def recover_fields(mesh, u, physics, table):
    """Gauss-point stresses/fluxes extrapolated to nodes and averaged.

    Returns a FieldGrid on the nodal lattice (primary variables are nodal
    values, gradient quantities are the averaged recoveries).
    """
    pmap = mesh.pmap
    conn = mesh.element_nodes()
    phases = mesh.element_phases()
    w, h = pmap.cell_w, pmap.cell_h
    scale = np.array([2.0 / w, 2.0 / h])
    grads = [shape_gradients(xi, eta) * scale for xi, eta in GAUSS_POINTS]

    n_nodes = mesh.n_nodes
    if physics == "thermal":
        names = ("q_x", "q_y")
        gauss_vals = np.zeros((4, 2))
    else:
        names = ("sig_x", "sig_y", "sig_xy")
        gauss_vals = np.zeros((4, 3))
    acc = {n: np.zeros(n_nodes) for n in names}
    count = np.zeros(n_nodes)

    for e in range(mesh.n_elements):
        nodes = conn[e]
        mat = table[int(phases[e])]
        if physics == "thermal":
            te = u[nodes]
            for g, grad in enumerate(grads):
                gt = grad.T @ te                      # [dT/dx, dT/dy]
                gauss_vals[g] = -mat.k * gt
        else:
            ue = np.empty(8)
            ue[0::2] = u[2 * nodes]
            ue[1::2] = u[2 * nodes + 1]
            c_d, c_o, c_g = plane_strain_coeffs(mat.E, mat.nu)
            for g, grad in enumerate(grads):
                eps_x = grad[:, 0] @ ue[0::2]
                eps_y = grad[:, 1] @ ue[1::2]
                gamma = grad[:, 1] @ ue[0::2] + grad[:, 0] @ ue[1::2]
                gauss_vals[g] = (c_d * eps_x + c_o * eps_y,
                                 c_o * eps_x + c_d * eps_y, c_g * gamma)
        corner_vals = _EXTRAP @ gauss_vals
        for name_i, name in enumerate(names):
            np.add.at(acc[name], nodes, corner_vals[:, name_i])
        np.add.at(count, nodes, 1.0)

    coords = mesh.node_coords()
    fields = {}
    if physics == "thermal":
        fields["T"] = u.copy()
    else:
        fields["u_x"] = u[0::2].copy()
        fields["u_y"] = u[1::2].copy()
    for name in names:
        fields[name] = acc[name] / count
    return FieldGrid(coords[:, 0], coords[:, 1], fields,
                     dims=(mesh.nodes_x, mesh.nodes_y), provenance="fem")


def interpolate_grid(grid: FieldGrid, pts):
    """Bilinear interpolation of a lattice FieldGrid onto arbitrary points."""
    if not grid.dims:
        raise SolverError("interpolation needs a lattice FieldGrid with dims")
    nx, ny = grid.dims
    xs = grid.x.reshape(ny, nx)[0]
    ys = grid.y.reshape(ny, nx)[:, 0]
    pts = np.asarray(pts, dtype=float)
    fx = np.interp(pts[:, 0], xs, np.arange(nx))
    fy = np.interp(pts[:, 1], ys, np.arange(ny))
    i0 = np.minimum(fx.astype(int), nx - 2)
    j0 = np.minimum(fy.astype(int), ny - 2)
    tx = fx - i0
    ty = fy - j0
    out = {}
    for name, vals in grid.fields.items():
        v = vals.reshape(ny, nx)
        out[name] = ((1 - tx) * (1 - ty) * v[j0, i0]
                     + tx * (1 - ty) * v[j0, i0 + 1]
                     + tx * ty * v[j0 + 1, i0 + 1]
                     + (1 - tx) * ty * v[j0 + 1, i0])
    return FieldGrid(pts[:, 0].copy(), pts[:, 1].copy(), out,
                     provenance=grid.provenance)


def solve_fem(pmap, table, bcs, physics=None):
    """Assemble, solve and recover in one call; returns the nodal FieldGrid."""
    physics = physics or bcs.problem
    mesh = build_mesh(pmap)
    table.check_covers(pmap)
    system = assemble(mesh, physics, table, bcs)
    u = solve(system)
    return recover_fields(mesh, u, physics, table)
