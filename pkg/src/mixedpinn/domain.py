"""Heterogeneous geometry, material lookup, boundary data and collocation.

The microstructure is a pixel grid of phase ids over a rectangle.  Material
values at a point follow the neighbor-averaging rule used to mimic an FE
assembly: strictly inside a cell you get that cell's phase values, on a
shared cell edge the mean of the two neighbors, on a shared corner the mean
of up to four.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class DomainError(Exception):
    pass


EDGES = ("left", "right", "top", "bottom")
OUTWARD_NORMALS = {
    "left": (-1.0, 0.0), "right": (1.0, 0.0),
    "top": (0.0, 1.0), "bottom": (0.0, -1.0),
}

# tolerance (relative to the domain size) for "point sits on a grid line"
GRIDLINE_RTOL = 1e-9


@dataclass(frozen=True)
class PhaseMap:
    """Pixel grid of phase ids; row 0 of ``ids`` is the bottom row of cells."""

    ids: np.ndarray
    length_x: float = 1.0
    length_y: float = 1.0

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=int)
        if ids.ndim != 2 or ids.size == 0:
            raise DomainError("phase map must be a non-empty 2-D integer grid")
        if np.any(ids < 0):
            raise DomainError("phase ids must be non-negative")
        if self.length_x <= 0 or self.length_y <= 0:
            raise DomainError("domain extents must be positive")
        object.__setattr__(self, "ids", ids)

    @property
    def n_x(self):
        return self.ids.shape[1]

    @property
    def n_y(self):
        return self.ids.shape[0]

    @property
    def cell_w(self):
        return self.length_x / self.n_x

    @property
    def cell_h(self):
        return self.length_y / self.n_y

    def phases(self):
        return sorted(int(p) for p in np.unique(self.ids))

    @property
    def edge_lengths(self):
        return {"left": self.length_y, "right": self.length_y,
                "top": self.length_x, "bottom": self.length_x}

    @property
    def area(self):
        return self.length_x * self.length_y


def load_phase_map(path):
    """Read the text format: ``n_x n_y L_x L_y`` then n_y rows, bottom first."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise DomainError(f"{path}: header must be 'n_x n_y L_x L_y'")
        n_x, n_y = int(header[0]), int(header[1])
        length_x, length_y = float(header[2]), float(header[3])
        rows = []
        for line in fh:
            if line.strip():
                rows.append([int(v) for v in line.split()])
    if len(rows) != n_y or any(len(r) != n_x for r in rows):
        raise DomainError(f"{path}: expected {n_y} rows of {n_x} ids")
    return PhaseMap(np.array(rows, dtype=int), length_x, length_y)


def save_phase_map(pmap, path):
    with open(path, "w") as fh:
        fh.write(f"{pmap.n_x} {pmap.n_y} {pmap.length_x:.17g} {pmap.length_y:.17g}\n")
        for row in pmap.ids:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


# ----------------------------------------------------------------------
# materials
@dataclass(frozen=True)
class Material:
    """Per-phase constants: Young's modulus E (GPa), Poisson ratio, k (W/mK)."""

    E: float = None
    nu: float = None
    k: float = None

    def __post_init__(self):
        if self.E is not None and self.E <= 0:
            raise DomainError(f"E must be positive, got {self.E}")
        if self.nu is not None and not 0.0 <= self.nu < 0.5:
            raise DomainError(f"nu must lie in [0, 0.5), got {self.nu}")
        if self.k is not None and self.k <= 0:
            raise DomainError(f"k must be positive, got {self.k}")


class MaterialTable:
    """Phase id -> Material; all phases must define the same property set."""

    def __init__(self, entries):
        table = {}
        for phase, mat in dict(entries).items():
            if not isinstance(mat, Material):
                mat = Material(**mat)
            table[int(phase)] = mat
        if not table:
            raise DomainError("material table is empty")
        keys = {tuple(p for p in ("E", "nu", "k")
                      if getattr(m, p) is not None) for m in table.values()}
        if len(keys) > 1:
            raise DomainError("all phases must define the same properties")
        self._table = table

    def __getitem__(self, phase):
        try:
            return self._table[int(phase)]
        except KeyError:
            raise DomainError(f"no material for phase {phase}") from None

    def __contains__(self, phase):
        return int(phase) in self._table

    def phases(self):
        return sorted(self._table)

    def check_covers(self, pmap):
        missing = [p for p in pmap.phases() if p not in self]
        if missing:
            raise DomainError(f"phase map uses phases without materials: {missing}")


class PointMaterial(NamedTuple):
    E: object
    nu: object
    k: object


def _axis_cells(coord, n, cell, length):
    """Cell indices adjacent to ``coord`` along one axis (1 or 2 of them)."""
    tol = GRIDLINE_RTOL * length
    if coord < -tol or coord > length + tol:
        raise DomainError(f"point coordinate {coord} outside [0, {length}]")
    k = int(round(coord / cell))
    if abs(coord - k * cell) <= tol:
        lo, hi = k - 1, k
        cells = [c for c in (lo, hi) if 0 <= c < n]
        return cells
    i = int(coord / cell)
    return [min(max(i, 0), n - 1)]


def material_at_point(pmap, table, x, y):
    """(E, nu, k) at a point, averaging across touching cells on interfaces."""
    cols_ = _axis_cells(x, pmap.n_x, pmap.cell_w, pmap.length_x)
    rows_ = _axis_cells(y, pmap.n_y, pmap.cell_h, pmap.length_y)
    mats = [table[pmap.ids[j, i]] for j in rows_ for i in cols_]
    out = []
    for prop in ("E", "nu", "k"):
        vals = [getattr(m, prop) for m in mats]
        out.append(None if vals[0] is None else sum(vals) / len(vals))
    return PointMaterial(*out)


def materials_at(pmap, table, pts):
    """Vectorized material lookup; returns float arrays (E, nu, k)."""
    pts = np.asarray(pts, dtype=float)
    props = [material_at_point(pmap, table, px, py) for px, py in pts]
    def col(i):
        vals = [p[i] for p in props]
        return None if vals and vals[0] is None else np.array(vals)
    return PointMaterial(col(0), col(1), col(2))


# ----------------------------------------------------------------------
# boundary conditions
@dataclass(frozen=True)
class EdgeCondition:
    kind: str                # "dirichlet" | "neumann"
    value: float

    def __post_init__(self):
        if self.kind not in ("dirichlet", "neumann"):
            raise DomainError(f"unknown condition kind {self.kind!r}")


class BoundarySpec:
    """One condition per field component on each of the four edges.

    Elastic components are 'x' and 'y' (Dirichlet value = prescribed
    displacement, Neumann value = prescribed traction component); the thermal
    component is 'T' (Dirichlet value = temperature, Neumann value = normal
    flux).
    """

    def __init__(self, problem, conditions):
        if problem not in ("elastic", "thermal"):
            raise DomainError(f"unknown problem type {problem!r}")
        comps = ("x", "y") if problem == "elastic" else ("T",)
        for edge in EDGES:
            if edge not in conditions:
                raise DomainError(f"missing boundary condition on edge {edge!r}")
            given = conditions[edge]
            if set(given) != set(comps):
                raise DomainError(
                    f"edge {edge!r} must set exactly one condition per "
                    f"component {comps}, got {tuple(given)}")
        self.problem = problem
        self.components = comps
        self.conditions = {e: dict(conditions[e]) for e in EDGES}

    def condition(self, edge, comp):
        return self.conditions[edge][comp]

    def dirichlet_items(self):
        for edge in EDGES:
            for comp in self.components:
                c = self.conditions[edge][comp]
                if c.kind == "dirichlet":
                    yield edge, comp, c.value

    def neumann_items(self):
        for edge in EDGES:
            for comp in self.components:
                c = self.conditions[edge][comp]
                if c.kind == "neumann":
                    yield edge, comp, c.value

    # ------------------------------------------------------------------
    @staticmethod
    def tension(ubar=0.05):
        """Left edge fixed, right edge pulled in x, top/bottom traction free."""
        d, n = (lambda v: EdgeCondition("dirichlet", v),
                lambda v: EdgeCondition("neumann", v))
        return BoundarySpec("elastic", {
            "left": {"x": d(0.0), "y": d(0.0)},
            "right": {"x": d(ubar), "y": n(0.0)},
            "top": {"x": n(0.0), "y": n(0.0)},
            "bottom": {"x": n(0.0), "y": n(0.0)},
        })

    @staticmethod
    def stretch(ubar=0.05):
        """Left edge fixed, right edge displaced in both x and y."""
        d, n = (lambda v: EdgeCondition("dirichlet", v),
                lambda v: EdgeCondition("neumann", v))
        return BoundarySpec("elastic", {
            "left": {"x": d(0.0), "y": d(0.0)},
            "right": {"x": d(ubar), "y": d(ubar)},
            "top": {"x": n(0.0), "y": n(0.0)},
            "bottom": {"x": n(0.0), "y": n(0.0)},
        })

    @staticmethod
    def thermal_gradient(t_left=1.0, t_right=0.0):
        """Fixed temperatures left/right, insulated top/bottom."""
        d, n = (lambda v: EdgeCondition("dirichlet", v),
                lambda v: EdgeCondition("neumann", v))
        return BoundarySpec("thermal", {
            "left": {"T": d(t_left)},
            "right": {"T": d(t_right)},
            "top": {"T": n(0.0)},
            "bottom": {"T": n(0.0)},
        })


BC_PRESETS = {
    "tension": BoundarySpec.tension,
    "stretch": BoundarySpec.stretch,
    "thermal-gradient": BoundarySpec.thermal_gradient,
}


# ----------------------------------------------------------------------
# collocation
@dataclass
class CollocationSet:
    """Interior and per-edge sample points with cached material values."""

    pmap: PhaseMap
    table: MaterialTable
    interior: np.ndarray                  # (N_b, 2)
    boundary: dict                        # edge -> (n_e, 2)
    interior_materials: PointMaterial
    boundary_materials: dict
    seed: object = None
    strategy: str = "uniform-random"

    @property
    def n_interior(self):
        return len(self.interior)

    @property
    def n_boundary(self):
        return sum(len(p) for p in self.boundary.values())

    def batch(self):
        """All points concatenated (interior first) plus index ranges."""
        blocks = [self.interior] + [self.boundary[e] for e in EDGES]
        pts = np.vstack(blocks)
        slices, lo = {}, 0
        for name, block in zip(("interior",) + EDGES, blocks):
            slices[name] = (lo, lo + len(block))
            lo += len(block)
        return pts, slices

    def batch_materials(self):
        """Material arrays aligned with :meth:`batch` point order."""
        mats = [self.interior_materials] + [self.boundary_materials[e]
                                            for e in EDGES]
        def cat(i):
            if mats[0][i] is None:
                return None
            return np.concatenate([np.atleast_1d(m[i]) for m in mats])
        return PointMaterial(cat(0), cat(1), cat(2))


def _default_density(pmap, inclusion_density):
    return {p: (1.0 if p == 0 else float(inclusion_density))
            for p in pmap.phases()}


def sample_collocation(pmap, table, n_interior, n_per_edge, seed=0,
                       strategy="uniform-random", phase_density=None,
                       inclusion_density=1.0):
    """Draw interior and boundary collocation points.

    Interior points: either uniform-random with per-phase density weights
    (cells are picked proportionally to weight, then a point is placed
    uniformly inside) or a cell-center style lattice (``strategy='grid'``).
    Boundary points are equally spaced per edge at midpoint offsets, so
    corners never carry two conflicting conditions.  Deterministic per seed.
    """
    table.check_covers(pmap)
    if n_per_edge <= 0:
        raise DomainError("need a positive number of boundary points per edge")
    rng = np.random.default_rng(seed)

    if strategy == "grid":
        if np.ndim(n_interior) == 1:
            g_x, g_y = (int(v) for v in n_interior)
        else:
            g_x = g_y = int(round(np.sqrt(int(n_interior))))
        xs = (np.arange(g_x) + 0.5) * pmap.length_x / g_x
        ys = (np.arange(g_y) + 0.5) * pmap.length_y / g_y
        gx, gy = np.meshgrid(xs, ys)
        interior = np.column_stack([gx.ravel(), gy.ravel()])
    elif strategy == "uniform-random":
        n_interior = int(n_interior)
        if n_interior <= 0:
            raise DomainError("need a positive number of interior points")
        if phase_density is None:
            density = _default_density(pmap, inclusion_density)
        else:
            density = {int(p): float(w) for p, w in phase_density.items()}
            present = set(pmap.phases())
            for p in density:
                if p not in present:
                    warnings.warn(f"density weight for phase {p} ignored: "
                                  "phase has zero area in this map")
            for p in present:
                density.setdefault(p, 1.0)
        weights = np.array([density[int(pid)] for pid in pmap.ids.ravel()])
        weights = weights / weights.sum()
        cells = rng.choice(pmap.ids.size, size=n_interior, p=weights)
        jj, ii = np.divmod(cells, pmap.n_x)
        # offsets strictly inside each cell keep points off interfaces and
        # off the outer boundary
        u = rng.uniform(1e-9, 1.0 - 1e-9, size=(n_interior, 2))
        interior = np.column_stack([(ii + u[:, 0]) * pmap.cell_w,
                                    (jj + u[:, 1]) * pmap.cell_h])
    else:
        raise DomainError(f"unknown collocation strategy {strategy!r}")

    boundary = {}
    for edge in EDGES:
        t = (np.arange(n_per_edge) + 0.5) / n_per_edge
        if edge == "left":
            pts = np.column_stack([np.zeros(n_per_edge), t * pmap.length_y])
        elif edge == "right":
            pts = np.column_stack([np.full(n_per_edge, pmap.length_x),
                                   t * pmap.length_y])
        elif edge == "bottom":
            pts = np.column_stack([t * pmap.length_x, np.zeros(n_per_edge)])
        else:
            pts = np.column_stack([t * pmap.length_x,
                                   np.full(n_per_edge, pmap.length_y)])
        boundary[edge] = pts

    return CollocationSet(
        pmap, table, interior, boundary,
        materials_at(pmap, table, interior),
        {e: materials_at(pmap, table, p) for e, p in boundary.items()},
        seed=seed, strategy=strategy)


def interface_segments(pmap):
    """Axis-aligned segments separating cells of different phase.

    Returns (vertical, horizontal) arrays with rows (x, y0, y1) and
    (y, x0, x1) respectively.
    """
    ids, w, h = pmap.ids, pmap.cell_w, pmap.cell_h
    vert, horiz = [], []
    diff_v = ids[:, 1:] != ids[:, :-1]
    for j, i in zip(*np.nonzero(diff_v)):
        vert.append(((i + 1) * w, j * h, (j + 1) * h))
    diff_h = ids[1:, :] != ids[:-1, :]
    for j, i in zip(*np.nonzero(diff_h)):
        horiz.append(((j + 1) * h, i * w, (i + 1) * w))
    return np.array(vert).reshape(-1, 3), np.array(horiz).reshape(-1, 3)


def distance_to_interface(pmap, pts):
    """Distance from each point to the nearest phase boundary segment."""
    vert, horiz = interface_segments(pmap)
    pts = np.asarray(pts, dtype=float)
    best = np.full(len(pts), np.inf)
    if len(vert):
        dx = np.abs(pts[:, [0]] - vert[:, 0])
        dy = np.maximum(0.0, np.maximum(vert[:, 1] - pts[:, [1]],
                                        pts[:, [1]] - vert[:, 2]))
        best = np.minimum(best, np.hypot(dx, dy).min(axis=1))
    if len(horiz):
        dy = np.abs(pts[:, [1]] - horiz[:, 0])
        dx = np.maximum(0.0, np.maximum(horiz[:, 1] - pts[:, [0]],
                                        pts[:, [0]] - horiz[:, 2]))
        best = np.minimum(best, np.hypot(dx, dy).min(axis=1))
    return best


def refine_near_interface(cset, n_extra, radius, seed=0):
    """Append interior points within ``radius`` of a phase boundary.

    Uniform rejection sampling inside the domain, deterministic per seed.  A
    homogeneous map has no interface: the set is returned unchanged with a
    warning.
    """
    if n_extra < 0:
        raise DomainError("n_extra must be non-negative")
    if n_extra == 0:
        return cset
    pmap, table = cset.pmap, cset.table
    vert, horiz = interface_segments(pmap)
    if len(vert) == 0 and len(horiz) == 0:
        warnings.warn("phase map is homogeneous: no interface to refine")
        return cset
    rng = np.random.default_rng(seed)
    accepted = []
    remaining = n_extra
    for _ in range(10_000):
        if remaining <= 0:
            break
        m = max(4 * remaining, 256)
        cand = rng.uniform(1e-9, 1.0 - 1e-9, size=(m, 2))
        cand *= (pmap.length_x, pmap.length_y)
        near = distance_to_interface(pmap, cand) <= radius
        take = cand[near][:remaining]
        if len(take):
            accepted.append(take)
            remaining -= len(take)
    if remaining > 0:
        raise DomainError(
            f"could not place {n_extra} points within {radius} of an interface")
    extra = np.vstack(accepted)
    interior = np.vstack([cset.interior, extra])
    return CollocationSet(pmap, table, interior, cset.boundary,
                          materials_at(pmap, table, interior),
                          cset.boundary_materials,
                          seed=cset.seed, strategy=cset.strategy)


def eval_grid(pmap, n_x, n_y):
    """Uniform lattice over the closed domain, row-major from the bottom."""
    if n_x < 2 or n_y < 2:
        raise DomainError("evaluation grid needs at least 2 points per axis")
    xs = np.linspace(0.0, pmap.length_x, int(n_x))
    ys = np.linspace(0.0, pmap.length_y, int(n_y))
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


# ----------------------------------------------------------------------
# bundled example microstructures
def square_inclusion_map(n=32, lo=12, hi=20):
    """n x n matrix with a centered square inclusion on cells [lo, hi)^2."""
    ids = np.zeros((n, n), dtype=int)
    ids[lo:hi, lo:hi] = 1
    return PhaseMap(ids)


def multi_blob_map(n=32):
    """n x n matrix with several inclusion blobs featuring reentrant corners."""
    ids = np.zeros((n, n), dtype=int)
    # L-shaped blob, lower left
    ids[4:14, 4:8] = 1
    ids[4:8, 4:14] = 1
    # T-shaped blob, upper right
    ids[24:28, 16:28] = 1
    ids[18:28, 20:24] = 1
    # small square, lower right with a notch (reentrant corner)
    ids[6:12, 22:28] = 1
    ids[6:9, 22:25] = 0
    # plus-shaped blob, upper left
    ids[22:26, 6:10] = 1
    ids[20:28, 7:9] = 1
    return PhaseMap(ids)


TABLE1_MATERIALS = MaterialTable({
    0: Material(E=0.5, nu=0.3, k=1.0),
    1: Material(E=1.0, nu=0.3, k=0.5),
})
