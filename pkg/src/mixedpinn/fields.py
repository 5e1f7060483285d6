"""Evaluated solution grids, CSV export and PINN-vs-FEM comparison.

A FieldGrid separates canonical solution fields (the ones the two solvers
are compared on) from auxiliary diagnostic columns such as deformed
coordinates or primary-variable-derived stresses.  Auxiliary columns are
recognized by naming convention so a written file classifies itself on
re-reading.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .domain import materials_at
from .elastic import strain_stress_from_u
from .thermal import flux_from_T

CANONICAL_FIELDS = {
    "elastic": ("u_x", "u_y", "sig_x", "sig_y", "sig_xy"),
    "thermal": ("T", "q_x", "q_y"),
}

FIELD_GROUPS = {
    "displacement": ("u_x", "u_y"),
    "stress": ("sig_x", "sig_y", "sig_xy"),
    "temperature": ("T",),
    "flux": ("q_x", "q_y"),
}

# deformed-configuration plots magnify displacements by this factor
DEFORM_MAGNIFICATION = 10.0

_AUX_MARKERS = ("_from_u", "_from_T")
_AUX_NAMES = ("x_def", "y_def")


def is_aux_column(name):
    return name in _AUX_NAMES or any(name.endswith(m) for m in _AUX_MARKERS)


class FieldError(Exception):
    pass


@dataclass
class FieldGrid:
    """Solution values at a list of points, usually a rectangular lattice."""

    x: np.ndarray
    y: np.ndarray
    fields: dict
    aux: dict = field(default_factory=dict)
    dims: tuple = None
    provenance: str = ""

    @property
    def n_points(self):
        return len(self.x)

    def write_csv(self, path):
        names = list(self.fields) + list(self.aux)
        cols = [self.x, self.y] + [self.fields.get(n, self.aux.get(n))
                                   for n in names]
        with open(path, "w", newline="") as fh:
            if self.provenance:
                fh.write(f"# provenance: {self.provenance}\n")
            if self.dims:
                fh.write(f"# grid: {self.dims[0]} {self.dims[1]}\n")
            writer = csv.writer(fh)
            writer.writerow(["x", "y"] + names)
            for i in range(self.n_points):
                writer.writerow([f"{c[i]:.17g}" for c in cols])

    @classmethod
    def read_csv(cls, path):
        provenance, dims = "", None
        with open(path) as fh:
            pos = fh.tell()
            line = fh.readline()
            while line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("provenance:"):
                    provenance = body.split(":", 1)[1].strip()
                elif body.startswith("grid:"):
                    dims = tuple(int(v) for v in body.split(":", 1)[1].split())
                pos = fh.tell()
                line = fh.readline()
            fh.seek(pos)
            reader = csv.reader(fh)
            header = next(reader)
            data = np.array([[float(v) for v in row] for row in reader])
        if header[:2] != ["x", "y"] or data.ndim != 2:
            raise FieldError(f"{path}: not a field CSV")
        fields, aux = {}, {}
        for i, name in enumerate(header[2:], start=2):
            (aux if is_aux_column(name) else fields)[name] = data[:, i]
        return cls(data[:, 0], data[:, 1], fields, aux, dims, provenance)


@dataclass
class FieldDiff:
    name: str
    max_rel: float
    avg_rel: float
    diff: np.ndarray
    scale: float
    absolute: bool = False       # set when the reference field is all zero


@dataclass
class DiffReport:
    """Per-field and pooled-group relative differences (reference = second grid)."""

    per_field: dict
    groups: dict                 # group name -> (avg_rel, max_rel)
    flagged: list

    def summary_lines(self):
        lines = []
        for name, d in self.per_field.items():
            tag = " (absolute: zero reference)" if d.absolute else ""
            lines.append(f"{name}: avg {100 * d.avg_rel:.3f} %  "
                         f"max {100 * d.max_rel:.3f} %{tag}")
        for name, (avg, mx) in self.groups.items():
            lines.append(f"[{name}] avg {100 * avg:.3f} %  max {100 * mx:.3f} %")
        return lines

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["field", "avg_rel", "max_rel", "absolute"])
            for name, d in self.per_field.items():
                writer.writerow([name, f"{d.avg_rel:.17g}", f"{d.max_rel:.17g}",
                                 int(d.absolute)])
            for name, (avg, mx) in self.groups.items():
                writer.writerow([f"group:{name}", f"{avg:.17g}", f"{mx:.17g}", 0])


def compare(a: FieldGrid, b: FieldGrid) -> DiffReport:
    """Pointwise differences of ``a`` against reference ``b``.

    Per field, |a - b| is normalized by the grid maximum of |b|; an all-zero
    reference field is flagged and reported as an absolute difference.
    Component groups (displacements, stresses, flux) are additionally pooled
    with a shared group scale to mirror two-number summaries.
    """
    if len(a.x) != len(b.x) or not (np.array_equal(a.x, b.x)
                                    and np.array_equal(a.y, b.y)):
        raise FieldError("field grids are defined on different point sets")
    common = [n for n in a.fields if n in b.fields]
    if not common:
        raise FieldError("field grids share no columns to compare")
    per_field, flagged = {}, []
    for name in common:
        diff = np.abs(a.fields[name] - b.fields[name])
        scale = float(np.max(np.abs(b.fields[name])))
        if scale == 0.0:
            per_field[name] = FieldDiff(name, float(diff.max()),
                                        float(diff.mean()), diff, 0.0, True)
            flagged.append(name)
        else:
            rel = diff / scale
            per_field[name] = FieldDiff(name, float(rel.max()),
                                        float(rel.mean()), diff, scale)
    groups = {}
    for gname, members in FIELD_GROUPS.items():
        present = [n for n in members if n in common]
        if not present:
            continue
        scale = max(per_field[n].scale for n in present)
        if scale == 0.0:
            continue
        diffs = np.concatenate([per_field[n].diff for n in present]) / scale
        groups[gname] = (float(diffs.mean()), float(diffs.max()))
    return DiffReport(per_field, groups, flagged)


def evaluate_pinn(heads, pts, pmap, table, dims=None):
    """Forward pass of trained heads on a point set.

    Canonical gradient-variable fields come from the dedicated heads when the
    variant has them (the primary-derived values are kept as diagnostic aux
    columns); otherwise from derivatives of the primary variable.  Elastic
    grids also carry magnified deformed coordinates.
    """
    pts = np.asarray(pts, dtype=float)
    x, y = ad.spatial_inputs(pts[:, 0], pts[:, 1])
    out = heads.evaluate(x, y)
    mats = materials_at(pmap, table, pts)
    fields, aux = {}, {}
    if heads.problem == "elastic":
        u_x, u_y = out["u_x"], out["u_y"]
        fields["u_x"] = _flat(u_x.value)
        fields["u_y"] = _flat(u_y.value)
        derived = strain_stress_from_u(u_x, u_y, mats.E, mats.nu)
        if heads.variant.stress_heads:
            for name in ("sig_x", "sig_y", "sig_xy"):
                fields[name] = _flat(out[name].value)
                aux[name + "_from_u"] = _flat(getattr(derived, name))
        else:
            for name in ("sig_x", "sig_y", "sig_xy"):
                fields[name] = _flat(getattr(derived, name))
        aux["x_def"] = pts[:, 0] + DEFORM_MAGNIFICATION * fields["u_x"]
        aux["y_def"] = pts[:, 1] + DEFORM_MAGNIFICATION * fields["u_y"]
    else:
        T = out["T"]
        fields["T"] = _flat(T.value)
        derived = flux_from_T(T, mats.k)
        if heads.variant.stress_heads:
            fields["q_x"] = _flat(out["q_x"].value)
            fields["q_y"] = _flat(out["q_y"].value)
            aux["q_x_from_T"] = _flat(derived.q_x)
            aux["q_y_from_T"] = _flat(derived.q_y)
        else:
            fields["q_x"] = _flat(derived.q_x)
            fields["q_y"] = _flat(derived.q_y)
    return FieldGrid(pts[:, 0].copy(), pts[:, 1].copy(), fields, aux,
                     dims=dims, provenance="pinn")


def _flat(v):
    return np.ravel(np.asarray(ad.value_of(v), dtype=float)).copy()
