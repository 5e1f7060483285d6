"""Input coercion and validation shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np

from .config import resolve_map_path
from .domain import (BC_PRESETS, BoundarySpec, DomainError, Material,
                     MaterialTable, PhaseMap, TABLE1_MATERIALS, load_phase_map)


def as_phase_map(obj):
    """Accept a PhaseMap, a path, or 'builtin:<name>'; None means homogeneous."""
    if obj is None:
        obj = "builtin:homogeneous"
    if isinstance(obj, PhaseMap):
        return obj
    if isinstance(obj, str):
        return load_phase_map(resolve_map_path(obj))
    raise DomainError(f"cannot interpret {type(obj).__name__} as a phase map")


def as_material_table(obj):
    if obj is None:
        return TABLE1_MATERIALS
    if isinstance(obj, MaterialTable):
        return obj
    if isinstance(obj, dict):
        return MaterialTable({p: m if isinstance(m, Material) else Material(**m)
                              for p, m in obj.items()})
    raise DomainError(f"cannot interpret {type(obj).__name__} as materials")


def as_boundary_spec(obj, problem):
    if obj is None:
        obj = "tension" if problem == "elastic" else "thermal-gradient"
    if isinstance(obj, BoundarySpec):
        if obj.problem != problem:
            raise DomainError(
                f"boundary spec is for {obj.problem!r}, solver is {problem!r}")
        return obj
    if isinstance(obj, str):
        try:
            spec = BC_PRESETS[obj]()
        except KeyError:
            raise DomainError(f"unknown BC preset {obj!r}; "
                              f"available: {sorted(BC_PRESETS)}") from None
        if spec.problem != problem:
            raise DomainError(f"BC preset {obj!r} is for {spec.problem!r}")
        return spec
    raise DomainError(f"cannot interpret {type(obj).__name__} as boundary spec")


def check_points(X, pmap=None):
    """Coerce to a finite float (n, 2) array, optionally bounds-checked."""
    pts = np.asarray(X, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) point array, got shape "
                         f"{getattr(pts, 'shape', None)}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point array contains non-finite values")
    if pmap is not None:
        if (pts[:, 0].min() < 0 or pts[:, 0].max() > pmap.length_x
                or pts[:, 1].min() < 0 or pts[:, 1].max() > pmap.length_y):
            raise DomainError("points fall outside the phase-map domain")
    return pts
