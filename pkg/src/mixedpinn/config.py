"""Run configuration: INI files in, resolved manifests out.

A run is reproducible from its manifest alone: the manifest is itself a
valid config file with every default made explicit and the phase-map path
resolved.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, asdict
from importlib import resources
from pathlib import Path

from .domain import (BC_PRESETS, BoundarySpec, EDGES, EdgeCondition, Material,
                     MaterialTable, PhaseMap, load_phase_map)


class ConfigError(Exception):
    pass


BUILTIN_MAPS = {
    "square_inclusion": "square_inclusion_32.txt",
    "multi_blob": "multi_blob_32.txt",
    "homogeneous": "homogeneous_1.txt",
}


def builtin_map_path(name):
    try:
        fname = BUILTIN_MAPS[name]
    except KeyError:
        raise ConfigError(f"unknown builtin phase map {name!r}; "
                          f"available: {sorted(BUILTIN_MAPS)}") from None
    return str(resources.files("mixedpinn.data").joinpath(fname))


def resolve_map_path(spec, base_dir=None):
    if spec.startswith("builtin:"):
        return builtin_map_path(spec.split(":", 1)[1])
    path = Path(spec)
    if not path.is_absolute() and base_dir is not None:
        path = Path(base_dir) / path
    return str(path.resolve())


@dataclass
class RunConfig:
    """Everything needed to reproduce one solver run."""

    problem: str = "thermal"
    variant: str = "E"
    energy_form: str = "literal"
    phase_map_path: str = "builtin:homogeneous"
    materials: dict = field(default_factory=lambda: {
        0: {"E": 0.5, "nu": 0.3, "k": 1.0},
        1: {"E": 1.0, "nu": 0.3, "k": 0.5},
    })
    bc_preset: str = ""
    bc_edges: dict = field(default_factory=dict)
    n_interior: int = 1000
    n_per_edge: int = 100
    strategy: str = "uniform-random"
    inclusion_density: float = 2.0
    refine_extra: int = 0
    refine_radius: float = 0.05
    hidden_layers: int = 5
    neurons: int = 40
    learning_rate: float = 1e-3
    epochs: int = 10_000
    stopping: float = 1e-12
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    grid_nx: int = 100
    grid_ny: int = 100
    ode_counts: tuple = (10, 20, 30, 50, 100)
    ode_epochs: int = 1500
    ode_seeds: tuple = (0, 1, 2)
    ode_hidden_layers: int = 4
    ode_neurons: int = 20

    def load_map(self) -> PhaseMap:
        return load_phase_map(resolve_map_path(self.phase_map_path))

    def material_table(self) -> MaterialTable:
        return MaterialTable({p: Material(**props)
                              for p, props in self.materials.items()})

    def boundary_spec(self) -> BoundarySpec:
        if self.bc_edges:
            comps = ("x", "y") if self.problem == "elastic" else ("T",)
            conditions = {}
            for edge, given in self.bc_edges.items():
                conditions[edge] = {c: EdgeCondition(k, v)
                                    for c, (k, v) in given.items()}
            for edge in EDGES:
                if edge not in conditions:
                    raise ConfigError(f"[bcs] missing edge {edge!r}")
            return BoundarySpec(self.problem, conditions)
        preset = self.bc_preset or (
            "tension" if self.problem == "elastic" else "thermal-gradient")
        try:
            return BC_PRESETS[preset]()
        except KeyError:
            raise ConfigError(f"unknown BC preset {preset!r}") from None


def _parse_materials(section):
    out = {}
    for phase, text in section.items():
        props = {}
        for item in text.split():
            key, _, val = item.partition("=")
            if key not in ("E", "nu", "k") or not val:
                raise ConfigError(f"bad material entry {item!r} for phase {phase}")
            props[key] = float(val)
        out[int(phase)] = props
    return out


def _parse_bc_edges(section, problem):
    edges = {}
    for edge, text in section.items():
        if edge == "preset":
            continue
        if edge not in EDGES:
            raise ConfigError(f"[bcs] unknown edge {edge!r}")
        comps = {}
        for item in text.split():
            parts = item.split(":")
            if len(parts) != 3:
                raise ConfigError(
                    f"[bcs] entries look like comp:kind:value, got {item!r}")
            comp, kind, value = parts
            comps[comp] = (kind, float(value))
        edges[edge] = comps
    return edges


def load_config(path) -> RunConfig:
    """Parse an INI run configuration (also accepts written manifests)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    base_dir = Path(path).parent
    cfg = RunConfig()

    def get(section, key, cast, default):
        if parser.has_option(section, key):
            text = parser.get(section, key)
            try:
                return cast(text)
            except ValueError:
                raise ConfigError(
                    f"[{section}] {key} = {text!r} is not a {cast.__name__}")
        return default

    cfg.problem = get("problem", "type", str, cfg.problem)
    if cfg.problem not in ("elastic", "thermal", "ode"):
        raise ConfigError(f"unknown problem type {cfg.problem!r}")
    cfg.variant = get("problem", "variant", str, cfg.variant).upper()
    cfg.energy_form = get("problem", "energy_form", str, cfg.energy_form)

    if parser.has_option("domain", "phase_map"):
        raw = parser.get("domain", "phase_map")
        cfg.phase_map_path = raw if raw.startswith("builtin:") \
            else resolve_map_path(raw, base_dir)
    if parser.has_section("materials"):
        cfg.materials = _parse_materials(parser["materials"])
    if parser.has_section("bcs"):
        cfg.bc_preset = parser.get("bcs", "preset", fallback="")
        problem = cfg.problem if cfg.problem != "ode" else "thermal"
        cfg.bc_edges = _parse_bc_edges(parser["bcs"], problem)

    cfg.n_interior = get("collocation", "n_interior", int, cfg.n_interior)
    cfg.n_per_edge = get("collocation", "n_per_edge", int, cfg.n_per_edge)
    cfg.strategy = get("collocation", "strategy", str, cfg.strategy)
    cfg.inclusion_density = get("collocation", "inclusion_density", float,
                                cfg.inclusion_density)
    cfg.refine_extra = get("collocation", "refine_extra", int, cfg.refine_extra)
    cfg.refine_radius = get("collocation", "refine_radius", float,
                            cfg.refine_radius)

    cfg.hidden_layers = get("network", "hidden_layers", int, cfg.hidden_layers)
    cfg.neurons = get("network", "neurons", int, cfg.neurons)

    cfg.learning_rate = get("optimizer", "learning_rate", float,
                            cfg.learning_rate)
    cfg.epochs = get("optimizer", "epochs", int, cfg.epochs)
    cfg.stopping = get("optimizer", "stopping", float, cfg.stopping)
    cfg.beta1 = get("optimizer", "beta1", float, cfg.beta1)
    cfg.beta2 = get("optimizer", "beta2", float, cfg.beta2)
    cfg.adam_eps = get("optimizer", "eps", float, cfg.adam_eps)

    cfg.seed = get("run", "seed", int, cfg.seed)
    cfg.grid_nx = get("eval", "grid_nx", int, cfg.grid_nx)
    cfg.grid_ny = get("eval", "grid_ny", int, cfg.grid_ny)

    ints = lambda text: tuple(int(v) for v in text.split())
    cfg.ode_counts = get("ode", "counts", ints, cfg.ode_counts)
    cfg.ode_epochs = get("ode", "epochs", int, cfg.ode_epochs)
    cfg.ode_seeds = get("ode", "seeds", ints, cfg.ode_seeds)
    cfg.ode_hidden_layers = get("ode", "hidden_layers", int,
                                cfg.ode_hidden_layers)
    cfg.ode_neurons = get("ode", "neurons", int, cfg.ode_neurons)
    return cfg


def write_manifest(cfg: RunConfig, path):
    """Write the fully resolved configuration; loadable as a config again."""
    parser = configparser.ConfigParser()
    parser["problem"] = {"type": cfg.problem, "variant": cfg.variant,
                         "energy_form": cfg.energy_form}
    map_path = cfg.phase_map_path
    if not map_path.startswith("builtin:"):
        map_path = str(Path(map_path).resolve())
    parser["domain"] = {"phase_map": map_path}
    parser["materials"] = {
        str(p): " ".join(f"{k}={v:.17g}" for k, v in sorted(props.items()))
        for p, props in sorted(cfg.materials.items())}
    bcs = {}
    if cfg.bc_preset:
        bcs["preset"] = cfg.bc_preset
    for edge, comps in cfg.bc_edges.items():
        bcs[edge] = " ".join(f"{c}:{k}:{v:.17g}"
                             for c, (k, v) in sorted(comps.items()))
    if not bcs:
        bcs["preset"] = ("tension" if cfg.problem == "elastic"
                         else "thermal-gradient")
    parser["bcs"] = bcs
    parser["collocation"] = {
        "n_interior": str(cfg.n_interior), "n_per_edge": str(cfg.n_per_edge),
        "strategy": cfg.strategy,
        "inclusion_density": f"{cfg.inclusion_density:.17g}",
        "refine_extra": str(cfg.refine_extra),
        "refine_radius": f"{cfg.refine_radius:.17g}"}
    parser["network"] = {"hidden_layers": str(cfg.hidden_layers),
                         "neurons": str(cfg.neurons)}
    parser["optimizer"] = {
        "learning_rate": f"{cfg.learning_rate:.17g}", "epochs": str(cfg.epochs),
        "stopping": f"{cfg.stopping:.17g}", "beta1": f"{cfg.beta1:.17g}",
        "beta2": f"{cfg.beta2:.17g}", "eps": f"{cfg.adam_eps:.17g}"}
    parser["run"] = {"seed": str(cfg.seed)}
    parser["eval"] = {"grid_nx": str(cfg.grid_nx), "grid_ny": str(cfg.grid_ny)}
    parser["ode"] = {
        "counts": " ".join(str(c) for c in cfg.ode_counts),
        "epochs": str(cfg.ode_epochs),
        "seeds": " ".join(str(s) for s in cfg.ode_seeds),
        "hidden_layers": str(cfg.ode_hidden_layers),
        "neurons": str(cfg.ode_neurons)}
    with open(path, "w") as fh:
        parser.write(fh)
