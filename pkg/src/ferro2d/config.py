"""Run configuration: flat `section.key = value` text files, validation,
lossless rendering, and assembly of ready-to-integrate problems.

Schema (UTF-8, `#` starts a comment, blank lines ignored):

    model.l1_prime   elastic constant of the tensor field in the doubled
                     convention; stored internally as l1 = l1_prime/2
    model.l2         elastic constant of the magnetization
    model.c1         nemato-magnetic coupling strength (>= 0)
    model.c2         field-tensor coupling strength (>= 0)
    model.c3         field-magnetization coupling strength (>= 0)
    model.xi         magnetic/nematic energy ratio (> 0)
    model.eta1       tensor-field drag (> 0)
    model.eta2       magnetization drag (> 0)
    model.h1/h2/h3   applied field components (default 0)
    model.m3_enabled evolve the out-of-plane component (default true)
    grid.n           nodes per side of the unit square (>= 3)
    solver.delta_t   time step (> 0)                      [required]
    solver.max_time  final time (>= 0)                    [required]
    solver.epsilon   inner-iteration tolerance (default 1e-6)
    solver.max_inner_iters  cap on linearization passes (default 50)
    solver.steady_tol       early-stop threshold on the per-step state
                            change, 0 disables (default 1e-8)
    solver.record_every     energy recording cadence in steps (default 1)
    solver.linear_mode      drop reaction terms (default false)
    scenario.kind    degree_k | tangent | smooth
    scenario.k       winding degree, degree_k only (default 1)
    scenario.m3_b    boundary out-of-plane value (default 0)
    scenario.c1_init tangent initial-seed amplitude (default 0)
    scenario.m3_i    tangent initial out-of-plane value (default 0)
    output.directory       where run artifacts go (default "out")
    output.snapshot_every  intermediate snapshot cadence, 0 = endpoints
                           only (default 0)

Unknown keys are hard errors; all missing required keys are reported at
once, each error naming the key and line.  parse_config(render_config(c))
reproduces c exactly (floats are rendered with repr, which round-trips).

The `smooth` scenario is compatible smooth verification data: every evolved
field starts as amplitude * sin(pi x) * sin(pi y) with homogeneous Dirichlet
values, so convergence studies run on data with classical regularity and no
initial-boundary incompatibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .bc import BoundaryData, _edge_only, degree_k_boundary, degree_k_initial, tangent_bc, tangent_ic
from .grid import FieldState, MField, ModelParams, QField, make_grid
from .solver import SolverConfig

__all__ = [
    "ConfigError",
    "Scenario",
    "RunConfig",
    "parse_config",
    "render_config",
    "build_problem",
    "SMOOTH_AMPLITUDES",
]


class ConfigError(ValueError):
    """One or more configuration problems; str() lists them all."""

    def __init__(self, issues: list[str]):
        self.issues = list(issues)
        super().__init__("\n".join(self.issues))


SCENARIO_KINDS = ("degree_k", "tangent", "smooth")


@dataclass(frozen=True)
class Scenario:
    """Initial/boundary data selection."""

    kind: str
    k: int = 1
    m3_b: float = 0.0
    c1_init: float = 0.0
    m3_i: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"scenario.kind must be one of {SCENARIO_KINDS}, got {self.kind!r}")
        if self.k < 1:
            raise ValueError(f"scenario.k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one run."""

    model: ModelParams
    solver: SolverConfig
    n: int
    scenario: Scenario
    output_dir: str = "out"
    snapshot_every: int = 0

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"grid.n must be >= 3, got {self.n}")
        if self.snapshot_every < 0:
            raise ValueError(f"output.snapshot_every must be >= 0, got {self.snapshot_every}")

    def with_overrides(self, **kw) -> "RunConfig":
        """Copy with replacements; solver keys are routed to the SolverConfig."""
        solver_keys = {"delta_t", "max_time", "epsilon", "max_inner_iters",
                       "steady_tol", "record_every", "linear_mode"}
        solver_kw = {k: kw.pop(k) for k in list(kw) if k in solver_keys}
        cfg = self
        if solver_kw:
            cfg = replace(cfg, solver=replace(cfg.solver, **solver_kw))
        if kw:
            cfg = replace(cfg, **kw)
        return cfg


# key -> (converter name, required, default); defaults of None mean the
# dataclass default applies / the key is mandatory.
_SCHEMA: dict[str, tuple[str, bool]] = {
    "model.l1_prime": ("float", True),
    "model.l2": ("float", True),
    "model.c1": ("float", True),
    "model.c2": ("float", True),
    "model.c3": ("float", True),
    "model.xi": ("float", True),
    "model.eta1": ("float", True),
    "model.eta2": ("float", True),
    "model.h1": ("float", False),
    "model.h2": ("float", False),
    "model.h3": ("float", False),
    "model.m3_enabled": ("bool", False),
    "grid.n": ("int", True),
    "solver.delta_t": ("float", True),
    "solver.max_time": ("float", True),
    "solver.epsilon": ("float", False),
    "solver.max_inner_iters": ("int", False),
    "solver.steady_tol": ("float", False),
    "solver.record_every": ("int", False),
    "solver.linear_mode": ("bool", False),
    "scenario.kind": ("str", True),
    "scenario.k": ("int", False),
    "scenario.m3_b": ("float", False),
    "scenario.c1_init": ("float", False),
    "scenario.m3_i": ("float", False),
    "output.directory": ("str", False),
    "output.snapshot_every": ("int", False),
}

_DEFAULTS = {
    "model.h1": 0.0,
    "model.h2": 0.0,
    "model.h3": 0.0,
    "model.m3_enabled": True,
    "solver.epsilon": 1e-6,
    "solver.max_inner_iters": 50,
    "solver.steady_tol": 1e-8,
    "solver.record_every": 1,
    "solver.linear_mode": False,
    "scenario.k": 1,
    "scenario.m3_b": 0.0,
    "scenario.c1_init": 0.0,
    "scenario.m3_i": 0.0,
    "output.directory": "out",
    "output.snapshot_every": 0,
}

# (key, predicate, requirement text) checked with line context before assembly
_CONSTRAINTS = [
    ("model.l1_prime", lambda v: v > 0, "must be > 0"),
    ("model.l2", lambda v: v > 0, "must be > 0"),
    ("model.c1", lambda v: v >= 0, "must be >= 0"),
    ("model.c2", lambda v: v >= 0, "must be >= 0"),
    ("model.c3", lambda v: v >= 0, "must be >= 0"),
    ("model.xi", lambda v: v > 0, "must be > 0"),
    ("model.eta1", lambda v: v > 0, "must be > 0"),
    ("model.eta2", lambda v: v > 0, "must be > 0"),
    ("grid.n", lambda v: v >= 3, "must be >= 3"),
    ("solver.delta_t", lambda v: v > 0, "must be > 0"),
    ("solver.max_time", lambda v: v >= 0, "must be >= 0"),
    ("solver.epsilon", lambda v: v > 0, "must be > 0"),
    ("solver.max_inner_iters", lambda v: v >= 1, "must be >= 1"),
    ("solver.steady_tol", lambda v: v >= 0, "must be >= 0"),
    ("solver.record_every", lambda v: v >= 1, "must be >= 1"),
    ("scenario.kind", lambda v: v in SCENARIO_KINDS, f"must be one of {SCENARIO_KINDS}"),
    ("scenario.k", lambda v: v >= 1, "must be >= 1"),
    ("output.snapshot_every", lambda v: v >= 0, "must be >= 0"),
]


def _convert(kind: str, raw: str):
    if kind == "float":
        v = float(raw)
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v
    if kind == "int":
        return int(raw, 10)
    if kind == "bool":
        low = raw.lower()
        if low in ("true", "false"):
            return low == "true"
        raise ValueError("expected true or false")
    return raw


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a flat config document.

    Raises ConfigError listing every unknown key, parse failure, missing
    required key, and constraint violation, each with key name and (where
    applicable) line number.
    """
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    issues: list[str] = []

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            issues.append(f"line {lineno}: expected `key = value`, got {rawline.strip()!r}")
            continue
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _SCHEMA:
            issues.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in values:
            issues.append(f"line {lineno}: duplicate key {key!r} (first set on line {lines[key]})")
            continue
        kind, _required = _SCHEMA[key]
        try:
            values[key] = _convert(kind, raw)
        except ValueError as err:
            what = str(err) or f"not a valid {kind}"
            issues.append(f"line {lineno}: {key}: could not parse {raw!r} as {kind} ({what})")
            continue
        lines[key] = lineno

    for key, (_kind, required) in _SCHEMA.items():
        if required and key not in values:
            issues.append(f"missing required key {key!r}")
    for key, default in _DEFAULTS.items():
        values.setdefault(key, default)

    for key, ok, req in _CONSTRAINTS:
        if key in values and not ok(values[key]):
            where = f" (line {lines[key]})" if key in lines else ""
            issues.append(f"{key}{where}: {req}, got {values[key]!r}")

    if issues:
        raise ConfigError(issues)

    model = ModelParams(
        l1=values["model.l1_prime"] / 2.0,
        l2=values["model.l2"],
        c1=values["model.c1"],
        c2=values["model.c2"],
        c3=values["model.c3"],
        xi=values["model.xi"],
        eta1=values["model.eta1"],
        eta2=values["model.eta2"],
        h_ext=(values["model.h1"], values["model.h2"], values["model.h3"]),
        m3_enabled=values["model.m3_enabled"],
    )
    solver = SolverConfig(
        delta_t=values["solver.delta_t"],
        max_time=values["solver.max_time"],
        epsilon=values["solver.epsilon"],
        max_inner_iters=values["solver.max_inner_iters"],
        steady_tol=values["solver.steady_tol"],
        record_every=values["solver.record_every"],
        linear_mode=values["solver.linear_mode"],
    )
    scenario = Scenario(
        kind=values["scenario.kind"],
        k=values["scenario.k"],
        m3_b=values["scenario.m3_b"],
        c1_init=values["scenario.c1_init"],
        m3_i=values["scenario.m3_i"],
    )
    return RunConfig(
        model=model,
        solver=solver,
        n=values["grid.n"],
        scenario=scenario,
        output_dir=values["output.directory"],
        snapshot_every=values["output.snapshot_every"],
    )


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_config(cfg: RunConfig) -> str:
    """Canonical text form; parse_config(render_config(cfg)) == cfg."""
    m, s, sc = cfg.model, cfg.solver, cfg.scenario
    pairs = [
        ("model.l1_prime", 2.0 * m.l1),
        ("model.l2", m.l2),
        ("model.c1", m.c1),
        ("model.c2", m.c2),
        ("model.c3", m.c3),
        ("model.xi", m.xi),
        ("model.eta1", m.eta1),
        ("model.eta2", m.eta2),
        ("model.h1", m.h_ext[0]),
        ("model.h2", m.h_ext[1]),
        ("model.h3", m.h_ext[2]),
        ("model.m3_enabled", m.m3_enabled),
        ("grid.n", cfg.n),
        ("solver.delta_t", s.delta_t),
        ("solver.max_time", s.max_time),
        ("solver.epsilon", s.epsilon),
        ("solver.max_inner_iters", s.max_inner_iters),
        ("solver.steady_tol", s.steady_tol),
        ("solver.record_every", s.record_every),
        ("solver.linear_mode", s.linear_mode),
        ("scenario.kind", sc.kind),
        ("scenario.k", sc.k),
        ("scenario.m3_b", sc.m3_b),
        ("scenario.c1_init", sc.c1_init),
        ("scenario.m3_i", sc.m3_i),
        ("output.directory", cfg.output_dir),
        ("output.snapshot_every", cfg.snapshot_every),
    ]
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in pairs)


# amplitudes of the smooth verification scenario, per field
SMOOTH_AMPLITUDES = {"q11": 1.0, "q12": 0.8, "m1": 0.6, "m2": 0.4, "m3": 0.5}


def _smooth_data(grid) -> tuple[FieldState, BoundaryData]:
    x, y = grid.coords()
    base = np.sin(math.pi * x) * np.sin(math.pi * y)
    full = {k: a * base for k, a in SMOOTH_AMPLITUDES.items()}
    state = FieldState(
        grid,
        QField(full["q11"].copy(), full["q12"].copy()),
        MField(full["m1"].copy(), full["m2"].copy(), full["m3"].copy()),
    )
    bdata = BoundaryData(grid, *(_edge_only(full[k]) for k in ("q11", "q12", "m1", "m2", "m3")))
    return state, bdata


def build_problem(cfg: RunConfig):
    """(initial state, boundary data, model params, solver config) for cfg."""
    grid = make_grid(cfg.n)
    sc = cfg.scenario
    if sc.kind == "degree_k":
        state = degree_k_initial(grid, sc.k)
        boundary = degree_k_boundary(grid, sc.k, sc.m3_b)
    elif sc.kind == "tangent":
        state = tangent_ic(grid, sc.c1_init, sc.m3_i)
        boundary = tangent_bc(grid, sc.m3_b)
    else:  # smooth
        state, boundary = _smooth_data(grid)
    return state, boundary, cfg.model, cfg.solver
