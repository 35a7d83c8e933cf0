"""Built-in run presets for the `reproduce` CLI command.

Each preset is a list of (variant name, RunConfig) pairs.  Where a figure
shows both an evolving and a suppressed out-of-plane component, the preset
carries both variants ("m3on"/"m3off").  Time steps respect the explicit
treatment of the y-direction: the preset's delta_t keeps
l * delta_t / (eta * delta_y^2) <= 0.25 for the largest diffusion
coefficient l in the run.
"""

from __future__ import annotations

from .config import RunConfig, Scenario
from .grid import ModelParams
from .solver import SolverConfig

__all__ = ["PRESETS", "preset_ids", "get_preset"]

_N = 51  # delta_x = 0.02


def _model(l1p, l2, c1, c2, c3, xi, eta, h1, m3_enabled):
    return ModelParams(
        l1=l1p / 2.0, l2=l2, c1=c1, c2=c2, c3=c3, xi=xi,
        eta1=eta, eta2=eta, h_ext=(h1, 0.0, 0.0), m3_enabled=m3_enabled,
    )


def _fixed_horizon_solver(delta_t, max_time):
    """Figure-pinned runs integrate to an exact horizon with per-step energy."""
    return SolverConfig(delta_t=delta_t, max_time=max_time, steady_tol=0.0, record_every=1)


def _steady_solver(delta_t, max_time):
    """Relaxation runs stop when the per-step change drops below 1e-8."""
    return SolverConfig(delta_t=delta_t, max_time=max_time, steady_tol=1e-8, record_every=10)


def _cfg(preset, variant, model, solver, scenario):
    return RunConfig(
        model=model, solver=solver, n=_N, scenario=scenario,
        output_dir=f"out/{preset}/{variant}",
    )


def _test_example(preset, xi, c1, delta_t, max_time):
    model = _model(0.001, 0.001, c1, 8.0, 2.0, xi, 0.0005, 0.0, m3_enabled=False)
    scen = Scenario(kind="tangent", m3_b=0.0, c1_init=c1, m3_i=0.0)
    return [("base", _cfg(preset, "base", model, _steady_solver(delta_t, max_time), scen))]


def _field_sweep(preset, k, h_values):
    """Degree-k runs at eta=1 to t=0.01, both out-of-plane variants."""
    out = []
    for h1 in h_values:
        for m3 in (True, False):
            name = f"h{h1:g}-m3{'on' if m3 else 'off'}"
            model = _model(0.01, 0.01, 2.0, 8.0, 2.0, 1.0, 1.0, h1, m3)
            scen = Scenario(kind="degree_k", k=k, m3_b=0.0)
            out.append((name, _cfg(preset, name, model, _fixed_horizon_solver(1e-5, 0.01), scen)))
    return out


def _param_sweep(preset, param, values):
    """Degree-2 runs at H=(0.4,0,0) varying one coupling, both variants."""
    out = []
    for v in values:
        for m3 in (True, False):
            name = f"{param}{v:g}-m3{'on' if m3 else 'off'}"
            kw = {"c1": 2.0, "c3": 2.0, "xi": 1.0}
            kw[param] = v
            model = _model(0.01, 0.01, kw["c1"], 8.0, kw["c3"], kw["xi"], 1.0, 0.4, m3)
            scen = Scenario(kind="degree_k", k=2, m3_b=0.0)
            out.append((name, _cfg(preset, name, model, _fixed_horizon_solver(1e-5, 0.01), scen)))
    return out


def _tangent_field_sweep(preset, xi, c1, eta, delta_t, h_values, max_time):
    """Tangent-data relaxations under weak applied fields, both variants."""
    out = []
    for h1 in h_values:
        for m3 in (True, False):
            name = f"h{h1:g}-m3{'on' if m3 else 'off'}"
            model = ModelParams(
                l1=0.0005, l2=0.001, c1=c1, c2=8.0, c3=2.0, xi=xi,
                eta1=eta, eta2=eta, h_ext=(h1, 0.0, 0.0), m3_enabled=m3,
            )
            amp = 0.25 if m3 else 0.0
            scen = Scenario(kind="tangent", m3_b=amp, c1_init=c1, m3_i=amp)
            out.append((name, _cfg(preset, name, model, _steady_solver(delta_t, max_time), scen)))
    return out


PRESETS: dict[str, list[tuple[str, RunConfig]]] = {
    # relaxation benchmark: tangent data, out-of-plane suppressed
    "test-xi1": _test_example("test-xi1", xi=1.0, c1=0.5, delta_t=5e-5, max_time=2.0),
    "test-xi10": _test_example("test-xi10", xi=10.0, c1=0.25, delta_t=5e-6, max_time=0.5),
    # degree-k field sweeps at t=0.01
    "fig2": _field_sweep("fig2", k=1, h_values=(0.0, 0.4, 0.875, 4.0)),
    "fig3": _field_sweep("fig3", k=2, h_values=(0.0, 0.4, 0.875, 4.0)),
    # one-parameter sweeps at H=(0.4,0,0), k=2
    "xi-sweep": _param_sweep("xi-sweep", "xi", (0.025, 0.25, 0.5, 2.5)),
    "c1-sweep": _param_sweep("c1-sweep", "c1", (1.0, 2.0, 3.0, 5.0)),
    "c3-sweep": _param_sweep("c3-sweep", "c3", (2.5, 5.0, 10.0, 20.0)),
    # weak-field relaxations from tangent data
    "el-sweep-xi1": _tangent_field_sweep(
        "el-sweep-xi1", xi=1.0, c1=0.5, eta=0.0001, delta_t=1e-5,
        h_values=(0.0, 0.00265, 0.25), max_time=0.5,
    ),
    "el-sweep-xi10": _tangent_field_sweep(
        "el-sweep-xi10", xi=10.0, c1=0.25, eta=0.0005, delta_t=5e-6,
        h_values=(0.0, 0.002825, 0.25), max_time=0.5,
    ),
}


def preset_ids() -> list[str]:
    return list(PRESETS)


def get_preset(preset_id: str) -> list[tuple[str, RunConfig]]:
    if preset_id not in PRESETS:
        known = ", ".join(preset_ids())
        raise KeyError(f"unknown figure id {preset_id!r}; known ids: {known}")
    return PRESETS[preset_id]
