"""Acceptance gate: one test per acceptance criterion, at the stated
tolerances; `pytest -v tests/test_acceptance.py` yields one pass/fail line
per criterion.

The expensive preset trajectories are computed once per module and shared
across criteria.  Some clauses encode targets the implemented scheme cannot
meet; they are asserted exactly as stated and fail with the measured values
in the message:

* criterion 05, temporal clauses: the y-direction of the integrator is
  explicit in time, so temporal self-convergence is first order (the
  spatial order is 2 as required);
* criterion 06, position clause: the relaxed defect pair sits at
  (0.42,0.42)/(0.58,0.58) on the 51x51 grid, Euclidean distance 0.113
  from the center;
* criterion 08: with eta=1 and H=(4,0,0) the field forcing moves q11 by
  about 0.64 and m1 by about 0.08 per 0.01 time units, so alignment above
  0.99 is not reachable at the pinned horizon t=0.01 (extended runs reach
  0.99 director alignment near t~0.1);
* criterion 10: the scanned minimizer of the shifted bulk potential
  deviates from the quoted closed-form amplitudes (their small-xi limit)
  by more than 1e-6 already at xi=0.01.
"""

from __future__ import annotations

import hashlib
import math
import time
from pathlib import Path

import numpy as np
import pytest

from ferro2d import (
    MField,
    ModelParams,
    QField,
    alignment_metric,
    convergence_study,
    build_problem,
    dissipation_violations,
    el_residual,
    energy_lower_bound,
    find_defects,
    k_xi_minimizer,
    linf_stats,
    make_grid,
    parse_config,
    run,
    thomas_solve,
    total_energy,
    write_energy_series,
    write_iteration_series,
    write_snapshot,
)
from ferro2d.presets import get_preset

EPSILON = 1e-6

# Order-verification study configurations (kept in sync with
# scripts/convergence_tables.py).
LINEAR_STUDY = """
model.l1_prime = 0.5
model.l2 = 0.5
model.c1 = 0.0
model.c2 = 0.0
model.c3 = 0.0
model.xi = 1.0
model.eta1 = 1.0
model.eta2 = 1.0
grid.n = 51
solver.delta_t = 1e-5
solver.max_time = 0.01
solver.linear_mode = true
scenario.kind = smooth
"""

FULL_STUDY = """
model.l1_prime = 0.01
model.l2 = 0.01
model.c1 = 2.0
model.c2 = 8.0
model.c3 = 2.0
model.xi = 1.0
model.eta1 = 1.0
model.eta2 = 1.0
grid.n = 51
solver.delta_t = 1e-5
solver.max_time = 0.005
scenario.kind = smooth
"""

# At the field-sweep horizon t=0.01 the defect cores are only partially
# developed: measured minimum core values across the sweep variants are
# 1.6e-4..0.18 for the tensor order (far-field 1.0) and 0.40..0.53 for the
# planar magnetization (far-field 3.0).  Detection therefore uses absolute
# cutoffs sitting between the measured core depths and the far-field levels.
Q_DETECT = 0.3
M_DETECT = 0.6

XI_SWEEP_VALUES = ("0.25", "0.5", "2.5")


def _execute(cfg):
    state, boundary, params, solver = build_problem(cfg)
    return run(state, boundary, params, solver)


@pytest.fixture(scope="module")
def fig2_runs():
    return {name: _execute(cfg) for name, cfg in get_preset("fig2")}


@pytest.fixture(scope="module")
def fig3_runs():
    return {name: _execute(cfg) for name, cfg in get_preset("fig3")}


@pytest.fixture(scope="module")
def xi_sweep_runs():
    available = dict(get_preset("xi-sweep"))
    names = [
        f"xi{val}-{flag}" for val in XI_SWEEP_VALUES for flag in ("m3on", "m3off")
    ]
    return {name: _execute(available[name]) for name in names}


@pytest.fixture(scope="module")
def relaxed_runs():
    out = {}
    for preset_id in ("test-xi1", "test-xi10"):
        [(_, cfg)] = get_preset(preset_id)
        out[preset_id] = _execute(cfg)
    return out


@pytest.fixture(scope="module")
def all_runs(fig2_runs, fig3_runs, xi_sweep_runs, relaxed_runs):
    out = {}
    for prefix, runs in (
        ("fig2", fig2_runs),
        ("fig3", fig3_runs),
        ("xi-sweep", xi_sweep_runs),
    ):
        out.update({f"{prefix}/{name}": res for name, res in runs.items()})
    out.update(relaxed_runs)
    return out


def test_criterion_01_gradient_consistency():
    """el_residual equals the negative nodal gradient of total_energy."""
    t0 = time.monotonic()
    rng = np.random.default_rng(20260817)
    g = make_grid(8)
    p = ModelParams(
        l1=0.3, l2=0.7, c1=1.2, c2=0.8, c3=1.1, xi=1.9,
        eta1=1.0, eta2=1.0, h_ext=(0.5, -0.2, 0.3),
    )
    cell = g.delta_x * g.delta_y
    h = 1e-6
    worst = 0.0
    for _ in range(20):
        q = QField(rng.uniform(-2, 2, g.shape), rng.uniform(-2, 2, g.shape))
        m = MField(*(rng.uniform(-2, 2, g.shape) for _ in range(3)))
        r = el_residual(q, m, p, g)
        resid = dict(zip(("q11", "q12", "m1", "m2", "m3"), r.arrays()))
        scale = max(float(np.abs(a).max()) for a in r.arrays())
        for name, arr in (
            ("q11", q.q11), ("q12", q.q12),
            ("m1", m.m1), ("m2", m.m2), ("m3", m.m3),
        ):
            for i in range(1, 7):
                for j in range(1, 7):
                    keep = arr[i, j]
                    arr[i, j] = keep + h
                    e_plus = total_energy(q, m, p, g).total
                    arr[i, j] = keep - h
                    e_minus = total_energy(q, m, p, g).total
                    arr[i, j] = keep
                    grad = (e_plus - e_minus) / (2.0 * h) / cell
                    worst = max(worst, abs(grad + resid[name][i, j]) / scale)
    elapsed = time.monotonic() - t0
    assert worst < 1e-6, f"worst relative gradient mismatch {worst:.3e}"
    assert elapsed < 5.0, f"took {elapsed:.2f}s (budget 5s)"


def test_criterion_02_tridiagonal_oracle():
    """thomas_solve equals dense elimination on diagonally dominant systems."""
    t0 = time.monotonic()
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 65))
        a = rng.uniform(-1, 1, n - 1)
        c = rng.uniform(-1, 1, n - 1)
        b = rng.uniform(2.5, 4.0, n) * rng.choice([-1.0, 1.0], n)
        d = rng.uniform(-1, 1, n)
        dense = np.diag(b) + np.diag(a, -1) + np.diag(c, 1)
        want = np.linalg.solve(dense, d)
        got = np.asarray(thomas_solve(a, b, c, d))
        denom = max(1.0, float(np.abs(want).max()))
        rel = float(np.abs(got - want).max()) / denom
        assert rel < 1e-12, f"system n={n}: relative error {rel:.3e}"
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0, f"took {elapsed:.2f}s (budget 1s)"


def test_criterion_03_energy_dissipation(fig2_runs):
    """Recorded energy never rises beyond 1e-8*(1+|E|) between steps."""
    problems = []
    for name, res in sorted(fig2_runs.items()):
        violations = dissipation_violations(res.energy_series, rel_tol=1e-8)
        if violations:
            problems.append(f"{name}: {violations} dissipation violations")
    assert not problems, "; ".join(problems)


def test_criterion_04_stopping_criterion(all_runs):
    """Every committed step meets the 1e-6 inner tolerance, and the
    relaxation runs' per-step change decays below 1e-6 with a nonincreasing
    tail (monotone after transient)."""
    problems = []
    for label, res in sorted(all_runs.items()):
        worst = max(r.final_increment_norm for r in res.step_reports)
        if not worst < EPSILON:
            problems.append(f"{label}: committed step with increment {worst:.3e}")
    for label in ("test-xi1", "test-xi10"):
        norms = [r.state_change_norm for r in all_runs[label].step_reports]
        n = len(norms)
        k0 = n - 1
        while k0 > 0 and norms[k0 - 1] >= norms[k0]:
            k0 -= 1
        if not norms[-1] < EPSILON:
            problems.append(
                f"{label}: final per-step change {norms[-1]:.3e} never reaches 1e-6"
            )
        if k0 > n // 2:
            problems.append(
                f"{label}: nonincreasing tail only from step {k0} of {n}"
            )
    assert not problems, "; ".join(problems)


def test_criterion_05_convergence_orders():
    """Self-convergence orders: pure-diffusion mode 2.0 +- 0.3 in space and
    time; full model at least 1.7; both studies within a 10-minute budget."""
    t0 = time.monotonic()
    linear = convergence_study(parse_config(LINEAR_STUDY))
    full = convergence_study(parse_config(FULL_STUDY))
    elapsed = time.monotonic() - t0
    problems = []
    if abs(linear.estimated_spatial_order - 2.0) > 0.3:
        problems.append(
            f"linear spatial order {linear.estimated_spatial_order:.4f} outside 2.0+-0.3"
        )
    if abs(linear.estimated_temporal_order - 2.0) > 0.3:
        problems.append(
            f"linear temporal order {linear.estimated_temporal_order:.4f} outside 2.0+-0.3"
        )
    if full.estimated_spatial_order < 1.7:
        problems.append(
            f"full spatial order {full.estimated_spatial_order:.4f} < 1.7"
        )
    if full.estimated_temporal_order < 1.7:
        problems.append(
            f"full temporal order {full.estimated_temporal_order:.4f} < 1.7"
        )
    if elapsed >= 600.0:
        problems.append(f"took {elapsed:.1f}s (budget 600s)")
    assert not problems, "; ".join(problems)


def test_criterion_06_relaxed_defect_pair(relaxed_runs):
    """Tangent-data relaxations end with exactly two +1/2 tensor defects and
    one +1 vortex, all within 0.1 of the square center."""
    problems = []
    for label, res in sorted(relaxed_runs.items()):
        found = find_defects(res.final_state.q, res.final_state.m)
        q_windings = [d.winding for d in found.q_defects]
        m_windings = [d.winding for d in found.m_defects]
        if q_windings != [0.5, 0.5]:
            problems.append(f"{label}: tensor defect windings {q_windings}")
        if m_windings != [1.0]:
            problems.append(f"{label}: vortex windings {m_windings}")
        for d in (*found.q_defects, *found.m_defects):
            dist = math.hypot(d.x - 0.5, d.y - 0.5)
            if dist > 0.1:
                problems.append(
                    f"{label}: {d.kind}-defect at ({d.x:.2f},{d.y:.2f}) "
                    f"lies {dist:.4f} from the center"
                )
    assert not problems, "; ".join(problems)


def test_criterion_07_topology_conservation(fig2_runs, fig3_runs):
    """In every completed degree-k sweep with interior defects, the vortex
    windings sum to k and the (q11,q12)-vector windings to 2k."""
    problems = []
    for k, prefix, runs in ((1, "fig2", fig2_runs), (2, "fig3", fig3_runs)):
        for name, res in sorted(runs.items()):
            label = f"{prefix}/{name}"
            horizon = round(res.config.max_time / res.config.delta_t)
            if len(res.step_reports) != horizon:
                problems.append(
                    f"{label}: stopped after {len(res.step_reports)}/{horizon} steps"
                )
                continue
            dq = find_defects(res.final_state.q, res.final_state.m, threshold=Q_DETECT)
            dm = find_defects(res.final_state.q, res.final_state.m, threshold=M_DETECT)
            if not dq.q_defects or not dm.m_defects:
                problems.append(f"{label}: no interior defects detected")
                continue
            if dq.total_q_vector_winding != 2.0 * k:
                problems.append(
                    f"{label}: tensor vector winding "
                    f"{dq.total_q_vector_winding:+g} != {2 * k:+d}"
                )
            if dm.total_m_winding != float(k):
                problems.append(
                    f"{label}: vortex winding {dm.total_m_winding:+g} != {k:+d}"
                )
    assert not problems, "; ".join(problems)


def test_criterion_08_strong_field_alignment(fig2_runs):
    """Director and magnetization co-align with the strong in-plane field."""
    problems = []
    for name in ("h4-m3on", "h4-m3off"):
        res = fig2_runs[name]
        a_dir = alignment_metric(res.final_state.q, (1.0, 0.0), margin=0.1)
        a_mag = alignment_metric(res.final_state.m, (1.0, 0.0), margin=0.1)
        if not a_dir > 0.99:
            problems.append(f"{name}: director alignment {a_dir:.4f} <= 0.99")
        if not a_mag > 0.99:
            problems.append(f"{name}: magnetization alignment {a_mag:.4f} <= 0.99")
    assert not problems, "; ".join(problems)


def test_criterion_09_xi_monotone_linf(xi_sweep_runs):
    """Interior field maxima are nonincreasing in xi (1e-3 slack)."""
    problems = []
    for flag in ("m3on", "m3off"):
        chain_q, chain_m = [], []
        for val in XI_SWEEP_VALUES:
            res = xi_sweep_runs[f"xi{val}-{flag}"]
            max_q, max_m = linf_stats(
                res.final_state.q, res.final_state.m, interior_margin=0.1
            )
            chain_q.append(max_q)
            chain_m.append(max_m)
        for what, chain in (("max|Q|", chain_q), ("max|M|", chain_m)):
            if any(b > a + 1e-3 for a, b in zip(chain, chain[1:])):
                shown = ", ".join(f"{v:.6f}" for v in chain)
                problems.append(f"{flag}: {what} chain [{shown}] increases")
    assert not problems, "; ".join(problems)


def test_criterion_10_boundary_amplitude_closed_form():
    """The scanned minimizer of the shifted bulk potential matches the
    quoted closed-form boundary amplitudes to 1e-6."""
    beta = 1.0
    problems = []
    for xi in (0.01, 0.1, 1.0):
        tau, gamma, _ = k_xi_minimizer(beta, xi)
        tau_quoted = math.sqrt(1.0 + 2.0 * beta**2 * xi + beta * xi)
        gamma_quoted = math.sqrt(2.0 * beta + 1.0)
        err = max(abs(tau - tau_quoted), abs(gamma - gamma_quoted))
        if not err <= 1e-6:
            problems.append(
                f"xi={xi:g}: |Q| {tau:.9f} vs quoted {tau_quoted:.9f}, "
                f"|M| {gamma:.9f} vs quoted {gamma_quoted:.9f} (err {err:.2e})"
            )
    assert not problems, "; ".join(problems)


def test_criterion_11_energy_lower_bound(all_runs):
    """No recorded energy falls below the closed-form lower bound."""
    problems = []
    for label, res in sorted(all_runs.items()):
        h_norm = float(np.linalg.norm(res.params.h_ext))
        bound = energy_lower_bound(res.params, h_norm)
        e_min = min(e.total for _, e in res.energy_series)
        if e_min < bound:
            problems.append(f"{label}: energy {e_min:.6f} below bound {bound:.6f}")
    assert not problems, "; ".join(problems)


def test_criterion_12_plot_rendering(tmp_path, relaxed_runs, fig2_runs):
    """All four plot modes render headlessly from run artifacts, leave the
    inputs byte-identical, and produce nonempty image files."""
    from plotview.plots import PlotSpec, render

    def digest(path: Path) -> str:
        return hashlib.sha256(path.read_bytes()).hexdigest()

    relax = relaxed_runs["test-xi1"]
    sweep = fig2_runs["h0-m3on"]
    snap_relax = tmp_path / "relax_snapshot.csv"
    snap_sweep = tmp_path / "sweep_snapshot.csv"
    energy_csv = tmp_path / "energy.csv"
    iters_csv = tmp_path / "iterations.csv"
    write_snapshot(relax.final_state, relax.t_final, str(snap_relax))
    write_snapshot(sweep.final_state, sweep.t_final, str(snap_sweep))
    write_energy_series(relax.energy_series, str(energy_csv))
    write_iteration_series(relax, str(iters_csv))
    inputs = {p: digest(p) for p in (snap_relax, snap_sweep, energy_csv, iters_csv)}

    specs = [
        PlotSpec(str(snap_relax), "director", str(tmp_path / "relax_director.png")),
        PlotSpec(
            str(snap_relax), "magnetization", str(tmp_path / "relax_magnetization.png")
        ),
        PlotSpec(
            str(snap_sweep), "director", str(tmp_path / "sweep_director.png"), stride=5
        ),
        PlotSpec(
            str(snap_sweep), "magnetization",
            str(tmp_path / "sweep_magnetization.png"), stride=5,
        ),
        PlotSpec(str(energy_csv), "energy_series", str(tmp_path / "energy.png")),
        PlotSpec(str(iters_csv), "convergence", str(tmp_path / "convergence.png")),
    ]
    problems = []
    for spec in specs:
        render(spec)
        image = Path(spec.out)
        if not image.is_file():
            problems.append(f"{spec.mode}: no file at {image.name}")
            continue
        data = image.read_bytes()
        if not data.startswith(b"\x89PNG\r\n\x1a\n") or len(data) < 1024:
            problems.append(f"{spec.mode}: {image.name} is not a usable image")
    for path, before in inputs.items():
        if digest(path) != before:
            problems.append(f"input {path.name} was modified by rendering")
    assert not problems, "; ".join(problems)
