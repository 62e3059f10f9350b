"""Run orchestration: stepping loop, error norms, front-speed measurement,
work counters and layout projection for mixed-layer-count comparisons."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .cases import CaseSpec, build_problem
from .integrators import (IMEXIntegrator, RK3Integrator, adaptive_dt,
                          courant_numbers, StepFailure)
from .layers import LayerLayout, refine_parent
from .spatial import Grid
from .state import DryStateError, State, total_density_mass, total_volume


@dataclass
class RunReport:
    case: str
    integrator: str
    steps: int = 0
    n_rhs: int = 0
    n_implicit: int = 0
    wall_time: float = 0.0
    verdict: str = "completed"          # or "unstable"
    t_end: float = 0.0
    max_ccel: float = 0.0
    max_cvel: float = 0.0
    volume_drift: float = 0.0           # relative, vs initial
    density_mass_drift: float = 0.0
    errors: dict = field(default_factory=dict)


@dataclass
class RunResult:
    spec: CaseSpec
    grid: Grid
    times: list
    states: list
    report: RunReport

    def state_at(self, t: float) -> State:
        k = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        if abs(self.times[k] - t) > 1e-6 * max(1.0, abs(t)):
            raise KeyError(f"no snapshot near t={t}")
        return self.states[k]


def run_case(spec: CaseSpec, grid: Grid | None = None,
             state: State | None = None) -> RunResult:
    """Advance a case to t_final, saving snapshots at the output cadence.

    Instability (non-finite fields, dry cells, runaway velocities) is
    recorded in the report verdict instead of raising.
    """
    if grid is None or state is None:
        grid, state = build_problem(spec)
    if spec.integrator == "rk3":
        integ = RK3Integrator(grid, limiter=spec.limiter)
    elif spec.integrator == "imex":
        integ = IMEXIntegrator(grid, limiter=spec.limiter)
    else:
        raise ValueError(f"unknown integrator {spec.integrator!r}")

    report = RunReport(case=spec.name, integrator=spec.integrator)
    vol0 = total_volume(state, grid.mesh)
    dm0 = total_density_mass(state, grid.mesh, grid.layout)

    t = 0.0
    times = [0.0]
    states = [state.copy()]
    next_out = spec.output_interval
    t_start = time.perf_counter()
    eps = 1e-9 * max(spec.t_final, 1.0)

    while t < spec.t_final - eps:
        if spec.dt is not None:
            dt = spec.dt
        else:
            dt = adaptive_dt(state, grid, spec.target_ccel, kind="cel",
                             dt_max=spec.dt_max)
        dt = min(dt, spec.t_final - t, next_out - t)
        try:
            new_state = integ.step(state, t, dt)
        except (StepFailure, DryStateError):
            report.verdict = "unstable"
            break
        if np.max(np.abs(new_state.u)) > spec.u_blowup:
            report.verdict = "unstable"
            break
        state = new_state
        t += dt
        report.steps += 1
        c_cel, c_vel = courant_numbers(state, grid, dt)
        report.max_ccel = max(report.max_ccel, c_cel)
        report.max_cvel = max(report.max_cvel, c_vel)
        if t >= next_out - eps:
            times.append(t)
            states.append(state.copy())
            next_out += spec.output_interval

    if report.verdict == "completed" and abs(times[-1] - t) > eps:
        times.append(t)
        states.append(state.copy())

    report.t_end = t
    report.wall_time = time.perf_counter() - t_start
    report.n_rhs = integ.n_rhs
    report.n_implicit = getattr(integ, "n_implicit", 0)
    if report.verdict == "completed":
        vol1 = total_volume(state, grid.mesh)
        dm1 = total_density_mass(state, grid.mesh, grid.layout)
        report.volume_drift = abs(vol1 - vol0) / max(abs(vol0), 1e-300)
        report.density_mass_drift = abs(dm1 - dm0) / max(abs(dm0), 1e-30)
    return RunResult(spec=spec, grid=grid, times=times, states=states,
                     report=report)


def work_counters(report: RunReport) -> dict:
    return {"steps": report.steps, "rhs_evaluations": report.n_rhs,
            "implicit_solves": report.n_implicit}


# ---------------------------------------------------------------------------
# error norms


def error_norms(state: State, ref: State, grid: Grid) -> dict:
    """Relative errors vs a reference on the same mesh and layout.

    Velocity and density errors are h-weighted l2 norms (weight dx_i times
    the local layer thickness) and plain relative l-infinity norms; the free
    surface uses standard relative norms over the cells.
    """
    mesh, layout = grid.mesh, grid.layout
    if state.eta.shape != ref.eta.shape or state.u.shape != ref.u.shape:
        raise ValueError("states live on different meshes/layouts")

    h_ref = ref.eta - mesh.b
    w = layout.l_int * h_ref[None, :] * mesh.dx[None, :]
    w = np.where(layout.active_int(), w, 0.0)

    out = {}
    d_eta = state.eta - ref.eta
    out["eta_l2"] = float(np.sqrt(np.sum(d_eta ** 2 * mesh.dx)
                                  / np.sum(ref.eta ** 2 * mesh.dx)))
    out["eta_linf"] = float(np.max(np.abs(d_eta)) / np.max(np.abs(ref.eta)))

    # velocities sampled at the right interface of each cell
    du = state.u[:, 1:] - ref.u[:, 1:]
    uref = ref.u[:, 1:]
    num = np.sum(du ** 2 * w)
    den = np.sum(uref ** 2 * w)
    out["u_l2"] = float(np.sqrt(num / den)) if den > 0 else float(np.sqrt(num))
    umax = np.max(np.abs(uref))
    out["u_linf"] = float(np.max(np.abs(du)) / umax) if umax > 0 else float(
        np.max(np.abs(du)))

    drho = state.rho - ref.rho
    drho = np.where(layout.active_int(), drho, 0.0)
    rref = np.where(layout.active_int(), ref.rho, 0.0)
    num = np.sum(drho ** 2 * w)
    den = np.sum(rref ** 2 * w)
    out["rho_l2"] = float(np.sqrt(num / den)) if den > 0 else float(np.sqrt(num))
    rmax = np.max(np.abs(rref))
    out["rho_linf"] = float(np.max(np.abs(drho)) / rmax) if rmax > 0 else float(
        np.max(np.abs(drho)))
    return out


def project_state(state: State, layout_src: LayerLayout,
                  layout_dst: LayerLayout, mesh) -> State:
    """Re-express a state on a finer (or equal) target layout by copying each
    parent layer's velocity/density into its children columnwise."""
    n_dst = layout_dst.n_max
    M = mesh.M
    u = np.zeros((n_dst, M + 1))
    rho = np.zeros((n_dst, M))
    cache = {}

    def parent_map(l_src, l_dst):
        key = (tuple(np.round(l_src, 15)), tuple(np.round(l_dst, 15)))
        if key not in cache:
            cache[key] = refine_parent(l_src, l_dst)
        return cache[key]

    for j in range(M + 1):
        ns, nd = layout_src.n_half[j], layout_dst.n_half[j]
        if ns == nd:
            u[:nd, j] = state.u[:nd, j]
        else:
            p = parent_map(layout_src.l_half[:ns, j], layout_dst.l_half[:nd, j])
            u[:nd, j] = state.u[p, j]
    for i in range(M):
        ns, nd = layout_src.n_int[i], layout_dst.n_int[i]
        if ns == nd:
            rho[:nd, i] = state.rho[:nd, i]
        else:
            p = parent_map(layout_src.l_int[:ns, i], layout_dst.l_int[:nd, i])
            rho[:nd, i] = state.rho[p, i]
    return State(eta=state.eta.copy(), u=u, rho=rho)


# ---------------------------------------------------------------------------
# front tracking


def _crossing(x, values, threshold, side: str) -> float:
    """Interpolated x where values cross the threshold; side selects the
    farthest crossing ("max" rightmost, "min" leftmost)."""
    v = np.asarray(values)
    above = v >= threshold
    idx = np.nonzero(above[:-1] != above[1:])[0]
    if idx.size == 0:
        return np.nan
    k = idx[-1] if side == "max" else idx[0]
    x0, x1 = x[k], x[k + 1]
    v0, v1 = v[k], v[k + 1]
    if v1 == v0:
        return 0.5 * (x0 + x1)
    return float(x0 + (threshold - v0) * (x1 - x0) / (v1 - v0))


def front_positions(result: RunResult, threshold: float = 0.015):
    """(times, surface positions, bottom positions) of the density front."""
    grid = result.grid
    x = grid.mesh.x_center
    tops, bots = [], []
    cols = np.arange(grid.mesh.M)
    top_idx = grid.layout.n_int - 1
    for s in result.states:
        rho_top = s.rho[top_idx, cols]
        rho_bot = s.rho[0, :]
        tops.append(_crossing(x, rho_top, threshold, "max"))
        bots.append(_crossing(x, rho_bot, threshold, "min"))
    return np.asarray(result.times), np.asarray(tops), np.asarray(bots)


def front_speed(result: RunResult, threshold: float = 0.015,
                window=(2.0, 10.0)):
    """(surface speed, bottom speed) in m/s by a least-squares fit of the
    front positions against time inside the window. NaN if no front."""
    t, tops, bots = front_positions(result, threshold)
    sel = (t >= window[0]) & (t <= window[1])

    def fit(pos):
        m = sel & np.isfinite(pos)
        if np.count_nonzero(m) < 2:
            return float("nan")
        slope = np.polyfit(t[m], pos[m], 1)[0]
        return float(abs(slope))

    return fit(tops), fit(bots)
