"""Time integrators: explicit SSP-RK3 and the semi-implicit IMEX-ARK2 step.

The IMEX step treats the barotropic pressure gradient, the mass flux and the
vertical viscous exchange implicitly; everything else (advection, transfer
terms, baroclinic pressure) stays explicit. The implicit stages are solved by
eliminating the velocities column by column (vertical tridiagonal solves) and
assembling one horizontal tridiagonal system for the free surface.

Density stages use a linearized update so that no extra linear system is
needed: each stage advects the previous stage's density with a tableau-
weighted carrier velocity, with all advective heights frozen at time level n
so that a spatially constant density stays constant whenever the velocity
field carries no vertical shear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .bc import Discharge, Elevation, Wall
from .spatial import (Grid, Tendencies, ViscousCoeffs, boundary_values,
                      compute_tendencies, density_rhs_flux, evolved_interfaces,
                      mass_transfer, prepare_fields, vertical_density_term,
                      viscous_coefficients)
from .state import State

SQRT2 = np.sqrt(2.0)


class StepFailure(RuntimeError):
    """A time step produced a non-finite or dry state."""


@dataclass(frozen=True)
class ButcherPair:
    """Additive Runge-Kutta tableau pair with shared abscissae and weights."""

    c: np.ndarray     # (3,)
    a_ex: np.ndarray  # (3, 3) strictly lower triangular
    a_im: np.ndarray  # (3, 3) lower triangular, nonzero diagonal from stage 2
    b: np.ndarray     # (3,)

    def validate(self) -> None:
        for a, strict in ((self.a_ex, True), (self.a_im, False)):
            if not np.allclose(np.sum(a, axis=1), self.c, atol=1e-14, rtol=0.0):
                raise ValueError("tableau row sums must match the abscissae")
            if strict and np.any(np.triu(a) != 0.0):
                raise ValueError("explicit tableau must be strictly lower triangular")
        if not np.allclose(self.b, self.a_im[2], atol=1e-15, rtol=0.0):
            raise ValueError("weights must equal the last implicit row (stiff accuracy)")


def ark2_tableau() -> ButcherPair:
    """Second-order ARK2 pair whose implicit part matches TR-BDF2
    (L-stable member, abscissa 2 - sqrt(2))."""
    gamma = 1.0 - 1.0 / SQRT2
    delta = 1.0 / (2.0 * SQRT2)
    c = np.array([0.0, 2.0 - SQRT2, 1.0])
    a_ex = np.array([
        [0.0, 0.0, 0.0],
        [2.0 - SQRT2, 0.0, 0.0],
        [1.0 - (3.0 + 2.0 * SQRT2) / 6.0, (3.0 + 2.0 * SQRT2) / 6.0, 0.0],
    ])
    a_im = np.array([
        [0.0, 0.0, 0.0],
        [gamma, gamma, 0.0],
        [delta, delta, gamma],
    ])
    b = np.array([delta, delta, gamma])
    pair = ButcherPair(c=c, a_ex=a_ex, a_im=a_im, b=b)
    pair.validate()
    return pair


def rk3_scalar_step(y: complex, z: complex) -> complex:
    """One SSP-RK3 step of y' = (z/dt) y with dt absorbed into z; used to
    check the stability polynomial 1 + z + z^2/2 + z^3/6."""
    y1 = y + z * y
    y2 = 0.75 * y + 0.25 * (y1 + z * y1)
    return y / 3.0 + (2.0 / 3.0) * (y2 + z * y2)


# ---------------------------------------------------------------------------
# Courant numbers and step control


def courant_numbers(state: State, grid: Grid, dt: float):
    """(C_cel, C_vel): cell maxima of (|ubar| + sqrt((1+rhobar) g h)) dt/dx
    and (|ubar| + sqrt(rhobar g h)) dt/dx; negative rhobar is clamped to
    zero under the square root."""
    layout, mesh, g = grid.layout, grid.mesh, grid.params.g
    h = np.maximum(state.eta - mesh.b, 0.0)
    u_c = 0.5 * (state.u[:, :-1] + state.u[:, 1:])
    ubar = np.abs(np.sum(layout.l_int * u_c, axis=0))
    rhobar = np.sum(np.where(layout.active_int(), layout.l_int * state.rho, 0.0), axis=0)
    c_cel = np.max((ubar + np.sqrt(np.maximum(1.0 + rhobar, 0.0) * g * h)) * dt / mesh.dx)
    c_vel = np.max((ubar + np.sqrt(np.maximum(rhobar, 0.0) * g * h)) * dt / mesh.dx)
    return float(c_cel), float(c_vel)


def adaptive_dt(state: State, grid: Grid, target: float, *,
                kind: str = "cel", dt_max: float = np.inf) -> float:
    """Largest dt whose Courant number (of the requested kind) equals the
    target on the current state, capped at dt_max."""
    c_cel, c_vel = courant_numbers(state, grid, 1.0)
    c = c_cel if kind == "cel" else c_vel
    if c <= 0.0:
        return float(dt_max)
    return float(min(target / c, dt_max))


def _check_state(state: State, grid: Grid) -> State:
    if not state.all_finite():
        raise StepFailure("non-finite field value")
    if np.any(state.eta - grid.mesh.b <= grid.h_min):
        raise StepFailure("water depth below h_min")
    return state


# ---------------------------------------------------------------------------
# explicit SSP-RK3 on (eta, u, rho*l*h)


class RK3Integrator:
    """Three-stage SSP Runge-Kutta on the full right-hand side.

    The density is advanced in the conservative variable r = rho*l*h, which
    keeps a spatially constant density exactly constant and conserves the
    density content in closed domains.
    """

    def __init__(self, grid: Grid, limiter: bool = False):
        self.grid = grid
        self.limiter = limiter
        self.n_rhs = 0

    def _rhs(self, state: State, t: float):
        self.n_rhs += 1
        tend = compute_tendencies(state, self.grid, t, limiter=self.limiter)
        return tend.d_eta, tend.d_u_stiff + tend.d_u_nonstiff, tend.d_r

    def _euler(self, state: State, t: float, dt: float):
        d_eta, d_u, d_r = self._rhs(state, t)
        layout, mesh = self.grid.layout, self.grid.mesh
        l_safe = np.where(layout.l_int > 0.0, layout.l_int, 1.0)
        r = layout.l_int * (state.eta - mesh.b) * state.rho
        eta = state.eta + dt * d_eta
        u = state.u + dt * d_u
        r = r + dt * d_r
        rho = np.where(layout.active_int(), r / (l_safe * (eta - mesh.b)), 0.0)
        return State(eta, u, rho), r

    def step(self, state: State, t: float, dt: float) -> State:
        grid = self.grid
        layout, mesh = grid.layout, grid.mesh
        l_safe = np.where(layout.l_int > 0.0, layout.l_int, 1.0)
        r0 = layout.l_int * (state.eta - mesh.b) * state.rho

        s1, r1 = self._euler(state, t, dt)
        _check_state(s1, grid)
        s2e, r2e = self._euler(s1, t + dt, dt)
        eta2 = 0.75 * state.eta + 0.25 * s2e.eta
        u2 = 0.75 * state.u + 0.25 * s2e.u
        r2 = 0.75 * r0 + 0.25 * r2e
        rho2 = np.where(layout.active_int(), r2 / (l_safe * (eta2 - mesh.b)), 0.0)
        s2 = _check_state(State(eta2, u2, rho2), grid)

        s3e, r3e = self._euler(s2, t + 0.5 * dt, dt)
        eta3 = state.eta / 3.0 + (2.0 / 3.0) * s3e.eta
        u3 = state.u / 3.0 + (2.0 / 3.0) * s3e.u
        r3 = r0 / 3.0 + (2.0 / 3.0) * r3e
        rho3 = np.where(layout.active_int(), r3 / (l_safe * (eta3 - mesh.b)), 0.0)
        if grid.bounds.periodic:
            u3[:, -1] = u3[:, 0]
        return _check_state(State(eta3, u3, rho3), grid)


def rk3_step(state: State, grid: Grid, t: float, dt: float,
             limiter: bool = False) -> State:
    return RK3Integrator(grid, limiter).step(state, t, dt)


# ---------------------------------------------------------------------------
# implicit stage machinery


def _thomas(sub, diag, sup, rhs):
    """Vectorized tridiagonal solve along axis 0 (no pivoting; the systems
    are strictly diagonally dominant by construction)."""
    n = diag.shape[0]
    c = np.empty_like(diag)
    d = np.empty_like(rhs)
    c[0] = sup[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for k in range(1, n):
        m = diag[k] - sub[k] * c[k - 1]
        c[k] = sup[k] / m
        d[k] = (rhs[k] - sub[k] * d[k - 1]) / m
    x = np.empty_like(rhs)
    x[-1] = d[-1]
    for k in range(n - 2, -1, -1):
        x[k] = d[k] - c[k] * x[k + 1]
    return x


@dataclass
class ImplicitWorkspace:
    """Frozen level-n quantities shared by the implicit stages of one step."""

    h_half: np.ndarray          # (M+1,)
    coeffs: ViscousCoeffs
    gamma_dt: float             # dt * a_im diagonal
    sub: np.ndarray             # vertical tridiagonal of (I - gamma_dt * A)
    diag: np.ndarray
    sup: np.ndarray
    k_const: np.ndarray         # (n_max, M+1) constant forcing (wind)
    evolved: np.ndarray         # (M+1,) bool


def build_implicit_workspace(grid: Grid, h_half, coeffs: ViscousCoeffs,
                             gamma_dt: float) -> ImplicitWorkspace:
    layout = grid.layout
    n_max, Mp1 = layout.n_max, h_half.size
    act = layout.active_half()
    l_safe = np.where(act, layout.l_half, 1.0)
    inv_lh = 1.0 / (l_safe * h_half)

    a = coeffs.a  # (n_max+1, Mp1)
    upper_c = a[1:, :].copy()   # coefficient coupling layer k to k+1
    lower_c = a[:-1, :].copy()  # coefficient coupling layer k to k-1
    # bottom drag / wind stress replace the outer exchange coefficients
    lower_c[0, :] = coeffs.c_bot
    cols = np.arange(Mp1)
    top = np.maximum(layout.n_half - 1, 0)
    upper_c[top, cols] = coeffs.c_wind
    upper_c = np.where(act, upper_c, 0.0)
    lower_c = np.where(act, lower_c, 0.0)

    diag_a = -(upper_c + lower_c) * inv_lh
    sup_a = np.zeros((n_max, Mp1))
    sub_a = np.zeros((n_max, Mp1))
    sup_a[:-1, :] = a[1:n_max, :] * inv_lh[:-1, :]
    sub_a[1:, :] = a[1:n_max, :] * inv_lh[1:, :]
    sup_a = np.where(act, sup_a, 0.0)
    sub_a = np.where(act, sub_a, 0.0)

    k_const = np.zeros((n_max, Mp1))
    k_const[top, cols] = coeffs.c_wind * coeffs.u_wind * inv_lh[top, cols]
    k_const = np.where(act, k_const, 0.0)

    return ImplicitWorkspace(
        h_half=h_half, coeffs=coeffs, gamma_dt=gamma_dt,
        sub=-gamma_dt * sub_a,
        diag=np.where(act, 1.0 - gamma_dt * diag_a, 1.0),
        sup=-gamma_dt * sup_a,
        k_const=k_const,
        evolved=evolved_interfaces(grid),
    )


def implicit_stage_solve(grid: Grid, ws: ImplicitWorkspace,
                         eta_expl, u_expl, t_stage: float):
    """Solve the coupled stage equations

        u = u_expl + gamma_dt (A u + k - g grad eta)
        eta = eta_expl - gamma_dt div(l h^n u)

    Returns (eta_stage, u_stage). Velocities at non-evolved boundary columns
    are returned as zero; prescribed values are reapplied on evaluation.
    """
    layout, mesh, g = grid.layout, grid.mesh, grid.params.g
    M = mesh.M
    gd = ws.gamma_dt

    rhs_u = np.where(layout.active_half(), u_expl + gd * ws.k_const, 0.0)
    u_hat = _thomas(ws.sub, ws.diag, ws.sup, rhs_u)
    ones = np.where(layout.active_half(), gd * g / mesh.dx_half, 0.0)
    w_hat = _thomas(ws.sub, ws.diag, ws.sup, ones)

    K = ws.h_half * np.sum(layout.l_half * u_hat, axis=0)
    W = ws.h_half * np.sum(layout.l_half * w_hat, axis=0)

    bounds = grid.bounds
    eta_bc = {}
    if bounds.periodic:
        lower = np.empty(M)
        diag = np.empty(M)
        upper = np.empty(M)
        rhs = np.empty(M)
        Wl = W[np.arange(M)]            # interface i (left of cell i), col M aliases 0
        Wl[0] = W[0]
        Wr = W[1:M + 1].copy()
        Wr[-1] = W[0]
        Kl = K[:M].copy()
        Kr = K[1:M + 1].copy()
        Kr[-1] = K[0]
        fac = gd / mesh.dx
        lower = -fac * Wl
        upper = -fac * Wr
        diag = 1.0 + fac * (Wl + Wr)
        rhs = eta_expl - fac * (Kr - Kl)
        eta = _cyclic_tridiag(lower, diag, upper, rhs)
    else:
        K = K.copy()
        W = W.copy()
        for side, j, cond in (("left", 0, bounds.left), ("right", M, bounds.right)):
            if isinstance(cond, Wall):
                K[j] = 0.0
                W[j] = 0.0
            elif isinstance(cond, Discharge):
                K[j] = cond.q(t_stage) if side == "left" else -cond.q(t_stage)
                W[j] = 0.0
            elif isinstance(cond, Elevation):
                eta_bc[j] = cond.eta(t_stage)
        fac = gd / mesh.dx
        lower = -fac * W[:M]
        upper = -fac * W[1:]
        diag = 1.0 + fac * (W[:M] + W[1:])
        rhs = eta_expl - fac * (K[1:] - K[:M])
        # Dirichlet ghosts from elevation boundaries move to the RHS;
        # walls/discharges already have W = 0 at their interface
        if 0 in eta_bc:
            rhs[0] += fac[0] * W[0] * eta_bc[0]
        if M in eta_bc:
            rhs[-1] += fac[-1] * W[M] * eta_bc[M]
        ab = np.zeros((3, M))
        ab[0, 1:] = upper[:-1]
        ab[1, :] = diag
        ab[2, :-1] = lower[1:]
        eta = sla.solve_banded((1, 1), ab, rhs)

    # back-substitute the velocities
    d_eta = np.zeros(M + 1)
    d_eta[1:M] = eta[1:] - eta[:-1]
    if bounds.periodic:
        d_eta[0] = eta[0] - eta[-1]
        d_eta[M] = d_eta[0]
    else:
        if 0 in eta_bc:
            d_eta[0] = eta[0] - eta_bc[0]
        if M in eta_bc:
            d_eta[M] = eta_bc[M] - eta[-1]
    u = u_hat - d_eta[None, :] * w_hat
    u = np.where(ws.evolved[None, :] & layout.active_half(), u, 0.0)
    if bounds.periodic:
        u[:, M] = u[:, 0]
    return eta, u


def _cyclic_tridiag(lower, diag, upper, rhs):
    """Cyclic tridiagonal solve via the Sherman-Morrison correction;
    lower[0] is the (0, n-1) corner entry and upper[-1] the (n-1, 0) one."""
    n = diag.size
    alpha = lower[0]
    beta = upper[-1]
    gamma = -diag[0]
    dmod = diag.copy()
    dmod[0] -= gamma
    dmod[-1] -= alpha * beta / gamma
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = dmod
    ab[2, :-1] = lower[1:]
    y = sla.solve_banded((1, 1), ab, rhs)
    u = np.zeros(n)
    u[0] = gamma
    u[-1] = beta
    z = sla.solve_banded((1, 1), ab, u)
    v_y = y[0] + (alpha / gamma) * y[-1]
    v_z = z[0] + (alpha / gamma) * z[-1]
    return y - z * (v_y / (1.0 + v_z))


def implicit_residual(grid: Grid, ws: ImplicitWorkspace, eta_expl, u_expl,
                      eta, u, t_stage: float) -> float:
    """Max-norm residual of the unreduced stage equations (diagnostic)."""
    layout, mesh, g = grid.layout, grid.mesh, grid.params.g
    M = mesh.M
    gd = ws.gamma_dt
    act = layout.active_half() & ws.evolved[None, :]

    eta_g = np.empty(M + 2)
    eta_g[1:-1] = eta
    bounds = grid.bounds
    if bounds.periodic:
        eta_g[0], eta_g[-1] = eta[-1], eta[0]
    else:
        eta_g[0] = bounds.left.eta(t_stage) if isinstance(bounds.left, Elevation) else eta[0]
        eta_g[-1] = bounds.right.eta(t_stage) if isinstance(bounds.right, Elevation) else eta[-1]
    grad = g * (eta_g[1:] - eta_g[:-1]) / mesh.dx_half

    # A u + k via the stored tridiagonal of (I - gd A)
    up = np.vstack([u[1:, :], np.zeros((1, u.shape[1]))])
    um = np.vstack([np.zeros((1, u.shape[1])), u[:-1, :]])
    Tu = ws.diag * u + ws.sup * up + ws.sub * um      # (I - gd A) u
    res_u = Tu - gd * ws.k_const - (u_expl - gd * grad[None, :])
    res_u = np.where(act, res_u, 0.0)

    F = ws.h_half * np.sum(layout.l_half * u, axis=0)
    if not bounds.periodic:
        for side, j, cond in (("left", 0, bounds.left), ("right", M, bounds.right)):
            if isinstance(cond, Wall):
                F[j] = 0.0
            elif isinstance(cond, Discharge):
                F[j] = cond.q(t_stage) if side == "left" else -cond.q(t_stage)
    res_eta = eta - eta_expl + gd * (F[1:] - F[:M]) / mesh.dx
    return float(max(np.max(np.abs(res_u)), np.max(np.abs(res_eta))))


# ---------------------------------------------------------------------------
# IMEX-ARK2 step


class IMEXIntegrator:
    """Semi-implicit additive Runge-Kutta step (three stages)."""

    def __init__(self, grid: Grid, limiter: bool = False,
                 tableau: ButcherPair | None = None):
        self.grid = grid
        self.limiter = limiter
        self.tab = tableau if tableau is not None else ark2_tableau()
        self.n_rhs = 0
        self.n_implicit = 0
        self.last_residual = 0.0

    def _tend(self, state: State, t: float) -> Tendencies:
        self.n_rhs += 1
        return compute_tendencies(state, self.grid, t, limiter=self.limiter)

    def _frozen_G(self, state: State, t: float, h_half_n):
        fs = prepare_fields(state, self.grid, t, h_half_frozen=h_half_n)
        return mass_transfer(fs, self.grid), fs

    def step(self, state: State, t: float, dt: float) -> State:
        grid = self.grid
        layout, mesh = grid.layout, grid.mesh
        tab = self.tab
        a, ai, b, c = tab.a_ex, tab.a_im, tab.b, tab.c
        gamma = ai[1, 1]

        l_safe = np.where(layout.l_int > 0.0, layout.l_int, 1.0)
        act_i = layout.active_int()
        h_n = state.eta - mesh.b
        lh_n = layout.l_int * h_n

        # ---- stage 1 = level n ----------------------------------------
        tend1 = self._tend(state, t)
        fs_n = tend1.fields                       # h_half frozen at level n
        h_half_n = fs_n.h_half
        coeffs = viscous_coefficients(grid, h_half_n, fs_n.u)
        ws = build_implicit_workspace(grid, h_half_n, coeffs, dt * gamma)

        N1 = tend1.d_u_nonstiff
        S1_u = tend1.d_u_stiff
        S1_eta = tend1.d_eta
        G1 = tend1.G                              # already at h^n
        u1f = fs_n.u
        rho1 = state.rho
        rho1_g = fs_n.rho_g

        # ---- stage 2 ----------------------------------------------------
        t2 = t + c[1] * dt
        eta_e2 = state.eta + dt * ai[1, 0] * S1_eta
        u_e2 = state.u + dt * (a[1, 0] * N1 + ai[1, 0] * S1_u)
        eta2, u2 = implicit_stage_solve(grid, ws, eta_e2, u_e2, t2)
        self.n_implicit += 1
        S2_u = (u2 - u_e2) / (dt * gamma)
        S2_eta = (eta2 - eta_e2) / (dt * gamma)
        h2 = eta2 - mesh.b
        if np.any(h2 <= grid.h_min) or not np.all(np.isfinite(eta2)):
            raise StepFailure("implicit stage produced a dry or non-finite state")

        state2_tmp = State(eta2, u2, rho1)
        u2f, _, _, _ = boundary_values(state2_tmp, grid, t2)
        ustar2 = ai[1, 1] * u2f + ai[1, 0] * u1f
        flux_s2 = density_rhs_flux(rho1_g, ustar2, fs_n, grid)
        vert1 = vertical_density_term(rho1, G1, grid)
        num2 = lh_n * rho1 + dt * (flux_s2 + a[1, 0] * vert1)
        rho2 = np.where(act_i, num2 / (l_safe * h2), 0.0)

        state2 = State(eta2, u2, rho2)
        tend2 = self._tend(state2, t2)
        N2 = tend2.d_u_nonstiff
        u2f = tend2.fields.u
        rho2_g = tend2.fields.rho_g
        G2, _ = self._frozen_G(state2, t2, h_half_n)

        # ---- stage 3 ----------------------------------------------------
        t3 = t + c[2] * dt
        eta_e3 = state.eta + dt * (ai[2, 0] * S1_eta + ai[2, 1] * S2_eta)
        u_e3 = state.u + dt * (a[2, 0] * N1 + a[2, 1] * N2
                               + ai[2, 0] * S1_u + ai[2, 1] * S2_u)
        eta3, u3 = implicit_stage_solve(grid, ws, eta_e3, u_e3, t3)
        self.n_implicit += 1
        h3 = eta3 - mesh.b
        if np.any(h3 <= grid.h_min) or not np.all(np.isfinite(eta3)):
            raise StepFailure("implicit stage produced a dry or non-finite state")

        state3_tmp = State(eta3, u3, rho2)
        u3f, _, _, _ = boundary_values(state3_tmp, grid, t3)
        ustar3 = ai[2, 2] * u3f + ai[2, 1] * u2f
        flux_s3 = density_rhs_flux(rho2_g, ustar3, fs_n, grid)
        vert2 = vertical_density_term(rho2, G2, grid)
        flux1 = density_rhs_flux(rho1_g, u1f, fs_n, grid)
        num3 = lh_n * rho1 + dt * (flux_s3 + a[2, 1] * vert2
                                   + ai[2, 0] * flux1 + a[2, 0] * vert1)
        rho3 = np.where(act_i, num3 / (l_safe * h3), 0.0)

        state3 = State(eta3, u3, rho3)
        tend3 = self._tend(state3, t3)
        N3 = tend3.d_u_nonstiff
        u3f = tend3.fields.u
        rho3_g = tend3.fields.rho_g
        G3, _ = self._frozen_G(state3, t3, h_half_n)

        # ---- assembly ---------------------------------------------------
        # b equals the last implicit row, so eta^{n+1} = eta3 and the
        # implicit contributions to u telescope through stage 3.
        eta_new = eta3
        u_new = u3 + dt * ((b[0] - a[2, 0]) * N1 + (b[1] - a[2, 1]) * N2
                           + b[2] * N3)
        u_new = np.where(ws.evolved[None, :] & layout.active_half(), u_new, 0.0)
        if grid.bounds.periodic:
            u_new[:, -1] = u_new[:, 0]

        flux2 = density_rhs_flux(rho2_g, u2f, fs_n, grid)
        flux3 = density_rhs_flux(rho3_g, u3f, fs_n, grid)
        vert3 = vertical_density_term(rho3, G3, grid)
        num = lh_n * rho1 + dt * (
            b[0] * (flux1 + vert1) + b[1] * (flux2 + vert2)
            + b[2] * (flux3 + vert3))
        h_new = eta_new - mesh.b
        rho_new = np.where(act_i, num / (l_safe * h_new), 0.0)

        self.last_residual = implicit_residual(
            grid, ws, eta_e3, u_e3, eta3, u3, t3)
        return _check_state(State(eta_new, u_new, rho_new), grid)


def imex_ark2_step(state: State, grid: Grid, t: float, dt: float,
                   limiter: bool = False) -> State:
    return IMEXIntegrator(grid, limiter).step(state, t, dt)
