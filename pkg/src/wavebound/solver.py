"""Explicit three-level stepping for u_tt = a(t)^2 u_xx on a truncated line.

The scheme is the classic leapfrog stencil with the speed frozen at the
current time level of each step. The domain is sized so the discrete
propagation cone (one cell per step) never reaches the truncated boundary,
which makes the homogeneous edge values exactly inert for compactly
supported data: the field stays machine-zero outside the cone.

A snapshot carries three consecutive levels so time derivatives can be
centered, plus the antiderivative field recomputed from the current level by
cumulative trapezoid. An optional cross-check also evolves the antiderivative
field with the same stencil from its own initial data and compares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from wavebound import analysis
from wavebound.coefficients import CoefficientProfile, evaluate, get_profile
from wavebound.config import ExperimentConfig, MAX_POINTS, CFL_CEIL
from wavebound.errors import BlowUpError, CapacityError, ConfigError
from wavebound.grids import GridSpec, cumtrapz, second_diff, trapz, trapz_sq
from wavebound.initial_data import InitialData, get_data
from wavebound.kernels import advance_steps

# extra cells between the cone after the final step and the boundary
_CONE_PAD = 2


@dataclass
class WaveState:
    """Three-level view of the discrete field at one time."""

    t: float
    u_prev: np.ndarray
    u_curr: np.ndarray
    v_curr: Optional[np.ndarray]
    step_index: int

    def antiderivative(self, grid: GridSpec) -> np.ndarray:
        """Cumulative trapezoid of the current level, computed lazily."""
        if self.v_curr is None:
            self.v_curr = cumtrapz(self.u_curr, grid.h)
        return self.v_curr


def _window_sup_speed(profile: CoefficientProfile, t_end: float, samples=4096) -> float:
    t = np.linspace(0.0, max(t_end, 1e-9), samples)
    return float(np.max(np.asarray(profile.a(t), dtype=float)))


def init_grid(
    data: InitialData,
    profile: CoefficientProfile,
    t_end: float,
    cfl: float = 0.9,
    n_points: int = 4001,
) -> GridSpec:
    """Size the grid so the numerical cone stays inside the domain.

    The discrete stencil propagates one cell per step, i.e. at speed h/dt,
    which exceeds the physical speed by the factor 1/cfl. Containment uses
    that rate, so the requirement of support plus physical cone plus margin
    is satisfied with room to spare.
    """
    if not (0.0 < cfl <= CFL_CEIL):
        raise ConfigError(f"cfl must be in (0, {CFL_CEIL}], got {cfl}")
    if t_end < 0.0:
        raise ConfigError(f"t_end must be >= 0, got {t_end}")
    if n_points < 65 or n_points % 2 == 0:
        raise ConfigError(f"n_points must be odd and >= 65, got {n_points}")
    if n_points > MAX_POINTS:
        raise CapacityError(
            f"n_points={n_points} exceeds the memory budget ({MAX_POINTS})"
        )
    a_sup = _window_sup_speed(profile, t_end)
    base = data.support_radius + (a_sup / cfl) * t_end
    h_est = 2.0 * base / (n_points - 1)
    half_width = base + 6.0 * h_est
    h = 2.0 * half_width / (n_points - 1)
    if t_end > 0.0:
        dt0 = cfl * h / a_sup
        n_steps = max(1, math.ceil(t_end / dt0 - 1e-12))
        dt = t_end / n_steps
    else:
        n_steps = 0
        dt = cfl * h / a_sup
    grid = GridSpec(
        half_width=half_width,
        n_points=n_points,
        h=h,
        dt=dt,
        cfl=a_sup * dt / h,
        n_steps=n_steps,
    )
    # exact containment: one extra step is taken past t_end for centered
    # time differences at the final snapshot
    needed = data.support_radius + (n_steps + 1 + _CONE_PAD) * h
    if half_width < needed:
        raise CapacityError(
            f"internal sizing failure: half_width {half_width} < {needed}"
        )
    return grid


def first_step(data: InitialData, profile: CoefficientProfile, grid: GridSpec) -> WaveState:
    """Second-order Taylor start: the field at t = dt from (u0, u1)."""
    x = grid.x
    u0 = np.asarray(data.u0(x), dtype=float)
    u1 = np.asarray(data.u1(x), dtype=float)
    a0, _ = evaluate(profile, 0.0)
    u_next = u0 + grid.dt * u1 + 0.5 * grid.dt**2 * a0 * a0 * second_diff(u0, grid.h)
    u_next[0] = 0.0
    u_next[-1] = 0.0
    return WaveState(t=grid.dt, u_prev=u0, u_curr=u_next, v_curr=None, step_index=1)


def step(state: WaveState, profile: CoefficientProfile, grid: GridSpec) -> WaveState:
    """Advance one step; raises BlowUpError on a non-finite result."""
    a_t, _ = evaluate(profile, state.t)
    lam2 = np.array([(a_t * grid.dt / grid.h) ** 2])
    u_prev, u_curr = advance_steps(state.u_prev.copy(), state.u_curr.copy(), lam2)
    if not np.all(np.isfinite(u_curr)):
        raise BlowUpError(
            f"non-finite field at step {state.step_index + 1} "
            f"(t={state.t + grid.dt:.6g}); check the CFL number and the profile",
            step_index=state.step_index + 1,
        )
    return WaveState(
        t=state.t + grid.dt,
        u_prev=u_prev,
        u_curr=u_curr,
        v_curr=None,
        step_index=state.step_index + 1,
    )


def _snapshot_levels(n_steps: int, snapshots: int) -> np.ndarray:
    if n_steps == 0:
        return np.array([0], dtype=int)
    count = max(2, min(snapshots, n_steps + 1))
    levels = np.unique(np.rint(np.linspace(0, n_steps, count)).astype(int))
    return levels


def _find_blowup_step(u_prev, u_curr, lam2, start_level: int) -> int:
    """Replay a failed batch one step at a time to locate the bad step."""
    a, b = u_prev.copy(), u_curr.copy()
    for k in range(len(lam2)):
        a, b = advance_steps(a, b, lam2[k : k + 1])
        if not np.all(np.isfinite(b)):
            return start_level + k + 1
    return start_level + len(lam2)


def run(
    config: ExperimentConfig,
    *,
    archive_path: Optional[str] = None,
    dual_v_check: bool = False,
) -> "analysis.DiagnosticSeries":
    """Run one experiment and collect the diagnostic series.

    At each snapshot level the three surrounding field levels are used for
    centered time differences, the antiderivative field is recomputed by
    cumulative trapezoid, and the cone containment is verified to be
    machine-exact. Identical configs produce bit-identical series.
    """
    config.validate()
    profile = get_profile(config.profile)
    data = get_data(
        config.data,
        scale=config.data_scale,
        shift=config.data_shift,
        width=config.data_width,
    )
    grid = init_grid(data, profile, config.t_end, cfl=config.cfl, n_points=config.n_points)
    x = grid.x
    u0 = np.asarray(data.u0(x), dtype=float)
    u1 = np.asarray(data.u1(x), dtype=float)

    archive = open(archive_path, "w", encoding="utf-8") if archive_path else None
    try:
        series = analysis.DiagnosticSeries(
            records=[], profile=profile, data=data, grid=grid, config=config
        )
        rec0, recon0 = analysis.initial_record(u0, u1, profile, grid)
        series.records.append(rec0)
        series.recon_rel_err.append(recon0)
        series.cone_ok &= _cone_exact(u0, data, grid, level=0)
        if archive:
            _write_archive_record(archive, 0.0, u0)

        if grid.n_steps == 0:
            series.finalize()
            return series

        # squared Courant factors for levels 0..n_steps (the final snapshot
        # takes one extra step past t_end)
        t_levels = np.arange(grid.n_steps + 1) * grid.dt
        a_levels = np.asarray(profile.a(t_levels), dtype=float)
        if not np.all(np.isfinite(a_levels)):
            bad = int(np.argmax(~np.isfinite(a_levels)))
            raise BlowUpError(
                f"profile produced a non-finite speed at t={t_levels[bad]:.6g}",
                step_index=bad,
            )
        lam2 = (a_levels * grid.dt / grid.h) ** 2

        state = first_step(data, profile, grid)
        u_prev, u_curr = state.u_prev, state.u_curr

        dual = _DualVState(u0, u1, profile, grid) if dual_v_check else None

        level = 1
        for target in _snapshot_levels(grid.n_steps, config.snapshots)[1:]:
            target = int(target)
            if target > level:
                batch = lam2[level:target]
                start_prev, start_curr = u_prev.copy(), u_curr.copy()
                u_prev, u_curr = advance_steps(u_prev, u_curr, batch)
                if not np.all(np.isfinite(u_curr)) or not np.all(np.isfinite(u_prev)):
                    bad = _find_blowup_step(start_prev, start_curr, batch, level)
                    raise BlowUpError(
                        f"non-finite field at step {bad} (t={bad * grid.dt:.6g}); "
                        "check the CFL number and the profile",
                        step_index=bad,
                    )
                if dual is not None:
                    dual.advance(level, target, lam2)
                level = target
            # one extra step on scratch copies for the centered time derivative
            p2, c2 = advance_steps(u_prev.copy(), u_curr.copy(), lam2[level : level + 1])
            u_next = c2
            t_here = level * grid.dt
            rec, recon = analysis.snapshot_record(
                t_here, u_prev, u_curr, u_next, profile, grid
            )
            series.records.append(rec)
            series.recon_rel_err.append(recon)
            series.cone_ok &= _cone_exact(u_curr, data, grid, level=level)
            if dual is not None:
                dual.compare(u_curr, level)
            if archive:
                _write_archive_record(archive, t_here, u_curr)
        if dual is not None:
            series.dual_v_max_rel_err = dual.max_rel_err
        series.finalize()
        return series
    finally:
        if archive:
            archive.close()


def evolve_final(config: ExperimentConfig):
    """Advance to t_end and return (grid, final field). No diagnostics.

    Used by the convergence command, which only needs the terminal field to
    compare against the closed-form solution.
    """
    config.validate()
    profile = get_profile(config.profile)
    data = get_data(
        config.data,
        scale=config.data_scale,
        shift=config.data_shift,
        width=config.data_width,
    )
    grid = init_grid(data, profile, config.t_end, cfl=config.cfl, n_points=config.n_points)
    if grid.n_steps == 0:
        return grid, np.asarray(data.u0(grid.x), dtype=float)
    t_levels = np.arange(1, grid.n_steps) * grid.dt
    a_levels = np.asarray(profile.a(t_levels), dtype=float)
    lam2 = (a_levels * grid.dt / grid.h) ** 2
    state = first_step(data, profile, grid)
    u_prev, u_curr = advance_steps(state.u_prev, state.u_curr, lam2)
    if not np.all(np.isfinite(u_curr)):
        raise BlowUpError("non-finite field before t_end", step_index=grid.n_steps)
    return grid, u_curr


def _cone_exact(u: np.ndarray, data: InitialData, grid: GridSpec, level: int) -> bool:
    """Whether the field is exactly zero outside the numerical cone."""
    radius = data.support_radius + level * grid.h
    outside = np.abs(grid.x) > radius + 0.5 * grid.h
    return bool(np.all(u[outside] == 0.0))


def _write_archive_record(fh, t: float, u: np.ndarray):
    # node values left to right, full round-trip precision
    fh.write(f"t={t!r}\n")
    fh.write(" ".join(repr(float(val)) for val in u))
    fh.write("\n")


class _DualVState:
    """Evolves the antiderivative field by its own wave equation.

    The antiderivative satisfies the same equation with integrated data. Its
    far field is constant in space, so the exact right boundary value is the
    total mass of u, which grows linearly in time when the velocity moment
    does not vanish. Comparing against the cumulative trapezoid of u at
    snapshots exercises the reconstruction structure end to end.
    """

    def __init__(self, u0, u1, profile, grid):
        self.grid = grid
        v0 = cumtrapz(u0, grid.h)
        v1 = cumtrapz(u1, grid.h)
        self.mass0 = trapz(u0, grid.h)
        self.c0 = trapz(u1, grid.h)
        a0, _ = evaluate(profile, 0.0)
        v_next = v0 + grid.dt * v1 + 0.5 * grid.dt**2 * a0 * a0 * second_diff(v0, grid.h)
        v_next[0] = 0.0
        v_next[-1] = self.mass0 + grid.dt * self.c0
        self.v_prev = v0
        self.v_curr = v_next
        self.max_rel_err = 0.0

    def advance(self, level_from: int, level_to: int, lam2: np.ndarray):
        grid = self.grid
        steps = np.arange(level_from, level_to)
        right = self.mass0 + (steps + 1) * grid.dt * self.c0
        left = np.zeros_like(right)
        self.v_prev, self.v_curr = advance_steps(
            self.v_prev, self.v_curr, lam2[level_from:level_to], left, right
        )

    def compare(self, u_curr: np.ndarray, level: int):
        v_ref = cumtrapz(u_curr, self.grid.h)
        diff = math.sqrt(trapz_sq(self.v_curr - v_ref, self.grid.h))
        scale = max(1.0, math.sqrt(trapz_sq(v_ref, self.grid.h)))
        self.max_rel_err = max(self.max_rel_err, diff / scale)
