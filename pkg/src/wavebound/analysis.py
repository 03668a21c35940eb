"""Norms, energies, closed-form bound evaluation and growth fitting.

All quantities are grid-function diagnostics: squared norms by composite
trapezoid, spatial derivatives by centered differences, time derivatives by
centered differences across the three levels a snapshot carries.

Three closed-form bound statements on sup_t of the squared solution norm are
supported, keyed by which monotonicity or variation condition the speed
profile satisfies. The report labels follow the CLI schema: "Thm1.1" for
nondecreasing speeds, "Cor1.1" for nonincreasing speeds with a positive
floor, "Cor1.2" for speeds of integrable variation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from wavebound.coefficients import AssumptionFlags, CoefficientProfile, evaluate
from wavebound.errors import FitError, HypothesisError, SeriesError, WaveboundError
from wavebound.grids import GridSpec, centered_diff, cumtrapz, trapz_sq
from wavebound.initial_data import InitialData, MomentReport

BOUND_LABELS = ("Thm1.1", "Cor1.1", "Cor1.2")
_CSV_BOUND_COLUMNS = {
    "Thm1.1": "bound_thm11",
    "Cor1.1": "bound_cor11",
    "Cor1.2": "bound_cor12",
}

CSV_COLUMNS = (
    "t",
    "l2_u_sq",
    "E_u",
    "E_v",
    "l2_vx_sq",
    "a",
    "a_prime",
    "bound_thm11",
    "bound_cor11",
    "bound_cor12",
)


@dataclass(frozen=True)
class DiagnosticRecord:
    t: float
    l2_u_sq: float
    E_u: float
    E_v: float
    l2_vx_sq: float
    a_t: float
    a_prime_t: float


@dataclass
class DiagnosticSeries:
    """Per-snapshot records plus run-level diagnostics."""

    records: list
    profile: CoefficientProfile
    data: InitialData
    grid: GridSpec
    config: object = None
    recon_rel_err: list = field(default_factory=list)
    cone_ok: bool = True
    dual_v_max_rel_err: Optional[float] = None

    def finalize(self):
        self.recon_rel_err = np.asarray(self.recon_rel_err, dtype=float)
        for rec in self.records:
            vals = (rec.l2_u_sq, rec.E_u, rec.E_v, rec.l2_vx_sq, rec.a_t, rec.a_prime_t)
            if not all(math.isfinite(v) for v in vals):
                raise SeriesError(f"non-finite diagnostic at t={rec.t}")
        return self

    @property
    def recon_max_rel_err(self) -> float:
        return float(np.max(self.recon_rel_err))

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(rec, name) for rec in self.records])

    @property
    def times(self) -> np.ndarray:
        return self.column("t")


@dataclass
class BoundReport:
    theorem: str
    bound_value: float
    measured_sup: float = math.nan
    margin: float = math.nan
    passed: Optional[bool] = None
    epsilon: float = 0.02

    def to_json_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "bound_value": self.bound_value,
            "measured_sup": self.measured_sup,
            "margin": self.margin,
            "pass": self.passed,
            "epsilon": self.epsilon,
        }


@dataclass(frozen=True)
class GrowthFit:
    exponent: float
    amplitude: float
    r_squared: float


def l2_norm_sq(fld: np.ndarray, grid: GridSpec) -> float:
    """Composite trapezoid of the squared field over the grid."""
    fld = np.asarray(fld, dtype=float)
    if fld.shape != (grid.n_points,):
        raise SeriesError(
            f"field length {fld.shape} does not match the grid ({grid.n_points})"
        )
    return trapz_sq(fld, grid.h)


def energy_u(
    state,
    profile: CoefficientProfile,
    grid: GridSpec,
    u_next: Optional[np.ndarray] = None,
) -> float:
    """Total energy 0.5 (||u_t||^2 + a(t)^2 ||u_x||^2) at the state's time.

    u_t is the centered difference across (u_prev, u_next) when the next
    level is supplied, otherwise the backward difference of the two levels
    the state holds.
    """
    a_t, _ = evaluate(profile, state.t)
    if u_next is not None:
        u_t = (u_next - state.u_prev) / (2.0 * grid.dt)
    else:
        u_t = (state.u_curr - state.u_prev) / grid.dt
    u_x = centered_diff(state.u_curr, grid.h)
    return 0.5 * (trapz_sq(u_t, grid.h) + a_t * a_t * trapz_sq(u_x, grid.h))


def _record_from_fields(t, u_curr, u_t, v_curr, v_t, a_t, ap_t, grid):
    dv = centered_diff(v_curr, grid.h)
    l2u = trapz_sq(u_curr, grid.h)
    l2vx = trapz_sq(dv, grid.h)
    e_u = 0.5 * (
        trapz_sq(u_t, grid.h)
        + a_t * a_t * trapz_sq(centered_diff(u_curr, grid.h), grid.h)
    )
    e_v = 0.5 * (trapz_sq(v_t, grid.h) + a_t * a_t * l2vx)
    recon = math.sqrt(trapz_sq(dv - u_curr, grid.h)) / max(1.0, math.sqrt(l2u))
    rec = DiagnosticRecord(
        t=t, l2_u_sq=l2u, E_u=e_u, E_v=e_v, l2_vx_sq=l2vx, a_t=a_t, a_prime_t=ap_t
    )
    return rec, recon


def initial_record(u0, u1, profile: CoefficientProfile, grid: GridSpec):
    """Diagnostic record at t = 0, using the exact initial velocity."""
    a0, ap0 = evaluate(profile, 0.0)
    v0 = cumtrapz(u0, grid.h)
    v1 = cumtrapz(u1, grid.h)
    return _record_from_fields(0.0, u0, u1, v0, v1, a0, ap0, grid)


def snapshot_record(t, u_prev, u_curr, u_next, profile: CoefficientProfile, grid: GridSpec):
    """Diagnostic record at an interior snapshot from three field levels."""
    a_t, ap_t = evaluate(profile, t)
    u_t = (u_next - u_prev) / (2.0 * grid.dt)
    v_curr = cumtrapz(u_curr, grid.h)
    v_t = (cumtrapz(u_next, grid.h) - cumtrapz(u_prev, grid.h)) / (2.0 * grid.dt)
    return _record_from_fields(t, u_curr, u_t, v_curr, v_t, a_t, ap_t, grid)


def energy_identity_residual(series: DiagnosticSeries):
    """Residual of dE_v/dt = a a' ||v_x||^2 across consecutive snapshots.

    The time derivative is the forward difference between snapshots and the
    right side is evaluated at the interval midpoint, with the norm factor
    interpolated from the two endpoints. Returns the residual sequence and
    its maximum absolute value.
    """
    if len(series.records) < 3:
        raise SeriesError("need at least 3 records for the energy residual")
    t = series.times
    if np.any(np.diff(t) <= 0.0):
        raise SeriesError("snapshot times must be strictly increasing")
    e_v = series.column("E_v")
    l2vx = series.column("l2_vx_sq")
    t_mid = 0.5 * (t[1:] + t[:-1])
    a_mid = np.asarray(series.profile.a(t_mid), dtype=float)
    ap_mid = np.asarray(series.profile.a_prime(t_mid), dtype=float)
    vx_mid = 0.5 * (l2vx[1:] + l2vx[:-1])
    residuals = np.diff(e_v) / np.diff(t) - a_mid * ap_mid * vx_mid
    return residuals, float(np.max(np.abs(residuals)))


def theorem_bound(
    flags: AssumptionFlags,
    report: MomentReport,
    profile: CoefficientProfile,
    epsilon: float = 0.02,
) -> list:
    """Closed-form bound skeletons for every statement whose hypotheses hold."""
    if not report.v1_in_L2:
        raise HypothesisError(
            f"velocity moment c0={report.c0:.6g} does not vanish: the "
            "antiderivative is not square integrable and the norm is "
            "expected to grow"
        )
    if not (flags.a2_holds or flags.a3_holds or flags.a4_holds):
        raise WaveboundError(
            "no bound applies: the profile is neither monotone nor of "
            "integrable variation on the probed horizon"
        )
    a0 = profile.a0
    out = []
    if flags.a2_holds:
        out.append(
            BoundReport("Thm1.1", report.I0_sq / (a0 * a0), epsilon=epsilon)
        )
    if flags.a3_holds:
        out.append(BoundReport("Cor1.1", report.I0_sq, epsilon=epsilon))
    if flags.a4_holds:
        grow = math.exp((2.0 / flags.A0) * flags.tv_total)
        out.append(
            BoundReport(
                "Cor1.2", (report.I0_sq / (flags.A0 * flags.A0)) * grow, epsilon=epsilon
            )
        )
    return out


def verify_bound(series: DiagnosticSeries, skeleton: BoundReport) -> BoundReport:
    """Fill a bound skeleton with the measured supremum and the verdict."""
    if not series.records:
        raise SeriesError("empty series")
    measured = float(np.max(series.column("l2_u_sq")))
    return BoundReport(
        theorem=skeleton.theorem,
        bound_value=skeleton.bound_value,
        measured_sup=measured,
        margin=skeleton.bound_value - measured,
        passed=measured <= skeleton.bound_value * (1.0 + skeleton.epsilon),
        epsilon=skeleton.epsilon,
    )


def _window_mask(t: np.ndarray, window) -> np.ndarray:
    lo, hi = window
    if not (hi > lo >= 0.0):
        raise FitError(f"bad fit window {window}")
    return (t >= lo) & (t <= hi)


def fit_growth(series: DiagnosticSeries, window) -> GrowthFit:
    """Least-squares fit of log ||u|| against log t over the window.

    The exponent is near one half in the growth regime and near zero when
    the norm stays bounded.
    """
    t = series.times
    mask = _window_mask(t, window) & (t > 0.0)
    if int(mask.sum()) < 10:
        raise FitError(
            f"need at least 10 records in the window, found {int(mask.sum())}"
        )
    norms_sq = series.column("l2_u_sq")[mask]
    if np.any(norms_sq <= 0.0):
        raise FitError("nonpositive norms in the fit window")
    log_t = np.log(t[mask])
    log_norm = 0.5 * np.log(norms_sq)
    slope, intercept = np.polyfit(log_t, log_norm, 1)
    fitted = slope * log_t + intercept
    ss_res = float(np.sum((log_norm - fitted) ** 2))
    ss_tot = float(np.sum((log_norm - log_norm.mean()) ** 2))
    r_sq = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return GrowthFit(
        exponent=float(slope), amplitude=float(math.exp(intercept)), r_squared=r_sq
    )


def growth_slope_sq(series: DiagnosticSeries, window) -> float:
    """Linear least-squares slope of the squared norm against time."""
    t = series.times
    mask = _window_mask(t, window)
    if int(mask.sum()) < 10:
        raise FitError(
            f"need at least 10 records in the window, found {int(mask.sum())}"
        )
    slope, _ = np.polyfit(t[mask], series.column("l2_u_sq")[mask], 1)
    return float(slope)


def envelope_report(series: DiagnosticSeries, flags: AssumptionFlags, epsilon: float) -> dict:
    """Check the energy envelopes of the antiderivative field.

    For nondecreasing speeds the energy may grow at most like the squared
    speed ratio; for nonincreasing speeds with a positive floor it may not
    grow at all. Each applicable envelope is checked at every snapshot.
    """
    e_v = series.column("E_v")
    a_vals = series.column("a_t")
    e0 = e_v[0]
    out = {}
    if flags.a2_holds:
        budget = e0 * (a_vals / a_vals[0]) ** 2 * (1.0 + epsilon)
        out["growth_envelope"] = {
            "pass": bool(np.all(e_v <= budget)),
            "max_excess": float(np.max(e_v - budget)),
        }
    if flags.a3_holds:
        budget = e0 * (1.0 + epsilon)
        out["monotone_envelope"] = {
            "pass": bool(np.all(e_v <= budget)),
            "max_excess": float(np.max(e_v - budget)),
        }
    return out


def write_csv(series: DiagnosticSeries, path: str, bounds: Optional[list] = None):
    """Write the time series in the documented column order.

    Bound columns repeat the run-level bound value on every row; bounds whose
    hypotheses do not hold are emitted as empty fields. Floats use full
    round-trip precision.
    """
    by_label = {}
    for rep in bounds or []:
        by_label[rep.theorem] = rep.bound_value
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in series.records:
            cells = [
                repr(rec.t),
                repr(rec.l2_u_sq),
                repr(rec.E_u),
                repr(rec.E_v),
                repr(rec.l2_vx_sq),
                repr(rec.a_t),
                repr(rec.a_prime_t),
            ]
            for label in BOUND_LABELS:
                value = by_label.get(label)
                cells.append("" if value is None else repr(value))
            fh.write(",".join(cells) + "\n")
