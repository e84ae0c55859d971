"""Pseudo-spectral time integration, blow-up detection and flow monitors.

The evolution is the first-order system

    u_t = w_x,      w_t = L u_x + B(g(u))_x,      g(u) = -|u|^(p-1) u,

advanced in Fourier coefficients with the classical 4-stage Runge-Kutta
scheme.  The linear part is diagonal; the nonlinearity is evaluated pointwise
in real space and its transform is truncated by the 2/3 rule (the power
nonlinearity generates high harmonics that would otherwise alias on the grid).

Termination: the run ends early when the Sobolev norm pair
||u||_{H^s0} + ||w||_{H^(s0 - rho/2)} crosses a threshold or a non-finite
value appears.  Any finite threshold is a proxy for norm divergence, so the
detection time upper-bounds the numerical singularity time.

When Levine tracking is enabled (mean-free u0 only), the primitive v with
v_t = w and v_x = u is co-evolved and the concavity functional

    H = 1/2 ||B^(-1/2) v||^2,   H' = <B^(-1/2) v, B^(-1/2) w>,
    H'' = ||B^(-1/2) w||^2 - 2*I(u) + Q(u)

is recorded, which for data outside the well obeys H'' >= delta > 0 and the
concavity inequality H*H'' - ((p+3)/4) (H')^2 >= 0 that forces finite-time
divergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classify import ClassLabel, WellClass, classify, sign_tolerance
from .functionals import StateUW, power_nonlinearity
from .grid import GridSpec, RealField, antiderivative
from .symbols import symbol_at
from .wellsolver import ThresholdResult

__all__ = [
    "SolverConfig",
    "BlowupReport",
    "TrajectoryRecord",
    "InvarianceReport",
    "LevineReport",
    "rhs",
    "integrate",
    "invariance_monitor",
    "levine_check",
    "write_trajectory_csv",
]

_SERIES_KEYS = (
    "E",
    "M",
    "I",
    "Q",
    "twoI_minus_Q",
    "u_sobolev_s0",
    "w_sobolev_s0_minus_rho_half",
    "H",
    "Hp",
    "Hpp",
)

_CSV_COLUMNS = ("t", "E", "M", "I", "Q", "twoI_minus_Q", "u_Hs0", "w_Hs", "H", "Hp", "Hpp")


@dataclass
class SolverConfig:
    dt: float
    t_end: float
    output_stride: int = 10
    dealias: bool = True
    blowup_norm_threshold: float = 1e6
    levine_tracking: bool = False
    snapshot_times: tuple = ()


@dataclass
class BlowupReport:
    detected: bool
    t_detect: float | None
    trigger: str | None
    delta_bound: float
    levine_upper_bound: float | None


@dataclass
class TrajectoryRecord:
    times: list
    series: dict
    blowup: BlowupReport | None
    initial_label: ClassLabel
    gamma: float
    p: float
    cfl_number: float
    snapshots: list = field(default_factory=list)


class _Kernel:
    """Precomputed multiplier arrays and weighted mode sums for one run."""

    def __init__(self, model, grid: GridSpec, gamma: float, dealias: bool):
        self.model = model
        self.grid = grid
        self.gamma = gamma
        self.n = grid.n_modes
        self.h = grid.spacing
        xi = grid.wavenumbers
        self.l_arr = symbol_at(model.L, xi)
        self.b_arr = symbol_at(model.B, xi)
        ik = 1j * xi
        ik[-1] = 0.0  # drop the Nyquist mode of odd multipliers
        self.ik = ik
        if dealias:
            self.mask = np.where(xi <= (2.0 / 3.0) * grid.max_wavenumber, 1.0, 0.0)
        else:
            self.mask = np.ones_like(xi)
        self.p = model.p

        mult = np.full(xi.size, 2.0)
        mult[0] = 1.0
        mult[-1] = 1.0
        scale = self.h / self.n
        one = 1.0 + xi**2
        self.w_disp = scale * mult * self.l_arr / self.b_arr
        self.w_disp_shift = scale * mult * (self.l_arr - gamma * gamma) / self.b_arr
        self.w_smooth = scale * mult / self.b_arr
        self.w_unorm = scale * mult * one**model.s0
        self.w_wnorm = scale * mult * one ** (model.s0 - model.rho / 2.0)

    def rhs(self, u_hat, w_hat):
        u = np.fft.irfft(u_hat, n=self.n)
        g_hat = self.mask * np.fft.rfft(power_nonlinearity(u, self.p))
        return self.ik * w_hat, self.ik * (self.l_arr * u_hat + self.b_arr * g_hat)

    def quad(self, f_hat, weights):
        return float(np.sum(weights * (f_hat.real**2 + f_hat.imag**2)))

    def quad2(self, f_hat, g_hat, weights):
        return float(np.sum(weights * (f_hat * np.conj(g_hat)).real))

    def diagnostics(self, u_hat, w_hat):
        u = np.fft.irfft(u_hat, n=self.n)
        kinetic = 0.5 * self.quad(w_hat, self.w_smooth)
        disp = 0.5 * self.quad(u_hat, self.w_disp)
        disp_shift = 0.5 * self.quad(u_hat, self.w_disp_shift)
        Q = self.h * np.sum(np.abs(u) ** (self.p + 1.0))
        M = self.quad2(u_hat, w_hat, self.w_smooth)
        return {
            "E": kinetic + disp - Q / (self.p + 1.0),
            "M": M,
            "I": disp,
            "Q": Q,
            "twoI_minus_Q": 2.0 * disp_shift - Q,
            "u_sobolev_s0": np.sqrt(self.quad(u_hat, self.w_unorm)),
            "w_sobolev_s0_minus_rho_half": np.sqrt(self.quad(w_hat, self.w_wnorm)),
        }

def rhs(state: StateUW, dealias: bool = True) -> tuple[RealField, RealField]:
    """Time derivative of the state (one evaluation of the spectral right-hand side)."""
    kernel = _Kernel(state.model, state.grid, 0.0, dealias)
    du, dw = kernel.rhs(np.fft.rfft(state.u.samples), np.fft.rfft(state.w.samples))
    if not (np.all(np.isfinite(du)) and np.all(np.isfinite(dw))):
        raise OverflowError("non-finite value in the nonlinear term")
    grid = state.grid
    return (
        RealField(grid, np.fft.irfft(du, n=grid.n_modes)),
        RealField(grid, np.fft.irfft(dw, n=grid.n_modes)),
    )


def integrate(state0: StateUW, config: SolverConfig, threshold: ThresholdResult) -> TrajectoryRecord:
    """Advance the state to t_end or to blow-up detection, recording diagnostics.

    Diagnostics are recorded at the initial time and every output_stride
    steps; the blow-up criterion is checked at every step, so the detection
    time has single-step resolution.
    """
    if config.dt <= 0:
        raise ValueError("dt must be positive")
    if config.t_end <= 0:
        raise ValueError("t_end must be positive")
    if config.output_stride < 1:
        raise ValueError("output_stride must be at least 1")
    if state0.model != threshold.model or state0.grid != threshold.grid:
        raise ValueError("threshold does not match the state's model and grid")

    grid = state0.grid
    model = state0.model
    gamma = threshold.gamma
    p = model.p
    kernel = _Kernel(model, grid, gamma, config.dealias)
    label0 = classify(state0, threshold)

    track = bool(config.levine_tracking)
    v_hat = None
    if track:
        v0 = antiderivative(state0.u)  # raises unless u0 is mean-free
        v_hat = np.fft.rfft(v0.samples)

    u_hat = np.fft.rfft(state0.u.samples)
    w_hat = np.fft.rfft(state0.w.samples)

    times: list[float] = []
    series: dict[str, list] = {key: [] for key in _SERIES_KEYS}
    snapshots = []
    snap_left = sorted(float(t) for t in config.snapshot_times)

    # the closed form of H'' uses the plain dispersive part, independent of gamma
    def record_row(t):
        times.append(t)
        diag = kernel.diagnostics(u_hat, w_hat)
        for key, val in diag.items():
            series[key].append(val)
        if track:
            series["H"].append(0.5 * kernel.quad(v_hat, kernel.w_smooth))
            series["Hp"].append(kernel.quad2(v_hat, w_hat, kernel.w_smooth))
            series["Hpp"].append(kernel.quad(w_hat, kernel.w_smooth) - 2.0 * diag["I"] + diag["Q"])

    def take_snapshot(t):
        snapshots.append(
            (
                t,
                RealField(grid, np.fft.irfft(u_hat, n=grid.n_modes)),
                RealField(grid, np.fft.irfft(w_hat, n=grid.n_modes)),
            )
        )

    record_row(0.0)
    e0 = series["E"][0]
    m0 = series["M"][0]
    delta_bound = (p + 1.0) * (threshold.well_depth - e0 - gamma * m0)
    while snap_left and snap_left[0] <= config.dt / 2:
        take_snapshot(0.0)
        snap_left.pop(0)

    dt = config.dt
    steps = int(round(config.t_end / dt))
    detected = False
    t_detect = None
    trigger = None

    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for i in range(steps):
            k1u, k1w = kernel.rhs(u_hat, w_hat)
            k2u, k2w = kernel.rhs(u_hat + 0.5 * dt * k1u, w_hat + 0.5 * dt * k1w)
            k3u, k3w = kernel.rhs(u_hat + 0.5 * dt * k2u, w_hat + 0.5 * dt * k2w)
            k4u, k4w = kernel.rhs(u_hat + dt * k3u, w_hat + dt * k3w)
            if track:
                k1v = w_hat
                k2v = w_hat + 0.5 * dt * k1w
                k3v = w_hat + 0.5 * dt * k2w
                k4v = w_hat + dt * k3w
                v_hat = v_hat + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            u_hat = u_hat + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            w_hat = w_hat + dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
            t = (i + 1) * dt

            if not (np.all(np.isfinite(u_hat)) and np.all(np.isfinite(w_hat))):
                detected, t_detect, trigger = True, t, "nonfinite"
                break
            u_norm = np.sqrt(kernel.quad(u_hat, kernel.w_unorm))
            w_norm = np.sqrt(kernel.quad(w_hat, kernel.w_wnorm))
            if not np.isfinite(u_norm + w_norm):
                detected, t_detect, trigger = True, t, "nonfinite"
                break
            if u_norm + w_norm > config.blowup_norm_threshold:
                # past this point the spectrum is saturated and samples stop
                # being trustworthy; the crossing is summarized in the report
                detected, t_detect = True, t
                if u_norm > config.blowup_norm_threshold:
                    trigger = "u_sobolev"
                elif w_norm > config.blowup_norm_threshold:
                    trigger = "w_sobolev"
                else:
                    trigger = "sobolev_sum"
                break

            while snap_left and t >= snap_left[0] - dt / 2:
                take_snapshot(t)
                snap_left.pop(0)
            if (i + 1) % config.output_stride == 0:
                record_row(t)

    if not detected and times[-1] < steps * dt:
        record_row(steps * dt)

    levine_bound = None
    if track:
        nu = (p - 1.0) / 4.0
        bounds = [
            t + hv / (nu * hp)
            for t, hv, hp in zip(times, series["H"], series["Hp"])
            if hv > 0 and hp > 0
        ]
        if bounds:
            levine_bound = min(bounds)

    report = BlowupReport(
        detected=detected,
        t_detect=t_detect,
        trigger=trigger,
        delta_bound=delta_bound,
        levine_upper_bound=levine_bound,
    )
    cfl = config.dt * grid.max_wavenumber * float(np.sqrt(np.max(kernel.l_arr)))
    return TrajectoryRecord(
        times=times,
        series=series,
        blowup=report,
        initial_label=label0,
        gamma=gamma,
        p=p,
        cfl_number=cfl,
        snapshots=snapshots,
    )


@dataclass
class InvarianceReport:
    applicable: bool
    note: str
    sign_violations: list          # (t, 2I - Q) rows on the wrong side
    depth_violations: list         # (t, I_gamma) rows at or below the depth bound
    passed: bool


def invariance_monitor(record: TrajectoryRecord) -> InvarianceReport:
    """Check that the recorded samples never leave the initial invariant set.

    For data inside the well the sign quantity 2*I - Q must stay nonnegative
    (within the classifier's boundary tolerance); outside the well it must
    stay negative and the dispersive part must stay above ((p+1)/(p-1)) times
    the well depth.  Supercritical data is out of the theory's scope.
    """
    label = record.initial_label.label
    if label is WellClass.SUPERCRITICAL:
        return InvarianceReport(
            applicable=False,
            note="initial energy at or above the well depth: invariance is not asserted",
            sign_violations=[],
            depth_violations=[],
            passed=True,
        )
    sign_violations = []
    depth_violations = []
    depth = record.initial_label.depth_used
    bound = (record.p + 1.0) / (record.p - 1.0) * depth
    for t, s, q in zip(record.times, record.series["twoI_minus_Q"], record.series["Q"]):
        tol = sign_tolerance(s + q, q)
        if label is WellClass.INSIDE_WELL and s < -tol:
            sign_violations.append((t, s))
        if label is WellClass.OUTSIDE_WELL:
            if s >= -tol:
                sign_violations.append((t, s))
            i_gamma = 0.5 * (s + q)
            if i_gamma <= bound:
                depth_violations.append((t, i_gamma))
    return InvarianceReport(
        applicable=True,
        note=f"initial label {label}",
        sign_violations=sign_violations,
        depth_violations=depth_violations,
        passed=not sign_violations and not depth_violations,
    )


@dataclass
class LevineReport:
    applicable: bool
    note: str
    delta: float
    second_derivative_violations: list   # (t, H'') below delta - tol
    concavity_violations: list           # (t, defect) rows failing the product bound
    passed: bool


def levine_check(record: TrajectoryRecord, p: float, tol: float = 1e-6) -> LevineReport:
    """Verify the concavity inequalities along a tracked trajectory.

    On runs starting outside the well: H'' >= delta - tol at every sample and
    H*H'' - ((p+3)/4)(H')^2 >= -tol*(1 + |H*H''|).  Runs inside the well or
    supercritical pass vacuously.
    """
    if not record.series["H"]:
        raise ValueError("record has no Levine series (enable levine_tracking)")
    delta = record.blowup.delta_bound if record.blowup else 0.0
    if record.initial_label.label is not WellClass.OUTSIDE_WELL:
        return LevineReport(
            applicable=False,
            note="concavity argument applies to data outside the well only",
            delta=delta,
            second_derivative_violations=[],
            concavity_violations=[],
            passed=True,
        )
    second = []
    concavity = []
    for t, hv, hp, hpp in zip(record.times, record.series["H"], record.series["Hp"], record.series["Hpp"]):
        if hpp < delta - tol:
            second.append((t, hpp))
        defect = hv * hpp - (p + 3.0) / 4.0 * hp * hp
        if defect < -tol * (1.0 + abs(hv * hpp)):
            concavity.append((t, defect))
    return LevineReport(
        applicable=True,
        note=f"delta = {delta:.6g}",
        delta=delta,
        second_derivative_violations=second,
        concavity_violations=concavity,
        passed=not second and not concavity,
    )


def write_trajectory_csv(record: TrajectoryRecord, path) -> None:
    """Fixed-format trajectory table; Levine columns are empty when not tracked."""
    lines = [",".join(_CSV_COLUMNS)]
    track = bool(record.series["H"])
    for i, t in enumerate(record.times):
        row = [
            f"{t:.17g}",
            f"{record.series['E'][i]:.17g}",
            f"{record.series['M'][i]:.17g}",
            f"{record.series['I'][i]:.17g}",
            f"{record.series['Q'][i]:.17g}",
            f"{record.series['twoI_minus_Q'][i]:.17g}",
            f"{record.series['u_sobolev_s0'][i]:.17g}",
            f"{record.series['w_sobolev_s0_minus_rho_half'][i]:.17g}",
        ]
        if track:
            row += [
                f"{record.series['H'][i]:.17g}",
                f"{record.series['Hp'][i]:.17g}",
                f"{record.series['Hpp'][i]:.17g}",
            ]
        else:
            row += ["", "", ""]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
