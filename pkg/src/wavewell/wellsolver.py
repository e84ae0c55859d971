"""Constrained minimization for the embedding constant and the well depth.

The threshold between dispersion-dominated and nonlinearity-dominated states
is set by the scale-invariant quotient

    J(u) = dispersive_energy(u, gamma)^((p+1)/2) / power_integral(u),

whose infimum over nonzero fields equals best_constant^((p+1)/2).  The depth
of the potential well follows in closed form,

    well_depth = ((p-1)/(p+1)) * 2^(2/(p-1)) * best_constant^((p+1)/(p-1)),

and the minimizer, rescaled onto the balance manifold 2*I - Q = 0, solves the
stationary equation B^(-1)(L - gamma^2) phi = |phi|^(p-1) phi.

The quotient is minimized by projected gradient descent: the field is kept on
the slice power_integral(u) = 1 by renormalization, the descent direction is
the gradient preconditioned by the inverse of the elliptic multiplier
(b/(l - gamma^2), a Sobolev-gradient step that removes the xi^2 stiffness of
the raw gradient), and steps are accepted under an Armijo backtracking rule.
Several starting shapes are tried and the best quotient wins.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .functionals import dispersive_energy, power_integral
from .grid import GridSpec, RealField, read_field_bin, write_field_bin
from .symbols import ModelSpec, model_from_dict, model_to_dict, symbol_at

__all__ = [
    "MinimizeOptions",
    "ThresholdResult",
    "ConvergenceError",
    "well_depth_from_constant",
    "nehari_rescale",
    "minimize_embedding_constant",
    "save_thresholds",
    "load_thresholds",
    "select_threshold",
]


@dataclass
class MinimizeOptions:
    max_iters: int = 2000
    tol_rel_decrease: float = 1e-12   # relative quotient decrease, over the window below
    decrease_window: int = 10
    tol_grad: float = 1e-8            # projected-gradient L2 norm
    armijo: float = 1e-4
    backtrack: float = 0.5
    extra_seeds: tuple = ()           # additional starting RealFields


@dataclass
class ThresholdResult:
    """Converged minimization output; the minimizer is normalized to Q = 1."""

    best_constant: float
    well_depth: float
    gamma: float
    minimizer: RealField
    iterations: int
    residual: float
    grid: GridSpec
    model: ModelSpec


class ConvergenceError(RuntimeError):
    """Raised when no start converges; carries the best result seen so far."""

    def __init__(self, message: str, best: ThresholdResult | None):
        super().__init__(message)
        self.best = best


def well_depth_from_constant(m_value: float, p: float) -> float:
    """Closed form for the well depth in terms of the embedding constant."""
    if m_value <= 0:
        raise ValueError("embedding constant must be positive")
    if p <= 1:
        raise ValueError("p must exceed 1")
    return ((p - 1.0) / (p + 1.0)) * 2.0 ** (2.0 / (p - 1.0)) * m_value ** ((p + 1.0) / (p - 1.0))


def nehari_rescale(u: RealField, model: ModelSpec, gamma: float = 0.0) -> tuple[float, RealField]:
    """Scale u onto the balance manifold: returns (lam, lam*u) with 2*I - Q = 0.

    The factor is lam = (2*I(u)/Q(u))^(1/(p-1)), using the shifted dispersive
    part when gamma is nonzero.
    """
    if not np.any(u.samples):
        raise ValueError("cannot rescale the zero field")
    I = dispersive_energy(u, model, gamma)
    Q = power_integral(u, model.p)
    lam = (2.0 * I / Q) ** (1.0 / (model.p - 1.0))
    return lam, RealField(u.grid, lam * u.samples)


def _default_seeds(grid: GridSpec) -> list[RealField]:
    x = grid.nodes
    return [
        RealField(grid, np.exp(-0.5 * x**2)),
        RealField(grid, 1.0 / np.cosh(x)),
    ]


def _canonicalize(samples: np.ndarray) -> np.ndarray:
    # translate the peak to the origin node and fix the sign, so reruns and
    # translated seeds produce one representative
    n = samples.size
    peak = int(np.argmax(np.abs(samples)))
    out = np.roll(samples, n // 2 - peak)
    if out[n // 2] < 0:
        out = -out
    return out


def _minimize_from(seed, grid, model, gamma, opts):
    """Descend the quotient from one seed; returns (J, field, gradnorm, iters, ok)."""
    h = grid.spacing
    n = grid.n_modes
    p = model.p
    q = (p + 1.0) / 2.0
    xi = grid.wavenumbers
    l_arr = symbol_at(model.L, xi)
    b_arr = symbol_at(model.B, xi)
    grad_mult = (l_arr - gamma * gamma) / b_arr
    precond = b_arr / (l_arr - gamma * gamma)

    def Q_of(v):
        return h * np.sum(np.abs(v) ** (p + 1.0))

    def I_of(v):
        coeffs = np.fft.rfft(v)
        prod = grad_mult * np.abs(coeffs) ** 2
        return 0.5 * (h / n) * (prod[0] + prod[-1] + 2.0 * prod[1:-1].sum())

    def J_of(v):
        Q = Q_of(v)
        if Q <= 0 or not np.isfinite(Q):
            return np.inf
        return I_of(v) ** q / Q

    u = seed.samples / Q_of(seed.samples) ** (1.0 / (p + 1.0))
    history = [J_of(u)]
    gnorm = np.inf
    iters = 0
    for it in range(opts.max_iters):
        iters = it + 1
        I = I_of(u)
        grad_I = np.fft.irfft(grad_mult * np.fft.rfft(u), n=n)
        power_dir = np.abs(u) ** (p - 1.0) * u
        G = grad_I - 2.0 * I * power_dir

        # first-order optimality: gradient component tangent to {Q = 1}
        normal = (p + 1.0) * power_dir
        nn = h * np.sum(normal**2)
        G_tan = G - (h * np.sum(G * normal) / nn) * normal
        gnorm = float(np.sqrt(h * np.sum(G_tan**2)))
        flat = (
            len(history) > opts.decrease_window
            and abs(history[-1 - opts.decrease_window] - history[-1])
            < opts.tol_rel_decrease * abs(history[-1])
        )
        if gnorm < opts.tol_grad and flat:
            return history[-1], RealField(grid, _canonicalize(u)), gnorm, iters, True

        direction = np.fft.irfft(precond * np.fft.rfft(G), n=n)
        slope = q * I ** (q - 1.0) * h * np.sum(G * direction)
        J0 = history[-1]
        alpha = 1.0
        accepted = False
        for _ in range(60):
            trial = u - alpha * direction
            J_trial = J_of(trial)
            if np.isfinite(J_trial) and J_trial <= J0 - opts.armijo * alpha * slope:
                accepted = True
                break
            alpha *= opts.backtrack
        if not accepted:
            # descent direction exhausted at floating-point resolution
            done = gnorm < opts.tol_grad
            return history[-1], RealField(grid, _canonicalize(u)), gnorm, iters, done
        u = trial / Q_of(trial) ** (1.0 / (p + 1.0))
        history.append(J_of(u))
    return history[-1], RealField(grid, _canonicalize(u)), gnorm, iters, False


def minimize_embedding_constant(
    model: ModelSpec,
    grid: GridSpec,
    gamma: float = 0.0,
    options: MinimizeOptions | None = None,
) -> ThresholdResult:
    """Minimize the embedding quotient and return the threshold constants.

    Raises ValueError when |gamma| reaches the lower coercivity constant of L,
    and ConvergenceError (carrying the best candidate) when no start meets the
    tolerances within max_iters.
    """
    opts = options or MinimizeOptions()
    c1 = model.L.coercivity[0]
    if abs(gamma) >= c1:
        raise ValueError(f"gamma outside coercive range: need |gamma| < {c1:.6g}")

    seeds = _default_seeds(grid) + [RealField(grid, s.samples) for s in opts.extra_seeds]
    attempts = [_minimize_from(s, grid, model, gamma, opts) for s in seeds]

    def to_result(attempt) -> ThresholdResult:
        _, minimizer, gnorm, iters, _ = attempt
        m_value = dispersive_energy(minimizer, model, gamma)
        return ThresholdResult(
            best_constant=m_value,
            well_depth=well_depth_from_constant(m_value, model.p),
            gamma=gamma,
            minimizer=minimizer,
            iterations=iters,
            residual=gnorm,
            grid=grid,
            model=model,
        )

    converged = [a for a in attempts if a[4]]
    if not converged:
        best = min(attempts, key=lambda a: a[0])
        raise ConvergenceError(
            f"quotient minimization did not converge within {opts.max_iters} iterations "
            f"(best residual {best[2]:.3e})",
            to_result(best),
        )
    return to_result(min(converged, key=lambda a: a[0]))


# ---------------------------------------------------------------------------
# persistence: one JSON table, minimizer fields in binary sidecars


def save_thresholds(results: list[ThresholdResult], path) -> None:
    path = Path(path)
    entries = []
    for idx, res in enumerate(results):
        sidecar = path.with_name(f"{path.stem}_minimizer_{idx}.bin")
        write_field_bin(res.minimizer, sidecar)
        entries.append(
            {
                "gamma": res.gamma,
                "best_constant": res.best_constant,
                "well_depth": res.well_depth,
                "iterations": res.iterations,
                "residual": res.residual,
                "grid": {"half_length": res.grid.half_length, "n_modes": res.grid.n_modes},
                "minimizer_file": sidecar.name,
            }
        )
    payload = {"model": model_to_dict(results[0].model), "entries": entries}
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_thresholds(path) -> list[ThresholdResult]:
    path = Path(path)
    payload = json.loads(path.read_text(encoding="utf-8"))
    model = model_from_dict(payload["model"])
    results = []
    for entry in payload["entries"]:
        minimizer = read_field_bin(path.with_name(entry["minimizer_file"]))
        grid = GridSpec(entry["grid"]["half_length"], entry["grid"]["n_modes"])
        results.append(
            ThresholdResult(
                best_constant=entry["best_constant"],
                well_depth=entry["well_depth"],
                gamma=entry["gamma"],
                minimizer=minimizer,
                iterations=entry["iterations"],
                residual=entry["residual"],
                grid=grid,
                model=model,
            )
        )
    return results


def select_threshold(results: list[ThresholdResult], gamma: float) -> ThresholdResult:
    for res in results:
        if abs(res.gamma - gamma) <= 1e-12:
            return res
    raise ValueError(f"no threshold entry for gamma={gamma:.6g} "
                     f"(available: {[r.gamma for r in results]})")
