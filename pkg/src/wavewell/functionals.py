"""Scalar functionals of the flow: energy, momentum and the two well functionals.

The potential energy splits into a dispersive part and a nonlinear part,

    dispersive_energy(u)  = 1/2 ||B^(-1/2) L^(1/2) u||_{L^2}^2,
    power_integral(u)     = ||u||_{L^{p+1}}^{p+1},

and the conserved quantities of the evolution are

    energy   E(u, w) = 1/2 ||B^(-1/2) w||^2 + dispersive - power/(p+1),
    momentum M(u, w) = <B^(-1/2) u, B^(-1/2) w>.

Quadratic functionals are evaluated in frequency space (one transform, then a
weighted mode sum, exact under Parseval); the purely local power integral is a
real-space quadrature.  A shift parameter gamma with gamma^2 below the lower
coercivity constant of L replaces L by L - gamma^2, which tilts the balance
between dispersion and nonlinearity and connects the well to traveling waves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import RealField, lp_norm, mode_inner, mode_norm_sq
from .symbols import ModelSpec, symbol_at

__all__ = [
    "StateUW",
    "EnergyBreakdown",
    "power_nonlinearity",
    "power_primitive",
    "power_integral",
    "dispersive_energy",
    "potential_energy",
    "energy",
    "momentum",
    "augmented_energy",
    "augmented_energy_shifted",
]


@dataclass
class StateUW:
    """The solver state: the wave field u and the flux field w on one grid."""

    u: RealField
    w: RealField
    model: ModelSpec

    def __post_init__(self):
        if self.u.grid != self.w.grid:
            raise ValueError("u and w must share one grid")

    @property
    def grid(self):
        return self.u.grid


@dataclass
class EnergyBreakdown:
    kinetic: float
    dispersive: float
    nonlinear: float
    total: float
    momentum: float


def power_nonlinearity(samples: np.ndarray, p: float) -> np.ndarray:
    """g(u) = -|u|^(p-1) u, with u = 0 mapped exactly to 0 for non-integer p."""
    return -np.sign(samples) * np.abs(samples) ** p


def power_primitive(samples: np.ndarray, p: float) -> np.ndarray:
    """G(u) = integral of g from 0 to u = -|u|^(p+1)/(p+1)."""
    return -np.abs(samples) ** (p + 1.0) / (p + 1.0)


def power_integral(u: RealField, p: float) -> float:
    """The L^{p+1} integral of |u| (the nonlinear part of the potential, scaled)."""
    return lp_norm(u, p + 1.0) ** (p + 1.0)


def _check_gamma(model: ModelSpec, gamma: float) -> None:
    c1 = model.L.coercivity[0]
    if gamma != 0.0 and gamma * gamma >= c1 * c1:
        raise ValueError(f"gamma outside coercive range: need gamma^2 < {c1 * c1:.6g}")


def _shifted_weight(model: ModelSpec, grid, gamma: float) -> np.ndarray:
    xi = grid.wavenumbers
    return (symbol_at(model.L, xi) - gamma * gamma) / symbol_at(model.B, xi)


def dispersive_energy(u: RealField, model: ModelSpec, gamma: float = 0.0) -> float:
    """1/2 ||B^(-1/2) (L - gamma^2)^(1/2) u||^2; plain dispersive part at gamma = 0.

    Positive for u != 0 while gamma^2 stays below the lower coercivity
    constant of L squared; raises outside that range.
    """
    _check_gamma(model, gamma)
    return 0.5 * mode_norm_sq(u, _shifted_weight(model, u.grid, gamma))


def potential_energy(u: RealField, model: ModelSpec) -> float:
    """V(u) = E(u, 0) = dispersive_energy(u) - power_integral(u)/(p+1)."""
    return dispersive_energy(u, model) - power_integral(u, model.p) / (model.p + 1.0)


def _smoothing_weight(model: ModelSpec, grid) -> np.ndarray:
    return 1.0 / symbol_at(model.B, grid.wavenumbers)


def energy(state: StateUW) -> EnergyBreakdown:
    kinetic = 0.5 * mode_norm_sq(state.w, _smoothing_weight(state.model, state.grid))
    dispersive = dispersive_energy(state.u, state.model)
    nonlinear = power_integral(state.u, state.model.p) / (state.model.p + 1.0)
    return EnergyBreakdown(
        kinetic=kinetic,
        dispersive=dispersive,
        nonlinear=nonlinear,
        total=kinetic + dispersive - nonlinear,
        momentum=momentum(state),
    )


def momentum(state: StateUW) -> float:
    return mode_inner(state.u, state.w, _smoothing_weight(state.model, state.grid))


def augmented_energy(state: StateUW, gamma: float) -> float:
    """E + gamma*M, the conserved quantity matched to the shifted well."""
    _check_gamma(state.model, gamma)
    return energy(state).total + gamma * momentum(state)


def augmented_energy_shifted(state: StateUW, gamma: float) -> float:
    """Independent evaluation of E + gamma*M through the completed square:

        1/2 ||B^(-1/2)(w + gamma*u)||^2 + dispersive_energy(u, gamma) - power/(p+1).
    """
    _check_gamma(state.model, gamma)
    shifted = RealField(state.grid, state.w.samples + gamma * state.u.samples)
    kin = 0.5 * mode_norm_sq(shifted, _smoothing_weight(state.model, state.grid))
    return (
        kin
        + dispersive_energy(state.u, state.model, gamma)
        - power_integral(state.u, state.model.p) / (state.model.p + 1.0)
    )
