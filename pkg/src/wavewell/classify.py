"""Membership of initial data in the invariant sets of the potential well.

States with energy strictly below the well depth split into two flow-invariant
classes by the sign of 2*I - Q: inside the well (dispersion dominates, global
existence) and outside the well (nonlinearity dominates, finite-time blow-up).
At or above the well depth the theory is silent, which gets its own label
rather than an error.  For a threshold computed with nonzero gamma the same
comparison uses E + gamma*M against the shifted depth and 2*I_gamma - Q.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .functionals import StateUW, dispersive_energy, energy, momentum, power_integral
from .grid import RealField
from .wellsolver import ThresholdResult

__all__ = ["WellClass", "ClassLabel", "classify", "scan_scaling_family", "sign_tolerance"]


class WellClass(enum.Enum):
    INSIDE_WELL = "inside_well"      # subcritical, 2I - Q >= 0
    OUTSIDE_WELL = "outside_well"    # subcritical, 2I - Q < 0
    SUPERCRITICAL = "supercritical"  # energy at or above the well depth

    def __str__(self):
        return self.value


@dataclass
class ClassLabel:
    label: WellClass
    energy_used: float      # E at gamma = 0, otherwise E + gamma*M
    depth_used: float
    sign_quantity: float    # 2*I_gamma - Q
    gamma: float


def sign_tolerance(two_i: float, q: float) -> float:
    """Absolute tolerance for the sign of 2*I - Q near the balance manifold."""
    return 1e-12 * max(two_i, q)


def classify(state: StateUW, threshold: ThresholdResult) -> ClassLabel:
    """Label a state against a computed threshold.

    Within floating-point tolerance of the balance manifold the label is
    INSIDE_WELL, matching the closed (non-strict) side of the set definition.
    The zero field is inside the well whenever the energy is subcritical.
    """
    if state.grid != threshold.grid:
        raise ValueError("state and threshold use different grids")
    if state.model != threshold.model:
        raise ValueError("state and threshold use different models")
    gamma = threshold.gamma
    e_used = energy(state).total + (gamma * momentum(state) if gamma != 0.0 else 0.0)
    two_i = 2.0 * dispersive_energy(state.u, state.model, gamma)
    q = power_integral(state.u, state.model.p)
    sign_quantity = two_i - q
    if e_used >= threshold.well_depth:
        label = WellClass.SUPERCRITICAL
    elif sign_quantity >= -sign_tolerance(two_i, q):
        label = WellClass.INSIDE_WELL
    else:
        label = WellClass.OUTSIDE_WELL
    return ClassLabel(
        label=label,
        energy_used=e_used,
        depth_used=threshold.well_depth,
        sign_quantity=sign_quantity,
        gamma=gamma,
    )


def scan_scaling_family(
    u_shape: RealField,
    model,
    threshold: ThresholdResult,
    lambdas,
) -> list[tuple[float, ClassLabel]]:
    """Classify (lam * u_shape, 0) for each scale factor; rows sorted by lam."""
    lams = sorted(float(v) for v in lambdas)
    if not lams:
        raise ValueError("empty scale list")
    if not np.any(u_shape.samples):
        raise ValueError("u_shape must be nonzero")
    zero = RealField(u_shape.grid, np.zeros(u_shape.grid.n_modes))
    rows = []
    for lam in lams:
        state = StateUW(RealField(u_shape.grid, lam * u_shape.samples), zero, model)
        rows.append((lam, classify(state, threshold)))
    return rows
