"""Initial-data families for runs and sweeps.

The derivative-of-Gaussian shape is the canonical mean-free family for
Levine-tracked blow-up runs: it is the x-derivative of an L^2 profile, which
the concavity argument requires, while bump shapes (Gaussian, sech powers)
carry a nonzero mean.
"""

from __future__ import annotations

import numpy as np

from .grid import GridSpec, RealField, read_field_bin, read_field_csv
from .wellsolver import ThresholdResult, nehari_rescale

__all__ = [
    "gaussian",
    "sech_pow",
    "derivative_of_gaussian",
    "scaled_ground_state",
    "zero_field",
    "field_from_file",
    "build_field",
    "FAMILY_PARAMS",
]


def zero_field(grid: GridSpec) -> RealField:
    return RealField(grid, np.zeros(grid.n_modes))


def _check_width(width: float) -> None:
    if width <= 0:
        raise ValueError("width must be positive")


def gaussian(grid: GridSpec, amplitude: float, width: float, center: float = 0.0) -> RealField:
    _check_width(width)
    x = grid.nodes - center
    return RealField(grid, amplitude * np.exp(-(x**2) / (2.0 * width**2)))


def sech_pow(grid: GridSpec, amplitude: float, width: float, exponent: float = 1.0) -> RealField:
    _check_width(width)
    return RealField(grid, amplitude / np.cosh(grid.nodes / width) ** exponent)


def derivative_of_gaussian(grid: GridSpec, amplitude: float, width: float) -> RealField:
    """amplitude * d/dx exp(-x^2 / (2 width^2)); exactly mean-free."""
    _check_width(width)
    x = grid.nodes
    return RealField(grid, -amplitude * (x / width**2) * np.exp(-(x**2) / (2.0 * width**2)))


def scaled_ground_state(threshold: ThresholdResult, scale: float) -> RealField:
    """scale times the minimizer rescaled onto the balance manifold 2I = Q."""
    _, ground = nehari_rescale(threshold.minimizer, threshold.model, threshold.gamma)
    return RealField(ground.grid, scale * ground.samples)


def field_from_file(grid: GridSpec, path: str) -> RealField:
    f = read_field_csv(path) if str(path).endswith(".csv") else read_field_bin(path)
    if f.grid != grid:
        raise ValueError(
            f"field file {path} uses grid (X={f.grid.half_length}, N={f.grid.n_modes}), "
            f"expected (X={grid.half_length}, N={grid.n_modes})"
        )
    return f


FAMILY_PARAMS = {
    "zero": (),
    "gaussian": ("amplitude", "width", "center"),
    "sech_pow": ("amplitude", "width", "exponent"),
    "derivative_of_gaussian": ("amplitude", "width"),
    "scaled_ground_state": ("scale",),
    "from_file": ("path",),
}

_DEFAULTS = {
    ("gaussian", "center"): 0.0,
    ("sech_pow", "exponent"): 1.0,
}


def build_field(grid: GridSpec, descriptor: dict, threshold: ThresholdResult | None = None) -> RealField:
    """Construct a field from a {"family": name, ...params} descriptor."""
    if "family" not in descriptor:
        raise ValueError("initial-data descriptor needs a 'family' key")
    name = descriptor["family"]
    if name not in FAMILY_PARAMS:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILY_PARAMS)}")
    wanted = FAMILY_PARAMS[name]
    given = {k: v for k, v in descriptor.items() if k != "family"}
    unknown = set(given) - set(wanted)
    if unknown:
        raise ValueError(f"unknown keys for family {name!r}: {sorted(unknown)}")
    params = {}
    for key in wanted:
        if key in given:
            params[key] = given[key]
        elif (name, key) in _DEFAULTS:
            params[key] = _DEFAULTS[(name, key)]
        else:
            raise ValueError(f"family {name!r} is missing parameter {key!r}")

    if name == "zero":
        return zero_field(grid)
    if name == "gaussian":
        return gaussian(grid, float(params["amplitude"]), float(params["width"]), float(params["center"]))
    if name == "sech_pow":
        return sech_pow(grid, float(params["amplitude"]), float(params["width"]), float(params["exponent"]))
    if name == "derivative_of_gaussian":
        return derivative_of_gaussian(grid, float(params["amplitude"]), float(params["width"]))
    if name == "scaled_ground_state":
        if threshold is None:
            raise ValueError("scaled_ground_state needs a threshold result")
        if threshold.grid != grid:
            raise ValueError("scaled_ground_state: threshold grid does not match the run grid")
        return scaled_ground_state(threshold, float(params["scale"]))
    return field_from_file(grid, str(params["path"]))
