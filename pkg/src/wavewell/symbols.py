"""Fourier-multiplier symbols of the two dispersive operators, and the model record.

The wave model u_tt - L u_xx = B(g(u))_xx couples an elliptic operator L of
order rho >= 0 with a smoothing operator B of order -r <= 0, both realized as
Fourier multipliers with even, strictly positive symbols.  Symbols are
restricted to the form

    symbol(xi) = (1 + xi^2)^alpha * P(xi^2) / Q(xi^2)

where P and Q have nonnegative coefficients with positive constant and leading
terms.  That form is closed under the products and inverse powers needed by
the energy functionals, is positive for every real xi, and has the computable
growth order 2*(deg P - deg Q) + 2*alpha.

Each operator carries two-sided coercivity constants (c_lower, c_upper) with

    c_lower^2 * (1 + xi^2)^(order/2) <= symbol(xi) <= c_upper^2 * (1 + xi^2)^(order/2),

verified by dense sampling plus the asymptotic leading-coefficient ratio.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "OperatorSpec",
    "ModelSpec",
    "ValidationReport",
    "symbol_at",
    "fit_coercivity_constants",
    "validate_model",
    "preset",
    "preset_names",
    "double_dispersion",
    "good_boussinesq",
    "model_to_dict",
    "model_from_dict",
    "load_model",
    "save_model",
]

# Sample set used when fitting/verifying coercivity at construction time.
_DEFAULT_XI = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 600)])

# Relative slack for floating-point comparisons of bounds that hold with
# equality (e.g. a constant symbol against its own fitted constants).
_SLACK = 1e-9


def _poly_eval(coeffs: tuple[float, ...], y):
    """Evaluate a polynomial with ascending coefficients at y (scalar or array)."""
    acc = np.zeros_like(np.asarray(y, dtype=float))
    for c in reversed(coeffs):
        acc = acc * y + c
    return acc


@dataclass(frozen=True)
class OperatorSpec:
    """One multiplier symbol (1+xi^2)^frac_power * P(xi^2)/Q(xi^2).

    numerator / denominator hold the coefficients of P and Q in ascending
    powers of xi^2.  ``order`` is the growth order of the symbol; ``coercivity``
    the pair (c_lower, c_upper).  Both are derived when omitted.
    """

    numerator: tuple[float, ...]
    denominator: tuple[float, ...] = (1.0,)
    frac_power: float = 0.0
    order: float | None = None
    coercivity: tuple[float, float] | None = None

    def __post_init__(self):
        num = tuple(float(c) for c in self.numerator)
        den = tuple(float(c) for c in self.denominator)
        if not num or not den:
            raise ValueError("numerator and denominator need at least one coefficient")
        for name, coeffs in (("numerator", num), ("denominator", den)):
            if any(c < 0 for c in coeffs):
                raise ValueError(f"{name} coefficients must be nonnegative")
            if coeffs[0] <= 0 or coeffs[-1] <= 0:
                raise ValueError(f"{name} constant and leading coefficients must be positive")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)
        object.__setattr__(self, "frac_power", float(self.frac_power))

        derived = 2.0 * (len(num) - len(den)) + 2.0 * self.frac_power
        if self.order is None:
            object.__setattr__(self, "order", derived)
        elif abs(float(self.order) - derived) > 1e-9:
            raise ValueError(
                f"declared order {self.order} does not match coefficient structure "
                f"(expected {derived})"
            )
        else:
            object.__setattr__(self, "order", float(self.order))

        if self.coercivity is None:
            object.__setattr__(self, "coercivity", fit_coercivity_constants(self, _DEFAULT_XI))
        else:
            lo, hi = (float(self.coercivity[0]), float(self.coercivity[1]))
            if not (0 < lo <= hi):
                raise ValueError("coercivity constants must satisfy 0 < c_lower <= c_upper")
            bad = _coercivity_violations(self, _DEFAULT_XI, (lo, hi))
            if bad:
                raise ValueError(f"coercivity constants do not bound the symbol: {bad[0]}")
            object.__setattr__(self, "coercivity", (lo, hi))


def symbol_at(spec: OperatorSpec, xi):
    """Evaluate the symbol at xi (scalar or array).  Strictly positive, even in xi."""
    y = np.square(np.asarray(xi, dtype=float))
    val = (1.0 + y) ** spec.frac_power * _poly_eval(spec.numerator, y) / _poly_eval(spec.denominator, y)
    if np.ndim(xi) == 0:
        return float(val)
    return val


def _asymptotic_ratio(spec: OperatorSpec) -> float:
    # limit of symbol(xi) / (1+xi^2)^(order/2) as |xi| -> infinity
    return spec.numerator[-1] / spec.denominator[-1]


def fit_coercivity_constants(spec: OperatorSpec, xi_samples) -> tuple[float, float]:
    """Tightest (c_lower, c_upper) over the samples plus the asymptotic ratio."""
    xi = np.asarray(xi_samples, dtype=float)
    ratio = symbol_at(spec, xi) / (1.0 + xi**2) ** (spec.order / 2.0)
    lo = min(float(np.min(ratio)), _asymptotic_ratio(spec))
    hi = max(float(np.max(ratio)), _asymptotic_ratio(spec))
    return (math.sqrt(lo), math.sqrt(hi))


def _coercivity_violations(spec, xi_samples, constants, tag="symbol") -> list[str]:
    lo, hi = constants
    xi = np.asarray(xi_samples, dtype=float)
    envelope = (1.0 + xi**2) ** (spec.order / 2.0)
    values = symbol_at(spec, xi)
    out = []
    low = values - lo**2 * envelope
    worst = int(np.argmin(low))
    if low[worst] < -_SLACK * max(values[worst], 1e-300):
        out.append(
            f"{tag} lower coercivity violated at xi={xi[worst]:.6g}: "
            f"{values[worst]:.6g} < {lo**2 * envelope[worst]:.6g}"
        )
    highv = hi**2 * envelope - values
    worst = int(np.argmin(highv))
    if highv[worst] < -_SLACK * max(values[worst], 1e-300):
        out.append(
            f"{tag} upper coercivity violated at xi={xi[worst]:.6g}: "
            f"{values[worst]:.6g} > {hi**2 * envelope[worst]:.6g}"
        )
    asym = _asymptotic_ratio(spec)
    if asym < lo**2 * (1 - _SLACK) or asym > hi**2 * (1 + _SLACK):
        out.append(f"{tag} asymptotic ratio {asym:.6g} outside [{lo**2:.6g}, {hi**2:.6g}]")
    return out


@dataclass(frozen=True)
class ModelSpec:
    """The operator pair (L, B) and the nonlinearity exponent p > 1.

    Derived fields: rho = order of L, r = -order of B, the energy-space index
    s0 = (r + rho)/2, and the smoothness flag for the regularity restriction
    on p (an advisory for the local existence theory, not an error).
    """

    L: OperatorSpec
    B: OperatorSpec
    p: float
    s0: float = field(init=False)
    smoothness_ok: bool = field(init=False)

    def __post_init__(self):
        if self.p <= 1:
            raise ValueError("nonlinearity exponent p must exceed 1")
        if self.L.order < 0:
            raise ValueError("L must have nonnegative order")
        if self.B.order > 0:
            raise ValueError("B must have nonpositive order (a smoothing operator)")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "s0", (self.r + self.rho) / 2.0)
        object.__setattr__(self, "smoothness_ok", self._smoothness_ok())

    @property
    def rho(self) -> float:
        return self.L.order

    @property
    def r(self) -> float:
        return -self.B.order

    def _smoothness_ok(self) -> bool:
        # g(u) = -|u|^{p-1} u is C^inf for odd integer p, C^{p-1} for even
        # integer p and C^{floor(p)} otherwise; the energy index must stay
        # below the available smoothness.
        p = self.p
        if p == round(p):
            if int(round(p)) % 2 == 1:
                return True
            return self.s0 <= p - 2
        return self.s0 <= math.floor(p) - 1


@dataclass
class ValidationReport:
    valid: bool
    violations: list[str]
    warnings: list[str]
    rho: float
    r: float
    s0: float
    p: float


def validate_model(model: ModelSpec, xi_samples) -> ValidationReport:
    """Check the coercivity bounds and index restrictions over the sample set.

    The model is valid iff no bound is violated.  The smoothness restriction
    on p is reported as a warning only: the discrete flow is defined either
    way, but the local existence theory may not cover the model.
    """
    xi = np.asarray(xi_samples, dtype=float)
    if xi.size == 0:
        raise ValueError("xi_samples must be nonempty")
    violations = []
    violations += _coercivity_violations(model.L, xi, model.L.coercivity, tag="L")
    violations += _coercivity_violations(model.B, xi, model.B.coercivity, tag="B")

    rho, r = model.rho, model.r
    if r + rho / 2.0 < 1.0 - 1e-12:
        violations.append(f"index restriction r + rho/2 >= 1 violated: {r + rho / 2.0:.6g}")
    if abs(rho) <= 1e-12 and abs(r - 1.0) <= 1e-12:
        violations.append("(rho, r) = (0, 1) excluded")
    if model.s0 <= 0.5:
        violations.append(f"energy index s0 = {model.s0:.6g} must exceed 1/2")

    warnings = []
    if not model.smoothness_ok:
        warnings.append(
            f"smoothness restriction on p violated (p={model.p:.6g}, s0={model.s0:.6g}): "
            "the local existence theory may not apply"
        )
    return ValidationReport(
        valid=not violations,
        violations=violations,
        warnings=warnings,
        rho=rho,
        r=r,
        s0=model.s0,
        p=model.p,
    )


# ---------------------------------------------------------------------------
# presets


def double_dispersion(gamma1: float, gamma2: float, p: float) -> ModelSpec:
    """Model of u_tt - u_xx - gamma1 u_xxtt + gamma2 u_xxxx = (g(u))_xx.

    Factoring the linear part through B = (1 - gamma1 dx^2)^{-1} gives
    b(xi) = 1/(1 + gamma1 xi^2) and l(xi) = (1 + gamma2 xi^2)/(1 + gamma1 xi^2).
    """
    if gamma1 <= 0 or gamma2 <= 0:
        raise ValueError("double_dispersion requires gamma1 > 0 and gamma2 > 0")
    B = OperatorSpec(numerator=(1.0,), denominator=(1.0, gamma1))
    L = OperatorSpec(numerator=(1.0, gamma2), denominator=(1.0, gamma1))
    return ModelSpec(L=L, B=B, p=p)


def good_boussinesq(gamma2: float, p: float) -> ModelSpec:
    """Model of u_tt - u_xx + gamma2 u_xxxx = (g(u))_xx: B = identity, l(xi) = 1 + gamma2 xi^2."""
    if gamma2 <= 0:
        raise ValueError("good_boussinesq requires gamma2 > 0")
    B = OperatorSpec(numerator=(1.0,))
    L = OperatorSpec(numerator=(1.0, gamma2))
    return ModelSpec(L=L, B=B, p=p)


_PRESETS = {
    "double_dispersion": (double_dispersion, ("gamma1", "gamma2", "p")),
    "good_boussinesq": (good_boussinesq, ("gamma2", "p")),
}


def preset_names() -> dict[str, tuple[str, ...]]:
    """Mapping of preset name to its parameter names."""
    return {name: params for name, (_, params) in _PRESETS.items()}


def preset(name: str, **params) -> ModelSpec:
    if name not in _PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(_PRESETS)}")
    fn, wanted = _PRESETS[name]
    missing = [k for k in wanted if k not in params]
    extra = [k for k in params if k not in wanted]
    if missing or extra:
        raise ValueError(f"preset {name!r} takes parameters {wanted}; missing {missing}, unknown {extra}")
    return fn(**{k: float(v) for k, v in params.items()})


# ---------------------------------------------------------------------------
# model files (JSON; unknown keys rejected)


def _operator_to_dict(spec: OperatorSpec) -> dict:
    return {
        "numerator": list(spec.numerator),
        "denominator": list(spec.denominator),
        "frac_power": spec.frac_power,
        "order": spec.order,
        "coercivity": list(spec.coercivity),
    }


def _operator_from_dict(data: dict, tag: str) -> OperatorSpec:
    allowed = {"numerator", "denominator", "frac_power", "order", "coercivity"}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown keys in operator block {tag!r}: {sorted(unknown)}")
    if "numerator" not in data:
        raise ValueError(f"operator block {tag!r} needs a numerator")
    coer = data.get("coercivity")
    return OperatorSpec(
        numerator=tuple(data["numerator"]),
        denominator=tuple(data.get("denominator", (1.0,))),
        frac_power=data.get("frac_power", 0.0),
        order=data.get("order"),
        coercivity=tuple(coer) if coer is not None else None,
    )


def model_to_dict(model: ModelSpec) -> dict:
    return {"p": model.p, "L": _operator_to_dict(model.L), "B": _operator_to_dict(model.B)}


def model_from_dict(data: dict) -> ModelSpec:
    if "preset" in data:
        extra = set(data) - {"preset"}
        name = data["preset"]
        if name not in _PRESETS:
            raise ValueError(f"unknown preset {name!r}")
        wanted = set(_PRESETS[name][1])
        unknown = extra - wanted
        if unknown:
            raise ValueError(f"unknown keys in preset model: {sorted(unknown)}")
        return preset(name, **{k: data[k] for k in extra})
    unknown = set(data) - {"p", "L", "B"}
    if unknown:
        raise ValueError(f"unknown keys in model: {sorted(unknown)}")
    for key in ("p", "L", "B"):
        if key not in data:
            raise ValueError(f"model is missing key {key!r}")
    return ModelSpec(
        L=_operator_from_dict(data["L"], "L"),
        B=_operator_from_dict(data["B"], "B"),
        p=float(data["p"]),
    )


def load_model(path) -> ModelSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def save_model(model: ModelSpec, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")
