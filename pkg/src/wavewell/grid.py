"""Periodic grid, discrete Fourier transforms, multiplier actions and norms.

The whole-line problem is truncated to the periodic box [-X, X).  Real fields
are sampled on N uniform nodes (N even) and transformed with the real FFT, so
the wavenumbers are xi_k = pi*k/X for k = 0..N/2.  All multiplier symbols in
this package are even in xi, which makes the half-spectrum representation
exact.

Quadrature is the uniform Riemann sum h * sum(f), spectrally accurate for
smooth periodic integrands, and the discrete Parseval identity

    h * sum(f^2) = (h/N) * sum(|fft(f)|^2)

fixes the normalization of every frequency-space functional.  In particular
the Sobolev norm of index s is

    ||f||_{H^s}^2 = (h/N) * sum over modes of (1 + xi^2)^s |fhat|^2,

which reduces to the L^2 norm at s = 0.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "GridSpec",
    "RealField",
    "spectrum",
    "field_from_spectrum",
    "apply_multiplier",
    "derivative",
    "antiderivative",
    "lp_norm",
    "sobolev_norm",
    "mode_inner",
    "mode_norm_sq",
    "write_field_csv",
    "read_field_csv",
    "write_field_bin",
    "read_field_bin",
]

@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [-half_length, half_length) with n_modes nodes."""

    half_length: float
    n_modes: int

    def __post_init__(self):
        if self.half_length <= 0:
            raise ValueError("half_length must be positive")
        if self.n_modes <= 0 or self.n_modes % 2 != 0:
            raise ValueError("n_modes must be a positive even integer")
        object.__setattr__(self, "half_length", float(self.half_length))
        object.__setattr__(self, "n_modes", int(self.n_modes))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.n_modes

    @cached_property
    def nodes(self) -> np.ndarray:
        arr = -self.half_length + self.spacing * np.arange(self.n_modes)
        arr.setflags(write=False)
        return arr

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Nonnegative wavenumbers pi*k/X for k = 0..N/2, matching the rfft layout."""
        arr = 2.0 * np.pi * np.fft.rfftfreq(self.n_modes, d=self.spacing)
        arr.setflags(write=False)
        return arr

    @property
    def max_wavenumber(self) -> float:
        return float(np.pi * (self.n_modes // 2) / self.half_length)


@dataclass(eq=False)
class RealField:
    """A real-valued grid function; rejects non-finite samples at construction."""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        arr = np.array(self.samples, dtype=float, copy=True)
        if arr.shape != (self.grid.n_modes,):
            raise ValueError(f"samples must have shape ({self.grid.n_modes},), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field samples must be finite")
        self.samples = arr


def spectrum(f: RealField) -> np.ndarray:
    """Half-spectrum rfft coefficients of the field."""
    return np.fft.rfft(f.samples)


def field_from_spectrum(grid: GridSpec, coeffs: np.ndarray) -> RealField:
    return RealField(grid, np.fft.irfft(coeffs, n=grid.n_modes))


def _multiplier_values(grid: GridSpec, m) -> np.ndarray:
    values = m(grid.wavenumbers) if callable(m) else np.asarray(m, dtype=float)
    values = np.broadcast_to(values, grid.wavenumbers.shape).astype(float)
    if not np.all(np.isfinite(values)):
        bad = grid.wavenumbers[~np.isfinite(values)][0]
        raise ValueError(f"multiplier is not finite at xi={bad:.6g}")
    return values


def apply_multiplier(f: RealField, m) -> RealField:
    """Inverse transform of m(xi_k) * fhat(xi_k) for an even real multiplier.

    ``m`` is a callable on arrays of wavenumbers, or a precomputed array in the
    rfft layout.  The output is real because the multiplier is real and even.
    """
    values = _multiplier_values(f.grid, m)
    return field_from_spectrum(f.grid, values * spectrum(f))


def derivative(f: RealField) -> RealField:
    """Spectral d/dx; the Nyquist mode is dropped to keep odd multipliers real."""
    ik = 1j * f.grid.wavenumbers
    ik[-1] = 0.0
    return field_from_spectrum(f.grid, ik * spectrum(f))


def antiderivative(f: RealField) -> RealField:
    """Spectral antiderivative of a mean-free field; the zero mode is set to 0.

    The input must have (numerically) zero mean: the zero Fourier coefficient
    may not exceed 1e-12 times the field's L^2 norm.
    """
    coeffs = spectrum(f)
    zero_mode = f.grid.spacing * abs(coeffs[0])
    if zero_mode > 1e-12 * max(lp_norm(f, 2.0), 1e-300):
        raise ValueError("mean-free requirement violated: field has a nonzero average")
    xi = f.grid.wavenumbers
    out = np.zeros_like(coeffs)
    out[1:-1] = coeffs[1:-1] / (1j * xi[1:-1])
    return field_from_spectrum(f.grid, out)


def lp_norm(f: RealField, p_exp: float) -> float:
    """(h * sum |f|^p)^(1/p) for p >= 1."""
    if p_exp < 1:
        raise ValueError("p_exp must be at least 1")
    return float((f.grid.spacing * np.sum(np.abs(f.samples) ** p_exp)) ** (1.0 / p_exp))


def _mode_weights(n: int) -> np.ndarray:
    # full-spectrum multiplicity of each rfft mode (Hermitian pairs count twice)
    w = np.full(n, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    return w


def mode_inner(f: RealField, g: RealField, weight) -> float:
    """(h/N) * sum over the full spectrum of weight(xi) * Re(fhat * conj(ghat)).

    Equals the L^2 inner product of W^(1/2) f with W^(1/2) g for the multiplier
    operator W with even symbol ``weight``, by the discrete Parseval identity.
    """
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    values = _multiplier_values(f.grid, weight)
    prod = values * (spectrum(f) * np.conj(spectrum(g))).real
    total = float(np.sum(_mode_weights(prod.size) * prod))
    return f.grid.spacing / f.grid.n_modes * total


def mode_norm_sq(f: RealField, weight) -> float:
    return mode_inner(f, f, weight)


def sobolev_norm(f: RealField, s: float) -> float:
    """Norm of H^s via the Fourier formula with discrete Parseval normalization."""
    xi = f.grid.wavenumbers
    return float(np.sqrt(mode_norm_sq(f, (1.0 + xi**2) ** s)))


# ---------------------------------------------------------------------------
# field files


def write_field_csv(f: RealField, path) -> None:
    lines = ["x,value"]
    for x, v in zip(f.grid.nodes, f.samples):
        lines.append(f"{x:.17g},{v:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_field_csv(path) -> RealField:
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not text or text[0].strip() != "x,value":
        raise ValueError(f"{path}: expected a field CSV with header 'x,value'")
    xs, vs = [], []
    for line in text[1:]:
        sx, sv = line.split(",")
        xs.append(float(sx))
        vs.append(float(sv))
    n = len(vs)
    if n < 2 or n % 2 != 0:
        raise ValueError(f"{path}: field CSV needs an even number of samples")
    grid = GridSpec(half_length=-xs[0], n_modes=n)
    return RealField(grid, np.asarray(vs))


def write_field_bin(f: RealField, path) -> None:
    """Compact dump. Header: half_length (float64), n_modes (int64); payload:
    n_modes float64 samples; everything little-endian."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<d", f.grid.half_length))
        fh.write(struct.pack("<q", f.grid.n_modes))
        fh.write(f.samples.astype("<f8").tobytes())


def read_field_bin(path) -> RealField:
    raw = Path(path).read_bytes()
    if len(raw) < 16:
        raise ValueError(f"{path}: truncated field dump")
    half_length = struct.unpack("<d", raw[0:8])[0]
    n = struct.unpack("<q", raw[8:16])[0]
    if half_length <= 0 or n <= 0 or n % 2 != 0:
        raise ValueError(f"{path}: not a field dump (implausible header)")
    payload = np.frombuffer(raw[16:], dtype="<f8")
    if payload.size != n:
        raise ValueError(f"{path}: expected {n} samples, found {payload.size}")
    return RealField(GridSpec(half_length, n), payload.astype(float))
