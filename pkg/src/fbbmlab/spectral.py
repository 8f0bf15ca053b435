"""Periodic spectral toolbox: grid, transforms, Fourier multipliers, free group.

Conventions used throughout the package:

* the box is [-L, L) sampled at n equispaced points, dx = 2L/n;
* wavenumbers are xi_k = pi*k/L for k in {-n/2, ..., n/2 - 1}, stored in
  FFT order;
* the forward transform matches the continuum one, hat(u)(xi_k) is the
  trapezoid approximation of integral(u(x) exp(-i xi_k x) dx), so a unit
  constant on a box of half-length pi has hat(u)(0) = 2*pi;
* with that normalization Parseval reads
  ||u||_2^2 = (1/2pi) * sum_k |hat(u)(xi_k)|^2 * (pi/L).

Odd (imaginary) symbols zero the unpaired Nyquist mode -n/2 so that real
fields stay real and skew symmetry is exact on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpectralGrid",
    "Field",
    "Spectrum",
    "make_grid",
    "forward",
    "inverse",
    "apply_multiplier",
    "field_l2",
    "field_linf",
    "spectrum_l2",
    "frac_deriv",
    "bessel",
    "hilbert",
    "op_a",
    "deriv",
    "group_propagate",
    "a_symbol",
    "a_symbol_prime",
    "group_symbol",
    "group_symbol_dxi",
    "group_symbol_dxi2",
    "translate",
]


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid on [-L, L) with FFT-ordered wavenumbers."""

    n: int
    L: float
    xs: np.ndarray
    xis: np.ndarray
    dx: float

    def __eq__(self, other):
        if not isinstance(other, SpectralGrid):
            return NotImplemented
        return self.n == other.n and self.L == other.L

    def __hash__(self):
        return hash((self.n, self.L))


@dataclass
class Field:
    """Real samples of a function on a SpectralGrid."""

    grid: SpectralGrid
    values: np.ndarray

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


@dataclass
class Spectrum:
    """Complex Fourier coefficients in FFT order, continuum normalization."""

    grid: SpectralGrid
    coeffs: np.ndarray

    def copy(self) -> "Spectrum":
        return Spectrum(self.grid, self.coeffs.copy())


def make_grid(n: int, L: float) -> SpectralGrid:
    """Build the periodic grid; n must be a power of two, n >= 16, L > 0."""
    if not isinstance(n, (int, np.integer)):
        raise ValueError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 16 or (n & (n - 1)) != 0:
        raise ValueError(f"n must be a power of two with n >= 16, got {n}")
    L = float(L)
    if not np.isfinite(L) or L <= 0:
        raise ValueError(f"L must be a positive finite number, got {L}")
    dx = 2.0 * L / n
    xs = -L + dx * np.arange(n)
    xis = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)  # equals pi*k/L, FFT order
    xs.setflags(write=False)
    xis.setflags(write=False)
    return SpectralGrid(n=n, L=L, xs=xs, xis=xis, dx=dx)


def _check_same_grid(a: SpectralGrid, b: SpectralGrid) -> None:
    if a != b:
        raise ValueError(f"grid mismatch: (n={a.n}, L={a.L}) vs (n={b.n}, L={b.L})")


def forward(f: Field) -> Spectrum:
    """hat(u)(xi_k) = dx * sum_j u_j exp(-i xi_k x_j)."""
    g = f.grid
    vals = np.asarray(f.values)
    if vals.shape != (g.n,):
        raise ValueError(f"field has shape {vals.shape}, expected ({g.n},)")
    # x_0 = -L, so the DFT needs the phase exp(-i xi x_0) = (-1)^k.
    phase = np.exp(1j * g.xis * g.L)
    return Spectrum(g, g.dx * phase * np.fft.fft(vals))


def inverse(s: Spectrum) -> Field:
    """Inverse of forward; returns the real part (imag must be roundoff)."""
    g = s.grid
    coeffs = np.asarray(s.coeffs)
    if coeffs.shape != (g.n,):
        raise ValueError(f"spectrum has shape {coeffs.shape}, expected ({g.n},)")
    phase = np.exp(-1j * g.xis * g.L)
    vals = np.fft.ifft(phase * coeffs) / g.dx
    return Field(g, vals.real.copy())


def inverse_complex(s: Spectrum) -> np.ndarray:
    """Like inverse but keeps the imaginary part, for diagnostics."""
    g = s.grid
    phase = np.exp(-1j * g.xis * g.L)
    return np.fft.ifft(phase * np.asarray(s.coeffs)) / g.dx


def apply_multiplier(s: Spectrum, symbol: np.ndarray) -> Spectrum:
    """Multiply a spectrum by a symbol array sampled on grid.xis."""
    symbol = np.asarray(symbol)
    if symbol.shape != s.coeffs.shape:
        raise ValueError(
            f"symbol shape {symbol.shape} does not match spectrum {s.coeffs.shape}"
        )
    if not np.all(np.isfinite(symbol)):
        raise ValueError("symbol contains non-finite entries")
    return Spectrum(s.grid, s.coeffs * symbol)


def field_l2(f: Field) -> float:
    return float(np.sqrt(f.grid.dx * np.sum(np.asarray(f.values) ** 2)))


def field_linf(f: Field) -> float:
    return float(np.max(np.abs(f.values)))


def spectrum_l2(s: Spectrum) -> float:
    """L2 norm computed in spectrum space; equals field_l2 by Parseval."""
    g = s.grid
    return float(np.sqrt(np.sum(np.abs(s.coeffs) ** 2) / (2.0 * g.L)))


def _apply_symbol_to_field(f: Field, symbol: np.ndarray) -> Field:
    return inverse(apply_multiplier(forward(f), symbol))


def _nyquist_mask(grid: SpectralGrid) -> np.ndarray:
    """1 everywhere except the unpaired mode k = -n/2."""
    mask = np.ones(grid.n)
    mask[grid.n // 2] = 0.0
    return mask


def frac_deriv_symbol(grid: SpectralGrid, alpha: float) -> np.ndarray:
    """|xi|^alpha; even symbol, Nyquist kept. alpha = 0 gives the identity."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if alpha == 0:
        return np.ones(grid.n)
    return np.abs(grid.xis) ** alpha


def bessel_symbol(grid: SpectralGrid, s: float) -> np.ndarray:
    """(1 + xi^2)^(s/2), any real s."""
    return (1.0 + grid.xis**2) ** (s / 2.0)


def hilbert_symbol(grid: SpectralGrid) -> np.ndarray:
    """-i*sgn(xi) with sgn(0) = 0; odd, so the Nyquist mode is zeroed."""
    sym = -1j * np.sign(grid.xis)
    sym[grid.n // 2] = 0.0
    return sym


def a_symbol(xi, alpha: float):
    """Symbol of A = -d/dx (1 + D^alpha)^(-1), i.e. -i*xi/(1 + |xi|^alpha)."""
    xi = np.asarray(xi, dtype=float)
    return -1j * xi / (1.0 + np.abs(xi) ** alpha)


def a_symbol_grid(grid: SpectralGrid, alpha: float) -> np.ndarray:
    sym = a_symbol(grid.xis, alpha)
    sym = sym * _nyquist_mask(grid)
    return sym


def frac_deriv(f: Field, alpha: float) -> Field:
    return _apply_symbol_to_field(f, frac_deriv_symbol(f.grid, alpha))


def bessel(f: Field, s: float) -> Field:
    return _apply_symbol_to_field(f, bessel_symbol(f.grid, s))


def hilbert(f: Field) -> Field:
    return _apply_symbol_to_field(f, hilbert_symbol(f.grid))


def op_a(f: Field, alpha: float) -> Field:
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    return _apply_symbol_to_field(f, a_symbol_grid(f.grid, alpha))


def deriv(f: Field, order: int = 1) -> Field:
    """d^order/dx^order; odd orders zero the Nyquist mode."""
    sym = (1j * f.grid.xis) ** order
    if order % 2 == 1:
        sym = sym * _nyquist_mask(f.grid)
    return _apply_symbol_to_field(f, sym)


def _dispersion(xi, alpha: float):
    """Phase a(xi) = xi / (1 + |xi|^alpha); the free group is exp(-i a t)."""
    xi = np.asarray(xi, dtype=float)
    return xi / (1.0 + np.abs(xi) ** alpha)


def a_symbol_prime(xi, alpha: float):
    """d/dxi of the phase: (1 + (1-alpha)|xi|^alpha) / (1 + |xi|^alpha)^2."""
    xi = np.asarray(xi, dtype=float)
    p = np.abs(xi) ** alpha
    return (1.0 + (1.0 - alpha) * p) / (1.0 + p) ** 2


def group_symbol(xi, t: float, alpha: float):
    """F(t, xi) = exp(-i t xi / (1 + |xi|^alpha)); |F| = 1."""
    return np.exp(-1j * t * _dispersion(xi, alpha))


def group_symbol_dxi(xi, t: float, alpha: float):
    """d/dxi of the group symbol, closed form.

    dF/dxi = -i t (1 + (1-alpha)|xi|^alpha) / (1 + |xi|^alpha)^2 * F.
    """
    xi = np.asarray(xi, dtype=float)
    return -1j * t * a_symbol_prime(xi, alpha) * group_symbol(xi, t, alpha)


def group_symbol_dxi2(xi, t: float, alpha: float):
    """Second xi-derivative of the group symbol, closed form.

    (-it)^2 (1 + (1-alpha)|xi|^alpha)^2 / (1 + |xi|^alpha)^4 * F
      + it alpha (alpha+1) |xi|^(alpha-1) sgn(xi) / (1 + |xi|^alpha)^3 * F
      + it alpha (1-alpha) |xi|^(2 alpha - 1) sgn(xi) / (1 + |xi|^alpha)^3 * F

    The |xi|^(alpha-1) factor blows up at xi = 0 for alpha < 1; callers
    evaluate away from the origin.
    """
    xi = np.asarray(xi, dtype=float)
    p = np.abs(xi) ** alpha
    sgn = np.sign(xi)
    F = group_symbol(xi, t, alpha)
    quad = (-1j * t) ** 2 * (1.0 + (1.0 - alpha) * p) ** 2 / (1.0 + p) ** 4 * F
    with np.errstate(divide="ignore", invalid="ignore"):
        sing = (
            1j
            * t
            * alpha
            * sgn
            / (1.0 + p) ** 3
            * (
                (alpha + 1.0) * np.abs(xi) ** (alpha - 1.0)
                + (1.0 - alpha) * np.abs(xi) ** (2.0 * alpha - 1.0)
            )
            * F
        )
    return quad + sing


def group_propagate(f: Field, t: float, alpha: float) -> Field:
    """Apply the free group exp(tA); exactly unitary on the grid."""
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    g = f.grid
    a = _dispersion(g.xis, alpha) * _nyquist_mask(g)
    sym = np.exp(-1j * t * a)
    return _apply_symbol_to_field(f, sym)


def translate(f: Field, shift: float) -> Field:
    """Periodic translation u(x) -> u(x - shift) via the spectral phase."""
    g = f.grid
    sym = np.exp(-1j * g.xis * shift) * _nyquist_mask(g) + np.zeros(g.n)
    sym[g.n // 2] += np.cos(g.xis[g.n // 2] * shift)  # keep Nyquist real
    return _apply_symbol_to_field(f, sym)
