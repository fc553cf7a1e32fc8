"""Periodic Fourier collocation grid and the spectral primitives built on it.

Everything downstream (solvers, soliton decompositions, dense operator
audits) works on a uniform grid over the periodic box [-L, L).  Derivatives,
translations and dilations are done in Fourier space, so they are exact for
band-limited data; quadrature is the rectangle rule, which is spectrally
accurate for smooth periodic integrands.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.signal import czt

MIN_POINTS = 64


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [-half_length, half_length).

    Node i sits at ``-half_length + i * spacing`` with
    ``spacing = 2 * half_length / num_points``.
    """

    half_length: float
    num_points: int

    def __post_init__(self):
        if not self.half_length > 0:
            raise ValueError(f"half_length must be positive, got {self.half_length}")
        if self.num_points % 2 != 0:
            raise ValueError(f"num_points must be even, got {self.num_points}")
        if self.num_points < MIN_POINTS:
            raise ValueError(
                f"num_points must be at least {MIN_POINTS}, got {self.num_points}"
            )

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.num_points

    @cached_property
    def nodes(self) -> np.ndarray:
        i = np.arange(self.num_points)
        return -self.half_length + i * self.spacing

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Nonnegative wavenumbers matching numpy's rfft layout: k_m = m*pi/L."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.num_points, d=self.spacing)

    @cached_property
    def odd_derivative_wavenumbers(self) -> np.ndarray:
        # The Nyquist mode has no well-defined odd derivative on the grid
        # (see http://math.mit.edu/~stevenj/fft-deriv.pdf); zero it out.
        k = self.wavenumbers.copy()
        k[-1] = 0.0
        return k

    @cached_property
    def dealias_keep(self) -> np.ndarray:
        """Boolean rfft-space mask implementing the 2/3 rule."""
        m = np.arange(self.num_points // 2 + 1)
        return m <= self.num_points // 3

    def __eq__(self, other):
        return (
            isinstance(other, GridSpec)
            and self.half_length == other.half_length
            and self.num_points == other.num_points
        )

    def __hash__(self):
        return hash((self.half_length, self.num_points))


def make_grid(half_length: float, num_points: int) -> GridSpec:
    """Validated grid constructor (see GridSpec for the node layout)."""
    return GridSpec(half_length=float(half_length), num_points=int(num_points))


@dataclass
class Field:
    """Real samples on a GridSpec."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.num_points,):
            raise ValueError(
                f"values shape {v.shape} does not match grid with "
                f"{self.grid.num_points} points"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("field samples must be finite")
        self.values = v

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


def _spectral_derivative(values: np.ndarray, grid: GridSpec, order: int) -> np.ndarray:
    if order not in (1, 2, 3):
        raise ValueError(f"derivative order must be 1, 2 or 3, got {order}")
    k = grid.odd_derivative_wavenumbers if order % 2 else grid.wavenumbers
    vhat = np.fft.rfft(values)
    return np.fft.irfft(vhat * (1j * k) ** order, n=grid.num_points)


def derivative(f: Field, order: int = 1) -> Field:
    """Spectral derivative of the given order (1-3)."""
    return Field(f.grid, _spectral_derivative(f.values, f.grid, order))


def inner_product(f: Field, g: Field) -> float:
    """Rectangle-rule L2 pairing: spacing * sum(f_i * g_i)."""
    if f.grid != g.grid:
        raise ValueError("inner_product requires fields on the same grid")
    return float(f.grid.spacing * np.dot(f.values, g.values))


def _quad(grid: GridSpec, samples: np.ndarray) -> float:
    return float(grid.spacing * samples.sum())


def l2_norm(f: Field) -> float:
    return float(np.sqrt(max(inner_product(f, f), 0.0)))


def dealias(values_hat: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Apply the 2/3-rule mask to rfft coefficients (returns a new array)."""
    return np.where(grid.dealias_keep, values_hat, 0.0)


def translate(f: Field, shift: float) -> Field:
    """Samples of x -> f(x - shift), via the exact Fourier phase shift."""
    return Field(f.grid, _translate_values(f.values, f.grid, shift))


def _translate_values(values: np.ndarray, grid: GridSpec, shift: float) -> np.ndarray:
    vhat = np.fft.rfft(values)
    vhat *= np.exp(-1j * grid.wavenumbers * shift)
    return np.fft.irfft(vhat, n=grid.num_points)


def dilate(f: Field, alpha: float) -> Field:
    """Samples of x -> f(alpha * x + shift_free) on the same grid.

    Band-limited evaluation of the Fourier series of f at the points
    alpha * x_j.  Exact (to round-off) whenever the dilated spectrum stays
    inside the grid band, i.e. for alpha <= 1 always and for alpha > 1
    whenever f is resolved with margin.
    """
    return Field(f.grid, dilate_values(f.values, f.grid, alpha, 0.0))


def dilate_values(
    values: np.ndarray, grid: GridSpec, alpha: float, offset: float
) -> np.ndarray:
    """Evaluate the Fourier series of `values` at the points alpha*x_j + offset.

    Uses a chirp-Z transform (Bluestein) so the cost stays O(N log N).
    """
    if alpha <= 0:
        raise ValueError(f"dilation factor must be positive, got {alpha}")

    n = grid.num_points
    length = 2.0 * grid.half_length
    chat = np.fft.fft(values) / n
    # Evaluate sum_m chat_m exp(i k_m (alpha x_j + offset)) with k_m = 2 pi m / length
    # and x_j the grid nodes.  In terms of Z_j = exp(2 pi i alpha x_j / length) this
    # is a polynomial in Z_j evaluated at uniformly rotating points, i.e. a chirp-Z
    # transform: Z_j = a * w^j with a = exp(-i pi alpha), w = exp(2 pi i alpha h / length).
    m = np.fft.fftfreq(n, d=1.0 / n)  # integer mode numbers in fft order
    rot_a = np.exp(-1j * np.pi * alpha)
    rot_w = np.exp(2j * np.pi * alpha * grid.spacing / length)
    phase = np.exp(2j * np.pi * m * offset / length)
    coeffs = np.fft.fftshift(chat * phase)  # modes m0 .. m0+n-1 with m0 = -n/2
    m0 = -(n // 2)
    # scipy's czt returns sum_p x_p (a w^{-j})^{-p}; picking a -> 1/rot_a, w -> rot_w
    # turns that into sum_p x_p Z_j^p.
    out = czt(coeffs, m=n, w=rot_w, a=1.0 / rot_a)
    scale = np.exp(1j * (2.0 * np.pi * alpha * m0 / length) * grid.nodes)
    return np.real(out * scale)


def parseval_coefficient_norm_sq(f: Field) -> float:
    """||f||^2 computed from rfft coefficients (Parseval route, for audits)."""
    n = f.grid.num_points
    vhat = np.fft.rfft(f.values)
    weights = np.full(n // 2 + 1, 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0  # Nyquist appears once for even n
    total = float(np.sum(weights * np.abs(vhat) ** 2))
    return total * 2.0 * f.grid.half_length / n**2
