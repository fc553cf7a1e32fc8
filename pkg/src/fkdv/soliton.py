"""Closed-form soliton profiles, their parameter derivatives, and invariants.

The solitary-wave family is phi_c(x) = (3c/2) sech^2(sqrt(c) x / 2) for
speed c > 0.  It satisfies the profile equation phi'' = c phi - phi^2 and
the self-similarity phi_c(x) = c phi_1(sqrt(c) x).  Alongside the profile
we provide its x- and c-derivatives, the primitive zeta_c of the
c-derivative, candidate dual functions for the spectral projection, and
the closed-form values of the standard invariants evaluated on phi_c.

All pointwise formulas are written with the bounded representation
sech(u) = 2 e^{-|u|} / (1 + e^{-2|u|}) so they remain finite for large
arguments instead of overflowing through cosh.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, GridSpec, translate


def _check_speed(c: float) -> float:
    c = float(c)
    if not np.isfinite(c) or c <= 0.0:
        raise ValueError(f"soliton speed must be positive and finite, got c={c}")
    return c


@dataclass(frozen=True)
class SolitonParams:
    """Wave speed (= amplitude scale) and position of a single soliton."""

    c: float
    xi: float = 0.0

    def __post_init__(self) -> None:
        _check_speed(self.c)
        if not np.isfinite(self.xi):
            raise ValueError(f"soliton position must be finite, got xi={self.xi}")


def _sech(u: np.ndarray) -> np.ndarray:
    s = np.exp(-np.abs(u))
    return 2.0 * s / (1.0 + s * s)


def _tanh(u: np.ndarray) -> np.ndarray:
    return np.tanh(u)


def phi(c: float, x) -> np.ndarray:
    """Soliton profile (3c/2) sech^2(sqrt(c) x / 2)."""
    c = _check_speed(c)
    u = 0.5 * np.sqrt(c) * np.asarray(x, dtype=float)
    return 1.5 * c * _sech(u) ** 2


def dphi_dx(c: float, x) -> np.ndarray:
    """x-derivative of the profile: -(3 c^{3/2}/2) sech^2(u) tanh(u), u = sqrt(c) x/2."""
    c = _check_speed(c)
    u = 0.5 * np.sqrt(c) * np.asarray(x, dtype=float)
    return -1.5 * c ** 1.5 * _sech(u) ** 2 * _tanh(u)


def dphi_dc(c: float, x) -> np.ndarray:
    """Speed-derivative of the profile: (3/2) sech^2(u) - (3 sqrt(c) x/4) sech^2(u) tanh(u)."""
    c = _check_speed(c)
    x = np.asarray(x, dtype=float)
    u = 0.5 * np.sqrt(c) * x
    s2 = _sech(u) ** 2
    return 1.5 * s2 - 0.75 * np.sqrt(c) * x * s2 * _tanh(u)


def zeta(c: float, x) -> np.ndarray:
    """Primitive of dphi_dc from -infinity.

    Closed form (3/(2 sqrt(c))) (1 + tanh(sqrt(c) x/2)) + (3x/4) sech^2(sqrt(c) x/2);
    it increases monotonically from 0 at -infinity to 3 c^{-1/2} at +infinity.
    """
    c = _check_speed(c)
    x = np.asarray(x, dtype=float)
    u = 0.5 * np.sqrt(c) * x
    return 1.5 / np.sqrt(c) * (1.0 + _tanh(u)) + 0.75 * x * _sech(u) ** 2


def dzeta_dc(c: float, x) -> np.ndarray:
    """Speed-derivative of zeta (used in the Newton Jacobian of the extraction)."""
    c = _check_speed(c)
    x = np.asarray(x, dtype=float)
    u = 0.5 * np.sqrt(c) * x
    s2 = _sech(u) ** 2
    th = _tanh(u)
    return (
        -0.75 * c ** -1.5 * (1.0 + th)
        + 0.375 * (x / c) * s2
        - 0.375 * (x * x / np.sqrt(c)) * s2 * th
    )


def _sampled(grid: GridSpec, values: np.ndarray, xi: float) -> Field:
    f = Field(grid, values)
    if xi != 0.0:
        f = translate(f, xi)
    return f


def phi_field(grid: GridSpec, c: float, xi: float = 0.0) -> Field:
    """Sample phi_c centered on the grid, then shift by xi via spectral translation.

    Sampling in the centered frame keeps the sech tables identical across
    calls; the spectral shift preserves band-limits and allows xi off the
    grid. For |xi| comparable to the half-length the periodic image error
    is the caller's responsibility.
    """
    return _sampled(grid, phi(c, grid.nodes), xi)


def dphi_dx_field(grid: GridSpec, c: float, xi: float = 0.0) -> Field:
    return _sampled(grid, dphi_dx(c, grid.nodes), xi)


def dphi_dc_field(grid: GridSpec, c: float, xi: float = 0.0) -> Field:
    return _sampled(grid, dphi_dc(c, grid.nodes), xi)


def zeta_field(grid: GridSpec, c: float, xi: float = 0.0) -> Field:
    """Sample zeta_c. Not localized: it tends to 3 c^{-1/2} on the right.

    The sampled array is not periodic; use it only inside quadrature against
    functions that decay on the right, and never shift it spectrally.
    """
    if xi != 0.0:
        raise ValueError("zeta is not periodic; spectral translation is not available")
    return Field(grid, zeta(c, grid.nodes))


def eta1(c: float, grid: GridSpec) -> Field:
    """Closed-form candidate for the first dual function of the projection.

    eta1 = (2/9) c^{-1/2} zeta_c + (2/9) c^{-2} phi_c.  As written this
    candidate pairs to <dphi_dx, eta1> = -1 rather than +1, so it does not
    make the projection reproduce its own range; the coefficient on zeta_c
    must be negated for that.  The authoritative biorthogonal pair is
    constructed by a Gram solve in linearized.dual_basis; this candidate is
    kept so the discrepancy stays visible in the diagnostics and tests.
    """
    c = _check_speed(c)
    vals = (2.0 / 9.0) * c ** -0.5 * zeta(c, grid.nodes) + (2.0 / 9.0) * c ** -2.0 * phi(
        c, grid.nodes
    )
    return Field(grid, vals)


def eta2(c: float, grid: GridSpec) -> Field:
    """Second dual function, (2/9) c^{-1/2} phi_c.

    Unlike eta1 this candidate is already correct: it pairs to 1 against
    dphi_dc and to 0 against dphi_dx (by parity).
    """
    c = _check_speed(c)
    return Field(grid, (2.0 / 9.0) * c ** -0.5 * phi(c, grid.nodes))


@dataclass(frozen=True)
class SolitonInvariants:
    """Closed-form invariant values on the soliton profile."""

    N: float
    H: float
    grad_sq: float
    E2: float


def soliton_invariants(c: float) -> SolitonInvariants:
    """Invariants evaluated on phi_c.

    N = int phi^2 = 6 c^{3/2}; grad_sq = int (phi')^2 = (6/5) c^{5/2};
    H = grad_sq/2 - int phi^3 / 3 = -(9/5) c^{5/2};
    E2 = int (phi'')^2 - (10/3) phi (phi')^2 + (5/9) phi^4 = (18/7) c^{7/2}.
    These follow from int sech^4 = 4/3 and int sech^6 = 16/15 per unit scale.
    """
    c = _check_speed(c)
    return SolitonInvariants(
        N=6.0 * c ** 1.5,
        H=-1.8 * c ** 2.5,
        grad_sq=1.2 * c ** 2.5,
        E2=(18.0 / 7.0) * c ** 3.5,
    )
