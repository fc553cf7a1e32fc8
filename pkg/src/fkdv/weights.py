"""Exponentially weighted norms and the time-dependent weight schedule.

Weighted norms ||g||_{L2_w} = ||e^{wx} g||_{L2} are always evaluated in the
frame where the coherent structure sits at x = 0, so the exponential factor
stays bounded on the box.  A hard overflow guard rejects weights where
exp(w * L) would leave the double range instead of silently returning inf.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, GridSpec, _spectral_derivative

# exp(350) ~ 1e152; squares of weighted samples stay finite below this.
MAX_WEIGHT_EXPONENT = 350.0


@dataclass(frozen=True)
class WeightPair:
    """Asymmetric exponential weights (minus side, plus side), both >= 0."""

    minus: float
    plus: float

    def __post_init__(self):
        if self.minus < 0 or self.plus < 0:
            raise ValueError(
                f"weights must be nonnegative, got ({self.minus}, {self.plus})"
            )


@dataclass(frozen=True)
class WeightSchedule:
    """Time-dependent weight envelope.

    The minus-side weight rises from w_min to w_inf while the plus-side weight
    falls from w to w_inf, both along the profile r^(1 - e^{-tau}) in the slow
    time tau = gamma * t:

        minus(t) = w_min * (w_inf / w_min) ** (1 - exp(-gamma t))
        plus(t)  = w     * (w_inf / w)     ** (1 - exp(-gamma t))
    """

    w: float
    w_min: float
    w_inf: float
    gamma: float

    def __post_init__(self):
        if not (0 < self.w_min < self.w_inf < self.w):
            raise ValueError(
                "weight ordering 0 < w_min < w_inf < w required, got "
                f"w_min={self.w_min}, w_inf={self.w_inf}, w={self.w}"
            )
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @classmethod
    def with_defaults(cls, w: float, gamma: float) -> "WeightSchedule":
        """Geometric default spacing: w_min = w/4, w_inf = w/2."""
        return cls(w=w, w_min=w / 4.0, w_inf=w / 2.0, gamma=gamma)

    def minus(self, t) -> float | np.ndarray:
        s = -np.expm1(-self.gamma * np.asarray(t, dtype=float))
        out = self.w_min * (self.w_inf / self.w_min) ** s
        return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out

    def plus(self, t) -> float | np.ndarray:
        s = -np.expm1(-self.gamma * np.asarray(t, dtype=float))
        out = self.w * (self.w_inf / self.w) ** s
        return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


def schedule_weights(schedule: WeightSchedule, t: float) -> WeightPair:
    """The (minus, plus) weight pair at time t."""
    return WeightPair(minus=schedule.minus(t), plus=schedule.plus(t))


def _check_weight(w: float, half_length: float, label: str) -> None:
    if abs(w) * half_length > MAX_WEIGHT_EXPONENT:
        raise ValueError(
            f"weight {label}={w} gives |{label}|*L = {abs(w) * half_length:.1f} "
            f"> {MAX_WEIGHT_EXPONENT:.0f}; exp(wx) would overflow on this box"
        )


def _weight_profile(grid: GridSpec, w) -> np.ndarray:
    """Samples of e^{w(x) x} for a scalar weight or a WeightPair."""
    x = grid.nodes
    if isinstance(w, WeightPair):
        _check_weight(w.minus, grid.half_length, "w_minus")
        _check_weight(w.plus, grid.half_length, "w_plus")
        wx = np.where(x < 0, w.minus * x, w.plus * x)
    else:
        _check_weight(float(w), grid.half_length, "w")
        wx = float(w) * x
    return np.exp(wx)


def weighted_norm_l2(f: Field, w) -> float:
    """||e^{wx} f||_{L2}; `w` is a scalar or a WeightPair (split at x = 0)."""
    prof = _weight_profile(f.grid, w)
    return float(np.sqrt(f.grid.spacing * np.sum((prof * f.values) ** 2)))


def weighted_norm_asym(f: Field, pair: WeightPair) -> float:
    """Two-sided weighted norm: minus weight on x < 0, plus weight on x >= 0."""
    return weighted_norm_l2(f, pair)


def weighted_norm_h1(f: Field, w) -> float:
    """sqrt(||f||^2_{L2_w} + ||f'||^2_{L2_w}) with the spectral derivative."""
    df = Field(f.grid, _spectral_derivative(f.values, f.grid, 1))
    a = weighted_norm_l2(f, w)
    b = weighted_norm_l2(df, w)
    return float(np.hypot(a, b))


def split_at_origin(f: Field) -> tuple[Field, Field]:
    """(f * 1_{x<0}, f * 1_{x>=0}) — the exact split the asymmetric norm uses."""
    x = f.grid.nodes
    neg = np.where(x < 0, f.values, 0.0)
    pos = np.where(x >= 0, f.values, 0.0)
    return Field(f.grid, neg), Field(f.grid, pos)


def q_factor(schedule: WeightSchedule, t: float, s: float, delta: float) -> float:
    """Weight-gap reciprocal sum:

        q(t, s, delta) = 1/(minus(t + delta/2) - minus(s))
                       + 1/(plus(s) - plus(t + delta/2))

    defined for 0 <= s <= t; both gaps are positive because the minus weight is
    strictly increasing and the plus weight strictly decreasing.
    """
    if not 0 <= s <= t:
        raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    gap_minus = schedule.minus(t + delta / 2.0) - schedule.minus(s)
    gap_plus = schedule.plus(s) - schedule.plus(t + delta / 2.0)
    if gap_minus <= 0 or gap_plus <= 0:
        raise ValueError(
            f"degenerate weight gaps at t={t}, s={s}, delta={delta}: "
            f"minus gap {gap_minus}, plus gap {gap_plus}"
        )
    return 1.0 / gap_minus + 1.0 / gap_plus


def q_weighted_sup(
    schedule: WeightSchedule, t: float, delta: float, tol: float = 1e-10
) -> tuple[float, float]:
    """sup over s in [0, t] of e^{-gamma s} q(t, s, delta), and its argmax.

    The objective is smooth with (generically) a single interior maximum, so a
    golden-section search over [0, t] after a coarse bracketing scan is enough.
    """
    obj = lambda s: np.exp(-schedule.gamma * s) * q_factor(schedule, t, s, delta)
    # Coarse scan to bracket the maximum (the objective can be edge-monotone).
    grid_s = np.linspace(0.0, t, 65)
    vals = [obj(s) for s in grid_s]
    i = int(np.argmax(vals))
    lo = grid_s[max(i - 1, 0)]
    hi = grid_s[min(i + 1, len(grid_s) - 1)]
    if hi - lo < tol:
        return float(vals[i]), float(grid_s[i])
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = obj(c), obj(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = obj(d)
    s_star = (a + b) / 2.0
    return float(obj(s_star)), float(s_star)


def q_bound_constant(schedule: WeightSchedule, t: float, delta: float) -> float:
    """The constant C making sup_s e^{-gamma s} q = C e^{gamma delta/2}/(gamma delta).

    Stability of this constant across t is what the weight-gap bound asserts.
    """
    sup, _ = q_weighted_sup(schedule, t, delta)
    g = schedule.gamma
    return float(sup * g * delta / np.exp(g * delta / 2.0))
