"""Multiplicative forcing term epsilon * f(gamma * t) and its antiderivative.

The forcing enters the equation as epsilon * f(gamma t) * u with
gamma = epsilon / E, so the profile f is always evaluated in the slow time
tau = gamma t.  Closed-form profiles carry closed-form antiderivatives
F(tau) = int_0^tau f; tabulated profiles use monotone cubic (PCHIP)
interpolation and its exact antiderivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

_NAMED_PROFILES = ("exp_decay", "zero", "const", "tabulated")


@dataclass(frozen=True)
class ForcingSpec:
    """Forcing amplitude epsilon, energy scale E, and slow-time profile f.

    epsilon may be zero (unforced runs); E must be positive so that
    gamma = epsilon / E is always defined.  The exp_decay profile
    f(tau) = e^{-tau} satisfies |f| <= e^{-tau}, the decay hypothesis under
    which the long-time estimates hold.  Tabulated profiles supply
    (tau_table, f_table) sample arrays; outside the table the profile is
    continued by zero on the left and by its last value's decay to zero on
    the right (f = 0 beyond the final node).
    """

    epsilon: float
    E: float
    profile: str = "exp_decay"
    table: tuple = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not np.isfinite(self.epsilon) or self.epsilon < 0.0:
            raise ValueError(f"forcing amplitude must be >= 0, got epsilon={self.epsilon}")
        if not np.isfinite(self.E) or self.E <= 0.0:
            raise ValueError(f"energy scale must be positive, got E={self.E}")
        if self.profile not in _NAMED_PROFILES:
            raise ValueError(
                f"unknown forcing profile {self.profile!r}; expected one of {_NAMED_PROFILES}"
            )
        if self.profile == "tabulated":
            if self.table is None:
                raise ValueError("tabulated profile requires a (tau, f) sample table")
            tau, vals = (np.asarray(a, dtype=float) for a in self.table)
            if tau.ndim != 1 or tau.shape != vals.shape or tau.size < 2:
                raise ValueError("forcing table must be two equal-length 1-d arrays")
            if not np.all(np.diff(tau) > 0.0):
                raise ValueError("forcing table abscissae must be strictly increasing")
            if tau[0] < 0.0:
                raise ValueError("forcing table must start at tau >= 0")
            interp = PchipInterpolator(tau, vals, extrapolate=False)
            object.__setattr__(self, "_interp", interp)
            object.__setattr__(self, "_interp_anti", interp.antiderivative())
            object.__setattr__(self, "_tau_range", (float(tau[0]), float(tau[-1])))
        elif self.table is not None:
            raise ValueError(f"profile {self.profile!r} does not take a sample table")

    @property
    def gamma(self) -> float:
        """Slow-time rate gamma = epsilon / E."""
        return self.epsilon / self.E

    def f(self, tau):
        """Profile value f(tau) in slow time."""
        tau = np.asarray(tau, dtype=float)
        if self.profile == "exp_decay":
            out = np.exp(-tau)
        elif self.profile == "zero":
            out = np.zeros_like(tau)
        elif self.profile == "const":
            out = np.ones_like(tau)
        else:
            lo, hi = self._tau_range
            clipped = np.clip(tau, lo, hi)
            out = np.asarray(self._interp(clipped), dtype=float)
            out = np.where((tau < lo) | (tau > hi), 0.0, out)
        return out if out.ndim else float(out)

    def F(self, tau):
        """Antiderivative F(tau) = int_0^tau f(s) ds."""
        tau = np.asarray(tau, dtype=float)
        if self.profile == "exp_decay":
            out = -np.expm1(-tau)
        elif self.profile == "zero":
            out = np.zeros_like(tau)
        elif self.profile == "const":
            out = tau.copy()
        else:
            lo, hi = self._tau_range
            clipped = np.clip(tau, lo, hi)
            base = np.asarray(self._interp_anti(clipped), dtype=float)
            base = base - float(self._interp_anti(max(lo, 0.0)))
            out = base
        return out if out.ndim else float(out)

    def F_infinity(self) -> float:
        """Limit of F(tau) as tau -> infinity (total slow-time integral)."""
        if self.profile == "exp_decay":
            return 1.0
        if self.profile == "zero":
            return 0.0
        if self.profile == "const":
            return float("inf")
        return float(self.F(self._tau_range[1]))

    def term(self, t):
        """The multiplicative coefficient epsilon * f(gamma t) at fast time t."""
        if self.epsilon == 0.0:
            t = np.asarray(t, dtype=float)
            out = np.zeros_like(t)
            return out if out.ndim else 0.0
        return self.epsilon * self.f(self.gamma * np.asarray(t, dtype=float))
