"""Closed-form radial candidate profiles and their selection rules.

Five families, each with exact first and second derivatives:

* ``PowerDecay``:        u(r) = eps * (1+r)**(-gamma)
* ``LogCorrectedDecay``: u(r) = eps * (1+r)**(-gamma) * (1 - k/(1+log(1+r)))
* ``LinearBounded``:     u(r) = a * (1 + R - r) on [0, R]
* ``LogBounded``:        u(r) = a * log(1 + R + r) on [0, R]
* ``ConstantProfile``:   u(r) = c

Parameter selection follows deterministic rules: gamma sits at the
midpoint of its admissible open interval (maximising distance to both
failure boundaries), and the log-correction weight k is fixed at half
of its admissible bound gamma/(2*gamma+3), so certificates are
reproducible.  Amplitudes are seeds only; the verifier's tuning loop
owns the final value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .riesz import RadialFunction


class EmptyInterval(ValueError):
    """The admissible parameter interval is empty for these exponents."""


def _as_array(r):
    arr = np.asarray(r, dtype=float)
    return arr, arr.ndim == 0


def log_correction_bound(gamma: float) -> float:
    """Largest admissible log-correction weight; k must stay below
    gamma/(2*gamma+3), the strictest of the sign constraints."""
    return gamma / (2.0 * gamma + 3.0)


@dataclass(frozen=True)
class PowerDecay:
    epsilon: float
    gamma: float

    def __post_init__(self):
        if self.epsilon <= 0 or self.gamma <= 0:
            raise ValueError("epsilon and gamma must be positive")

    family = "power_decay"

    @property
    def amplitude(self) -> float:
        return self.epsilon

    def with_amplitude(self, a: float) -> "PowerDecay":
        return replace(self, epsilon=a)

    def u(self, r):
        x, scalar = _as_array(r)
        out = self.epsilon * (1.0 + x) ** (-self.gamma)
        return float(out) if scalar else out

    def du(self, r):
        x, scalar = _as_array(r)
        out = -self.epsilon * self.gamma * (1.0 + x) ** (-self.gamma - 1.0)
        return float(out) if scalar else out

    def d2u(self, r):
        x, scalar = _as_array(r)
        out = self.epsilon * self.gamma * (self.gamma + 1.0) * (1.0 + x) ** (-self.gamma - 2.0)
        return float(out) if scalar else out

    def to_radial_function(self) -> RadialFunction:
        # (r/(1+r))**gamma >= 1/2 from this radius on, so the tail band holds
        thr = 0.5 ** (1.0 / self.gamma)
        radius = 2.0 * thr / (1.0 - thr)
        return RadialFunction.power_tail(
            self.u, self.gamma, tail_radius=max(radius, 2.0), tail_constant=self.epsilon
        )

    def to_json_dict(self) -> dict:
        return {"family": self.family, "epsilon": self.epsilon, "gamma": self.gamma}


@dataclass(frozen=True)
class LogCorrectedDecay:
    epsilon: float
    gamma: float
    k: float

    def __post_init__(self):
        if self.epsilon <= 0 or self.gamma <= 0:
            raise ValueError("epsilon and gamma must be positive")
        if not 0 < self.k < log_correction_bound(self.gamma):
            raise ValueError(
                f"k must lie in (0, {log_correction_bound(self.gamma):.6g}) for gamma={self.gamma:.6g}"
            )

    family = "log_corrected_decay"

    @property
    def amplitude(self) -> float:
        return self.epsilon

    def with_amplitude(self, a: float) -> "LogCorrectedDecay":
        return replace(self, epsilon=a)

    def u(self, r):
        x, scalar = _as_array(r)
        w = 1.0 + np.log1p(x)
        out = self.epsilon * (1.0 + x) ** (-self.gamma) * (1.0 - self.k / w)
        return float(out) if scalar else out

    def du(self, r):
        x, scalar = _as_array(r)
        w = 1.0 + np.log1p(x)
        g, k = self.gamma, self.k
        out = self.epsilon * (1.0 + x) ** (-g - 1.0) * (-g * (1.0 - k / w) + k / w**2)
        return float(out) if scalar else out

    def d2u(self, r):
        x, scalar = _as_array(r)
        w = 1.0 + np.log1p(x)
        g, k = self.gamma, self.k
        bracket = (g + 1.0) * (g * (1.0 - k / w) - k / w**2) - g * k / w**2 - 2.0 * k / w**3
        out = self.epsilon * (1.0 + x) ** (-g - 2.0) * bracket
        return float(out) if scalar else out

    def to_radial_function(self) -> RadialFunction:
        # lower band edge: (1-k)*(r/(1+r))**gamma >= 1/2
        thr = (1.0 / (2.0 * (1.0 - self.k))) ** (1.0 / self.gamma)
        radius = 2.0 * thr / (1.0 - thr)
        return RadialFunction.power_tail(
            self.u, self.gamma, tail_radius=max(radius, 2.0), tail_constant=self.epsilon
        )

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "k": self.k,
        }


@dataclass(frozen=True)
class LinearBounded:
    amplitude_value: float
    radius: float

    def __post_init__(self):
        if self.amplitude_value <= 0 or self.radius <= 0:
            raise ValueError("amplitude and radius must be positive")

    family = "linear_bounded"

    @property
    def amplitude(self) -> float:
        return self.amplitude_value

    def with_amplitude(self, a: float) -> "LinearBounded":
        return replace(self, amplitude_value=a)

    def u(self, r):
        x, scalar = _as_array(r)
        out = np.where(x <= self.radius, self.amplitude_value * (1.0 + self.radius - x), 0.0)
        return float(out) if scalar else out

    def du(self, r):
        x, scalar = _as_array(r)
        out = np.where(x <= self.radius, -self.amplitude_value, 0.0)
        return float(out) if scalar else out

    def d2u(self, r):
        x, scalar = _as_array(r)
        out = np.zeros_like(x)
        return float(out) if scalar else out

    def to_radial_function(self) -> RadialFunction:
        return RadialFunction.compact_support(self.u, self.radius)

    def to_json_dict(self) -> dict:
        return {"family": self.family, "amplitude": self.amplitude_value, "R": self.radius}


@dataclass(frozen=True)
class LogBounded:
    amplitude_value: float
    radius: float

    def __post_init__(self):
        if self.amplitude_value <= 0 or self.radius <= 0:
            raise ValueError("amplitude and radius must be positive")

    family = "log_bounded"

    @property
    def amplitude(self) -> float:
        return self.amplitude_value

    def with_amplitude(self, a: float) -> "LogBounded":
        return replace(self, amplitude_value=a)

    def u(self, r):
        x, scalar = _as_array(r)
        out = np.where(x <= self.radius, self.amplitude_value * np.log(1.0 + self.radius + x), 0.0)
        return float(out) if scalar else out

    def du(self, r):
        x, scalar = _as_array(r)
        out = np.where(x <= self.radius, self.amplitude_value / (1.0 + self.radius + x), 0.0)
        return float(out) if scalar else out

    def d2u(self, r):
        x, scalar = _as_array(r)
        out = np.where(x <= self.radius, -self.amplitude_value / (1.0 + self.radius + x) ** 2, 0.0)
        return float(out) if scalar else out

    def to_radial_function(self) -> RadialFunction:
        return RadialFunction.compact_support(self.u, self.radius)

    def to_json_dict(self) -> dict:
        return {"family": self.family, "amplitude": self.amplitude_value, "R": self.radius}


@dataclass(frozen=True)
class ConstantProfile:
    value: float

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError("constant must be positive")

    family = "constant"

    @property
    def amplitude(self) -> float:
        return self.value

    def with_amplitude(self, a: float) -> "ConstantProfile":
        return replace(self, value=a)

    def u(self, r):
        x, scalar = _as_array(r)
        out = np.full_like(x, self.value)
        return float(out) if scalar else out

    def du(self, r):
        x, scalar = _as_array(r)
        out = np.zeros_like(x)
        return float(out) if scalar else out

    d2u = du

    def to_radial_function(self) -> RadialFunction:
        # decay exponent 0: the convolution over R^N always diverges
        return RadialFunction.power_tail(self.u, 0.0, tail_radius=1.0, tail_constant=self.value)

    def to_json_dict(self) -> dict:
        return {"family": self.family, "value": self.value}


@dataclass(frozen=True)
class CustomProfile:
    """Ad-hoc profile for library users and tests; carries no theorem tag."""

    u_fn: Callable
    du_fn: Callable
    d2u_fn: Callable
    tail_exponent: float | str | None = None

    family = "custom"

    def u(self, r):
        return self.u_fn(r)

    def du(self, r):
        return self.du_fn(r)

    def d2u(self, r):
        return self.d2u_fn(r)


Profile = PowerDecay | LogCorrectedDecay | LinearBounded | LogBounded | ConstantProfile | CustomProfile


def profile_from_json(text: str) -> Profile:
    data = json.loads(text)
    fam = data.get("family")
    if fam == "power_decay":
        return PowerDecay(float(data["epsilon"]), float(data["gamma"]))
    if fam == "log_corrected_decay":
        return LogCorrectedDecay(float(data["epsilon"]), float(data["gamma"]), float(data["k"]))
    if fam == "linear_bounded":
        return LinearBounded(float(data["amplitude"]), float(data["R"]))
    if fam == "log_bounded":
        return LogBounded(float(data["amplitude"]), float(data["R"]))
    if fam == "constant":
        return ConstantProfile(float(data["value"]))
    raise ValueError(f"unknown profile family {fam!r}")


# ---------------------------------------------------------------------------
# parameter selection
# ---------------------------------------------------------------------------


def select_gamma_case_i(N: int, m: float, p: float) -> float:
    """Decay rate for the critical-order construction: midpoint of
    (N/p, (N-m)/(m-1)), which is non-empty iff p > N(m-1)/(N-m)."""
    if not N > m > 1:
        raise ValueError("requires N > m > 1")
    if p <= 0:
        raise ValueError("p must be positive")
    lower = N / p
    upper = (N - m) / (m - 1.0)
    if not lower < upper:
        raise EmptyInterval(f"(N/p, (N-m)/(m-1)) = ({lower:.6g}, {upper:.6g}) is empty")
    return 0.5 * (lower + upper)


def select_gamma_case_ii(N: int, m: float, alpha: float, p: float, q: float) -> float:
    """Decay rate for the generic construction: midpoint of
    (max{(alpha+m)/(p+q-m+1), alpha/p}, N/p)."""
    if not N > m > 1:
        raise ValueError("requires N > m > 1")
    if p <= 0:
        raise ValueError("p must be positive")
    if not 0 < alpha < N:
        raise ValueError("alpha must lie in (0, N)")
    if p + q - m + 1.0 <= 0:
        raise EmptyInterval("needs p + q > m - 1")
    lower = max((alpha + m) / (p + q - m + 1.0), alpha / p)
    upper = N / p
    if not lower < upper:
        raise EmptyInterval(f"(max-rule, N/p) = ({lower:.6g}, {upper:.6g}) is empty")
    if upper > (N - m) / (m - 1.0) + 1e-12:
        raise EmptyInterval("needs N/p <= (N-m)/(m-1), i.e. p >= N(m-1)/(N-m)")
    return 0.5 * (lower + upper)


def make_log_corrected(N: int, m: float, epsilon: float) -> LogCorrectedDecay:
    """Borderline-decay profile at the fundamental rate (N-m)/(m-1) with
    the log-correction weight fixed at half its admissible bound."""
    if not N > m:
        raise ValueError("requires N > m")
    if not m > 1:
        raise ValueError("requires m > 1")
    gamma = (N - m) / (m - 1.0)
    k = 0.5 * log_correction_bound(gamma)
    return LogCorrectedDecay(epsilon, gamma, k)


def make_bounded(kind: str, amplitude_mode: str, radius: float, seed: float) -> Profile:
    """Bounded-domain candidate; `small` amplitudes target p+q > m-1
    (shrink to certify), `large` targets p+q < m-1 (grow to certify)."""
    if kind not in ("linear", "log"):
        raise ValueError("kind must be 'linear' or 'log'")
    if amplitude_mode not in ("small", "large"):
        raise ValueError("amplitude_mode must be 'small' or 'large'")
    if kind == "linear":
        return LinearBounded(seed, radius)
    return LogBounded(seed, radius)


def make_system_pair(
    N: int, m1: float, m2: float, epsilon: float
) -> tuple[LogCorrectedDecay, LogCorrectedDecay]:
    """Two log-corrected profiles at their fundamental rates sharing one
    epsilon and the smaller of the two admissible k bounds."""
    if not (N > m1 > 1 and N > m2 > 1):
        raise ValueError("requires N > m1 > 1 and N > m2 > 1")
    g1 = (N - m1) / (m1 - 1.0)
    g2 = (N - m2) / (m2 - 1.0)
    k = 0.5 * min(log_correction_bound(g1), log_correction_bound(g2))
    return LogCorrectedDecay(epsilon, g1, k), LogCorrectedDecay(epsilon, g2, k)
