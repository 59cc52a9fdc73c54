"""Radial quasilinear operator families and structural-condition checks.

An operator here is the divergence-form map u -> -div(A(|grad u|) grad u)
restricted to radial functions, where A is the scalar density of one of
three closed-form families:

* ``m_laplace``:         A(t) = t**(m-2)
* ``m_mean_curvature``:  A(t) = t**(m-2) / sqrt(1 + t**m)
* ``power_perturbed``:   A(t) = t**(m-2) * f(t) with f a user-supplied
  rational-polynomial expression in t, positive on [0, oo).

Only closed forms are accepted: the radial divergence identity needs
A' with controlled accuracy, which tabulated densities cannot give.

Structural-condition checks (`check_structure`) are sampling-based
falsification tests.  A ``ConsistentWithConstant`` verdict is evidence
on the supplied grid only, never a proof; ``Falsified`` carries a
concrete witness where the inequality trend rules out every positive
constant.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .expressions import Expression

M_LAPLACE = "m_laplace"
M_MEAN_CURVATURE = "m_mean_curvature"
POWER_PERTURBED = "power_perturbed"

_FAMILIES = (M_LAPLACE, M_MEAN_CURVATURE, POWER_PERTURBED)


class _IndeterminateType:
    """Marker for radial divergence values that have no numeric meaning
    (vanishing gradient meeting a density singular at 0)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Indeterminate"


Indeterminate = _IndeterminateType()


@lru_cache(maxsize=64)
def _perturbation(text: str) -> tuple[Expression, Expression]:
    expr = Expression(text, variable="t")
    return expr, expr.diff()


@dataclass(frozen=True)
class OperatorSpec:
    """One operator family member; immutable and safe to share."""

    family: str
    m: float
    perturbation: str | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not self.m > 1:
            raise ValueError("exponent m must exceed 1")
        if self.family == POWER_PERTURBED:
            if not self.perturbation:
                raise ValueError("power_perturbed needs a perturbation expression")
            f, _ = _perturbation(self.perturbation)
            probe = np.concatenate(([0.0], np.logspace(-6, 6, 25)))
            vals = np.asarray(f(probe), dtype=float)
            if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
                raise ValueError("perturbation must be finite and positive on [0, oo)")
        elif self.perturbation is not None:
            raise ValueError("perturbation only applies to power_perturbed")

    def to_json(self) -> str:
        payload = {"family": self.family, "m": self.m}
        if self.perturbation is not None:
            payload["perturbation"] = self.perturbation
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "OperatorSpec":
        data = json.loads(text)
        return cls(data["family"], float(data["m"]), data.get("perturbation"))


def m_laplace(m: float) -> OperatorSpec:
    return OperatorSpec(M_LAPLACE, m)


def m_mean_curvature(m: float) -> OperatorSpec:
    return OperatorSpec(M_MEAN_CURVATURE, m)


def eval_A(op: OperatorSpec, t):
    """Density A(t) for t >= 0; +inf at t = 0 when m < 2 makes it singular."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("t must be non-negative")
    x = np.atleast_1d(arr)
    m = op.m
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if op.family == M_LAPLACE:
            out = x ** (m - 2.0)
        elif op.family == M_MEAN_CURVATURE:
            out = x ** (m - 2.0) / np.sqrt(1.0 + x ** m)
        else:
            f, _ = _perturbation(op.perturbation)
            out = x ** (m - 2.0) * np.asarray(f(x), dtype=float)
    if m < 2:
        out = np.where(x == 0.0, np.inf, out)
    return float(out[0]) if arr.ndim == 0 else out


def eval_A_prime(op: OperatorSpec, t):
    """Analytic derivative A'(t); defined for t > 0 only."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("t must be positive")
    x = np.atleast_1d(arr)
    m = op.m
    if op.family == M_LAPLACE:
        out = (m - 2.0) * x ** (m - 3.0)
    elif op.family == M_MEAN_CURVATURE:
        root = np.sqrt(1.0 + x ** m)
        out = (m - 2.0) * x ** (m - 3.0) / root - 0.5 * m * x ** (2 * m - 3.0) / root ** 3
    else:
        f, fp = _perturbation(op.perturbation)
        out = (m - 2.0) * x ** (m - 3.0) * np.asarray(f(x), float) + x ** (m - 2.0) * np.asarray(fp(x), float)
    return float(out[0]) if arr.ndim == 0 else out


def fd_A_prime(op: OperatorSpec, t: float, rel_step: float = 6.0e-6) -> float:
    """Central finite-difference fallback for A'; cross-check for the
    perturbed family, also used by the test oracles.  The step scales
    with t so singular densities keep uniform relative accuracy."""
    if t <= 0:
        raise ValueError("t must be positive")
    h = rel_step * t
    return (eval_A(op, t + h) - eval_A(op, t - h)) / (2.0 * h)


def eval_second_order_coeff(op: OperatorSpec, t):
    """Coefficient t*A'(t) + A(t) multiplying u'' in the radial identity,
    with the t -> 0 limit filled in (inf when m < 2)."""
    if np.ndim(t) == 0 and t == 0.0:
        m = op.m
        if m < 2:
            return math.inf
        if m > 2:
            return 0.0
        return eval_A(op, 0.0)
    return t * eval_A_prime(op, t) + eval_A(op, t)


def radial_divergence(op: OperatorSpec, u, r: float, N: int):
    """div(A(|grad u|) grad u) at radius r for a radial profile u.

    Evaluates u''*(t*A'(t) + A(t)) + ((N-1)/r)*A(t)*u' with t = |u'(r)|.
    Returns the `Indeterminate` marker when u'(r) = 0 meets a density
    singular at the origin (m < 2); callers must treat that as a
    certification failure, not a number.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    if N < 1:
        raise ValueError("N must be a positive integer")
    up = float(u.du(r))
    upp = float(u.d2u(r))
    t = abs(up)
    if t == 0.0:
        if op.m < 2:
            return Indeterminate
        coeff = eval_second_order_coeff(op, 0.0)
        return upp * coeff
    coeff = t * eval_A_prime(op, t) + eval_A(op, t)
    angular = 0.0 if N == 1 else (N - 1) / r * eval_A(op, t) * up
    return upp * coeff + angular


def apply_L(op: OperatorSpec, u, r: float, N: int):
    """The left-hand side -div(A(|grad u|) grad u); same errors as
    `radial_divergence`."""
    div = radial_divergence(op, u, r, N)
    if div is Indeterminate:
        return Indeterminate
    return -div


class StructureCondition(enum.Enum):
    WMC = "wmc"
    SMC = "smc"
    HM = "hm"
    UPPER_SLOPE = "upper_slope"
    SMALL_T_LOWER_BOUND = "small_t_lower_bound"
    LARGE_T_LOWER_BOUND = "large_t_lower_bound"
    DERIV_COMBO_SMALL = "deriv_combo_small"
    DERIV_COMBO_LARGE = "deriv_combo_large"


@dataclass(frozen=True)
class Falsified:
    witness_t: float
    witness_value: float


@dataclass(frozen=True)
class ConsistentWithConstant:
    constant: float


@dataclass(frozen=True)
class StructureReport:
    """Outcome of a sampled structural check.

    `Falsified` means the sampled trend rules out every positive
    constant, with a concrete witness point.  `ConsistentWithConstant`
    is grid evidence only and reports the best empirical constant.
    """

    condition: StructureCondition
    verdict: Falsified | ConsistentWithConstant
    samples: int


def _vanishing_trend(ts: np.ndarray, ratios: np.ndarray, toward: str) -> tuple[bool, int]:
    """Detect a ratio that heads to 0 at the grid end nearest the limit
    point (`toward` is 'zero' or 'inf').  Requires a monotone decay by at
    least a factor 2 across the outermost decade."""
    if toward == "zero":
        order = np.argsort(ts)[::-1]  # approach t -> 0 from above
    else:
        order = np.argsort(ts)
    t_sorted = ts[order]
    r_sorted = ratios[order]
    extreme_t = t_sorted[-1]
    window = np.abs(np.log10(np.maximum(t_sorted, 1e-300) / extreme_t)) <= 1.0
    if window.sum() < 3:
        return False, -1
    win_r = r_sorted[window]
    if win_r[-1] == 0.0:
        return True, int(order[np.nonzero(window)[0][-1]])
    decaying = np.all(np.diff(win_r) <= win_r[:-1] * 1e-9 + 1e-300)
    big_drop = win_r[-1] <= 0.5 * win_r[0]
    if decaying and big_drop:
        return True, int(order[np.nonzero(window)[0][-1]])
    return False, -1


def _portion(ts: np.ndarray, which: str) -> np.ndarray:
    if which == "small":
        cutoff = min(1.0, 100.0 * ts.min())
        mask = ts <= cutoff
    elif which == "large":
        cutoff = max(1.0, ts.max() / 100.0)
        mask = ts >= cutoff
    else:
        mask = np.ones_like(ts, dtype=bool)
    return mask if mask.any() else np.ones_like(ts, dtype=bool)


def _lower_bound_report(cond, ts, ratios, which, toward) -> StructureReport:
    mask = _portion(ts, which)
    ts_p, rat_p = ts[mask], ratios[mask]
    zero = np.nonzero(rat_p == 0.0)[0]
    if zero.size:
        i = int(zero[0])
        return StructureReport(cond, Falsified(float(ts_p[i]), 0.0), int(mask.sum()))
    hit, idx = _vanishing_trend(ts_p, rat_p, toward)
    if hit:
        return StructureReport(cond, Falsified(float(ts_p[idx]), float(rat_p[idx])), int(mask.sum()))
    return StructureReport(cond, ConsistentWithConstant(float(rat_p.min())), int(mask.sum()))


def check_structure(op: OperatorSpec, condition: StructureCondition, t_grid) -> StructureReport:
    """Falsification-test a structural condition on a positive sample grid."""
    ts = np.asarray(sorted(float(t) for t in t_grid), dtype=float)
    if ts.size == 0:
        raise ValueError("t_grid must be non-empty")
    if np.any(ts <= 0):
        raise ValueError("t_grid must be positive")
    m = op.m
    A = np.asarray(eval_A(op, ts), dtype=float)
    Ap = np.asarray(eval_A_prime(op, ts), dtype=float)
    power = ts ** (m - 2.0)
    cond = condition

    if cond is StructureCondition.WMC:
        # t*A(t)*t >= C (A(t)*t)**(m/(m-1)) on the grid, scalar reduction
        # of the coercivity inequality for isotropic densities.
        mprime = m / (m - 1.0)
        ratios = ts * ts * A / (ts * A) ** mprime
        return _lower_bound_report(cond, ts, ratios, "all", "inf")

    if cond is StructureCondition.SMC:
        # Two-sided comparison with t**(m-2); falsified when A/t**(m-2)
        # heads to 0 or infinity at either end.
        x = A / power
        for toward in ("inf", "zero"):
            hit, idx = _vanishing_trend(ts, x, toward)
            if hit:
                return StructureReport(cond, Falsified(float(ts[idx]), float(x[idx])), ts.size)
            hit, idx = _vanishing_trend(ts, 1.0 / x, toward)
            if hit:
                return StructureReport(cond, Falsified(float(ts[idx]), float(x[idx])), ts.size)
        return StructureReport(cond, ConsistentWithConstant(float(max(x.max(), (1.0 / x).max()))), ts.size)

    if cond is StructureCondition.HM:
        x = A / power
        # global upper bound: falsified if the ratio grows without bound
        for toward in ("inf", "zero"):
            hit, idx = _vanishing_trend(ts, 1.0 / x, toward)
            if hit:
                return StructureReport(cond, Falsified(float(ts[idx]), float(x[idx])), ts.size)
        # lower bound near 0
        small = ts < 1.0
        if small.any():
            rep = _lower_bound_report(cond, ts[small], x[small], "all", "zero")
            if isinstance(rep.verdict, Falsified):
                return StructureReport(cond, rep.verdict, ts.size)
        # t*A(t) nondecreasing
        tA = ts * A
        drops = np.nonzero(np.diff(tA) < -1e-12 * np.maximum(tA[:-1], 1e-300))[0]
        if drops.size:
            i = int(drops[0]) + 1
            return StructureReport(cond, Falsified(float(ts[i]), float(tA[i] - tA[i - 1])), ts.size)
        best = x.max() if not small.any() else max(x.max(), (1.0 / x[small]).max())
        return StructureReport(cond, ConsistentWithConstant(float(best)), ts.size)

    if cond is StructureCondition.UPPER_SLOPE:
        mask = _portion(ts, "small")
        slope = ts[mask] * Ap[mask] / A[mask]
        tol = 1e-9 * (1.0 + abs(m - 2.0))
        bad = np.nonzero(slope > m - 2.0 + tol)[0]
        if bad.size:
            i = int(bad[0])
            return StructureReport(cond, Falsified(float(ts[mask][i]), float(slope[i])), int(mask.sum()))
        return StructureReport(cond, ConsistentWithConstant(float(slope.max())), int(mask.sum()))

    if cond in (StructureCondition.SMALL_T_LOWER_BOUND, StructureCondition.LARGE_T_LOWER_BOUND):
        which = "small" if cond is StructureCondition.SMALL_T_LOWER_BOUND else "large"
        toward = "zero" if which == "small" else "inf"
        return _lower_bound_report(cond, ts, A / power, which, toward)

    if cond in (StructureCondition.DERIV_COMBO_SMALL, StructureCondition.DERIV_COMBO_LARGE):
        which = "small" if cond is StructureCondition.DERIV_COMBO_SMALL else "large"
        toward = "zero" if which == "small" else "inf"
        combo = ts * Ap + A
        return _lower_bound_report(cond, ts, combo / power, which, toward)

    raise ValueError(f"unknown condition {condition!r}")
