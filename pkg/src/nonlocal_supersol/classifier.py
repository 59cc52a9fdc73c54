"""Existence / Nonexistence / Unknown classification of parameter points.

Each verdict is licensed by the operator-class flags the caller supplies;
nothing is inferred beyond them.  Rule tags (strings like ``Thm2.1(ii1)``
or ``Cor2.6-ii3-A``) identify which classification rule fired; the rule
table is this module.  ``Unknown`` is a first-class outcome marking
parameter/operator combinations no encoded rule covers.

Comparisons are exact when every exponent is supplied as int/Fraction
(the CLI parses numbers that way) and otherwise use a normalized
tolerance of 1e-12, so region boundaries land exactly where the strict
and non-strict inequalities put them.

For operators in the mean-curvature class that also satisfy the small-t
slope bound, the whole-space/exterior picture is complete: the verdict
comes from a three-regime trichotomy in (alpha vs N-m) and is never
Unknown.  The trichotomy takes precedence over the individual rules in
that regime; see the rule table for the regime conditions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

_TOL = 1e-12

EXISTENCE_TAG_PREFIXES = ("Thm2.3", "Thm2.4", "Cor2.6-ii3", "Thm2.7", "Thm2.8", "Thm2.9", "Thm2.10-bounded", "Thm2.12")
NONEXISTENCE_TAG_PREFIXES = ("Thm2.1", "Thm2.2", "Cor2.6-complement", "Thm2.11", "Thm2.10(i", "Thm2.10(ii")


def tag_kind(tag: str) -> str:
    if any(tag.startswith(p) for p in EXISTENCE_TAG_PREFIXES):
        return "existence"
    if any(tag.startswith(p) for p in NONEXISTENCE_TAG_PREFIXES):
        return "nonexistence"
    raise ValueError(f"unknown tag {tag!r}")


def _exact(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def is_eq(a, b) -> bool:
    if _exact(a, b):
        return a == b
    return abs(a - b) <= _TOL * max(1.0, abs(a), abs(b))


def is_lt(a, b) -> bool:
    if _exact(a, b):
        return a < b
    return b - a > _TOL * max(1.0, abs(a), abs(b))


def is_le(a, b) -> bool:
    return is_lt(a, b) or is_eq(a, b)


@dataclass(frozen=True)
class OperatorClassFlags:
    is_wmc: bool = False
    is_smc: bool = False
    is_hm: bool = False
    upper: bool = False  # small-t slope bound t A'/A <= m-2
    con1: bool = False  # A >= C t^(m-2) for small t
    con2: bool = False  # t A' + A >= C t^(m-2) for small t
    con3: bool = False  # A >= C t^(m-2) for large t
    con4: bool = False  # t A' + A >= C t^(m-2) for large t

    def __post_init__(self):
        if self.is_smc and not self.is_wmc:
            raise ValueError("strong coercivity implies weak coercivity; set is_wmc")
        if self.is_hm and not self.is_wmc:
            raise ValueError("the mean-curvature class implies weak coercivity; set is_wmc")

    @classmethod
    def from_preset(cls, preset: str) -> "OperatorClassFlags":
        if preset == "wmc":
            return cls(is_wmc=True)
        if preset == "smc":
            # two-sided power bounds give both small- and large-t lower bounds
            return cls(is_wmc=True, is_smc=True, con1=True, con3=True)
        if preset == "hm":
            return cls(is_wmc=True, is_hm=True, con1=True)
        if preset == "hm+upper":
            return cls(is_wmc=True, is_hm=True, con1=True, upper=True)
        raise ValueError(f"unknown operator-class preset {preset!r}")


DOMAINS = ("exterior", "rn", "bounded")


@dataclass(frozen=True)
class ProblemParams:
    N: int
    m: object
    alpha: object
    p: object
    q: object
    domain: str = "rn"
    domain_radius: object | None = None
    flags: OperatorClassFlags = field(default_factory=OperatorClassFlags)

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ValueError("N must be an integer >= 1")
        if not self.m > 1:
            raise ValueError("m must exceed 1")
        if not (0 < self.alpha < self.N):
            raise ValueError("alpha must lie in (0, N)")
        if not self.p > 0:
            raise ValueError("p must be positive")
        if self.domain not in DOMAINS:
            raise ValueError(f"domain must be one of {DOMAINS}")
        if self.domain == "bounded" and (self.domain_radius is None or not self.domain_radius > 0):
            raise ValueError("bounded domain needs a positive radius")


@dataclass(frozen=True)
class SystemParams:
    N: int
    m1: object
    m2: object
    alpha: object
    beta: object
    p: object
    q: object
    r: object
    s: object
    shape: int
    flags_a: OperatorClassFlags = field(default_factory=OperatorClassFlags)
    flags_b: OperatorClassFlags = field(default_factory=OperatorClassFlags)

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ValueError("N must be an integer >= 1")
        if not (self.m1 > 1 and self.m2 > 1):
            raise ValueError("m1 and m2 must exceed 1")
        if not (0 < self.alpha < self.N and 0 < self.beta < self.N):
            raise ValueError("alpha and beta must lie in (0, N)")
        if not (self.p > 0 and self.r > 0):
            raise ValueError("p and r must be positive")
        if self.shape not in (1, 2, 3):
            raise ValueError("shape must be 1, 2 or 3")


@dataclass(frozen=True)
class Verdict:
    status: str  # 'Existence' | 'Nonexistence' | 'Unknown'
    tags: tuple[str, ...] = ()
    notes: str = ""

    def to_json(self) -> str:
        payload = {"status": self.status, "tags": list(self.tags)}
        if self.notes:
            payload["notes"] = self.notes
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "Verdict":
        data = json.loads(text)
        return cls(data["status"], tuple(data["tags"]), data.get("notes", ""))


def _assemble(tags: list[str], notes: list[str]) -> Verdict:
    note_text = "; ".join(notes)
    if not tags:
        return Verdict("Unknown", (), note_text)
    kinds = {tag_kind(t) for t in tags}
    if kinds == {"existence"}:
        return Verdict("Existence", tuple(tags), note_text)
    if kinds == {"nonexistence"}:
        return Verdict("Nonexistence", tuple(tags), note_text)
    # conflicting rules indicate an encoding defect; surface conservatively
    extra = "conflicting rules fired; reporting nonexistence conservatively"
    return Verdict("Nonexistence", tuple(tags), "; ".join(notes + [extra]))


# ---------------------------------------------------------------------------
# single inequality
# ---------------------------------------------------------------------------


def _frac(a, b):
    if _exact(a, b):
        return Fraction(a) / Fraction(b)
    return a / b


def _cor26_regime(N, m, alpha):
    gap = N - m
    if is_lt(alpha, gap):
        return "A"
    if is_eq(alpha, gap):
        return "B"
    return "C"


def _cor26_exists(N, m, alpha, p, q) -> tuple[bool, str]:
    regime = _cor26_regime(N, m, alpha)
    theta = _frac(m - 1, N - m)
    a_thr = alpha * theta
    total_thr = (N + alpha) * theta
    if regime == "A":
        qline = m - 1 - _frac((N - alpha - m) * p, N)
        ok = is_lt(a_thr, p) and is_lt(total_thr, p + q) and is_lt(qline, q)
    elif regime == "B":
        ok = is_lt(a_thr, p) and is_lt(a_thr, q) and is_lt(total_thr, p + q)
    else:
        big_thr = (2 * N - m) * theta
        ok = is_lt(m - 1, p) and is_le(m - 1, q) and is_lt(big_thr, p + q)
    return ok, regime


def _nonexistence_tags(N, m, alpha, p, q, flags) -> tuple[list[str], list[str]]:
    tags: list[str] = []
    notes: list[str] = []
    if flags.is_hm:
        if is_le(N, m):
            tags.append("Thm2.1(i)")
        else:
            a_thr = alpha * _frac(m - 1, N - m)
            if is_le(p, a_thr):
                tags.append("Thm2.1(ii1)")
            if is_lt(m - 1, q) and is_le(q, a_thr) and is_lt(N - m, alpha):
                tags.append("Thm2.1(ii2)")
            if is_le(m - 1, p + q) and is_le(p + q, (N + alpha) * _frac(m - 1, N - m)):
                tags.append("Thm2.1(ii3)")
    if flags.is_wmc and is_lt(m, N):
        qline = m - 1 - _frac((N - alpha - m) * p, N)
        if is_lt(m - 1, p + q) and is_le(q, m - 1) and is_lt(q, qline):
            tags.append("Thm2.2(i)")
        if is_lt(m - 1, p + q) and is_lt(q, m - 1) and is_eq(q, qline):
            if is_lt(0, q):
                tags.append("Thm2.2(ii)")
            else:
                notes.append(
                    "on the borderline exponent curve with q <= 0: coverage is ambiguous, not claimed"
                )
        if is_le(p + q, m - 1):
            tags.append("Thm2.2(iii)")
    return tags, notes


def _existence_tags(N, m, alpha, p, q, flags) -> list[str]:
    tags: list[str] = []
    if not (flags.con1 and flags.upper) or not is_lt(m, N):
        return tags
    crit = _frac(N * (m - 1), N - m)
    if is_eq(q, m - 1) and is_eq(alpha, N - m) and is_lt(crit, p):
        tags.append("Thm2.3(i)")
    if is_le(crit, p) and is_lt(m - 1 - _frac(p * (N - alpha - m), N), q):
        tags.append("Thm2.3(ii)")
    a_thr = alpha * _frac(m - 1, N - m)
    if is_lt(a_thr, p) and is_lt(a_thr, q) and is_lt((N + alpha) * _frac(m - 1, N - m), p + q):
        tags.append("Thm2.4")
    return tags


def _bounded_tags(N, m, p, q, flags) -> list[str]:
    tags: list[str] = []
    pq = p + q
    if is_lt(m - 1, pq):
        if N > 1 and flags.con1:
            tags.append("Thm2.7")
        if N == 1 and flags.con2:
            tags.append("Thm2.8")
    elif is_lt(pq, m - 1):
        if N > 1 and flags.con3:
            tags.append("Thm2.9")
        if N == 1 and flags.con4:
            tags.append("Thm2.10-bounded")
    return tags


def classify_single(params: ProblemParams) -> Verdict:
    """Classify one parameter point of the single inequality."""
    N, m, alpha, p, q = params.N, params.m, params.alpha, params.p, params.q
    flags = params.flags

    if params.domain == "bounded":
        return _assemble(_bounded_tags(N, m, p, q, flags), [])

    if flags.is_hm and is_le(N, m):
        return _assemble(["Thm2.1(i)"], [])

    if flags.is_hm and flags.upper and is_lt(m, N):
        ok, regime = _cor26_exists(N, m, alpha, p, q)
        if ok:
            return Verdict("Existence", (f"Cor2.6-ii3-{regime}",))
        return Verdict("Nonexistence", (f"Cor2.6-complement-{regime}",))

    ne_tags, notes = _nonexistence_tags(N, m, alpha, p, q, flags)
    ex_tags = _existence_tags(N, m, alpha, p, q, flags)
    return _assemble(ne_tags + ex_tags, notes)


# ---------------------------------------------------------------------------
# systems
# ---------------------------------------------------------------------------


def _system_nonexistence(params: SystemParams) -> tuple[list[str], list[str]]:
    N = params.N
    m1, m2 = params.m1, params.m2
    alpha, beta = params.alpha, params.beta
    p, q, r, s = params.p, params.q, params.r, params.s
    fa, fb = params.flags_a, params.flags_b
    tags: list[str] = []
    notes: list[str] = []

    if fa.is_wmc and fb.is_wmc:
        lhs = 2 * N - (m1 + m2 + alpha + beta)
        if params.shape == 1:
            cond = is_le(lhs, N * (_frac(m1 - 1 - q, r) + _frac(m2 - 1 - s, p)))
            side = (
                is_le(m2 - 1 - s, p) and is_le(0, m2 - 1 - s)
                and is_le(m1 - 1 - q, r) and is_le(0, m1 - 1 - q)
            )
            if cond and side:
                tags.append("Thm2.11(i)")
        elif params.shape == 2:
            cond = is_le(lhs, N * (_frac(m1 - 1 - s, r) + _frac(m2 - 1 - q, p)))
            side = (
                is_le(m2 - 1 - q, p) and is_le(0, m2 - 1 - q)
                and is_le(m1 - 1 - s, r) and is_le(0, m1 - 1 - s)
            )
            if cond and side:
                tags.append("Thm2.11(ii)")
        else:
            cond = is_le(lhs, N * (_frac(m1 - 1 - s, p) + _frac(m2 - 1 - q, r)))
            side = (
                is_le(m1 - 1 - s, p) and is_le(0, m1 - 1 - s)
                and is_le(m2 - 1 - q, r) and is_le(0, m2 - 1 - q)
            )
            if cond and side:
                tags.append("Thm2.11(iii)")

    if fa.is_hm and fb.is_hm:
        if params.shape == 1:
            if is_lt(m1, N) and is_lt(N - m1, alpha):
                thr1 = alpha * _frac(m1 - 1, N - m1)
                if is_lt(m1 - 1, q) and is_le(q, thr1):
                    tags.append("Thm2.10(i1)")
                if fa.is_smc and is_le(q, thr1):
                    tags.append("Thm2.10(i3)")
            if is_lt(m2, N) and is_lt(N - m2, beta):
                thr2 = beta * _frac(m2 - 1, N - m2)
                if is_lt(m2 - 1, s) and is_le(s, thr2):
                    tags.append("Thm2.10(i2)")
                if fb.is_smc and is_le(s, thr2):
                    tags.append("Thm2.10(i4)")
        else:
            applicable = (
                is_lt(m1, N) and is_lt(m2, N)
                and is_lt(N - m1, alpha) and is_lt(N - m2, beta)
                and is_lt(m1 - 1, q) and is_lt(m2 - 1, s)
            )
            if applicable:
                denom = q * s - (m1 - 1) * (m2 - 1)
                if is_eq(denom, 0):
                    notes.append("degenerate denominator q*s = (m1-1)(m2-1); decoupled test skipped")
                else:
                    gam = _frac((alpha + m1 - N) * (m2 - 1) + (beta + m2 - N) * q, denom)
                    xi = _frac((beta + m2 - N) * (m1 - 1) + (alpha + m1 - N) * s, denom)
                    fire = is_le(0, (m1 - 1) * gam - (N - m1)) or is_le(0, (m2 - 1) * xi - (N - m2))
                    if fire:
                        tags.append("Thm2.10(ii)")
    return tags, notes


def _system_existence(params: SystemParams) -> list[str]:
    N = params.N
    m1, m2 = params.m1, params.m2
    alpha, beta = params.alpha, params.beta
    p, q, r, s = params.p, params.q, params.r, params.s
    fa, fb = params.flags_a, params.flags_b
    tags: list[str] = []
    if not (fa.upper and fa.con1 and fb.upper and fb.con1):
        return tags
    if not (is_lt(m1, N) and is_lt(m2, N)):
        return tags
    if not (is_lt(m1 - 1, p + q) and is_lt(m2 - 1, r + s)):
        return tags

    # inverse decay rates of the two construction profiles
    g1 = _frac(N - m1, m1 - 1)
    g2 = _frac(N - m2, m2 - 1)

    def conv_ok(rate_conv, exp_conv, rate_mult, exp_mult, order):
        # convolution of profile^exp_conv against the order-`order` kernel,
        # multiplied by profile^exp_mult: needs each factor to beat the
        # kernel order and the pair to beat order + N
        return (
            is_lt(order, rate_conv * exp_conv)
            and is_lt(order, rate_mult * exp_mult)
            and is_lt(order + N, rate_conv * exp_conv + rate_mult * exp_mult)
        )

    if params.shape == 1:
        if conv_ok(g2, p, g1, q, alpha) and conv_ok(g1, r, g2, s, beta):
            tags.append("Thm2.12(i)")
    elif params.shape == 2:
        if conv_ok(g2, p, g2, q, alpha) and conv_ok(g1, r, g1, s, beta):
            tags.append("Thm2.12(ii)")
    else:
        if conv_ok(g1, p, g2, q, alpha) and conv_ok(g2, r, g1, s, beta):
            tags.append("Thm2.12(iii)")
    return tags


def classify_system(params: SystemParams) -> Verdict:
    """Classify one parameter point of a two-component system."""
    ne, notes = _system_nonexistence(params)
    ex = _system_existence(params)
    return _assemble(ne + ex, notes)


# ---------------------------------------------------------------------------
# region grids
# ---------------------------------------------------------------------------


def region_grid(base: ProblemParams, p_values, q_values) -> list[list[Verdict]]:
    """Classify every lattice point of a (p, q) grid; rows follow
    q_values, columns p_values."""
    rows = []
    for qv in q_values:
        row = []
        for pv in p_values:
            pt = ProblemParams(
                N=base.N, m=base.m, alpha=base.alpha, p=pv, q=qv,
                domain=base.domain, domain_radius=base.domain_radius, flags=base.flags,
            )
            row.append(classify_single(pt))
        rows.append(row)
    return rows


def lattice(lo, hi, count: int, include_lo: bool = True) -> list[Fraction]:
    """Rational lattice over [lo, hi]; with include_lo=False the first
    point moves one step in, giving a half-open range."""
    lo_f, hi_f = Fraction(lo), Fraction(hi)
    if count < 2:
        raise ValueError("need at least two lattice points")
    if include_lo:
        step = (hi_f - lo_f) / (count - 1)
        return [lo_f + k * step for k in range(count)]
    step = (hi_f - lo_f) / count
    return [lo_f + k * step for k in range(1, count + 1)]
