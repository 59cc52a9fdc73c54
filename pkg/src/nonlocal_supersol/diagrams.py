"""Region-diagram writers: CSV rows and an SVG picture.

The SVG shades nonexistence cells gray, leaves existence white and
hatches unknown cells; boundary polylines are drawn from the closed-form
region equations, not from the raster, so they stay exact at any grid
resolution.  Adjacent same-status cells merge row-wise to keep files
small.  All output is deterministic for identical inputs.
"""

from __future__ import annotations

from fractions import Fraction

from .classifier import ProblemParams, Verdict, _cor26_regime, _frac

_FILL = {"Nonexistence": "#b0b0b0", "Existence": "#ffffff", "Unknown": "url(#hatch)"}


def region_csv_rows(p_values, q_values, matrix: list[list[Verdict]]):
    yield "p,q,status,tags"
    for qi, qv in enumerate(q_values):
        for pi, pv in enumerate(p_values):
            v = matrix[qi][pi]
            tags = "|".join(v.tags)
            yield f"{_num(pv)},{_num(qv)},{v.status},{tags}"


def _num(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    return repr(float(x))


def boundary_lines(base: ProblemParams) -> list[tuple[str, float, float, float]]:
    """Defining lines of the existence region as (label, a, b, c) with
    a*p + b*q = c, valid for the complete-picture operator class."""
    if not (base.flags.is_hm and base.flags.upper):
        return []
    N, m, alpha = base.N, float(base.m), float(base.alpha)
    if N <= m:
        return []
    theta = _frac(m - 1.0, N - m)
    regime = _cor26_regime(N, base.m, base.alpha)
    if regime == "A":
        return [
            ("p-threshold", 1.0, 0.0, float(alpha * theta)),
            ("sum-threshold", 1.0, 1.0, float((N + alpha) * theta)),
            ("q-line", float((N - alpha - m) / N), 1.0, float(m - 1.0)),
        ]
    if regime == "B":
        return [
            ("p-threshold", 1.0, 0.0, float(alpha * theta)),
            ("q-threshold", 0.0, 1.0, float(alpha * theta)),
            ("sum-threshold", 1.0, 1.0, float((N + alpha) * theta)),
        ]
    return [
        ("p-threshold", 1.0, 0.0, float(m - 1.0)),
        ("q-threshold", 0.0, 1.0, float(m - 1.0)),
        ("sum-threshold", 1.0, 1.0, float((2 * N - m) * theta)),
    ]


def _clip_line(a: float, b: float, c: float, box: tuple[float, float, float, float]):
    """Intersect a*p + b*q = c with the box; return up to one segment."""
    p0, p1, q0, q1 = box
    pts = []
    if b != 0.0:
        for pv in (p0, p1):
            qv = (c - a * pv) / b
            if q0 - 1e-12 <= qv <= q1 + 1e-12:
                pts.append((pv, qv))
    if a != 0.0:
        for qv in (q0, q1):
            pv = (c - b * qv) / a
            if p0 - 1e-12 <= pv <= p1 + 1e-12:
                pts.append((pv, qv))
    uniq = []
    for pt in pts:
        if all(abs(pt[0] - u[0]) > 1e-9 or abs(pt[1] - u[1]) > 1e-9 for u in uniq):
            uniq.append(pt)
    return uniq[:2] if len(uniq) >= 2 else None


def _cell_edges(values, lo: float, hi: float) -> list[float]:
    """Midpoint edges of the lattice cells, clamped to the plot range."""
    vals = [float(v) for v in values]
    edges = [lo]
    for a, b in zip(vals[:-1], vals[1:]):
        edges.append(0.5 * (a + b))
    edges.append(hi)
    return edges


def region_svg(
    p_values,
    q_values,
    matrix: list[list[Verdict]],
    base: ProblemParams,
    width: int = 640,
    height: int = 640,
    p_range: tuple[float, float] | None = None,
    q_range: tuple[float, float] | None = None,
) -> str:
    if p_range is None:
        p_range = (float(p_values[0]), float(p_values[-1]))
    if q_range is None:
        q_range = (float(q_values[0]), float(q_values[-1]))
    p_lo, p_hi = float(p_range[0]), float(p_range[1])
    q_lo, q_hi = float(q_range[0]), float(q_range[1])
    margin = 50.0
    plot_w, plot_h = width - 2 * margin, height - 2 * margin

    def sx(p: float) -> float:
        return margin + (p - p_lo) / (p_hi - p_lo) * plot_w

    def sy(q: float) -> float:
        return height - margin - (q - q_lo) / (q_hi - q_lo) * plot_h

    p_edges = _cell_edges(p_values, p_lo, p_hi)
    q_edges = _cell_edges(q_values, q_lo, q_hi)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<defs><pattern id='hatch' width='6' height='6' patternTransform='rotate(45)' "
        "patternUnits='userSpaceOnUse'><line x1='0' y1='0' x2='0' y2='6' "
        "stroke='#808080' stroke-width='1'/></pattern></defs>",
        f'<rect x="{margin}" y="{margin}" width="{plot_w:.2f}" height="{plot_h:.2f}" '
        'fill="#ffffff" stroke="none"/>',
    ]

    # run-length merged cells, drawn per row
    for qi in range(len(q_values)):
        y0, y1 = sy(q_edges[qi + 1]), sy(q_edges[qi])
        pi = 0
        while pi < len(p_values):
            status = matrix[qi][pi].status
            start = pi
            while pi < len(p_values) and matrix[qi][pi].status == status:
                pi += 1
            if status == "Existence":
                continue  # white background already
            x0, x1 = sx(p_edges[start]), sx(p_edges[pi])
            parts.append(
                f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" '
                f'height="{y1 - y0:.2f}" fill="{_FILL[status]}" stroke="none"/>'
            )

    box = (p_lo, p_hi, q_lo, q_hi)
    for label, a, b, c in boundary_lines(base):
        seg = _clip_line(a, b, c, box)
        if seg is None:
            continue
        (pa, qa), (pb, qb) = seg
        parts.append(
            f'<line x1="{sx(pa):.2f}" y1="{sy(qa):.2f}" x2="{sx(pb):.2f}" y2="{sy(qb):.2f}" '
            f'stroke="#000000" stroke-width="1.5"><title>{label}</title></line>'
        )

    parts.append(
        f'<rect x="{margin}" y="{margin}" width="{plot_w:.2f}" height="{plot_h:.2f}" '
        'fill="none" stroke="#000000" stroke-width="1"/>'
    )
    for p_tick in range(int(p_lo), int(p_hi) + 1):
        if p_lo <= p_tick <= p_hi:
            parts.append(
                f'<text x="{sx(p_tick):.2f}" y="{height - margin + 18:.2f}" '
                f'font-size="12" text-anchor="middle">{p_tick}</text>'
            )
    for q_tick in range(int(q_lo), int(q_hi) + 1):
        if q_lo <= q_tick <= q_hi:
            parts.append(
                f'<text x="{margin - 10:.2f}" y="{sy(q_tick) + 4:.2f}" '
                f'font-size="12" text-anchor="end">{q_tick}</text>'
            )
    parts.append(
        f'<text x="{width / 2:.2f}" y="{height - 12:.2f}" font-size="14" text-anchor="middle">p</text>'
    )
    parts.append(f'<text x="16" y="{height / 2:.2f}" font-size="14" text-anchor="middle">q</text>')
    parts.append("</svg>")
    return "\n".join(parts)
