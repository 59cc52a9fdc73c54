"""Independent oracles the tests check the library against.

These deliberately avoid the library's own quadrature and kernel code:
finite differences for derivatives, scipy QUADPACK for one-dimensional
reference integrals, and a kernel-centered two-variable quadrature of
the full N-dimensional convolution integral.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate as sciint


def central_diff(f, x: float, rel_step: float = 6.0e-6) -> float:
    """Adaptive-step central finite difference."""
    h = rel_step * max(abs(x), 1.0)
    if x - h <= 0 < x:
        h = 0.5 * x
    return (f(x + h) - f(x - h)) / (2.0 * h)


def second_diff(f, x: float, rel_step: float = 2.0e-4) -> float:
    h = rel_step * max(abs(x), 1.0)
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def radial_laplacian_fd(u, r: float, N: int) -> float:
    """Finite-difference Laplacian of a radial profile (m = 2 oracle)."""
    return second_diff(u, r) + (N - 1) / r * central_diff(u, r)


def ndim_riesz_oracle(N: int, alpha: float, f_scalar, r: float, t_max: float) -> float:
    """(I_alpha * f)(r e_1) by adaptive quadrature of the N-dimensional
    integral in kernel-centered spherical coordinates.

    Substituting z = x - y gives the integrand f(|x - z|) |z|^(alpha-N);
    in spherical coordinates for z the kernel singularity becomes the
    integrable endpoint weight t^(alpha-1) and the density argument is
    sqrt(r^2 + t^2 - 2 r t cos(theta)).
    """
    from nonlocal_supersol.riesz import riesz_constant, sphere_surface

    def integrand(theta: float, t: float) -> float:
        arg = math.sqrt(max(r * r + t * t - 2.0 * r * t * math.cos(theta), 0.0))
        return math.sin(theta) ** (N - 2) * t ** (alpha - 1.0) * f_scalar(arg)

    val, _ = sciint.dblquad(integrand, 0.0, t_max, 0.0, math.pi, epsabs=1e-12, epsrel=1e-9)
    return riesz_constant(N, alpha) * sphere_surface(N - 2) * val


def cartesian_riesz_oracle_2d(alpha: float, f_scalar, r: float, box: float) -> float:
    """Plain Cartesian double integral of the 2-D convolution; slow, used
    for a single deep cross-check of the kernel-centered oracle."""
    from nonlocal_supersol.riesz import riesz_constant

    def integrand(y2: float, y1: float) -> float:
        dist = math.hypot(y1 - r, y2)
        if dist == 0.0:
            return 0.0
        return f_scalar(math.hypot(y1, y2)) * dist ** (alpha - 2.0)

    val, _ = sciint.dblquad(integrand, -box, box, -box, box, epsabs=1e-10, epsrel=1e-8)
    return riesz_constant(2, alpha) * val


def radial_quad_oracle(N: int, alpha: float, f_scalar, p: float, r: float, upper: float) -> float:
    """One-dimensional QUADPACK reference for the radial reduction, using
    the library's angular kernel only through its quadrature fallback.
    Integrates piecewise so each QAGS call sees the kernel singularity
    only as an interval endpoint."""
    from nonlocal_supersol.riesz import _angular_quad, riesz_constant, sphere_surface

    if N >= 2:
        def integrand(s: float) -> float:
            if s == r or s == 0.0:
                return 0.0
            return f_scalar(s) ** p * s ** (N - 1) * _angular_quad(N, r, s, alpha)

        norm = riesz_constant(N, alpha) * sphere_surface(N - 2)
    else:
        def integrand(s: float) -> float:
            if s == r:
                return 0.0
            return f_scalar(s) ** p * (abs(r - s) ** (alpha - 1.0) + (r + s) ** (alpha - 1.0))

        norm = riesz_constant(N, alpha)

    edges = sorted({0.0, upper} | {x for x in (r, 2.0 * r, 100.0, upper / 10.0) if 0.0 < x < upper})
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = sciint.quad(integrand, a, b, limit=300, epsabs=1e-13, epsrel=1e-10)
        assert err < 1e-8 * max(abs(val), 1e-6), f"oracle failed on [{a}, {b}]"
        total += val
    return norm * total
