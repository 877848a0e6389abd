"""Independent reference computations used by the validation suite.

None of these share a code path with the quantity they check: the 2-D oracle
integrates the full Fourier representation on a uniform grid with the spline
phi_hat and an unfactored phase; the norm oracle integrates |f|^2 in space.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import trapezoid

from .datum import InitialDatum, f_eval


def fourier_transform_2d(d: InitialDatum, xi1, xi2):
    """f_hat(xi) for n = 2 from the closed form of each factor."""
    p = d.params
    a = d.profile.scale
    sr = math.sqrt(p.R)
    long = d.profile.phi_hat((np.asarray(xi1) - p.R) / sr) / sr
    trans = sum(a * d.profile.phi_hat(a * (np.asarray(xi2) - p.D * l)) for l in d.ells)
    return long * trans


def brute_force_evolution_2d(d: InitialDatum, x, t: float, points: int = 513):
    """(2 pi)^{-1} iint f_hat(xi) e^{i(x.xi + t|xi|^2)} dxi by a 2-D trapezoid grid.

    f_hat is smooth and compactly supported, so the trapezoid rule over a box
    containing the support converges faster than any power of the spacing.
    """
    if d.n != 2:
        raise ValueError("brute-force oracle is two-dimensional")
    p = d.params
    h = d.profile.fourier_halfwidth
    sr = math.sqrt(p.R)
    g1 = np.linspace(p.R - sr, p.R + sr, points)
    g2 = np.linspace(p.D * p.lattice_lo - h, p.D * p.lattice_hi + h,
                     points * max(1, p.N))
    X1, X2 = np.meshgrid(g1, g2, indexing="ij")
    fh = fourier_transform_2d(d, X1, X2)
    phase = x[0] * X1 + x[1] * X2 + t * (X1 * X1 + X2 * X2)
    integrand = fh * np.exp(1j * phase)
    dx1, dx2 = g1[1] - g1[0], g2[1] - g2[0]
    return trapezoid(trapezoid(integrand, dx=dx2, axis=1), dx=dx1) / (2.0 * math.pi)


def _trapezoid_norm2(fn, half_width: float, bandwidth: float) -> float:
    # |fn|^2 has spectrum in [-2 bandwidth, 2 bandwidth]; sample above Nyquist
    step = math.pi / (2.0 * bandwidth)
    m = int(math.ceil(half_width / step))
    x = step * np.arange(-m, m + 1)
    total = 0.0
    for chunk in np.array_split(x, max(1, x.size // 20000)):
        total += float(np.sum(np.abs(fn(chunk)) ** 2))
    return total * step


def l2_norm_by_quadrature(d: InitialDatum, envelope_cut: float = 40.0) -> float:
    """||f||_2 from space-side sums of |f|^2 along each coordinate axis.

    |f|^2 is a product of one-variable factors, so
    ||f||^2 = prod_k int |f(x_k e_k)|^2 dx_k / |f(0)|^2 (k = 1..n).
    """
    p = d.params
    n = p.n
    f0 = abs(complex(f_eval(d, np.zeros(n))))
    sr = math.sqrt(p.R)
    a = d.profile.scale

    def along(k):
        def fn(s):
            x = np.zeros((s.size, n))
            x[:, k] = s
            return f_eval(d, x)
        return fn

    total = _trapezoid_norm2(along(0), envelope_cut / sr, p.R + sr) / f0 ** 2
    band = p.D * p.lattice_hi + 1.0 / a
    for k in range(1, n):
        total *= _trapezoid_norm2(along(k), envelope_cut * a, band) / f0 ** 2
    return math.sqrt(total * f0 ** 2)
