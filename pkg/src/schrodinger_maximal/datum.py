"""The initial datum f: a longitudinal wave packet times transverse lattice sums.

    f(x) = e^{i R x_1} phi(sqrt(R) x_1) Phi(x') prod_j sum_l e^{i D l x_j}

with l over the integers strictly between R/(2D) and R/D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bumps import BumpProfile, make_profile
from .errors import DisjointnessViolated
from .params import Params, build_params


@dataclass(frozen=True, eq=False)
class InitialDatum:
    params: Params
    profile: BumpProfile

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def ells(self) -> np.ndarray:
        p = self.params
        return np.arange(p.lattice_lo, p.lattice_hi + 1, dtype=float)


def make_datum(n: int, R: float, resolution: int = 4096) -> InitialDatum:
    return InitialDatum(build_params(n, R), make_profile(n, resolution))


def lattice_factor(d: InitialDatum, xj, t=0.0):
    """sum_l exp(i (D l x_j + D^2 l^2 t)) for one transverse coordinate."""
    D = d.params.D
    ells = d.ells
    xj = np.asarray(xj, dtype=float)
    t = np.asarray(t, dtype=float)
    phase = (D * ells) * xj[..., None] + (D * D * ells * ells) * t[..., None]
    return np.exp(1j * phase).sum(axis=-1)


def f_eval(d: InitialDatum, x):
    """Direct evaluation of f at a point (shape (n,)) or batch (shape (m, n))."""
    x = np.asarray(x, dtype=float)
    p = d.params
    x1 = x[..., 0]
    xp = x[..., 1:]
    out = np.exp(1j * p.R * x1) * d.profile.phi(math.sqrt(p.R) * x1)
    out = out * d.profile.big_phi(xp)
    out = out * np.prod(lattice_factor(d, xp), axis=-1)
    return out


def l2_norm(d: InitialDatum) -> float:
    """Exact ||f||_2 from Plancherel, tensor structure and disjoint supports.

    Longitudinal factor: R^{-1/4} ||phi||.  Each transverse factor is a sum of
    N translates of a * phi_hat(a xi) with disjoint supports, so its norm is
    sqrt(N a) ||phi||.
    """
    p = d.params
    a = d.profile.scale
    # shifted supports [D l - 1/a, D l + 1/a] must not overlap
    if p.D * a < 2.0:
        raise DisjointnessViolated(f"D={p.D} too small for support width {2 / a}")
    nphi = d.profile.l2_norm()
    return p.R ** -0.25 * nphi * (math.sqrt(p.N * a) * nphi) ** (p.n - 1)


def l2_norm_heuristic(p: Params) -> float:
    """The asymptotic size R^{-1/4} (R/D)^{(n-1)/2}."""
    return p.R ** -0.25 * (p.R / p.D) ** ((p.n - 1) / 2)


def fourier_support_bracket(d: InitialDatum) -> tuple[float, float]:
    """[r_min, r_max] with r_min <= |xi| <= r_max on supp f_hat."""
    p = d.params
    h = d.profile.fourier_halfwidth
    sr = math.sqrt(p.R)
    lo1, hi1 = p.R - sr, p.R + sr
    loj, hij = p.D * p.lattice_lo - h, p.D * p.lattice_hi + h
    m = p.n - 1
    return math.sqrt(lo1 ** 2 + m * loj ** 2), math.sqrt(hi1 ** 2 + m * hij ** 2)


def hs_norm_bracket(d: InitialDatum, s: float) -> tuple[float, float]:
    """Bracket for ||f||_{H^s} using the weight (1 + |xi|^2)^{s/2} on the annulus."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    r_min, r_max = fourier_support_bracket(d)
    norm = l2_norm(d)
    return (
        (1.0 + r_min * r_min) ** (s / 2) * norm,
        (1.0 + r_max * r_max) ** (s / 2) * norm,
    )
