"""Band-limited envelopes phi (1-D) and Phi (transverse, tensor product).

Fourier convention is the symmetric one,
``g_hat(k) = (2 pi)^(-1/2) * int g(x) exp(-i k x) dx``.

The base mollifier is ``psi_hat(l) = exp(-1 / (1 - (2l)^2))`` on
``|l| < 1/2``; ``phi = (psi / psi(0))**2`` so that ``phi >= 0``,
``phi(0) = 1`` and ``phi_hat = (2 pi)^(-1/2) (psi_hat * psi_hat) / psi(0)^2``
is supported in ``[-1, 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import roots_legendre

from .errors import DimensionMismatch, ResolutionTooLow

SQRT_2PI = math.sqrt(2.0 * math.pi)
PANEL_ORDER = 16
_CONV_ORDER = 96


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes.size


@lru_cache(maxsize=None)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(order)
    return x, w


@lru_cache(maxsize=256)
def gauss_rule(n_nodes: int) -> QuadratureRule:
    """Composite rule with at least ``n_nodes`` nodes, in panels of 16.

    Panels keep the per-panel order fixed, so large node counts stay as
    accurate as small ones.
    """
    if n_nodes < 2:
        raise ValueError("a quadrature rule needs at least 2 nodes")
    panels = max(1, -(-n_nodes // PANEL_ORDER))
    x, w = _legendre(PANEL_ORDER)
    edges = np.linspace(-1.0, 1.0, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    nodes = (mid + half * x).ravel()
    weights = (half * w).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights)


def nodes_for_phase(phase_range: float, minimum: int = 64) -> int:
    """Node count resolving a phase that varies by ``phase_range`` radians."""
    need = 8 + 4.0 * abs(phase_range) / math.pi
    return max(minimum, int(math.ceil(need)))


def psi_hat(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    inside = np.abs(lam) < 0.5
    z = 2.0 * lam[inside]
    out[inside] = np.exp(-1.0 / (1.0 - z * z))
    return out


def _psi_unnormalized(u) -> np.ndarray:
    """int psi_hat(l) cos(u l) dl, without the (2 pi)^(-1/2) factor."""
    u = np.asarray(u, dtype=float)
    umax = float(np.max(np.abs(u))) if u.size else 0.0
    rule = gauss_rule(nodes_for_phase(umax, minimum=512))
    lam = 0.5 * rule.nodes
    wts = 0.5 * rule.weights * psi_hat(lam)
    flat = u.reshape(-1)
    out = np.empty(flat.shape)
    # chunked to bound the temporary (chunk x nodes) array
    step = max(1, 2_000_000 // rule.size)
    for i in range(0, flat.size, step):
        out[i:i + step] = (np.cos(np.outer(flat[i:i + step], lam)) * wts).sum(axis=-1)
    return out.reshape(u.shape)


def _self_convolution(lam) -> np.ndarray:
    """(psi_hat * psi_hat)(lam) by Gauss-Legendre on the overlap interval."""
    lam = np.abs(np.asarray(lam, dtype=float))
    out = np.zeros_like(lam)
    inside = lam < 1.0
    l = lam[inside][:, None]
    lo = l - 0.5
    hi = np.full_like(l, 0.5)
    x, w = _legendre(_CONV_ORDER)
    half = 0.5 * (hi - lo)
    u = 0.5 * (hi + lo) + half * x
    out[inside] = np.sum(half * w * psi_hat(u) * psi_hat(l - u), axis=1)
    return out


@dataclass(frozen=True, eq=False)
class BumpProfile:
    """Envelopes phi, Phi and their transforms for dimension ``n``.

    ``phi_hat`` at arbitrary points goes through a cubic spline on a
    uniform grid of ``resolution`` intervals over [-1, 1]; the propagator
    instead uses :meth:`phi_hat_nodes`, exact convolution values cached per
    quadrature rule.
    """

    n: int
    resolution: int
    scale: float
    psi0: float
    _spline: CubicSpline = field(repr=False)
    _node_cache: dict = field(default_factory=dict, repr=False)

    def phi(self, u):
        """phi(u) = (psi(u) / psi(0))**2 by direct quadrature."""
        r = _psi_unnormalized(u) / self.psi0
        return r * r

    def phi_hat(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        inside = np.abs(lam) < 1.0
        out[inside] = np.maximum(self._spline(np.abs(lam[inside])), 0.0)
        return out if out.ndim else float(out)

    def phi_hat_direct(self, lam):
        c = 1.0 / (SQRT_2PI * (self.psi0 / SQRT_2PI) ** 2)
        return c * _self_convolution(lam)

    def phi_hat_nodes(self, rule: QuadratureRule) -> np.ndarray:
        key = rule.size
        vals = self._node_cache.get(key)
        if vals is None:
            vals = self.phi_hat_direct(rule.nodes)
            vals.setflags(write=False)
            self._node_cache[key] = vals
        return vals

    def phi_from_fourier(self, u):
        """Fourier inversion (2 pi)^(-1/2) int phi_hat(l) e^{i u l} dl."""
        u = np.asarray(u, dtype=float)
        umax = float(np.max(np.abs(u))) if u.size else 0.0
        rule = gauss_rule(nodes_for_phase(2.0 * umax, minimum=128))
        wts = rule.weights * self.phi_hat_nodes(rule) / SQRT_2PI
        return (np.cos(np.multiply.outer(u, rule.nodes)) * wts).sum(axis=-1)

    def big_phi(self, xprime):
        """Phi(x') = prod_j phi(x_j / a) with a = 2 sqrt(n-1)."""
        xp = np.asarray(xprime, dtype=float)
        if xp.shape[-1] != self.n - 1:
            raise DimensionMismatch(
                f"x' must have {self.n - 1} components, got {xp.shape[-1]}"
            )
        return np.prod(self.phi(xp / self.scale), axis=-1)

    def l2_norm(self) -> float:
        """||phi||_2, computed on the Fourier side (Plancherel)."""
        rule = gauss_rule(256)
        v = self.phi_hat_nodes(rule)
        return math.sqrt(float(np.sum(rule.weights * v * v)))

    def l2_norm_space(self, half_width: float = 200.0, panels: int = 400) -> float:
        """||phi||_2 by quadrature on [-half_width, half_width]; test oracle."""
        edges = np.linspace(0.0, half_width, panels + 1)
        x, w = _legendre(PANEL_ORDER)
        mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
        half = 0.5 * (edges[1:] - edges[:-1])[:, None]
        u = (mid + half * x).ravel()
        wt = (half * w).ravel()
        return math.sqrt(2.0 * float(np.sum(wt * self.phi(u) ** 2)))

    @property
    def fourier_halfwidth(self) -> float:
        """Half side of the cube containing supp Phi_hat."""
        return 1.0 / self.scale


def make_profile(n: int, resolution: int = 4096) -> BumpProfile:
    if resolution < 256:
        raise ResolutionTooLow(f"resolution must be >= 256, got {resolution}")
    if n < 2:
        raise DimensionMismatch(f"n must be >= 2, got {n}")
    psi0 = float(_psi_unnormalized(np.array(0.0)))
    grid = np.linspace(0.0, 1.0, resolution // 2 + 1)
    c = 1.0 / (SQRT_2PI * (psi0 / SQRT_2PI) ** 2)
    vals = c * _self_convolution(grid)
    # even extension keeps the spline symmetric with zero slope at 0
    spline = CubicSpline(
        np.concatenate([-grid[:0:-1], grid]),
        np.concatenate([vals[:0:-1], vals]),
    )
    return BumpProfile(
        n=n,
        resolution=resolution,
        scale=2.0 * math.sqrt(n - 1),
        psi0=psi0,
        _spline=spline,
    )
