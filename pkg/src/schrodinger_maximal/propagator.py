"""Exact free evolution e^{it Laplacian} f by tensorized 1-D quadrature.

The datum is a product of one-dimensional functions and the multiplier
e^{it|xi|^2} factorizes over coordinates, so e^{it Laplacian} f is the
product of one longitudinal factor and n-1 transverse factors:

    longitudinal  (2 pi)^{-1/2} int phi_hat(l) e^{i[(R + sqrt(R) l) x_1 + t (R + sqrt(R) l)^2]} dl
    transverse    sum_l e^{i(D l x_j + D^2 l^2 t)} (2 pi)^{-1/2}
                      int phi_hat(m) e^{i[m x_j / a + (2 D l m / a + m^2 / a^2) t]} dm

Lambda-independent phases are pulled out of the integrals exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bumps import SQRT_2PI, QuadratureRule, gauss_rule, nodes_for_phase
from .datum import InitialDatum, lattice_factor
from .errors import NodeBudgetExceeded, OutOfApproximationRange

NODE_CAP = 100_000
LONGITUDINAL_MIN_NODES = 256
TRANSVERSE_MIN_NODES = 128
APPROX_C = 0.01


@dataclass(frozen=True)
class EvolutionQuery:
    x: np.ndarray
    t: np.ndarray
    nodes_longitudinal: int
    nodes_transverse: tuple[int, ...]


def _check_cap(n_nodes: int, cap: int, axis: str) -> int:
    if n_nodes > cap:
        raise NodeBudgetExceeded(
            f"{axis} axis needs {n_nodes} nodes, cap is {cap}"
        )
    return n_nodes


def make_query(d: InitialDatum, x, t, *, refine: int = 1,
               node_cap: int = NODE_CAP) -> EvolutionQuery:
    """Choose node counts from the phase variation of each 1-D integrand.

    ``refine`` multiplies every node count (used for self-refinement checks).
    """
    p = d.params
    x = np.asarray(x, dtype=float)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if x.shape != (p.n,):
        raise ValueError(f"x must have shape ({p.n},), got {x.shape}")
    sr = math.sqrt(p.R)
    tmax = float(np.max(np.abs(t)))
    x1 = x[0]
    drift = float(np.max(np.abs(x1 + 2.0 * p.R * t)))
    theta = max(2.0 * sr * drift + p.R * tmax,
                sr * (abs(x1) + 2.0 * p.R * tmax + 1.0))
    n1 = refine * nodes_for_phase(theta, LONGITUDINAL_MIN_NODES)
    _check_cap(n1, node_cap, "longitudinal")

    a = d.profile.scale
    kmax = p.D * p.lattice_hi
    trans = []
    for xj in x[1:]:
        theta_j = 2.0 * (abs(xj) + 2.0 * kmax * tmax) / a + tmax / a ** 2
        nj = refine * nodes_for_phase(theta_j, TRANSVERSE_MIN_NODES)
        trans.append(_check_cap(nj, node_cap, "transverse"))
    return EvolutionQuery(x, t, n1, tuple(trans))


def axis_factor_longitudinal(d: InitialDatum, x1: float, t, rule: QuadratureRule):
    p = d.params
    t = np.asarray(t, dtype=float)
    sr = math.sqrt(p.R)
    lam = rule.nodes
    w = rule.weights * d.profile.phi_hat_nodes(rule) / SQRT_2PI
    tt = t[..., None]
    phase = sr * lam * (x1 + 2.0 * p.R * tt) + p.R * tt * lam * lam
    integral = (np.exp(1j * phase) * w).sum(axis=-1)
    return np.exp(1j * (p.R * x1 + p.R * p.R * t)) * integral


def transverse_inner(d: InitialDatum, xj: float, t, rule: QuadratureRule):
    """Per-lattice-site integrals, shape t.shape + (N,)."""
    p = d.params
    a = d.profile.scale
    t = np.asarray(t, dtype=float)
    lam = rule.nodes
    w = rule.weights * d.profile.phi_hat_nodes(rule) / SQRT_2PI
    tt = t[..., None, None]
    kl = (2.0 * p.D / a) * d.ells[:, None]
    phase = lam * (xj / a) + (kl * lam + lam * lam / (a * a)) * tt
    return (np.exp(1j * phase) * w).sum(axis=-1)


def axis_factor_transverse(d: InitialDatum, xj: float, t, rule: QuadratureRule):
    inner = transverse_inner(d, xj, t, rule)
    p = d.params
    ells = d.ells
    t = np.asarray(t, dtype=float)
    lat = np.exp(1j * ((p.D * ells) * xj + (p.D * p.D * ells * ells) * t[..., None]))
    return np.sum(lat * inner, axis=-1)


def evaluate(d: InitialDatum, q: EvolutionQuery):
    """e^{it Laplacian} f at q.x for every time in q.t (returns an array)."""
    out = axis_factor_longitudinal(d, q.x[0], q.t, gauss_rule(q.nodes_longitudinal))
    for xj, nj in zip(q.x[1:], q.nodes_transverse):
        out = out * axis_factor_transverse(d, xj, q.t, gauss_rule(nj))
    return out


def propagate(d: InitialDatum, x, t, *, refine: int = 1, node_cap: int = NODE_CAP):
    """e^{it Laplacian} f(x); ``t`` may be a scalar or a 1-D array of times."""
    scalar = np.ndim(t) == 0
    out = evaluate(d, make_query(d, x, t, refine=refine, node_cap=node_cap))
    return complex(out[0]) if scalar else out


def lattice_sum(d: InitialDatum, xprime, t):
    """prod_j sum_l exp(i (D l x_j + D^2 l^2 t))."""
    xp = np.asarray(xprime, dtype=float)
    return np.prod(lattice_factor(d, xp, np.asarray(t)[..., None]), axis=-1)


def _check_admissible(d: InitialDatum, x, t, c: float):
    p = d.params
    if not (abs(t) < c / p.R and float(np.linalg.norm(x)) < c):
        raise OutOfApproximationRange(
            f"need |t| < {c}/R and |x| < {c}; got |t|={abs(t):.3g}, "
            f"|x|={float(np.linalg.norm(x)):.3g}"
        )


def propagate_approx(d: InitialDatum, x, t: float, c: float = APPROX_C) -> float:
    """phi(sqrt(R)(x_1 + 2Rt)) |lattice_sum(x', t)|, valid for |t| < c/R, |x| < c."""
    x = np.asarray(x, dtype=float)
    _check_admissible(d, x, t, c)
    p = d.params
    env = float(d.profile.phi(math.sqrt(p.R) * (x[0] + 2.0 * p.R * t)))
    return env * float(abs(lattice_sum(d, x[1:], t)))


def approx_deviation(d: InitialDatum, x, t: float, c: float = APPROX_C,
                     eps: float = 1e-12) -> float:
    approx = propagate_approx(d, x, t, c)
    exact = abs(propagate(d, x, t))
    return abs(exact - approx) / max(approx, eps)
