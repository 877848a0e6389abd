"""Quadratic Gauss sums, the torus change of variables, and the set Omega.

Omega is the union over odd q in a dyadic block around Q and residues
(a_1, a') mod q with gcd(a_1, q) = 1 of the boxes

    |y_1 - 2 pi a_1 / q| < c * sigma,   |y_j - 2 pi a_j / q| < c * D / R

on the torus [0, 2 pi)^n (max-norm reading of the y' condition).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoBranch, PreconditionError
from .params import Params

TWO_PI = 2.0 * math.pi
DEFAULT_C = 0.05
# pullback box: x_1 in (-PULLBACK_REACH, 0), |x_j| < PULLBACK_TRANSVERSE
PULLBACK_REACH = 0.8
PULLBACK_TRANSVERSE = 0.25


def gauss_sum(q: int, a: int, b: int) -> complex:
    """sum_{l=0}^{q-1} exp(2 pi i (a l^2 + b l) / q)."""
    if q < 1:
        raise PreconditionError(f"q must be positive, got {q}")
    ell = np.arange(q, dtype=np.int64)
    k = ((a % q) * (ell * ell % q) + (b % q) * ell) % q
    return complex(np.exp(1j * TWO_PI * k / q).sum())


def gauss_modulus_check(q: int, a: int, b: int) -> float:
    """| |G(q, a, b)| - sqrt(q) | for odd q and gcd(a, q) = 1."""
    if q < 1 or q % 2 == 0:
        raise PreconditionError(f"q must be odd and positive, got {q}")
    if math.gcd(a, q) != 1:
        raise PreconditionError(f"gcd({a}, {q}) = {math.gcd(a, q)} != 1")
    return abs(abs(gauss_sum(q, a, b)) - math.sqrt(q))


def incomplete_gauss_sum(lo: int, hi: int, q: int, a: int, b: int):
    """Sum over lo < l < hi; returns (value, full blocks, remainder)."""
    if not lo < hi:
        raise PreconditionError(f"need lo < hi, got {lo}, {hi}")
    count = hi - lo - 1
    ell = np.arange(lo + 1, hi, dtype=np.int64) % q
    k = ((a % q) * (ell * ell % q) + (b % q) * ell) % q
    value = complex(np.exp(1j * TWO_PI * k / q).sum()) if count else 0j
    return value, count // q, count % q


@dataclass(frozen=True)
class RationalApprox:
    q: int
    a1: int
    aprime: tuple[int, ...]
    deficit: float = 0.0  # s = 2 pi a_1 / q - y_1, as a signed torus difference


@dataclass(frozen=True)
class TorusPoint:
    y1: float
    yprime: tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.array((self.y1,) + tuple(self.yprime))


@dataclass(frozen=True)
class OmegaSpec:
    params: Params
    c: float
    q_lo: int
    q_hi: int

    @property
    def moduli(self) -> list[int]:
        return [q for q in range(self.q_lo, self.q_hi + 1) if q % 2]

    @property
    def y1_window(self) -> float:
        return self.c * self.params.sigma

    @property
    def yprime_window(self) -> float:
        return self.c * self.params.D / self.params.R


def make_omega_spec(params: Params, c: float = DEFAULT_C) -> OmegaSpec:
    """q-block [round(Q), 2 round(Q)], lower end raised to 3."""
    if c < 0:
        raise ValueError("c must be nonnegative")
    q0 = max(1, round(params.Q))
    q_lo = max(3, q0)
    q_hi = max(2 * q0, q_lo)
    return OmegaSpec(params, float(c), q_lo, q_hi)


def _wrap(v):
    """Reduce to [0, 2 pi), guarding against fmod returning 2 pi."""
    y = np.mod(v, TWO_PI)
    return np.where(y >= TWO_PI, 0.0, y)


def _signed(v):
    """Representative of v mod 2 pi in [-pi, pi)."""
    return np.mod(np.asarray(v) + math.pi, TWO_PI) - math.pi


def torus_map(p: Params, x) -> TorusPoint:
    y = torus_map_array(p, np.asarray(x, dtype=float))
    return TorusPoint(float(y[0]), tuple(float(v) for v in y[1:]))


def torus_map_array(p: Params, x: np.ndarray) -> np.ndarray:
    """Vectorized torus map; x has shape (..., n)."""
    y = np.empty_like(x, dtype=float)
    y[..., 0] = _wrap(-(p.D * p.D / (2.0 * p.R)) * x[..., 0])
    y[..., 1:] = _wrap(p.D * x[..., 1:])
    return y


def admissible_approximations(spec: OmegaSpec, y: TorusPoint) -> list[RationalApprox]:
    """Every (q, a_1, a') in the block whose box contains y."""
    out = []
    if spec.c <= 0:
        return out
    w1, wp = spec.y1_window, spec.yprime_window
    yp = np.asarray(y.yprime, dtype=float)
    for q in spec.moduli:
        k1 = round(q * y.y1 / TWO_PI)
        a1 = k1 % q
        if math.gcd(a1, q) != 1:
            continue
        s = TWO_PI * k1 / q - y.y1
        if not abs(s) < w1:
            continue
        kp = np.rint(q * yp / TWO_PI)
        if not np.all(np.abs(yp - TWO_PI * kp / q) < wp):
            continue
        aprime = tuple(int(k) % q for k in kp)
        out.append(RationalApprox(q, a1, aprime, float(s)))
    return out


def rational_approx(spec: OmegaSpec, y: TorusPoint) -> RationalApprox | None:
    """Admissible approximation with the smallest |y_1 deficit|, or None."""
    cands = admissible_approximations(spec, y)
    if not cands:
        return None
    return min(cands, key=lambda r: (abs(r.deficit), r.q))


def omega_contains(spec: OmegaSpec, y: TorusPoint) -> bool:
    return rational_approx(spec, y) is not None


def omega_mask(spec: OmegaSpec, Y: np.ndarray) -> np.ndarray:
    """Vectorized membership for torus points Y of shape (m, n)."""
    Y = np.asarray(Y, dtype=float)
    hit = np.zeros(Y.shape[0], dtype=bool)
    if spec.c <= 0:
        return hit
    w1, wp = spec.y1_window, spec.yprime_window
    for q in spec.moduli:
        k1 = np.rint(q * Y[:, 0] / TWO_PI)
        a1 = k1.astype(np.int64) % q
        ok = np.gcd(a1, q) == 1
        ok &= np.abs(Y[:, 0] - TWO_PI * k1 / q) < w1
        kp = np.rint(q * Y[:, 1:] / TWO_PI)
        ok &= np.all(np.abs(Y[:, 1:] - TWO_PI * kp / q) < wp, axis=1)
        hit |= ok
    return hit


def omega_measure_estimate(spec: OmegaSpec, seed: int, m: int) -> tuple[float, float]:
    """Fraction of uniform torus points lying in Omega, with binomial stderr."""
    if m < 100:
        raise PreconditionError(f"need m >= 100 samples, got {m}")
    rng = np.random.default_rng([seed, 0x0E6A])
    Y = rng.uniform(0.0, TWO_PI, size=(m, spec.params.n))
    frac = float(np.mean(omega_mask(spec, Y)))
    return frac, math.sqrt(frac * (1.0 - frac) / m)


def _branches(y: float, slope: float, lo: float, hi: float) -> np.ndarray:
    """All x in (lo, hi) with slope * x = y (mod 2 pi)."""
    # slope * x = y + 2 pi k
    ends = sorted((slope * lo, slope * hi))
    k_lo = math.ceil((ends[0] - y) / TWO_PI)
    k_hi = math.floor((ends[1] - y) / TWO_PI)
    xs = (y + TWO_PI * np.arange(k_lo, k_hi + 1)) / slope
    return xs[(xs > lo) & (xs < hi)]


def sample_omega_pullback(spec: OmegaSpec, seed, *, reach: float = PULLBACK_REACH,
                          transverse: float = PULLBACK_TRANSVERSE,
                          max_tries: int = 10_000):
    """Draw x in B(0, 1) with torus_map(x) in Omega, together with its approximation.

    q is uniform over the odd moduli of the block, a_1 uniform over units mod q,
    a' uniform mod q, and y uniform in the box; x_1 is then a uniformly chosen
    branch of -D^2 x_1 / (2R) = y_1 (mod 2 pi) in (-reach, 0) and each x_j a
    branch of D x_j = y_j in (-transverse, transverse).  Draws whose y_1 has no
    branch in range are rejected (this happens while D^2 reach / (2R) < 2 pi).
    """
    p = spec.params
    if spec.c <= 0:
        raise NoBranch("empty windows (c = 0)")
    if reach ** 2 + (p.n - 1) * transverse ** 2 >= 1.0:
        raise PreconditionError("pullback box does not fit in B(0, 1)")
    slope1 = -p.D * p.D / (2.0 * p.R)
    y1_max = reach * abs(slope1)
    moduli = spec.moduli
    if not any(TWO_PI / q - spec.y1_window < y1_max for q in moduli):
        raise NoBranch(
            f"reachable y_1 range (0, {y1_max:.3g}) meets no window of the q-block"
        )
    if p.D * transverse < math.pi:
        raise NoBranch(f"transverse range {transverse} shorter than 2 pi / D")
    rng = np.random.default_rng(seed)
    # shrink by a relative 1e-9 so recomputed y stays strictly inside the box
    w1 = spec.y1_window * (1 - 1e-9)
    wp = spec.yprime_window * (1 - 1e-9)
    for _ in range(max_tries):
        q = int(rng.choice(moduli))
        units = [a for a in range(1, q) if math.gcd(a, q) == 1]
        a1 = int(rng.choice(units))
        aprime = tuple(int(v) for v in rng.integers(0, q, size=p.n - 1))
        s = rng.uniform(-w1, w1)
        y1 = float(_wrap(TWO_PI * a1 / q - s))
        yp = _wrap(TWO_PI * np.array(aprime) / q + rng.uniform(-wp, wp, p.n - 1))
        b1 = _branches(y1, slope1, -reach, 0.0)
        if b1.size == 0:
            continue
        x = np.empty(p.n)
        x[0] = rng.choice(b1)
        for j, yj in enumerate(yp, start=1):
            x[j] = rng.choice(_branches(float(yj), p.D, -transverse, transverse))
        y = torus_map(p, x)
        approx = RationalApprox(q, a1, aprime, float(_signed(TWO_PI * a1 / q - y.y1)))
        return x, approx
    raise NoBranch(f"no admissible draw in {max_tries} attempts")
