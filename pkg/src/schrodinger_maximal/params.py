"""Scaling quantities of the counterexample, derived from (n, R).

Lattice bounds are decided in exact rational arithmetic: for integer l,
``l < R/D`` iff ``l**(2(n+1)) < R**n`` and ``l > R/(2D)`` iff
``(2l)**(2(n+1)) > R**n``, so no boundary integer is misclassified by
floating-point rounding of D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from fractions import Fraction

from .errors import DimensionTooSmall, EmptyLattice


@dataclass(frozen=True)
class Params:
    n: int
    R: float
    D: float
    lattice_lo: int
    lattice_hi: int
    N: int
    Q: float
    sigma: float
    tau_halfwidth: float
    target_exp: Fraction

    @property
    def lattice(self) -> range:
        return range(self.lattice_lo, self.lattice_hi + 1)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["target_exp"] = float(self.target_exp)
        return out


def target_exponent(n: int) -> Fraction:
    """Blow-up exponent n / (2(n+1))."""
    if n < 1:
        raise DimensionTooSmall(f"n must be >= 1, got {n}")
    return Fraction(n, 2 * (n + 1))


def _rpow(R: float, e: Fraction) -> float:
    # exact for dyadic R whenever log2(R) * e is representable
    m, k = math.frexp(R)
    if m == 0.5:
        return 2.0 ** float((k - 1) * e)
    return R ** float(e)


def _lattice_bounds(n: int, R: float) -> tuple[int, int]:
    Rn = Fraction(R) ** n
    p = 2 * (n + 1)
    D = float(R) ** ((n + 2) / p)
    hi = math.floor(R / D) + 2
    while hi > 0 and Fraction(hi) ** p >= Rn:
        hi -= 1
    lo = max(math.floor(R / (2 * D)) - 2, 0)
    while Fraction(2 * lo) ** p <= Rn:
        lo += 1
    return lo, hi


def build_params(n: int, R: float) -> Params:
    if n < 2:
        raise DimensionTooSmall(f"n must be >= 2, got {n}")
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    R = float(R)
    p = 2 * (n + 1)
    lo, hi = _lattice_bounds(n, R)
    if hi < lo:
        raise EmptyLattice(
            f"no integer strictly between R/(2D) and R/D for n={n}, R={R}"
        )
    D = _rpow(R, Fraction(n + 2, p))
    Q = _rpow(R, Fraction(n - 1, p))
    return Params(
        n=n,
        R=R,
        D=D,
        lattice_lo=lo,
        lattice_hi=hi,
        N=hi - lo + 1,
        Q=Q,
        sigma=1.0 / Q,
        tau_halfwidth=0.1 * _rpow(R, Fraction(-3, 2)),
        target_exp=target_exponent(n),
    )
