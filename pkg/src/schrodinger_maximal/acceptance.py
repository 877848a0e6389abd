"""The acceptance suite: each criterion is a function returning a ``Check``.

Thresholds are applied exactly as stated; a criterion that cannot be met at
desk-scale R is reported as failed rather than loosened.
"""

from __future__ import annotations

import dataclasses
import math
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import calibration
from .datum import f_eval, l2_norm, make_datum
from .experiment import (
    DEFAULT_SEED,
    STREAM_OMEGA,
    SweepConfig,
    SweepRecord,
    Verdict,
    divergence_verdict,
    fit_exponent,
    run_sweep,
    sample_ball,
    sample_ratios,
)
from .maximal import Strategy
from .numbertheory import gauss_sum, incomplete_gauss_sum, make_omega_spec, omega_measure_estimate
from .oracles import brute_force_evolution_2d, l2_norm_by_quadrature
from .params import build_params
from .propagator import approx_deviation, propagate

# relative errors are measured against max(|reference|, FLOOR * sup|f|)
RELATIVE_FLOOR = 1e-6


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    measured: str
    threshold: str
    seconds: float = 0.0
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"[{status}] {self.number:2d} {self.name}: {self.measured} (need {self.threshold})"
        return out + (f"  -- {self.note}" if self.note else "")


def _rel(a, b, floor: float = 0.0) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    return np.abs(a - b) / np.maximum(np.abs(b), floor)


def _sup_f(d) -> float:
    # |f| <= |f(0)| = phi(0) * N^{n-1}, phi(0) = 1
    return float(d.params.N) ** (d.n - 1)


# 1-2 number theory ---------------------------------------------------------


def check_gauss_law(seed: int = DEFAULT_SEED) -> Check:
    rng = np.random.default_rng([seed, 1])
    start = time.perf_counter()
    worst = 0.0
    for q in range(1, 1000, 2):
        units = [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
        for a in rng.choice(units, size=20):
            b = int(rng.integers(0, q))
            g = gauss_sum(q, int(a), b)
            worst = max(worst, abs(abs(g) - math.sqrt(q)) / math.sqrt(q))
    zero = max(abs(gauss_sum(q, 1, 0)) for q in range(2, 999, 4))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and zero <= 1e-9 and elapsed <= 30.0
    return Check(1, "Gauss-sum law", ok,
                 f"max rel |G|-sqrt(q) {worst:.2e}, max |G(q=2 mod 4)| {zero:.2e}, {elapsed:.1f}s",
                 "<= 1e-9, zero, <= 30s", elapsed)


def check_block_bound(seed: int = DEFAULT_SEED, instances: int = 1000) -> Check:
    rng = np.random.default_rng([seed, 2])
    start = time.perf_counter()
    bad = 0
    worst = 0.0
    for _ in range(instances):
        q = int(rng.integers(1, 500)) * 2 + 1
        a = int(rng.integers(1, q + 1))
        while math.gcd(a, q) != 1:
            a = int(rng.integers(1, q + 1))
        b = int(rng.integers(0, q))
        lo = int(rng.integers(-5000, 5000))
        hi = lo + 1 + int(rng.integers(0, 20 * q))
        s, k, r = incomplete_gauss_sum(lo, hi, q, a, b)
        gap = abs(s - k * gauss_sum(q, a, b))
        worst = max(worst, gap / (r + q))
        bad += gap > r + q
    return Check(2, "Incomplete-sum block bound", bad == 0,
                 f"{bad} violations, max |S-kG|/(r+q) {worst:.3f}", "0 violations",
                 time.perf_counter() - start)


# 3-7 propagator --------------------------------------------------------------


def check_t0_identity(seed: int = DEFAULT_SEED, points: int = 100) -> Check:
    start = time.perf_counter()
    d = make_datum(2, 256.0)
    rng = np.random.default_rng([seed, 3])
    xs = np.array([sample_ball(2, rng) for _ in range(points)])
    ref = f_eval(d, xs)
    got = np.array([propagate(d, x, 0.0) for x in xs])
    err = float(np.max(_rel(got, ref, RELATIVE_FLOOR * _sup_f(d))))
    return Check(3, "t=0 identity", err <= 1e-10, f"max rel {err:.2e}", "<= 1e-10",
                 time.perf_counter() - start,
                 "relative to max(|f|, 1e-6 sup|f|)")


def check_brute_oracle(seed: int = DEFAULT_SEED, points: int = 10) -> Check:
    start = time.perf_counter()
    d = make_datum(2, 64.0)
    rng = np.random.default_rng([seed, 4])
    errs = []
    for _ in range(points):
        x = sample_ball(2, rng)
        t = float(rng.uniform(0.0, 1.0 / d.params.R))
        ref = brute_force_evolution_2d(d, x, t)
        errs.append(float(_rel(propagate(d, x, t), ref, RELATIVE_FLOOR * _sup_f(d))))
    err = max(errs)
    return Check(4, "Tensorized vs 2-D quadrature", err <= 1e-6, f"max rel {err:.2e}",
                 "<= 1e-6", time.perf_counter() - start)


def check_node_doubling(seed: int = DEFAULT_SEED, points: int = 50) -> Check:
    start = time.perf_counter()
    d = make_datum(2, 4096.0)
    rng = np.random.default_rng([seed, 5])
    errs = []
    for _ in range(points):
        x = sample_ball(2, rng)
        t = float(rng.uniform(0.0, 1.0 / d.params.R))
        a = propagate(d, x, t)
        b = propagate(d, x, t, refine=2)
        errs.append(float(_rel(a, b, RELATIVE_FLOOR * _sup_f(d))))
    err = max(errs)
    return Check(5, "Node doubling stability", err <= 1e-8, f"max rel {err:.2e}", "<= 1e-8",
                 time.perf_counter() - start)


def check_norm_law() -> Check:
    start = time.perf_counter()
    errs = []
    for R in (256.0, 1024.0, 4096.0):
        d = make_datum(2, R)
        errs.append(abs(l2_norm(d) / l2_norm_by_quadrature(d) - 1.0))
    err = max(errs)
    return Check(6, "L2 norm law", err <= 5e-3, f"max rel {err:.2e}", "<= 5e-3",
                 time.perf_counter() - start)


def approximation_deviations(seed: int = DEFAULT_SEED, points: int = 200,
                             c: float = 0.01) -> np.ndarray:
    """approx_deviation at n=2, R=4096 over uniform x in B(0, c), t in (0, c/R)."""
    d = make_datum(2, 4096.0)
    R = d.params.R
    rng = np.random.default_rng([seed, 7])
    devs = []
    for _ in range(points):
        x = c * sample_ball(2, rng)
        t = float(rng.uniform(0.0, c / R))
        devs.append(approx_deviation(d, x, t, c))
    return np.array(devs)


def check_approximation(seed: int = DEFAULT_SEED) -> Check:
    start = time.perf_counter()
    med = float(np.median(approximation_deviations(seed)))
    thr = calibration.APPROX_DEVIATION_THRESHOLD
    return Check(7, "Envelope-times-lattice approximation", med <= thr,
                 f"median deviation {med:.2e}", f"<= {thr}", time.perf_counter() - start)


# 8-12 scaling --------------------------------------------------------------


def check_omega_measure(seed: int = DEFAULT_SEED, samples: int = 10_000) -> Check:
    start = time.perf_counter()
    ests = []
    for k in (12, 14, 16):
        spec = make_omega_spec(build_params(2, 2.0 ** k), 0.05)
        ests.append(omega_measure_estimate(spec, seed, samples))
    floor_ok = all(e >= 0.01 for e, _ in ests)
    drops = [
        (e0 - e1) / math.sqrt(s0 ** 2 + s1 ** 2) if s0 + s1 > 0 else 0.0
        for (e0, s0), (e1, s1) in zip(ests, ests[1:])
    ]
    trend_ok = all(z <= 3.0 for z in drops)
    shown = ", ".join(f"{e:.2e}+-{s:.1e}" for e, s in ests)
    return Check(8, "Omega non-degeneracy", floor_ok and trend_ok,
                 f"fractions {shown}", ">= 0.01, no drop beyond 3 stderr",
                 time.perf_counter() - start,
                 "fraction scales like c^2 and sits near 2e-4 at c=0.05")


def omega_median(R: float, seed: int = DEFAULT_SEED, *, samples: int = calibration.KAPPA_SAMPLES,
                 threads: int = 1) -> float:
    """Median pointwise_ratio over Omega-pullback samples (n=2, predicted, budget 64)."""
    d = make_datum(2, R)
    ratios, _ = sample_ratios(d, STREAM_OMEGA, samples, c=0.05, strategy=Strategy.PREDICTED,
                              budget=64, seed=seed, threads=threads)
    return float(np.median(ratios))


def calibrate_kappa(seed: int = DEFAULT_SEED, threads: int = 1) -> float:
    R = 2.0 ** calibration.KAPPA_R_EXPONENT
    return omega_median(R, seed, threads=threads) / R ** (1.0 / 3.0)


def check_pointwise_growth(seed: int = DEFAULT_SEED, threads: int = 1) -> Check:
    start = time.perf_counter()
    kappa = calibration.KAPPA_N2
    parts = []
    ok = True
    for k in (14, 16):
        R = 2.0 ** k
        med = omega_median(R, seed, threads=threads)
        need = kappa * R ** (1.0 / 3.0)
        ok &= med >= need
        parts.append(f"R=2^{k}: {med:.3f} vs {need:.3f}")
    return Check(9, "Pointwise growth", ok, "; ".join(parts), "median >= kappa R^(1/3)",
                 time.perf_counter() - start)


def default_sweep_config(**overrides) -> SweepConfig:
    return SweepConfig(**overrides)


def n3_sweep_config(**overrides) -> SweepConfig:
    base = dict(n=3, R_list=[2.0 ** 8, 2.0 ** 10, 2.0 ** 12], samples_uniform=200,
                samples_omega=200, measure_samples=1000)
    base.update(overrides)
    return SweepConfig(**base)


def check_exponent(records: Sequence[SweepRecord]) -> Check:
    fit = fit_exponent(records, "omega_median_ratio")
    ok = abs(fit.slope - 1.0 / 3.0) <= 0.05
    return Check(10, "Exponent recovery n=2", ok,
                 f"slope {fit.slope:.4f} +- {fit.stderr:.4f}", "1/3 +- 0.05")


def check_divergence(records: Sequence[SweepRecord], n: int = 2) -> Check:
    target = float(Fraction(n, 2 * (n + 1)))
    lo, hi = round(target - 0.05, 4), round(target + 0.05, 4)
    v_lo = divergence_verdict(records, lo, n)
    v_hi = divergence_verdict(records, hi, n)
    ok = v_lo is Verdict.DIVERGENCE_CONSISTENT and v_hi is not Verdict.DIVERGENCE_CONSISTENT
    o_lo = divergence_verdict(records, lo, n, "omega_median_ratio", None)
    o_hi = divergence_verdict(records, hi, n, "omega_median_ratio", None)
    l1 = fit_exponent(records, "l1_estimate")
    return Check(11, "Divergence verdict", ok,
                 f"L1: s={lo} {v_lo.value}, s={hi} {v_hi.value}",
                 f"s={lo} DivergenceConsistent, s={hi} not",
                 note=(f"L1 slope {l1.slope:.3f}; Omega-median: s={lo} {o_lo.value}, "
                       f"s={hi} {o_hi.value}"))


def check_n3(records: Sequence[SweepRecord]) -> Check:
    fit = fit_exponent(records, "omega_median_ratio")
    ok = abs(fit.slope - 3.0 / 8.0) <= 0.07
    return Check(12, "Exponent recovery n=3", ok,
                 f"slope {fit.slope:.4f} +- {fit.stderr:.4f}", "3/8 +- 0.07")


# 13 determinism ------------------------------------------------------------


def determinism_config() -> SweepConfig:
    return SweepConfig(R_list=[2.0 ** 8, 2.0 ** 10, 2.0 ** 12], samples_uniform=100,
                       samples_omega=100, measure_samples=1000)


def check_determinism(thread_counts=(1, 4, 8), workdir=None) -> Check:
    import json

    from .cli import main

    start = time.perf_counter()
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        tmp = Path(tmp)
        cfg_path = tmp / "config.json"
        cfg_path.write_text(json.dumps(determinism_config().to_dict()))
        blobs = []
        for th in thread_counts:
            out = tmp / f"threads{th}"
            out.mkdir()
            code = main(["--threads", str(th), "--out", str(out), "-q",
                         "sweep", "--config", str(cfg_path)])
            if code != 0:
                return Check(13, "Determinism", False, f"sweep exit {code} at {th} threads",
                             "byte-identical CSV", time.perf_counter() - start)
            blobs.append((out / "sweep.csv").read_bytes())
    same = all(b == blobs[0] for b in blobs[1:])
    return Check(13, "Determinism", same,
                 "identical" if same else "CSV differs",
                 f"byte-identical CSV at threads {list(thread_counts)}",
                 time.perf_counter() - start)


# driver ------------------------------------------------------------------


def _sweep(cfg: SweepConfig, threads: int, workdir) -> list[SweepRecord]:
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        return run_sweep(cfg, threads=threads, out_dir=tmp)


def run_all(*, threads: int = 1, workdir=None, only=None,
            report: Callable[[Check], None] | None = None) -> list[Check]:
    """Run the criteria in order (all, or the numbers in ``only``).

    ``report`` is called after each one.
    """
    wanted = set(only) if only else set(range(1, 14))
    checks = []
    n2: list[SweepRecord] = []

    def add(num, fn, *args, **kw):
        if num not in wanted:
            return
        start = time.perf_counter()
        chk = fn(*args, **kw)
        if not chk.seconds:
            chk = dataclasses.replace(chk, seconds=time.perf_counter() - start)
        checks.append(chk)
        if report:
            report(chk)

    add(1, check_gauss_law)
    add(2, check_block_bound)
    add(3, check_t0_identity)
    add(4, check_brute_oracle)
    add(5, check_node_doubling)
    add(6, check_norm_law)
    add(7, check_approximation)
    add(8, check_omega_measure)
    add(9, check_pointwise_growth, threads=threads)
    if wanted & {10, 11}:
        n2 = _sweep(default_sweep_config(), threads, workdir)
    add(10, check_exponent, n2)
    add(11, check_divergence, n2)
    if 12 in wanted:
        add(12, check_n3, _sweep(n3_sweep_config(), threads, workdir))
    add(13, check_determinism, workdir=workdir)
    return checks
