"""Monte Carlo sweeps over dyadic R, exponent fits and the divergence verdict.

Every sample draws from its own generator seeded by (seed, stream, index), so
results do not depend on how samples are spread across workers.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.special import gamma
from scipy.stats import linregress

from . import __version__
from .datum import InitialDatum, l2_norm, make_datum
from .errors import ConfigError, DegenerateFit
from .maximal import DEFAULT_BUDGET, Strategy, sup_estimate
from .numbertheory import DEFAULT_C, make_omega_spec, omega_measure_estimate, sample_omega_pullback

log = logging.getLogger(__name__)

DEFAULT_SEED = 20160601
STREAM_UNIFORM = 1
STREAM_OMEGA = 2
VERDICT_Z = 2.0

CSV_FIELDS = (
    "n", "R", "seed", "c", "strategy", "budget",
    "l1_estimate", "l1_stderr", "omega_median_ratio", "omega_fraction",
    "omega_fraction_stderr", "evaluations",
)


class Verdict(str, enum.Enum):
    DIVERGENCE_CONSISTENT = "DivergenceConsistent"
    INCONCLUSIVE = "Inconclusive"
    CONTRADICTED = "Contradicted"


@dataclass
class SweepConfig:
    n: int = 2
    R_list: list = field(default_factory=lambda: [2.0 ** k for k in (10, 12, 14, 16, 18)])
    samples_uniform: int = 500
    samples_omega: int = 500
    strategy: Strategy = Strategy.COMBINED
    budget: int = DEFAULT_BUDGET
    c: float = DEFAULT_C
    seed: int = DEFAULT_SEED
    measure_samples: int = 10_000
    resolution: int = 4096
    output_csv: str | None = None
    output_json: str | None = None

    def __post_init__(self):
        self.strategy = Strategy(self.strategy)
        self.R_list = [float(r) for r in self.R_list]

    def validate(self, *, min_records: int = 3) -> "SweepConfig":
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        if len(self.R_list) < min_records:
            raise ConfigError(f"R_list needs >= {min_records} entries for fitting")
        if any(b <= a for a, b in zip(self.R_list, self.R_list[1:])):
            raise ConfigError("R_list must be strictly increasing")
        if self.samples_uniform < 100 or self.samples_omega < 100:
            raise ConfigError("samples_uniform and samples_omega must be >= 100")
        if self.measure_samples < 100:
            raise ConfigError("measure_samples must be >= 100")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")
        if not self.c > 0:
            raise ConfigError("c must be positive")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "SweepConfig":
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["strategy"] = self.strategy.value
        return out


@dataclass
class SweepRecord:
    n: int
    R: float
    seed: int
    c: float
    strategy: str
    budget: int
    l1_estimate: float
    l1_stderr: float
    omega_median_ratio: float
    omega_fraction: float
    omega_fraction_stderr: float
    evaluations: int
    wall_time: float = 0.0

    @property
    def key(self) -> tuple:
        return (self.n, self.R, self.seed, self.c, self.strategy, self.budget)

    def csv_row(self) -> list[str]:
        return [_fmt(getattr(self, f)) for f in CSV_FIELDS]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def unit_ball_volume(n: int) -> float:
    return float(math.pi ** (n / 2) / gamma(n / 2 + 1))


def sample_ball(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point of B(0, 1) by rejection from the cube."""
    while True:
        x = rng.uniform(-1.0, 1.0, n)
        if x @ x < 1.0:
            return x


def _workers(threads: int) -> int:
    if threads == 0:
        return os.cpu_count() or 1
    return max(1, threads)


def _chunks(m: int, width: int) -> list[range]:
    size = max(1, -(-m // (4 * width)))
    return [range(i, min(i + size, m)) for i in range(0, m, size)]


@lru_cache(maxsize=8)
def _cached_datum(n: int, R: float, resolution: int) -> InitialDatum:
    return make_datum(n, R, resolution)


def _ratio_task(task) -> tuple[np.ndarray, int]:
    kind, n, R, resolution, c, strategy, budget, seed, idx = task
    d = _cached_datum(n, R, resolution)
    omega = make_omega_spec(d.params, c)
    norm = l2_norm(d)
    out = np.empty(len(idx))
    evals = 0
    for k, i in enumerate(idx):
        if kind == STREAM_UNIFORM:
            x = sample_ball(n, np.random.default_rng([seed, STREAM_UNIFORM, i]))
        else:
            x, _ = sample_omega_pullback(omega, [seed, STREAM_OMEGA, i])
        est = sup_estimate(d, x, strategy, budget, omega)
        out[k] = est.value / norm
        evals += est.evaluations
    return out, evals


def sample_ratios(d: InitialDatum, kind: int, m: int, *, c: float, strategy,
                  budget: int, seed: int, threads: int = 1) -> tuple[np.ndarray, int]:
    """Pointwise ratios at m sample points drawn from stream ``kind``."""
    p = d.params
    width = _workers(threads)
    tasks = [
        (kind, p.n, p.R, d.profile.resolution, c, Strategy(strategy), budget, seed, idx)
        for idx in _chunks(m, width)
    ]
    if width == 1:
        results = [_ratio_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=width) as pool:
            results = list(pool.map(_ratio_task, tasks))
    values = np.concatenate([r[0] for r in results])
    return values, sum(r[1] for r in results)


def l1_estimate(d: InitialDatum, cfg: SweepConfig, *, threads: int = 1,
                value_fn: Callable[[np.ndarray], float] | None = None) -> tuple[float, float]:
    """|B(0,1)| * mean of the normalized sup estimate over uniform x in B(0, 1).

    ``value_fn`` replaces the sup estimate (test hook); it receives each x.
    """
    mean, se, _ = _l1(d, cfg, threads=threads, value_fn=value_fn)
    return mean, se


def _l1(d, cfg, *, threads=1, value_fn=None):
    m = cfg.samples_uniform
    if value_fn is None:
        vals, evals = sample_ratios(
            d, STREAM_UNIFORM, m, c=cfg.c, strategy=cfg.strategy,
            budget=cfg.budget, seed=cfg.seed, threads=threads,
        )
    else:
        vals = np.array([
            value_fn(sample_ball(d.params.n, np.random.default_rng([cfg.seed, STREAM_UNIFORM, i])))
            for i in range(m)
        ], dtype=float)
        evals = 0
    vol = unit_ball_volume(d.params.n)
    return vol * float(np.mean(vals)), vol * float(np.std(vals, ddof=1)) / math.sqrt(m), evals


def measure_record(cfg: SweepConfig, R: float, *, threads: int = 1) -> SweepRecord:
    start = time.perf_counter()
    d = make_datum(cfg.n, R, cfg.resolution)
    l1, l1_se, evals_u = _l1(d, cfg, threads=threads)
    ratios, evals_o = sample_ratios(
        d, STREAM_OMEGA, cfg.samples_omega, c=cfg.c, strategy=cfg.strategy,
        budget=cfg.budget, seed=cfg.seed, threads=threads,
    )
    frac, frac_se = omega_measure_estimate(make_omega_spec(d.params, cfg.c), cfg.seed,
                                           cfg.measure_samples)
    return SweepRecord(
        n=cfg.n, R=float(R), seed=cfg.seed, c=cfg.c, strategy=cfg.strategy.value,
        budget=cfg.budget, l1_estimate=l1, l1_stderr=l1_se,
        omega_median_ratio=float(np.median(ratios)), omega_fraction=frac,
        omega_fraction_stderr=frac_se, evaluations=evals_u + evals_o,
        wall_time=time.perf_counter() - start,
    )


def _stat(records: Sequence[SweepRecord], selector) -> np.ndarray:
    if callable(selector):
        return np.array([selector(r) for r in records], dtype=float)
    return np.array([getattr(r, selector) for r in records], dtype=float)


def fit_exponent(records: Sequence[SweepRecord], selector="omega_median_ratio") -> FitResult:
    """Least-squares line through (log R, log statistic)."""
    if len(records) < 3:
        raise DegenerateFit(f"need >= 3 records, got {len(records)}")
    logR = np.log([r.R for r in records])
    if np.ptp(logR) == 0:
        raise DegenerateFit("all records share the same R")
    y = np.log(_stat(records, selector))
    fit = linregress(logR, y)
    return FitResult(float(fit.slope), float(fit.intercept), float(fit.stderr))


def divergence_verdict(records: Sequence[SweepRecord], s_test: float, n: int,
                       selector="l1_estimate", stderr_selector="l1_stderr") -> Verdict:
    """Is R^{-s_test} * statistic increasing across the sweep beyond its errors?

    The log of R^{-s} * statistic is regressed on log R with weights from the
    per-record standard errors; the slope's uncertainty is the larger of the
    weighted and the residual-based standard errors.  A slope more than two
    standard errors above zero is DivergenceConsistent, more than two below
    is Contradicted.
    """
    if s_test < 0:
        raise ValueError("s_test must be nonnegative")
    recs = [r for r in records if r.n == n]
    if len(recs) < 3:
        raise DegenerateFit(f"need >= 3 records with n={n}")
    x = np.log([r.R for r in recs])
    stat = _stat(recs, selector)
    y = np.log(stat) - s_test * x
    fit = linregress(x, y)
    se = float(fit.stderr)
    if stderr_selector is not None:
        rel = _stat(recs, stderr_selector) / stat
        if np.all(rel > 0):
            w = 1.0 / rel ** 2
            xm = np.sum(w * x) / np.sum(w)
            se = max(se, math.sqrt(1.0 / np.sum(w * (x - xm) ** 2)))
    slope = float(fit.slope)
    if se == 0.0:
        z = math.copysign(math.inf, slope) if slope else 0.0
    else:
        z = slope / se
    if z > VERDICT_Z:
        return Verdict.DIVERGENCE_CONSISTENT
    if z < -VERDICT_Z:
        return Verdict.CONTRADICTED
    return Verdict.INCONCLUSIVE


# persistence -------------------------------------------------------------


def load_records(json_path) -> list[SweepRecord]:
    path = Path(json_path)
    if not path.exists():
        return []
    with open(path) as fh:
        data = json.load(fh)
    return [SweepRecord(**r) for r in data.get("records", [])]


def read_csv(csv_path) -> list[dict]:
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


def _append_csv(path: Path, record: SweepRecord):
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(CSV_FIELDS)
        w.writerow(record.csv_row())


def summarize(records: Sequence[SweepRecord], n: int) -> dict:
    out = {"fits": {}, "verdicts": {}}
    if len(records) < 3:
        return out
    for name in ("l1_estimate", "omega_median_ratio"):
        fit = fit_exponent(records, name)
        out["fits"][name] = dataclasses.asdict(fit)
    target = n / (2 * (n + 1))
    for s in (0.0, round(target - 0.05, 4), round(target + 0.05, 4)):
        out["verdicts"][repr(s)] = {
            "l1_estimate": divergence_verdict(records, s, n).value,
            "omega_median_ratio": divergence_verdict(
                records, s, n, "omega_median_ratio", None).value,
        }
    return out


def _write_json(path: Path, cfg: SweepConfig, records: Sequence[SweepRecord]):
    payload = {
        "version": __version__,
        "config": cfg.to_dict(),
        "records": [dataclasses.asdict(r) for r in records],
        **summarize(records, cfg.n),
    }
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def run_sweep(cfg: SweepConfig, *, threads: int = 1, out_dir=None) -> list[SweepRecord]:
    """Measure one record per R, persisting after each; existing keys are skipped."""
    cfg.validate()
    out_dir = Path(out_dir or ".")
    csv_path = Path(cfg.output_csv) if cfg.output_csv else out_dir / "sweep.csv"
    json_path = Path(cfg.output_json) if cfg.output_json else out_dir / "sweep.json"
    for pth in (csv_path, json_path):
        if not pth.parent.exists():
            raise FileNotFoundError(f"output directory does not exist: {pth.parent}")
    records = load_records(json_path)
    done = {r.key for r in records}
    for R in cfg.R_list:
        key = (cfg.n, float(R), cfg.seed, cfg.c, cfg.strategy.value, cfg.budget)
        if key in done:
            log.info("skipping R=%g (already recorded)", R)
            continue
        rec = measure_record(cfg, R, threads=threads)
        log.info("R=%g l1=%.4g omega_median=%.4g (%.1fs)", R, rec.l1_estimate,
                 rec.omega_median_ratio, rec.wall_time)
        records.append(rec)
        done.add(key)
        _append_csv(csv_path, rec)
        _write_json(json_path, cfg, records)
    if not json_path.exists():
        _write_json(json_path, cfg, records)
    wanted = {(cfg.n, float(R), cfg.seed, cfg.c, cfg.strategy.value, cfg.budget)
              for R in cfg.R_list}
    return [r for r in records if r.key in wanted]
