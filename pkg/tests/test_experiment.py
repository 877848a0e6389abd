import csv
import dataclasses
import json
import math

import numpy as np
import pytest

from schrodinger_maximal.errors import ConfigError, DegenerateFit
from schrodinger_maximal.experiment import (
    CSV_FIELDS,
    SweepConfig,
    SweepRecord,
    Verdict,
    divergence_verdict,
    fit_exponent,
    l1_estimate,
    load_records,
    read_csv,
    run_sweep,
    sample_ball,
    unit_ball_volume,
)
from schrodinger_maximal.maximal import Strategy


def _rec(R, stat, se=None, n=2):
    return SweepRecord(n=n, R=float(R), seed=1, c=0.05, strategy="combined", budget=8,
                       l1_estimate=stat, l1_stderr=se if se is not None else 0.01 * stat,
                       omega_median_ratio=stat, omega_fraction=0.1,
                       omega_fraction_stderr=0.01, evaluations=1)


def _small_cfg(**kw):
    base = dict(R_list=[2.0 ** 8, 2.0 ** 9, 2.0 ** 10], samples_uniform=100,
                samples_omega=100, measure_samples=500, budget=8)
    base.update(kw)
    return SweepConfig(**base)


def test_unit_ball_volume():
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_sample_ball():
    rng = np.random.default_rng(0)
    pts = np.array([sample_ball(3, rng) for _ in range(2000)])
    assert np.all(np.linalg.norm(pts, axis=1) < 1)
    # E|x|^2 over the unit 3-ball is 3/5
    assert np.mean(np.sum(pts ** 2, axis=1)) == pytest.approx(0.6, abs=0.02)


def test_l1_constant_hook(d256):
    cfg = SweepConfig(samples_uniform=400)
    mean, se = l1_estimate(d256, cfg, value_fn=lambda x: 1.0)
    assert mean == pytest.approx(math.pi, rel=1e-14)
    assert se == 0.0
    mean, se = l1_estimate(d256, cfg, value_fn=lambda x: float(x @ x))
    assert abs(mean - math.pi / 2) <= 3 * se


def test_stderr_scaling(d256):
    def fn(x):
        return abs(x[0]) ** 0.5

    _, se1 = l1_estimate(d256, SweepConfig(samples_uniform=4000), value_fn=fn)
    _, se2 = l1_estimate(d256, SweepConfig(samples_uniform=8000), value_fn=fn)
    assert se1 / se2 == pytest.approx(math.sqrt(2), rel=0.2)


def test_smaller_evaluation_set_never_increases(d256):
    small = SweepConfig(samples_uniform=100, strategy=Strategy.PREDICTED, budget=8)
    big = SweepConfig(samples_uniform=100, strategy=Strategy.COMBINED, budget=8)
    assert l1_estimate(d256, small)[0] <= l1_estimate(d256, big)[0]


def test_l1_thread_independent(d4096):
    cfg = SweepConfig(samples_uniform=500)
    assert l1_estimate(d4096, cfg, threads=1) == l1_estimate(d4096, cfg, threads=3)


def test_fit_synthetic():
    recs = [_rec(2.0 ** k, 7 * (2.0 ** k) ** 0.4) for k in range(8, 16, 2)]
    fit = fit_exponent(recs, "l1_estimate")
    assert fit.slope == pytest.approx(0.4, abs=1e-10)
    scaled = [dataclasses.replace(r, l1_estimate=r.l1_estimate * 123.0) for r in recs]
    assert fit_exponent(scaled, "l1_estimate").slope == pytest.approx(fit.slope, abs=1e-12)
    with pytest.raises(DegenerateFit):
        fit_exponent([_rec(64, 1.0)] * 3)
    with pytest.raises(DegenerateFit):
        fit_exponent(recs[:2])


def test_verdicts_synthetic():
    recs = [_rec(2.0 ** k, 0.1 * (2.0 ** k) ** (1 / 3)) for k in range(10, 20, 2)]
    assert divergence_verdict(recs, 0.0, 2) is Verdict.DIVERGENCE_CONSISTENT
    assert divergence_verdict(recs, 0.2833, 2) is Verdict.DIVERGENCE_CONSISTENT
    assert divergence_verdict(recs, 0.3833, 2) is Verdict.CONTRADICTED
    noisy = [_rec(r.R, r.l1_estimate, se=r.l1_estimate) for r in recs]
    assert divergence_verdict(noisy, 0.3333, 2) is Verdict.INCONCLUSIVE
    with pytest.raises(ValueError):
        divergence_verdict(recs, -0.1, 2)


def test_config_schema(tmp_path):
    with pytest.raises(ConfigError):
        SweepConfig.from_dict({"n": 2, "samples": 5})
    with pytest.raises(ConfigError):
        _small_cfg(samples_omega=10).validate()
    with pytest.raises(ConfigError):
        _small_cfg(R_list=[512.0, 256.0, 1024.0]).validate()
    with pytest.raises(ConfigError):
        SweepConfig.from_dict({"strategy": "bogus"})
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(_small_cfg().to_dict()))
    assert SweepConfig.from_json(path) == _small_cfg()


def test_run_sweep_persistence(tmp_path):
    cfg = _small_cfg()
    recs = run_sweep(cfg, out_dir=tmp_path)
    assert len(recs) == 3
    rows = read_csv(tmp_path / "sweep.csv")
    assert list(rows[0]) == list(CSV_FIELDS)
    for row, rec in zip(rows, recs):
        for f in CSV_FIELDS:
            assert type(getattr(rec, f))(row[f]) == getattr(rec, f)
    assert load_records(tmp_path / "sweep.json") == recs
    data = json.loads((tmp_path / "sweep.json").read_text())
    assert data["config"] == cfg.to_dict()
    assert set(data["fits"]) == {"l1_estimate", "omega_median_ratio"}
    for r in recs:
        assert r.l1_stderr > 0 and np.isfinite(r.l1_estimate) and r.omega_median_ratio > 0

    before = (tmp_path / "sweep.csv").read_bytes()
    again = run_sweep(cfg, out_dir=tmp_path)
    assert again == recs
    assert (tmp_path / "sweep.csv").read_bytes() == before


def test_run_sweep_resumes(tmp_path):
    run_sweep(_small_cfg(), out_dir=tmp_path)
    extended = _small_cfg(R_list=[2.0 ** 8, 2.0 ** 9, 2.0 ** 10, 2.0 ** 11])
    recs = run_sweep(extended, out_dir=tmp_path)
    assert len(recs) == 4
    with open(tmp_path / "sweep.csv") as fh:
        assert len(list(csv.reader(fh))) == 5


def test_run_sweep_missing_dir(tmp_path):
    cfg = _small_cfg(output_csv=str(tmp_path / "nope" / "x.csv"))
    with pytest.raises(FileNotFoundError, match="nope"):
        run_sweep(cfg, out_dir=tmp_path)
