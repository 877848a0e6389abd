import numpy as np
import pytest

from schrodinger_maximal import maximal
from schrodinger_maximal.datum import l2_norm
from schrodinger_maximal.errors import WindowViolated
from schrodinger_maximal.maximal import (
    Strategy,
    candidate_times,
    local_grid,
    pointwise_ratio,
    predicted_time,
    sup_estimate,
    window_grid,
)
from schrodinger_maximal.numbertheory import (
    PULLBACK_REACH,
    TWO_PI,
    RationalApprox,
    make_omega_spec,
    sample_omega_pullback,
)
from schrodinger_maximal.propagator import propagate


@pytest.fixture(scope="module")
def omega(d4096):
    return make_omega_spec(d4096.params)


@pytest.fixture(scope="module")
def pullbacks(omega):
    return [sample_omega_pullback(omega, [11, i]) for i in range(100)]


def test_zero_deficit(d4096):
    p = d4096.params
    x1 = -2 * TWO_PI * 3 / 5 / (p.D ** 2 / p.R)  # y1 = 2 pi * 3/5 exactly
    x = np.array([x1, 0.0])
    sel = predicted_time(p, x, RationalApprox(5, 3, (0,)))
    assert abs(sel.s_shift) < 1e-12
    assert sel.t_star == pytest.approx(-x1 / (2 * p.R), rel=1e-12)


def test_window_violation(d4096):
    p = d4096.params
    with pytest.raises(WindowViolated):
        predicted_time(p, np.array([-0.3, 0.0]), RationalApprox(5, 1, (0,)))


def test_pullback_times(d4096, pullbacks):
    p = d4096.params
    for x, approx in pullbacks:
        sel = predicted_time(p, x, approx)
        assert p.D ** 2 * sel.tau == pytest.approx(sel.s_shift, rel=1e-12)
        assert abs(sel.s_shift) <= 0.05 * 0.25
        # x1 ranges over (-reach, 0), hence t* < reach/(2R) + tau_halfwidth
        assert 0 < sel.t_star < PULLBACK_REACH / (2 * p.R) + p.tau_halfwidth


def test_grids_nest(d4096):
    p = d4096.params
    for b in (8, 16):
        assert set(local_grid(p, -0.3, b)) <= set(local_grid(p, -0.3, 2 * b))
        assert set(window_grid(p, b, 0.05)) <= set(window_grid(p, 2 * b, 0.05))
    assert np.all(window_grid(p, 32, 0.05) > 0)


def test_candidate_times_in_range(d4096, omega):
    for x in (np.array([0.2, 0.1]), np.array([-0.5, 0.3]), np.zeros(2)):
        for s in Strategy:
            t = candidate_times(d4096, x, s, 16, omega)
            assert t.size and np.all((t > 0) & (t < 1))


def test_sup_dominates_evaluated(d4096, omega, pullbacks):
    x = pullbacks[0][0]
    est = sup_estimate(d4096, x, Strategy.COMBINED, 16, omega)
    ts = candidate_times(d4096, x, Strategy.COMBINED, 16, omega)
    vals = np.abs(propagate(d4096, x, ts))
    assert est.value == pytest.approx(vals.max(), rel=1e-14)
    assert est.evaluations == ts.size
    assert abs(propagate(d4096, x, est.argmax_t)) == pytest.approx(est.value, rel=1e-10)


def test_combined_dominates(d4096, omega, pullbacks):
    for x, _ in pullbacks[:10]:
        c = sup_estimate(d4096, x, Strategy.COMBINED, 16, omega).value
        a = sup_estimate(d4096, x, Strategy.PREDICTED, 16, omega).value
        b = sup_estimate(d4096, x, Strategy.WINDOW_GRID, 16, omega).value
        assert c >= max(a, b) * (1 - 1e-12)


def test_predicted_close_to_dense(d4096, omega, pullbacks):
    p = d4096.params
    good = 0
    for x, _ in pullbacks:
        pred = sup_estimate(d4096, x, Strategy.PREDICTED, 64, omega).value
        dense = np.concatenate([local_grid(p, x[0], 640), window_grid(p, 640, omega.c)])
        dense = dense[(dense > 0) & (dense < 1)]
        ref = max(np.abs(propagate(d4096, x, dense)).max(), pred)
        good += pred >= 0.9 * ref
    assert good >= 90


def test_ratio_bounds(d4096, omega, pullbacks):
    x = pullbacks[1][0]
    norm = l2_norm(d4096)
    r = pointwise_ratio(d4096, x, Strategy.PREDICTED, 16, omega, norm)
    ts = candidate_times(d4096, x, Strategy.PREDICTED, 16, omega)
    assert r >= abs(propagate(d4096, x, ts.min())) / norm * (1 - 1e-12)


def test_ratio_scale_invariant(d4096, omega, pullbacks, monkeypatch):
    x = pullbacks[2][0]
    norm = l2_norm(d4096)
    base = pointwise_ratio(d4096, x, Strategy.PREDICTED, 16, omega, norm)
    orig = maximal.propagate
    monkeypatch.setattr(maximal, "propagate", lambda d, x, t: 3.0 * orig(d, x, t))
    scaled = pointwise_ratio(d4096, x, Strategy.PREDICTED, 16, omega, 3.0 * norm)
    assert scaled == pytest.approx(base, rel=1e-14)


def test_budget_validation(d4096, omega):
    with pytest.raises(ValueError):
        sup_estimate(d4096, np.zeros(2), Strategy.PREDICTED, 0, omega)
