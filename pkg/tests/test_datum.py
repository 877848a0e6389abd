import math

import numpy as np
import pytest

from schrodinger_maximal.datum import (
    f_eval,
    fourier_support_bracket,
    hs_norm_bracket,
    l2_norm,
    l2_norm_heuristic,
    make_datum,
)
from schrodinger_maximal.oracles import l2_norm_by_quadrature


def test_origin_value(d4096):
    v = complex(f_eval(d4096, np.zeros(2)))
    assert v == pytest.approx(7.0, abs=1e-12)
    d = make_datum(3, 4096.0, 512)
    assert complex(f_eval(d, np.zeros(3))) == pytest.approx(121.0, abs=1e-10)


def test_pointwise_envelope_bound(d4096):
    rng = np.random.default_rng(3)
    x = rng.uniform(-1, 1, (100, 2))
    bound = (d4096.profile.phi(64 * x[:, 0]) * d4096.profile.big_phi(x[:, 1:])
             * d4096.params.N)
    assert np.all(np.abs(f_eval(d4096, x)) <= bound * (1 + 1e-12))


def test_batch_matches_pointwise(d256):
    rng = np.random.default_rng(4)
    x = rng.uniform(-1, 1, (5, 2))
    batch = f_eval(d256, x)
    for row, v in zip(x, batch):
        assert abs(complex(f_eval(d256, row)) - v) <= 1e-12 * 8


def test_l2_norm_against_quadrature(d4096):
    assert l2_norm(d4096) == pytest.approx(l2_norm_by_quadrature(d4096), rel=5e-3)


def test_l2_norm_ratio():
    a, b = make_datum(2, 4096.0), make_datum(2, 65536.0)
    expected = (16.0) ** -0.25 * math.sqrt(b.params.N / a.params.N)
    assert l2_norm(b) / l2_norm(a) == pytest.approx(expected, rel=1e-10)


def test_l2_norm_heuristic_bracket():
    for k in range(10, 21):
        d = make_datum(2, 2.0 ** k, 256)
        assert 0.1 <= l2_norm(d) / l2_norm_heuristic(d.params) <= 10


def test_fourier_support_bracket(d4096):
    lo, hi = fourier_support_bracket(d4096)
    assert lo == pytest.approx(math.hypot(4032, 2303.5), rel=1e-12)
    assert hi == pytest.approx(math.hypot(4160, 3840.5), rel=1e-12)
    assert 4096 <= lo <= hi <= 1.39 * 4096


def test_bracket_limits_converge():
    a = [x / 2 ** 18 for x in fourier_support_bracket(make_datum(2, 2.0 ** 18, 256))]
    b = [x / 2 ** 20 for x in fourier_support_bracket(make_datum(2, 2.0 ** 20, 256))]
    assert a == pytest.approx(b, rel=0.01)


def test_hs_norm_bracket(d4096):
    lo, hi = hs_norm_bracket(d4096, 0.0)
    assert lo == hi == pytest.approx(l2_norm(d4096), rel=1e-6)
    lo, hi = hs_norm_bracket(d4096, 1 / 3)
    r_lo, r_hi = fourier_support_bracket(d4096)
    assert hi / lo <= (r_hi / r_lo) ** (1 / 3) * (1 + 1e-9)
    assert hi / lo == pytest.approx(1.068, abs=5e-4)
    prev = hs_norm_bracket(d4096, 0.0)
    for s in (0.1, 0.2, 0.5, 1.0):
        cur = hs_norm_bracket(d4096, s)
        assert cur[0] > prev[0] and cur[1] > prev[1]
        prev = cur


def test_transverse_supports_disjoint(d4096):
    p = d4096.params
    h = d4096.profile.fourier_halfwidth
    assert p.D - 2 * h > 0
