import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize

from fbl_mimo.errors import DomainError, OutOfRegimeError
from fbl_mimo.finite_blocklength import FiniteBound, delta_star, finite_upper, sweep
from fbl_mimo.second_order import SystemGeometry, capacity, phi, snr_db_to_sigma2, theta_pair

LOG2 = math.log(2.0)


def brute_force_total(R, geom, sigma2):
    C = capacity(sigma2, geom.c)
    _, tp = theta_pair(sigma2, geom.c, geom.beta)
    nK = geom.nK

    def obj(d):
        return phi(math.sqrt(nK) / tp * (R - C + d)) + np.exp(-nK * d)

    grid = np.logspace(-8, 0, 20001)
    k = int(np.argmin(obj(grid)))
    res = optimize.minimize_scalar(obj, bounds=(grid[max(k - 1, 0)], grid[k + 1]),
                                   method="bounded", options=dict(xatol=1e-14))
    return float(min(res.fun, obj(grid[k])))


def test_delta_star_large_blocklength_limit():
    nK = 1e12
    ds = delta_star(1.0, 1.0, 1.0, nK, 1)
    naive = 1.0 * (1 - math.sqrt(1 - math.log(2 * math.pi * nK) / nK))
    assert 0 < ds < 1e-9
    assert ds == pytest.approx(naive, rel=1e-4)


def test_delta_star_cancellation_safe():
    # at nK = 1e15 the naive 1 - sqrt(disc) keeps only a couple of digits
    ds = delta_star(1.0, 1.0, 1.0, 1e15, 1)
    L = math.log(2 * math.pi * 1e15) / 1e15
    assert ds == pytest.approx(L / 2 + L * L / 8, rel=1e-10)


def test_delta_star_decreases_with_blocklength():
    C, R, tp = 0.8, 0.6, 1.3
    prev = math.inf
    for nK in 2.0 ** np.arange(4, 30):
        ds = delta_star(R, C, tp, nK, 1)
        assert 0 <= ds < prev
        prev = ds


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 3.0), st.floats(0.0, 1.0), st.floats(0.2, 5.0), st.integers(10, 10 ** 6))
def test_delta_star_nonnegative_when_defined(C, frac, tp, nK):
    R = frac * C
    try:
        ds = delta_star(R, C, tp, nK, 1)
    except OutOfRegimeError:
        return
    assert ds >= 0


def test_delta_star_out_of_regime_names_terms():
    with pytest.raises(OutOfRegimeError) as info:
        delta_star(20.0, 0.8, 1.0, 36, 8)
    msg = str(info.value)
    assert "(C-R)^2" in msg and "log(2 pi nK" in msg
    assert isinstance(info.value, DomainError)


@pytest.mark.parametrize("n, snr_db, expected", [(36, 0.0, 0.000918928), (144, 0.0, 3.83389e-06), (36, -2.0, 0.338304)])
def test_figure4_points(n, snr_db, expected):
    fb = finite_upper(LOG2, SystemGeometry(N=16, K=8, n=n), snr_db_to_sigma2(snr_db))
    assert fb.total == pytest.approx(expected, rel=1e-3)
    assert fb.total == fb.gaussian_term + fb.exp_term
    assert fb.delta_star >= 0


@pytest.mark.parametrize("n, snr_db", [(36, 0.0), (36, -2.0), (144, -1.0)])
def test_delta_star_near_optimal(n, snr_db):
    geom = SystemGeometry(N=16, K=8, n=n)
    s2 = snr_db_to_sigma2(snr_db)
    fb = finite_upper(LOG2, geom, s2)
    best = brute_force_total(LOG2, geom, s2)
    # the closed-form slack is an approximate minimizer of the two-term sum
    assert best * (1 - 1e-9) <= fb.total <= 1.01 * best


def test_totals_above_one_preserved():
    fb = finite_upper(0.1, SystemGeometry(N=1, K=1, n=1), snr_db_to_sigma2(-10.0))
    assert fb.total > 1.0
    assert fb.total == fb.gaussian_term + fb.exp_term


def test_finite_bound_total_property():
    fb = FiniteBound(rate=1, capacity=1, theta_plus=1, delta_star=0.1, gaussian_term=0.25, exp_term=0.5)
    assert fb.total == 0.75


def test_figure5_outage_columns():
    rows = sweep("blocklength", [10.0], K=8, N=16, R=LOG2, snr_db=-0.785)
    ob = rows[0].outage
    assert ob.upper == pytest.approx(0.0015331, rel=1e-3)
    assert ob.lower == pytest.approx(0.000781224, rel=1e-3)
    assert ob.limit == pytest.approx(6.38652e-05, rel=1e-3)


def test_figure5_finite_total():
    rows = sweep("blocklength", [10.0], K=8, N=16, R=LOG2, snr_db=-0.785)
    assert rows[0].bound.total == pytest.approx(0.00280908, rel=1e-3)


def test_single_point_sweep_equals_direct():
    row, = sweep("snr", [0.0], K=8, N=16, R=LOG2, n=36)
    assert row.bound == finite_upper(LOG2, SystemGeometry(N=16, K=8, n=36), 1.0)


def test_sweep_cardinality_and_order():
    rows = sweep("snr", [-3.0, 0.0, 2.5], K=8, N=16, R=LOG2, n=36)
    assert [r.x for r in rows] == [-3.0, 0.0, 2.5]


@pytest.mark.parametrize("grid", [[], [1.0, 1.0], [2.0, 1.0]])
def test_sweep_rejects_bad_grid(grid):
    with pytest.raises(DomainError):
        sweep("snr", grid, K=8, N=16, R=LOG2, n=36)


def test_sweep_records_row_errors():
    rows = sweep("snr", [-30.0, 0.0], K=8, N=16, R=20.0 * LOG2, n=36)
    assert rows[0].bound is None and "discriminant" in rows[0].error
    rows = sweep("blocklength", [1.1, 2.0], K=8, N=16, R=LOG2, snr_db=0.0)
    assert rows[0].bound is None and "integer" in rows[0].error
    assert rows[1].error is None


def test_sweep_unknown_kind():
    with pytest.raises(DomainError):
        sweep("power", [1.0], K=8, N=16, R=LOG2)


@pytest.fixture(scope="module")
def fig5_dense():
    grid = np.arange(8, 401) / 4  # n/K in [2, 100]
    return sweep("blocklength", grid, K=8, N=16, R=LOG2, snr_db=-0.785)


def test_total_decreasing_in_blocklength(fig5_dense):
    totals = np.array([r.bound.total for r in fig5_dense])
    assert np.all(np.diff(totals) < 0)


def test_total_approaches_normal_approximation(fig5_dense):
    s2 = snr_db_to_sigma2(-0.785)
    C = capacity(s2, 2.0)
    gaps = [abs(r.bound.total - phi(math.sqrt(64 * r.x) * (LOG2 - C) / r.bound.theta_plus)) for r in fig5_dense]
    assert np.all(np.diff(gaps) < 0)


def test_crossing_near_one_half():
    # C = log 2 at about -2.44 dB; below that r > 0
    grid = np.round(np.arange(-40, 1) / 10, 10)
    a = np.array([r.bound.total for r in sweep("snr", grid, K=8, N=16, R=LOG2, n=36)])
    b = np.array([r.bound.total for r in sweep("snr", grid, K=8, N=16, R=LOG2, n=144)])
    sign = np.sign(a - b)
    above = np.flatnonzero(np.minimum(a, b) > 0.6)
    below = np.flatnonzero(np.maximum(a, b) < 0.4)
    assert sign[above[0]] == -1 and sign[below[0]] == 1
    assert np.count_nonzero(np.diff(sign)) == 1
    k = int(np.flatnonzero(np.diff(sign))[0])
    assert 0.4 < a[k] < 0.8
