import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoloops.bounds import (
    EUCLIDEAN_2,
    GEODESICS,
    HYPERBOLIC,
    LOOPS,
    CountSeries,
    Geometry,
    blichfeldt_lower_bound,
    check_blichfeldt,
    entropy_estimate,
    euclidean_ball_volume,
    hyperbolic_disk_area,
    hyperbolic_entropy_envelope,
    is_satisfied,
    knieper_report,
    sandwich_check,
)
from geoloops.errors import BadCurvatureOrder, GeometryMismatch, NonpositiveValue
from geoloops.flat import flat_counts, make_lattice


def test_ball_volumes():
    assert euclidean_ball_volume(2, 1) == pytest.approx(math.pi, rel=1e-15)
    assert euclidean_ball_volume(3, 2) == pytest.approx(4 / 3 * math.pi * 8, rel=1e-14)
    assert euclidean_ball_volume(1, 3) == pytest.approx(6, rel=1e-14)


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("r", [0.3, 1.0, 2.7])
def test_ball_volume_recursion(n, r):
    lhs = euclidean_ball_volume(n, r)
    rhs = 2 * math.pi * r * r / n * euclidean_ball_volume(n - 2, r)
    assert abs(lhs - rhs) <= 1e-12 * lhs


def test_hyperbolic_disk_area():
    r = 0.05
    # pi r^2 (1 + r^2/12 + ...)
    assert hyperbolic_disk_area(r) == pytest.approx(math.pi * r * r * (1 + r * r / 12), rel=1e-7)
    assert hyperbolic_disk_area(2.0) == pytest.approx(2 * math.pi * (math.cosh(2) - 1), rel=1e-14)
    assert abs(hyperbolic_disk_area(30) / (math.pi * math.exp(30)) - 1) <= 1e-6
    rs = np.linspace(0.01, 20, 400)
    a = np.array([hyperbolic_disk_area(r) for r in rs])
    assert np.all(np.diff(a) > 0)
    assert np.all(np.diff(a, 2) > 0)


def test_bound_examples():
    assert blichfeldt_lower_bound(euclidean_ball_volume(2, 5), 1) == pytest.approx(25 * math.pi - 2)
    assert blichfeldt_lower_bound(1, 1) == -1
    assert blichfeldt_lower_bound(0, 3) == -2
    with pytest.raises(ValueError):
        blichfeldt_lower_bound(1, 0)


def test_is_satisfied_tolerance():
    assert is_satisfied(3, 3 + 1e-10)
    assert not is_satisfied(3, 3 + 1e-8)


def test_check_blichfeldt_flat():
    L = make_lattice(np.eye(2))
    rows = flat_counts(L, np.arange(0.5, 10.01, 0.5))
    series = CountSeries([(t, p) for t, p, _ in rows], LOOPS, EUCLIDEAN_2, "z2")
    report = check_blichfeldt(series, L.covolume, EUCLIDEAN_2)
    assert report.all_satisfied and not report.violations()
    assert report.rows[-1].count == 316
    assert report.rows[0].bound < 0  # reported, not clamped


def test_check_blichfeldt_flags_violation():
    series = CountSeries([(10.0, 10)], LOOPS, EUCLIDEAN_2)
    report = check_blichfeldt(series, 1.0, EUCLIDEAN_2)
    assert not report.all_satisfied
    assert report.violations()[0].t == 10.0


def test_check_blichfeldt_mismatch():
    series = CountSeries([(1.0, 0)], LOOPS, EUCLIDEAN_2)
    with pytest.raises(GeometryMismatch):
        check_blichfeldt(series, 1.0, HYPERBOLIC)
    with pytest.raises(GeometryMismatch):
        check_blichfeldt(CountSeries([(1.0, 0)], GEODESICS, EUCLIDEAN_2), 1.0, EUCLIDEAN_2)
    with pytest.raises(GeometryMismatch):
        check_blichfeldt(series, 1.0, Geometry("euclidean", 3))


def test_count_series_validation():
    with pytest.raises(ValueError):
        CountSeries([(1.0, 3), (1.0, 4)], LOOPS, EUCLIDEAN_2)
    with pytest.raises(ValueError):
        CountSeries([(1.0, 3), (2.0, 2)], LOOPS, EUCLIDEAN_2)


def test_entropy_estimate_examples():
    (row,) = entropy_estimate([(20, hyperbolic_disk_area(20))])
    assert row.estimate == pytest.approx(math.log(2 * math.pi * (math.cosh(20) - 1)) / 20)
    assert row.estimate == pytest.approx(1.0572, abs=1e-4)
    (row,) = entropy_estimate([(1000, euclidean_ball_volume(2, 1000))])
    assert row.estimate == pytest.approx(math.log(math.pi * 1e6) / 1000, rel=1e-12)
    # log(pi) + 6 log(10) = 14.9602
    assert row.estimate == pytest.approx(0.014960, abs=1e-6)
    assert row.estimate <= 0.02
    for t in (1, 7, 33.5):
        assert entropy_estimate([(t, math.exp(t))])[0].estimate == 1.0
    with pytest.raises(NonpositiveValue):
        entropy_estimate([(1, 0)])


@given(st.floats(5, 40))
def test_hyperbolic_envelope(t):
    est = entropy_estimate([(t, hyperbolic_disk_area(t))])[0].estimate
    assert abs(est - 1) <= hyperbolic_entropy_envelope(t)


def test_sandwich_examples():
    assert sandwich_check(2, 1, 1, 1.0)
    assert sandwich_check(2, 0, 0, 0.0)
    assert not sandwich_check(2, 1, 1, 0.5)
    assert sandwich_check(3, 0.5, 2, 2.0)
    with pytest.raises(BadCurvatureOrder):
        sandwich_check(2, 2, 1, 1.5)


def test_sandwich_finite_t_bias():
    est = entropy_estimate([(30, hyperbolic_disk_area(30))])[0].estimate
    assert est > 1
    assert not sandwich_check(2, 1, 1, est)
    assert sandwich_check(2, 1, 1, 1.0)


def test_knieper_report_exp_series():
    ts = [1.0, 2.0, 3.0]
    loops = CountSeries([(t, math.floor(math.exp(t))) for t in ts], LOOPS, HYPERBOLIC)
    rep = knieper_report(loops, None, 1.0)
    assert [r.half_h_vol for r in rep.rows] == [0.5] * 3
    assert all(r.geodesics_estimate is None for r in rep.rows)
    assert rep.limit_claim == 1.0


def test_knieper_report_skips_zero():
    loops = CountSeries([(1.0, 0), (2.0, 4), (4.0, 32)], LOOPS, HYPERBOLIC)
    geos = CountSeries([(1.0, 0), (2.0, 3), (4.0, 6)], GEODESICS, HYPERBOLIC)
    rep = knieper_report(loops, geos, 1.0)
    assert rep.rows[0].loops_estimate is None and rep.rows[0].geodesics_estimate is None
    assert len(rep.notices) == 2
    assert rep.rows[2].loops_estimate == pytest.approx(math.log(32) / 4)
    assert rep.rows[1].geodesics_estimate == pytest.approx(math.log(3) / 2)


def test_flat_rates_decrease():
    L = make_lattice(np.eye(2))
    rows = flat_counts(L, [10, 20, 40])
    series = CountSeries([(t, p) for t, p, _ in rows], LOOPS, EUCLIDEAN_2)
    est = [r.loops_estimate for r in knieper_report(series, None, 0.0).rows]
    assert est[0] > est[1] > est[2] > 0
