"""Desk-scale oracle and invariant checks behind ``geoloops selftest``."""

from __future__ import annotations

import math
import random
import sys
import warnings

import numpy as np

from . import oracles
from .bounds import (
    LOOPS,
    CountSeries,
    Geometry,
    blichfeldt_lower_bound,
    check_blichfeldt,
    entropy_estimate,
    hyperbolic_disk_area,
    hyperbolic_entropy_envelope,
    is_satisfied,
    sandwich_check,
)
from .errors import HypothesisNotMet
from .flat import blichfeldt_witness, enumerate_coeffs, flat_counts, loop_count_flat, make_lattice
from .groups import enumerate_conjugacy_classes, enumerate_orbit_ball, is_primitive_word
from .hyperbolic import (
    I,
    GroupMatrix,
    UhpPoint,
    hyp_distance,
    mobius_apply,
    preset_genus2_octagon,
    preset_punctured_torus,
)

SENSITIVITY_RADIUS = 5.0
SENSITIVITY_EXTRA = 2.0
# off-centre point of the octagon, where prefix pruning is most fragile
SENSITIVITY_POINT = UhpPoint(0.6, 0.5)


class CheckFailed(Exception):
    pass


def _expect(cond, msg):
    if not cond:
        raise CheckFailed(msg)


def random_lattice(rng, n, max_cond=10.0):
    while True:
        B = rng.uniform(-3, 3, size=(n, n))
        if abs(np.linalg.det(B)) > 0.5 and np.linalg.cond(B) <= max_cond:
            return make_lattice(B)


def check_lattice_oracle():
    rng = np.random.default_rng(7)
    for n in (2, 3):
        for _ in range(3):
            L = random_lattice(rng, n)
            for t in (0.7, 2.5, 6.0):
                fast = {tuple(int(x) for x in c) for c in enumerate_coeffs(L, t)[0]}
                _expect(fast == oracles.naive_box_vectors(L.basis, t), f"mismatch n={n} t={t}")


def check_gauss_circle():
    Z = make_lattice(np.eye(2))
    _expect(loop_count_flat(Z, 10) == oracles.disk_count(10) == 316, "Z^2 count at t=10 is not 316")


def make_flat_bound_check(inject):
    def check():
        models = [make_lattice(np.eye(2)), make_lattice([[1, 0], [0.5, math.sqrt(3) / 2]])]
        rng = np.random.default_rng(11)
        models += [random_lattice(rng, n) for n in (2, 3)]
        ts = [0.5 * k for k in range(1, 21)]
        for L in models:
            geom = Geometry("euclidean", L.dimension)
            counts = flat_counts(L, ts)
            if inject == "bound-sign":
                bad = [t for t, p, _ in counts
                       if not is_satisfied(p, geom.ball_volume(t / 2) / L.covolume + 2)]
                _expect(not bad, f"injected bound fails at t={bad[:3]}")
            report = check_blichfeldt(CountSeries([(t, p) for t, p, _ in counts], LOOPS, geom), L.covolume, geom)
            _expect(report.all_satisfied, f"bound violated at {[r.t for r in report.violations()]}")
    return check


def check_witness():
    Z = make_lattice(np.eye(2))
    w = blichfeldt_witness(Z, 1.2, 4)
    _expect(w.multiplicity >= 4 and max(w.distances(Z)) <= 1.2 + 1e-9, "witness fails distance check")
    lengths = [float(np.linalg.norm(v)) for v in w.loop_vectors()]
    _expect(len(lengths) >= 3 and max(lengths) <= 2.4 + 1e-9, "loop vectors longer than 2r")
    try:
        blichfeldt_witness(Z, 0.4, 2)
    except HypothesisNotMet:
        pass
    else:
        raise CheckFailed("r=0.4, m=2 should not meet the hypothesis")


def check_metric():
    rng = random.Random(3)
    for k in range(41):
        s = -5 + 0.25 * k
        _expect(abs(hyp_distance(I, UhpPoint(0, math.exp(s))) - abs(s)) <= 1e-9, f"vertical s={s}")
    model = preset_punctured_torus()
    letters = model.letters()
    for _ in range(200):
        g = GroupMatrix.identity()
        for _ in range(rng.randint(1, 6)):
            g = g @ rng.choice(letters)
        z = UhpPoint(rng.uniform(-2, 2), rng.uniform(0.2, 3))
        w = UhpPoint(rng.uniform(-2, 2), rng.uniform(0.2, 3))
        d0 = hyp_distance(z, w)
        d1 = hyp_distance(mobius_apply(g, z), mobius_apply(g, w))
        _expect(abs(d0 - d1) <= 1e-9, "Mobius action is not isometric")


def check_punctured_torus():
    P = preset_punctured_torus()
    _expect(len(enumerate_orbit_ball(P, 1.0)) == 0, "P(1.0) != 0")
    _expect(len(enumerate_orbit_ball(P, 2.0)) == 4, "P(2.0) != 4")
    ball = enumerate_orbit_ball(P, 3.5)
    ref = oracles.exhaustive_orbit(P, I, 3.5, 8)
    for t in (2.5, 3.0, 3.5):
        _expect(ball.count_within(t) == sum(1 for d in ref.values() if d <= t + 1e-9), f"P({t}) vs oracle")


def check_free_census():
    for n in range(1, 7):
        _expect(sum(1 for _ in oracles.reduced_words(2, n)) == 4 * 3 ** (n - 1), f"census n={n}")
    for n in range(1, 9):
        for w in oracles.reduced_words(2, n):
            _expect(is_primitive_word(w) == oracles.all_divisors_primitive(w), f"primitivity of {w}")


def check_closed_geodesics():
    P = preset_punctured_torus()
    fast = enumerate_conjugacy_classes(P, 3.5)
    ref = oracles.brute_necklaces(P, 3.5, 6)
    _expect(len(fast.primitive()) == len(ref), "v(3.5) disagrees with necklace oracle")


def make_genus2_check(slack):
    def check():
        G = preset_genus2_octagon()
        if slack is not None:
            G = G.with_slack(slack)
        ball = enumerate_orbit_ball(G, 3.2)
        target = 2 * math.acosh(1 + math.sqrt(2))
        _expect(len(ball) == 8, f"expected 8 elements at radius 3.2, got {len(ball)}")
        _expect(abs(ball[0].displacement - target) <= 1e-6, "minimum displacement off")
        x = SENSITIVITY_POINT
        small = len(enumerate_orbit_ball(G, SENSITIVITY_RADIUS, base_point=x))
        big = len(enumerate_orbit_ball(G, SENSITIVITY_RADIUS, base_point=x, slack=G.slack + SENSITIVITY_EXTRA))
        _expect(small == big, f"degraded mode: slack {G.slack:g} finds {small} elements at radius "
                              f"{SENSITIVITY_RADIUS:g}, slack {G.slack + SENSITIVITY_EXTRA:g} finds {big}")
    return check


def check_entropy():
    for t in np.linspace(5, 40, 36):
        est = entropy_estimate([(t, hyperbolic_disk_area(t))])[0].estimate
        _expect(abs(est - 1) <= hyperbolic_entropy_envelope(t), f"envelope fails at t={t}")
    Z = make_lattice(np.eye(2))
    est = entropy_estimate([(1000, math.pi * 1e6)])[0].estimate
    _expect(est <= 0.02, "flat estimate at t=1000 above 0.02")
    _expect(sandwich_check(2, 1, 1, 1.0) and sandwich_check(2, 0, 0, 0.0), "sandwich check")
    rates = [math.log(loop_count_flat(Z, t)) / t for t in (10, 20, 40)]
    _expect(rates[0] > rates[1] > rates[2], "flat log P/t not decreasing")
    _expect(blichfeldt_lower_bound(0, 1) == -2, "empty-ball bound")


def checks(genus2_slack=None, inject=None):
    return [
        ("lattice enumeration matches box oracle", check_lattice_oracle),
        ("Gauss circle count at t=10", check_gauss_circle),
        ("pigeonhole bound on flat tori", make_flat_bound_check(inject)),
        ("pigeonhole witness on Z^2", check_witness),
        ("hyperbolic metric and isometries", check_metric),
        ("punctured torus orbit counts", check_punctured_torus),
        ("free group census and primitivity", check_free_census),
        ("punctured torus closed geodesics", check_closed_geodesics),
        ("genus-2 systole and pruning sensitivity", make_genus2_check(genus2_slack)),
        ("entropy envelopes", check_entropy),
    ]


def run_selftest(genus2_slack=None, inject=None, verbose=True) -> int:
    failed = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for name, fn in checks(genus2_slack, inject):
            try:
                fn()
            except CheckFailed as exc:
                print(f"FAIL  {name}: {exc}")
                failed += 1
                break
            if verbose:
                print(f"ok    {name}")
    sys.stdout.flush()
    if failed:
        return 1
    print("selftest passed")
    return 0
