import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoloops.bounds import euclidean_ball_volume
from geoloops.errors import HypothesisNotMet, MalformedInput, SingularBasis
from geoloops.flat import (
    blichfeldt_witness,
    closed_geodesic_count_flat,
    enumerate_vectors,
    flat_counts,
    loop_count_flat,
    make_lattice,
    primitive_count_flat,
    read_lattice,
)
from geoloops.oracles import disk_count, naive_box_vectors


def test_make_lattice_covolumes(Z2):
    assert Z2.covolume == 1
    assert make_lattice([[2, 0], [0, 3]]).covolume == pytest.approx(6)
    hexa = make_lattice([[1, 0], [0.5, 0.8660254]])
    assert hexa.covolume == pytest.approx(abs(np.linalg.det([[1, 0], [0.5, 0.8660254]])), rel=1e-15)
    assert hexa.covolume == pytest.approx(0.8660254)
    assert np.allclose(Z2.gram, np.eye(2))


@pytest.mark.parametrize("basis", [[[1, 2], [2, 4]], [[0, 0], [0, 0]], [[1e-7, 0], [0, 1e-7]]])
def test_singular_basis_rejected(basis):
    with pytest.raises(SingularBasis):
        make_lattice(basis)


def test_non_square_rejected():
    with pytest.raises(ValueError):
        make_lattice([[1, 2, 3], [4, 5, 6]])
    with pytest.raises(ValueError):
        make_lattice([[1, np.nan], [0, 1]])


def test_enumerate_small_cases(Z2, hexagonal):
    vs = enumerate_vectors(Z2, 1)
    assert {v.coeffs for v in vs} == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    vs = enumerate_vectors(Z2, 1.5)
    assert len(vs) == 8
    assert {v.coeffs for v in vs} == naive_box_vectors(Z2.basis, 1.5)
    assert len(enumerate_vectors(hexagonal, 1.01)) == 6 == len(naive_box_vectors(hexagonal.basis, 1.01))


def test_enumeration_is_sorted_and_consistent(hexagonal):
    vs = enumerate_vectors(hexagonal, 4.0)
    keys = [(round(v.length, 12), v.coeffs) for v in vs]
    assert keys == sorted(keys)
    for v in vs:
        c = np.array(v.coeffs, float)
        assert abs(math.sqrt(c @ hexagonal.gram @ c) - v.length) <= 1e-12
        assert v.primitive == (math.gcd(*map(abs, v.coeffs)) == 1)


def test_boundary_vectors_included(Z2):
    # (1,1) has length exactly sqrt(2)
    assert loop_count_flat(Z2, math.sqrt(2)) == 8
    assert loop_count_flat(Z2, 2.0) == 12


def test_loop_counts(Z2):
    assert loop_count_flat(Z2, 1) == 4
    assert loop_count_flat(Z2, 2) == 12
    assert loop_count_flat(Z2, 10) == disk_count(10) == 316


def test_primitive_and_geodesic_counts(Z2):
    assert primitive_count_flat(Z2, 1) == 4
    assert primitive_count_flat(Z2, 2) == 8
    assert primitive_count_flat(Z2, 2.3) == 16
    assert closed_geodesic_count_flat(Z2, 1) == 2
    assert closed_geodesic_count_flat(Z2, 0.5) == 0
    assert closed_geodesic_count_flat(Z2, 2.3) == 8


def test_flat_counts_matches_single_calls(hexagonal):
    ts = [0.5, 1.0, 1.7, 3.0, 6.5]
    for t, p, v in flat_counts(hexagonal, ts):
        assert p == loop_count_flat(hexagonal, t)
        assert v == closed_geodesic_count_flat(hexagonal, t)


def test_oracle_equivalence_random(lattices20):
    for L in lattices20[:6]:
        for t in (0.3, 1.1, 4.2, 9.0):
            got = {v.coeffs for v in enumerate_vectors(L, t)}
            assert got == naive_box_vectors(L.basis, t)


def test_four_dimensional_lattice():
    L = make_lattice(np.eye(4))
    # vectors of squared length <= 2 in Z^4: 8 of norm 1, 24 of norm 2
    assert loop_count_flat(L, math.sqrt(2)) == 32


lattice_entries = st.lists(st.floats(-3, 3, allow_nan=False), min_size=4, max_size=4)


def _lattice_or_skip(entries):
    B = np.array(entries).reshape(2, 2)
    if abs(np.linalg.det(B)) < 0.3 or np.linalg.cond(B) > 20:
        return None
    return make_lattice(B)


@settings(max_examples=60, deadline=None)
@given(lattice_entries, st.floats(0.1, 8), st.floats(0.1, 8))
def test_monotone_in_t(entries, t1, t2):
    L = _lattice_or_skip(entries)
    if L is None:
        return
    t1, t2 = sorted((t1, t2))
    assert loop_count_flat(L, t1) <= loop_count_flat(L, t2)
    assert primitive_count_flat(L, t1) <= primitive_count_flat(L, t2)
    assert closed_geodesic_count_flat(L, t1) <= closed_geodesic_count_flat(L, t2)


@settings(max_examples=60, deadline=None)
@given(lattice_entries, st.floats(0.1, 8))
def test_symmetric_under_negation(entries, t):
    L = _lattice_or_skip(entries)
    if L is None:
        return
    coeffs = {v.coeffs for v in enumerate_vectors(L, t)}
    assert coeffs == {tuple(-x for x in c) for c in coeffs}
    assert len(coeffs) % 2 == 0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.25, 4), st.floats(0.5, 6))
def test_scaling_covariance(s, t):
    L = make_lattice([[1, 0.2], [0.3, 1.4]])
    # keep t away from the length spectrum so rounding cannot move a vector across
    lengths = np.array([v.length for v in enumerate_vectors(L, t + 1)])
    if np.min(np.abs(lengths - t)) < 1e-6:
        return
    assert loop_count_flat(L.scaled(s), s * t) == loop_count_flat(L, t)


def test_blichfeldt_inequality_on_sweeps(Z2, hexagonal, lattices20):
    for L in [Z2, hexagonal] + lattices20[:4]:
        for t, p, _ in flat_counts(L, np.arange(0.25, 12.01, 0.25)):
            assert p >= euclidean_ball_volume(L.dimension, t / 2) / L.covolume - 2 - 1e-9


def test_witness_z2(Z2):
    w = blichfeldt_witness(Z2, 1.2, 4)
    assert w.center == (0.5, 0.5)
    assert set(w.translates) == {(0, 0), (1, 0), (0, 1), (1, 1)}
    assert w.multiplicity == 4
    assert all(d == pytest.approx(math.sqrt(0.5)) for d in w.distances(Z2))
    loops = w.loop_vectors()
    assert len(loops) == 3
    assert all(0 < np.linalg.norm(v) <= 2 * 1.2 for v in loops)


def test_witness_single_point_without_hypothesis(Z2):
    # pi * 0.16 < 1, so the volume precondition fails even for m = 1
    with pytest.raises(HypothesisNotMet):
        blichfeldt_witness(Z2, 0.4, 1)
    w = blichfeldt_witness(Z2, 0.4, 1, require_hypothesis=False)
    assert w.multiplicity == 1
    assert min(w.distances(Z2)) <= 0.4


def test_witness_hypothesis_not_met(Z2):
    with pytest.raises(HypothesisNotMet):
        blichfeldt_witness(Z2, 0.4, 2)


def test_witness_hexagonal():
    hexa = make_lattice([[1, 0], [0.5, math.sqrt(3) / 2]])
    assert euclidean_ball_volume(2, 1.0) > 3 * hexa.covolume
    w = blichfeldt_witness(hexa, 1.0, 3)
    assert w.multiplicity >= 3
    assert max(w.distances(hexa)) <= 1.0 + 1e-9
    # deep hole of the triangular lattice sits 1/sqrt(3) from three points
    assert sorted(w.distances(hexa))[2] == pytest.approx(1 / math.sqrt(3), abs=1e-3)


@pytest.mark.parametrize("r,m", [(1.5, 5), (2.0, 9), (1.1, 3)])
def test_witness_validity_z3(r, m):
    L = make_lattice(np.eye(3))
    w = blichfeldt_witness(L, r, m)
    assert w.multiplicity >= m
    assert len(set(w.translates)) == len(w.translates)
    assert max(w.distances(L)) <= r + 1e-9


def test_read_lattice(tmp_path):
    p = tmp_path / "hex.txt"
    p.write_text("2\n1 0\n0.5 0.8660254\n")
    L = read_lattice(p)
    assert L.covolume == pytest.approx(0.8660254)
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n1 0\n")
    with pytest.raises(MalformedInput):
        read_lattice(bad)
    bad.write_text("two\n1 0\n0 1\n")
    with pytest.raises(MalformedInput):
        read_lattice(bad)
