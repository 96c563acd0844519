import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsorcount import surface, torsor

FROZEN_N = {1: 4, 10: 110, 49: 1064, 50: 1084, 60: 1200, 100: 2654, 3000: 237306, 10**4: 1113254}


def test_psi_examples():
    assert torsor.psi_map((1, 1, 1, 1, 1, 1, 1, 1, -2)) == (1, 1, 1, 1, -2)
    assert torsor.psi_map((1, 1, 1, 1, 1, 1, 1, 0, -1)) == (0, 1, 1, 1, 0)
    img = torsor.psi_map((1, 1, 1, 1, 1, 1, -1, 1, 0))
    assert img == (-1, 1, -1, 1, 0)
    assert surface.normalize(img) == (1, -1, 1, -1, 0)
    with pytest.raises(ValueError):
        torsor.psi_map((1, 1, 1, 1, 1, 1, 1, 1, 1))


def test_solve_eta9_examples():
    assert torsor.solve_eta9((1, 1, 1, 1, 1, 1, 1, 1)) == -2
    assert torsor.solve_eta9((2, 1, 1, 1, 1, 1, 1, 1)) == -1
    assert torsor.solve_eta9((2, 1, 1, 1, 1, 1, 1, 2)) is None


def test_coprimality_examples():
    assert torsor.coprimality_ok((1, 1, 1, 1, 1, 1, 1, 1, -2))
    # eta1 = eta2 = 2 share a factor across a non-edge
    assert not torsor.coprimality_ok((2, 2, 1, 1, 1, 1, 1, 1, -2))
    # {7, 8} is an edge, so a common factor 2 is allowed there
    e9 = torsor.solve_eta9((1, 1, 1, 1, 1, 1, 6, 10))
    assert torsor.coprimality_ok((1, 1, 1, 1, 1, 1, 6, 10, e9))


def test_edge_sets():
    assert len(torsor.EDGES) == 11
    assert len(torsor.NON_EDGES) == 36 - 11


def test_eta8_intervals_all_ones():
    (iv,) = torsor.eta8_intervals((1,) * 7, 1)
    assert iv[0] == pytest.approx(-1.0)
    assert iv[1] == pytest.approx((-1 + math.sqrt(5)) / 2)


def test_eta8_intervals_mirror():
    e = (1, 2, 1, 1, 1, 1, 3)
    m = e[:6] + (-3,)
    a = torsor.eta8_intervals(e, 500)
    b = torsor.eta8_intervals(m, 500)
    assert b == pytest.approx([(-hi, -lo) for lo, hi in reversed(a)])


def test_eta8_intervals_empty_when_height_violated():
    assert torsor.eta8_intervals((1, 1, 2, 1, 1, 1, 1), 1) == []
    assert torsor.eta8_intervals((1, 1, 1, 1, 1, 1, 0), 100) == []


def test_integer_ranges_do_not_bridge_gaps():
    # two real intervals whose gap holds exactly one integer
    e = (1, 1, 1, 1, 1, 1, 6)
    assert torsor.eta8_integer_ranges(e, 50) == [(-7, -4), (-2, 1)]


@pytest.mark.parametrize("B", [1, 7, 30, 50, 90])
def test_integer_ranges_match_exact_predicate(B):
    for e in torsor.iter_eta17(B):
        got = [n for lo, hi in torsor.eta8_integer_ranges(e, B) for n in range(lo, hi + 1)]
        lin = B // abs(math.prod(e[1:]))
        want = [n for n in range(-lin - 1, lin + 2) if torsor.eta8_in_region(e, n, B)]
        assert got == want, e


@settings(max_examples=300, deadline=None)
@given(
    st.tuples(*[st.integers(1, 4)] * 6, st.integers(-6, 6).filter(bool)),
    st.integers(1, 3000),
)
def test_integer_ranges_property(e, B):
    got = [n for lo, hi in torsor.eta8_integer_ranges(e, B) for n in range(lo, hi + 1)]
    lin = B // abs(math.prod(e[1:]))
    want = [n for n in range(-lin - 1, lin + 2) if torsor.eta8_in_region(e, n, B)]
    assert got == want


def test_height_h_matches_image_height():
    B = 60
    for p in torsor.iter_torsor_points(B):
        x = torsor.psi_monomials(p.eta)
        assert (surface.height(x) <= B) == (torsor.height_h(p.eta[:8], B) <= 1)


def test_count_at_one():
    assert torsor.count_torsor(1) == 4
    assert len(list(torsor.iter_torsor_points(1))) == 4


@pytest.mark.parametrize("B,n", sorted(FROZEN_N.items()))
def test_frozen_counts(B, n):
    assert torsor.count_torsor(B) == n


@pytest.mark.parametrize("B", [10, 30, 60])
def test_image_is_the_naive_point_set(B):
    assert sorted(torsor.torsor_image_points(B)) == sorted(surface.iter_points_naive(B))


@pytest.mark.parametrize("B", [10, 30])
def test_graph_enumerator_matches_naive(B):
    imgs = [surface.normalize(torsor.psi_monomials(p.eta)) for p in torsor.iter_torsor_points_graph(B)]
    assert len(imgs) == len(set(imgs))
    assert set(imgs) == set(surface.iter_points_naive(B))


def test_enumerated_points_satisfy_everything():
    for p in torsor.iter_torsor_points(80):
        assert p.valid_ranges and p.torsor_equation == 0
        assert torsor.coprimality_ok(p.eta)
        assert surface.height(torsor.psi_monomials(p.eta)) <= 80


def test_workers_and_partitions_agree():
    B = 2000
    n = torsor.count_torsor(B)
    assert torsor.count_torsor(B, workers=3) == n
    assert sum(torsor.count_torsor_partition(B, w, 4) for w in range(4)) == n


def test_dropping_a_non_edge_is_detected(monkeypatch):
    base = len(list(torsor.iter_torsor_points_graph(60)))
    monkeypatch.setattr(torsor, "NON_EDGES", tuple(e for e in torsor.NON_EDGES if e != (3, 8)))
    assert len(list(torsor.iter_torsor_points_graph(60))) == base + 102


def test_rejects_bad_B():
    with pytest.raises(ValueError):
        torsor.count_torsor(0)
    with pytest.raises(OverflowError):
        torsor.count_torsor(torsor.MAX_TORSOR_B + 1)
