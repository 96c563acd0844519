import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsorcount import surface

# counts frozen from the naive search and cross-checked with the torsor kernel
FROZEN_N = {1: 4, 2: 8, 3: 8, 4: 30, 10: 110, 30: 492, 100: 2654, 1000: 56230}


def test_on_surface_examples():
    assert surface.on_surface((0, 0, 0, 0, 1))
    assert surface.on_surface((1, 1, 1, 1, -2))
    assert not surface.on_surface((1, 1, 1, 1, 1))


def test_on_line_examples():
    assert surface.on_line((0, 0, 0, 0, 1))
    assert surface.on_line((-1, 0, 0, 1, 0))
    assert not surface.on_line((1, 1, 1, 1, -2))


def test_height_examples():
    assert surface.height((2, 4, 6, 8, 10)) == 5
    assert surface.height((1, 1, 1, 1, -2)) == 2
    assert surface.height((0, 0, 0, 0, 7)) == 1
    with pytest.raises(ValueError):
        surface.height((0, 0, 0, 0, 0))


def test_normalize():
    assert surface.normalize((2, -2, -2, -2, 4)) == (-1, 1, 1, 1, -2)
    with pytest.raises(ValueError):
        surface.normalize((0, 0, 0, 0, 3))


def test_points_at_height_one():
    pts = surface.points_box(1)
    assert pts == {(-1, 1, 1, 1, 0), (0, 1, 1, 1, 0), (0, -1, 1, -1, 0), (1, -1, 1, -1, 0)}
    assert surface.count_naive(1) == 4


@pytest.mark.parametrize("B", [1, 2, 3])
def test_naive_matches_box(B):
    assert surface.count_naive(B) == surface.count_box(B)
    assert set(surface.iter_points_naive(B)) == surface.points_box(B)


def test_box_brute_force_independent():
    # a second brute force straight from the definitions
    B = 2
    pts = set()
    for x in itertools.product(range(-B, B + 1), repeat=5):
        if any(x) and surface.on_surface(x) and not surface.on_line(x):
            pts.add(surface.normalize(x))
    assert pts == surface.points_box(B)


@pytest.mark.parametrize("B,n", sorted(FROZEN_N.items()))
def test_frozen_counts(B, n):
    assert surface.count_naive(B) == n


def test_workers_do_not_change_count():
    assert surface.count_naive(300, workers=1) == surface.count_naive(300, workers=3)


def test_points_are_valid():
    for x in surface.iter_points_naive(40):
        assert surface.on_surface(x) and not surface.on_line(x)
        assert x[2] > 0 and surface.height(x) <= 40


@settings(max_examples=200, deadline=None)
@given(st.tuples(*[st.integers(-50, 50)] * 5).filter(any), st.integers(1, 9))
def test_height_projective_invariance(x, k):
    assert surface.height(x) == surface.height(tuple(k * c for c in x))


def test_invalid_B():
    with pytest.raises(ValueError):
        surface.count_naive(0)
