"""Brute-force side: rational points of bounded height on the open part U.

S is the quartic del Pezzo surface

    x0^2 + x0*x3 + x2*x4 = 0,   x1*x3 - x2^2 = 0

in P^4, and U is the complement of its three lines.  Every point of U has
x2 != 0, so each projective point is represented exactly once by the
primitive integer vector with x2 > 0.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterator, Sequence

import numba
import numpy as np

Point = tuple[int, int, int, int, int]

# naive enumeration keeps x0^2 + x0*x3 in int64
MAX_NAIVE_B = 2_000_000_000


def on_surface(x: Sequence[int]) -> bool:
    x0, x1, x2, x3, x4 = x
    return x0 * x0 + x0 * x3 + x2 * x4 == 0 and x1 * x3 - x2 * x2 == 0


def on_line(x: Sequence[int]) -> bool:
    x0, x1, x2, x3, _ = x
    return (
        (x0 == 0 and x1 == 0 and x2 == 0)
        or (x0 + x3 == 0 and x1 == 0 and x2 == 0)
        or (x0 == 0 and x2 == 0 and x3 == 0)
    )


def normalize(x: Sequence[int]) -> Point:
    """Primitive representative with x2 > 0 (x must not lie on a line)."""
    g = math.gcd(*x)
    if g == 0:
        raise ValueError("the zero vector is not a projective point")
    y = [c // g for c in x]
    if y[2] < 0:
        y = [-c for c in y]
    elif y[2] == 0:
        raise ValueError(f"{tuple(x)} has x2 = 0, so it is not a point of U")
    return tuple(y)  # type: ignore[return-value]


def height(x: Sequence[int]) -> int:
    g = math.gcd(*x)
    if g == 0:
        raise ValueError("height of the zero vector is undefined")
    return max(abs(c) for c in x) // g


@numba.njit(cache=True)
def _gcd(a, b):
    a = abs(a)
    b = abs(b)
    while b:
        a, b = b, a % b
    return a


@numba.njit(cache=True)
def _square_divisors(n, out):
    """Write the divisors of n^2 into ``out``; return how many."""
    primes = np.empty(16, dtype=np.int64)
    exps = np.empty(16, dtype=np.int64)
    k = 0
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            primes[k] = d
            exps[k] = 2 * e
            k += 1
        d += 1
    if m > 1:
        primes[k] = m
        exps[k] = 2
        k += 1
    cnt = 1
    out[0] = 1
    for i in range(k):
        p = primes[i]
        base = cnt
        pk = 1
        for _ in range(exps[i]):
            pk *= p
            for j in range(base):
                out[cnt] = out[j] * pk
                cnt += 1
    return cnt


@numba.njit(cache=True)
def _count_naive_kernel(B, x2_lo, x2_hi):
    total = 0
    divs = np.empty(65536, dtype=np.int64)
    for x2 in range(x2_lo, x2_hi + 1):
        nd = _square_divisors(x2, divs)
        sq = x2 * x2
        for i in range(nd):
            x1 = divs[i]
            if x1 > B:
                continue
            x3 = sq // x1
            if x3 > B:
                continue
            for sign in (1, -1):
                s1 = sign * x1
                s3 = sign * x3
                g123 = _gcd(_gcd(s1, x2), s3)
                for x0 in range(-B, B + 1):
                    num = x0 * x0 + x0 * s3
                    if num % x2 != 0:
                        continue
                    x4 = -(num // x2)
                    if x4 > B or x4 < -B:
                        continue
                    if _gcd(_gcd(g123, x0), x4) == 1:
                        total += 1
    return total


def count_naive(B: int, workers: int = 1) -> int:
    """Exact N_{U,H}(B) by direct search on the two quadrics."""
    if B < 1:
        raise ValueError("B must be >= 1")
    if B > MAX_NAIVE_B:
        raise OverflowError("B too large for 64-bit naive enumeration")
    if workers <= 1:
        return int(_count_naive_kernel(B, 1, B))
    from concurrent.futures import ProcessPoolExecutor

    cuts = np.linspace(1, B + 1, workers + 1).astype(int)
    chunks = [(B, int(lo), int(hi) - 1) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi > lo]
    with ProcessPoolExecutor(workers) as ex:
        return sum(ex.map(_naive_chunk, chunks))


def _naive_chunk(args):
    return int(_count_naive_kernel(*args))


def iter_points_naive(B: int) -> Iterator[Point]:
    """Normalized points of U with height <= B, same search as count_naive."""
    for x2 in range(1, B + 1):
        sq = x2 * x2
        for x1 in range(1, min(B, sq) + 1):
            if sq % x1 or sq // x1 > B:
                continue
            x3 = sq // x1
            for s1, s3 in ((x1, x3), (-x1, -x3)):
                for x0 in range(-B, B + 1):
                    num = x0 * x0 + x0 * s3
                    if num % x2:
                        continue
                    x4 = -num // x2
                    if abs(x4) <= B and math.gcd(x0, s1, x2, s3, x4) == 1:
                        yield (x0, s1, x2, s3, x4)


def count_box(B: int) -> int:
    """Independent oracle: scan the whole box [-B, B]^5 (tiny B only)."""
    return len(points_box(B))


def points_box(B: int) -> set[Point]:
    found = set()
    rng = range(-B, B + 1)
    for x in itertools.product(rng, repeat=5):
        if any(x) and on_surface(x) and not on_line(x) and math.gcd(*x) == 1:
            found.add(normalize(x))
    return found
