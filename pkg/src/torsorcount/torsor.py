"""Counting N_{U,H}(B) on the universal torsor.

Integral points (eta1, ..., eta9) with eta1..eta6 >= 1, eta7 != 0, subject to

    eta1*eta9 + eta2*eta8 + eta4*eta5^3*eta6^2*eta7 = 0,

the coprimality conditions of the configuration graph below, and
max |psi_i(eta)| <= B, are in bijection with the points of U of height <= B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numba
import numpy as np

from .surface import Point, _gcd, normalize

# edges of the configuration graph of the nine curves; every other pair of
# torsor coordinates must be coprime
EDGES = frozenset(
    frozenset(e)
    for e in [(9, 7), (9, 8), (9, 1), (7, 8), (7, 5), (5, 6), (6, 4), (4, 3), (3, 1), (8, 2), (2, 3)]
)
NON_EDGES = tuple(
    (i, j) for i in range(1, 10) for j in range(i + 1, 10) if frozenset((i, j)) not in EDGES
)

# monomials are kept inside int64; see the bound on |eta7*eta8*eta9| in count_torsor
MAX_TORSOR_B = 2_000_000_000


@dataclass(frozen=True)
class TorsorPoint:
    eta: tuple[int, ...]

    def __post_init__(self):
        if len(self.eta) != 9:
            raise ValueError("a torsor point has nine coordinates")

    def __getitem__(self, i: int) -> int:
        """1-based coordinate access, eta[1] .. eta[9]."""
        return self.eta[i - 1]

    @property
    def valid_ranges(self) -> bool:
        e = self.eta
        return all(x >= 1 for x in e[:6]) and e[6] != 0

    @property
    def torsor_equation(self) -> int:
        e1, e2, _, e4, e5, e6, e7, e8, e9 = self.eta
        return e1 * e9 + e2 * e8 + e4 * e5**3 * e6**2 * e7


def psi_monomials(eta: Sequence[int]) -> tuple[int, int, int, int, int]:
    e1, e2, e3, e4, e5, e6, e7, e8, e9 = eta
    return (
        e2 * e3 * e4 * e5 * e6 * e7 * e8,
        e1**2 * e2**2 * e3**3 * e4**2 * e6,
        e1 * e2 * e3**2 * e4**2 * e5**2 * e6**2 * e7,
        e3 * e4**2 * e5**4 * e6**3 * e7**2,
        e7 * e8 * e9,
    )


def psi_map(eta: Sequence[int]) -> tuple[int, int, int, int, int]:
    """Image of a torsor point in P^4 (not normalized)."""
    p = TorsorPoint(tuple(eta))
    if p.torsor_equation != 0:
        raise ValueError(f"{tuple(eta)} violates the torsor equation")
    return psi_monomials(eta)


def solve_eta9(eta18: Sequence[int]) -> int | None:
    e1, e2, _, e4, e5, e6, e7, e8 = eta18
    if e1 < 1:
        raise ValueError("eta1 must be positive")
    num = -(e2 * e8 + e4 * e5**3 * e6**2 * e7)
    q, r = divmod(num, e1)
    return None if r else q


def coprimality_ok(eta: Sequence[int]) -> bool:
    return all(math.gcd(eta[i - 1], eta[j - 1]) == 1 for i, j in NON_EDGES)


def height_h(eta18: Sequence[int], B: float) -> float:
    """The eta9-free height function h(eta'; B); h <= 1 iff the point has height <= B."""
    e1, e2, e3, e4, e5, e6, e7, e8 = eta18
    quad = (e2 * e7 * e8 * e8 + e4 * e5**3 * e6**2 * e7**2 * e8) / e1
    return max(
        abs(e2 * e3 * e4 * e5 * e6 * e7 * e8),
        abs(e1**2 * e2**2 * e3**3 * e4**2 * e6),
        abs(e1 * e2 * e3**2 * e4**2 * e5**2 * e6**2 * e7),
        abs(e3 * e4**2 * e5**4 * e6**3 * e7**2),
        abs(quad),
    ) / B


def _quadratic_band(a: float, b: float, c: float) -> list[tuple[float, float]]:
    """{t : |a t^2 + b t| <= c} for a > 0, b >= 0, c > 0."""
    # a t^2 + b t <= c between the roots r1 <= r2
    disc_hi = b * b + 4 * a * c
    sq = math.sqrt(disc_hi)
    r1 = (-b - sq) / (2 * a)
    r2 = (-b + sq) / (2 * a)
    # a t^2 + b t >= -c outside (s1, s2) when the discriminant is positive
    disc_lo = b * b - 4 * a * c
    if disc_lo <= 0:
        return [(r1, r2)]
    sl = math.sqrt(disc_lo)
    s1 = (-b - sl) / (2 * a)
    s2 = (-b + sl) / (2 * a)
    return [(r1, s1), (s2, r2)]


def eta8_intervals(eta17: Sequence[int], B: float) -> list[tuple[float, float]]:
    """Real eta8 with h(eta1..eta7, eta8; B) <= 1, as at most two closed intervals."""
    e1, e2, e3, e4, e5, e6, e7 = eta17
    if e7 == 0:
        return []
    if (
        e1**2 * e2**2 * e3**3 * e4**2 * e6 > B
        or abs(e1 * e2 * e3**2 * e4**2 * e5**2 * e6**2 * e7) > B
        or e3 * e4**2 * e5**4 * e6**3 * e7**2 > B
    ):
        return []
    lin = B / abs(e2 * e3 * e4 * e5 * e6 * e7)
    a = abs(e2 * e7)
    b = e4 * e5**3 * e6**2 * e7**2
    band = _quadratic_band(float(a), float(b), float(e1) * B)
    if e7 < 0:
        band = [(-hi, -lo) for lo, hi in reversed(band)]
    out = []
    for lo, hi in band:
        lo, hi = max(lo, -lin), min(hi, lin)
        if lo <= hi:
            out.append((lo, hi))
    return out


def eta8_in_region(eta17: Sequence[int], t: int, B: int) -> bool:
    """Exact integer test of h(eta1..eta7, t; B) <= 1."""
    e1, e2, e3, e4, e5, e6, e7 = eta17
    return (
        abs(e2 * e3 * e4 * e5 * e6 * e7 * t) <= B
        and e1**2 * e2**2 * e3**3 * e4**2 * e6 <= B
        and abs(e1 * e2 * e3**2 * e4**2 * e5**2 * e6**2 * e7) <= B
        and e3 * e4**2 * e5**4 * e6**3 * e7**2 <= B
        and abs(e2 * e7 * t * t + e4 * e5**3 * e6**2 * e7**2 * t) <= e1 * B
    )


def eta8_integer_ranges(eta17: Sequence[int], B: int) -> list[tuple[int, int]]:
    """Integer eta8 with h <= 1 as disjoint inclusive ranges, endpoints fixed exactly."""
    ranges = []
    last = None
    for lo, hi in eta8_intervals(eta17, B):
        # float endpoints are off by at most a rounding error, so the exact
        # integer endpoints are within one step of ceil(lo) and floor(hi)
        tol = 1e-9 * (1.0 + abs(lo) + abs(hi))
        a, b = math.ceil(lo), math.floor(hi)
        if a - 1 >= lo - tol and eta8_in_region(eta17, a - 1, B):
            a -= 1
        elif a <= b and a - lo <= tol and not eta8_in_region(eta17, a, B):
            a += 1
        if b + 1 <= hi + tol and eta8_in_region(eta17, b + 1, B):
            b += 1
        elif b >= a and hi - b <= tol and not eta8_in_region(eta17, b, B):
            b -= 1
        if last is not None:
            a = max(a, last + 1)
        if a <= b:
            ranges.append((a, b))
            last = b
    return ranges


def _iroot(x: int, k: int) -> int:
    """floor(x ** (1/k)) for x >= 0."""
    if x < 0:
        raise ValueError
    r = int(round(x ** (1.0 / k)))
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def iter_eta17(B: int) -> Iterator[tuple[int, ...]]:
    """Tuples (eta1..eta7) satisfying the ranges, the coprimality conditions among
    themselves and the eta8-free height conditions, in the default loop order."""
    for e3 in range(1, _iroot(B, 3) + 1):
        for e5 in range(1, _iroot(B // e3, 4) + 1):
            if math.gcd(e5, e3) != 1:
                continue
            e4max = min(math.isqrt(B // e3**3), math.isqrt(B // (e3 * e5**4)))
            for e4 in range(1, e4max + 1):
                if math.gcd(e4, e5) != 1:
                    continue
                for e2 in range(1, math.isqrt(B // (e3**3 * e4**2)) + 1):
                    if math.gcd(e2, e4 * e5) != 1:
                        continue
                    for e1 in range(1, math.isqrt(B // (e2**2 * e3**3 * e4**2)) + 1):
                        if math.gcd(e1, e2 * e4 * e5) != 1:
                            continue
                        m1 = e1**2 * e2**2 * e3**3 * e4**2
                        for e6 in range(1, B // m1 + 1):
                            m3 = e3 * e4**2 * e5**4 * e6**3
                            m2 = e1 * e2 * e3**2 * e4**2 * e5**2 * e6**2
                            if m3 > B or m2 > B:
                                break
                            if math.gcd(e6, e1 * e2 * e3) != 1:
                                continue
                            e7max = min(math.isqrt(B // m3), B // m2)
                            for a7 in range(1, e7max + 1):
                                if math.gcd(a7, e1 * e2 * e3 * e4 * e6) != 1:
                                    continue
                                yield (e1, e2, e3, e4, e5, e6, a7)
                                yield (e1, e2, e3, e4, e5, e6, -a7)


def iter_torsor_points(B: int) -> Iterator[TorsorPoint]:
    """All points of T_0(B), listed by a plain Python loop (small B)."""
    for eta17 in iter_eta17(B):
        e1, e2, e3, e4, e5, e6, e7 = eta17
        for lo, hi in eta8_integer_ranges(eta17, B):
            for e8 in range(lo, hi + 1):
                e9 = solve_eta9((*eta17, e8))
                if e9 is None:
                    continue
                if math.gcd(e8, e1 * e3 * e4 * e5 * e6) != 1:
                    continue
                if math.gcd(e9, e2 * e3 * e4 * e5 * e6) != 1:
                    continue
                if abs(e7 * e8 * e9) > B:
                    continue
                yield TorsorPoint((*eta17, e8, e9))


def iter_torsor_points_graph(B: int) -> Iterator[TorsorPoint]:
    """Like iter_torsor_points, but coprimality is checked only through the
    non-edges of the intersection graph (slow; for cross-checks at small B)."""
    for e3 in range(1, _iroot(B, 3) + 1):
        for e5 in range(1, _iroot(B // e3, 4) + 1):
            for e4 in range(1, math.isqrt(B // e3) + 1):
                for e2 in range(1, math.isqrt(B // (e3**3 * e4**2)) + 1):
                    for e1 in range(1, math.isqrt(B // (e2**2 * e3**3 * e4**2)) + 1):
                        m1 = e1**2 * e2**2 * e3**3 * e4**2
                        for e6 in range(1, B // m1 + 1):
                            for a7 in range(1, B + 1):
                                if e3 * e4**2 * e5**4 * e6**3 * a7**2 > B:
                                    break
                                for e7 in (a7, -a7):
                                    eta17 = (e1, e2, e3, e4, e5, e6, e7)
                                    for lo, hi in eta8_integer_ranges(eta17, B):
                                        for e8 in range(lo, hi + 1):
                                            e9 = solve_eta9((*eta17, e8))
                                            if e9 is None or abs(e7 * e8 * e9) > B:
                                                continue
                                            eta = (*eta17, e8, e9)
                                            if coprimality_ok(eta):
                                                yield TorsorPoint(eta)


def torsor_image_points(B: int) -> list[Point]:
    return [normalize(psi_monomials(p.eta)) for p in iter_torsor_points(B)]


# ---------------------------------------------------------------------------
# compiled counting kernel


@numba.njit(cache=True)
def _isqrt(x):
    if x <= 0:
        return 0
    r = np.int64(math.sqrt(float(x)))
    while r * r > x:
        r -= 1
    while (r + 1) * (r + 1) <= x:
        r += 1
    return r


@numba.njit(cache=True)
def _iroot_nb(x, k):
    if x <= 0:
        return 0
    r = np.int64(float(x) ** (1.0 / k))
    while r > 0 and r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


@numba.njit(cache=True)
def _modinv(a, m):
    """Inverse of a modulo m (gcd(a, m) = 1, m >= 1)."""
    if m == 1:
        return 0
    t, newt = 0, 1
    r, newr = m, a % m
    while newr:
        q = r // newr
        t, newt = newt, t - q * newt
        r, newr = newr, r - q * newr
    return t % m


@numba.njit(cache=True)
def _count_eta8(B, e1, e2, e3, e4, e5, e6, e7, inv2):
    """Points over a fixed (eta1..eta7)."""
    a = e2 * abs(e7)
    b = e4 * e5 * e5 * e5 * e6 * e6 * e7 * e7
    c = float(e1) * float(B)
    lin = B // (e2 * e3 * e4 * e5 * e6 * abs(e7))
    p8 = e1 * e3 * e4 * e5 * e6
    p9 = e2 * e3 * e4 * e5 * e6
    m = e4 * e5 * e5 * e5 * e6 * e6 * e7
    # residue class of eta8 modulo eta1
    r = ((-m) % e1) * inv2 % e1 if e1 > 1 else 0
    fa = float(a)
    fb = float(b)
    sq = math.sqrt(fb * fb + 4.0 * fa * c)
    r1 = (-fb - sq) / (2.0 * fa)
    r2 = (-fb + sq) / (2.0 * fa)
    dlo = fb * fb - 4.0 * fa * c
    nint = 1
    lo0 = r1
    hi0 = r2
    lo1 = 0.0
    hi1 = -1.0
    if dlo > 0:
        sl = math.sqrt(dlo)
        hi0 = (-fb - sl) / (2.0 * fa)
        lo1 = (-fb + sl) / (2.0 * fa)
        hi1 = r2
        nint = 2
    if e7 < 0:
        # mirror image, keeping the intervals in increasing order
        if nint == 2:
            lo0, hi0, lo1, hi1 = -hi1, -lo1, -hi0, -lo0
        else:
            lo0, hi0 = -hi0, -lo0
    total = 0
    last = -(1 << 62)
    for j in range(nint):
        if j == 0:
            lo, hi = lo0, hi0
        else:
            lo, hi = lo1, hi1
        ilo = np.int64(math.floor(lo)) - 1
        ihi = np.int64(math.ceil(hi)) + 1
        if ilo < -lin:
            ilo = -lin
        if ihi > lin:
            ihi = lin
        if ilo <= last:
            ilo = last + 1
        if ilo > ihi:
            continue
        last = ihi
        # first eta8 >= ilo with eta8 = r mod eta1
        e8 = ilo + ((r - ilo) % e1)
        while e8 <= ihi:
            num = e2 * e8 + m
            e9 = -(num // e1)
            if abs(e7 * e8 * e9) <= B:
                if _gcd(e8, p8) == 1 and _gcd(e9, p9) == 1:
                    total += 1
            e8 += e1
    return total


@numba.njit(cache=True)
def _count_torsor_kernel(B, worker, nworkers):
    total = 0
    idx = -1
    e3max = _iroot_nb(B, 3)
    for e3 in range(1, e3max + 1):
        for e5 in range(1, _iroot_nb(B // e3, 4) + 1):
            if _gcd(e5, e3) != 1:
                continue
            e4max = min(_isqrt(B // (e3 * e3 * e3)), _isqrt(B // (e3 * e5**4)))
            for e4 in range(1, e4max + 1):
                if _gcd(e4, e5) != 1:
                    continue
                for e2 in range(1, _isqrt(B // (e3**3 * e4 * e4)) + 1):
                    if _gcd(e2, e4 * e5) != 1:
                        continue
                    idx += 1
                    if idx % nworkers != worker:
                        continue
                    for e1 in range(1, _isqrt(B // (e2 * e2 * e3**3 * e4 * e4)) + 1):
                        if _gcd(e1, e2 * e4 * e5) != 1:
                            continue
                        inv2 = _modinv(e2 % e1, e1) if e1 > 1 else 0
                        m1 = e1 * e1 * e2 * e2 * e3**3 * e4 * e4
                        e6 = 0
                        while True:
                            e6 += 1
                            if e6 * m1 > B:
                                break
                            m3 = e3 * e4 * e4 * e5**4 * e6**3
                            m2 = e1 * e2 * e3 * e3 * e4 * e4 * e5 * e5 * e6 * e6
                            if m3 > B or m2 > B:
                                break
                            if _gcd(e6, e1 * e2 * e3) != 1:
                                continue
                            e7max = min(_isqrt(B // m3), B // m2)
                            g7 = e1 * e2 * e3 * e4 * e6
                            for a7 in range(1, e7max + 1):
                                if _gcd(a7, g7) != 1:
                                    continue
                                total += _count_eta8(B, e1, e2, e3, e4, e5, e6, a7, inv2)
                                total += _count_eta8(B, e1, e2, e3, e4, e5, e6, -a7, inv2)
    return total


def count_torsor_partition(B: int, worker: int, nworkers: int) -> int:
    """Partial count over the outer tuples assigned to one worker (interleaved)."""
    if not 0 <= worker < nworkers:
        raise ValueError("worker index out of range")
    return int(_count_torsor_kernel(B, worker, nworkers))


def _partition_job(args):
    return count_torsor_partition(*args)


def count_torsor(B: int, workers: int = 1) -> int:
    """Exact N_{U,H}(B) by enumerating integral points on the torsor."""
    if B < 1:
        raise ValueError("B must be >= 1")
    if B > MAX_TORSOR_B:
        raise OverflowError("B too large for the 64-bit torsor kernel")
    if workers <= 1:
        return count_torsor_partition(B, 0, 1)
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(workers) as ex:
        return sum(ex.map(_partition_job, [(B, w, workers) for w in range(workers)]))
