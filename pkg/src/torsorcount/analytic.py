"""Numeric checks: the sawtooth psi, AP counts in intervals, integral bounds.

The six integral cases measure planar or linear regions cut out by one
polynomial inequality.  Cases 1 and 4 are intervals solved by the quadratic
formula; cases 2, 3, 5, 6 reduce, for fixed u > 0, to case 1 or case 4 in t,
and the remaining u-integral is done by adaptive quadrature.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate


def psi_frac(t):
    """{t} - 1/2; exact for ints and Fractions."""
    return t - math.floor(t) - (Fraction(1, 2) if isinstance(t, (int, Fraction)) else 0.5)


def count_ap_interval(t0, t1, a: int, q: int) -> int:
    """#{n in (t0, t1] : n = a mod q}, by floor arithmetic (exact for rationals)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if t1 < t0:
        raise ValueError("need t0 <= t1")
    if _exact(t0, t1):
        return int((t1 - a) // q - (t0 - a) // q)
    return math.floor((t1 - a) / q) - math.floor((t0 - a) / q)


def _exact(*xs) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in xs)


@dataclass(frozen=True)
class APDecomposition:
    count: int
    main: object  # (t1 - t0) / q
    correction: object  # psi((t0 - a)/q) - psi((t1 - a)/q)


def ap_decomposition(t0, t1, a: int, q: int) -> APDecomposition:
    """Count plus the main-term/sawtooth split; the split must add up to the count."""
    n = count_ap_interval(t0, t1, a, q)
    if _exact(t0, t1):
        main = Fraction(t1 - t0, 1) / q
        corr = psi_frac(Fraction(t0 - a) / q) - psi_frac(Fraction(t1 - a) / q)
        if main + corr != n:
            raise AssertionError("sawtooth decomposition does not reproduce the count")
    else:
        main = (t1 - t0) / q
        corr = psi_frac((t0 - a) / q) - psi_frac((t1 - a) / q)
        if abs(main + corr - n) > 1e-9 * max(1.0, abs(main)):
            raise AssertionError("sawtooth decomposition does not reproduce the count")
    return APDecomposition(n, main, corr)


# ---------------------------------------------------------------------------
# integral bounds


@dataclass(frozen=True)
class BoundCase:
    """One instance of the six region-measure bounds.

    case 1: |a t^2 + b| <= 1            case 4: |a t^2 + b t| <= 1
    case 2: |a t^2 u + b u^k| <= 1      case 5: |a t^2 u + b t u^2| <= 1
    case 3: |a t^2 + b u^k| <= 1        case 6: |a t^2 + b t u^k| <= 1
    The two-dimensional cases integrate over t real and u > 0.
    """

    case: int
    a: float
    b: float
    k: float | None = None

    def __post_init__(self):
        if self.case not in range(1, 7):
            raise ValueError("case must be 1..6")
        if self.a == 0 or self.b == 0:
            raise ValueError("a and b must be non-zero")
        need_k = {2: 1.0, 3: 2.0, 6: 1.0}
        if self.case in need_k:
            if self.k is None or not self.k > need_k[self.case]:
                raise ValueError(f"case {self.case} needs k > {need_k[self.case]:g}")


def _sqrt_gap(lo: float, width: float) -> float:
    """sqrt(lo + width) - sqrt(max(lo, 0)) without cancellation (width > 0)."""
    hi = lo + width
    if hi <= 0:
        return 0.0
    if lo <= 0:
        return math.sqrt(hi)
    return width / (math.sqrt(hi) + math.sqrt(lo))


def measure_quadratic_offset(a: float, b: float) -> float:
    """Length of {t : |a t^2 + b| <= 1}."""
    if a < 0:
        a, b = -a, -b
    return 2.0 * _sqrt_gap((-1.0 - b) / a, 2.0 / a)


def measure_quadratic_linear(a: float, b: float) -> float:
    """Length of {t : |a t^2 + b t| <= 1}."""
    if a < 0:
        a, b = -a, -b
    c = b * b / (4.0 * a * a)
    return 2.0 * _sqrt_gap(c - 1.0 / a, 2.0 / a)


def _inner(case: int, a: float, b: float, k: float | None):
    if case == 2:
        return lambda u: measure_quadratic_offset(a * u, b * u**k), abs(b) ** (-1.0 / k)
    if case == 3:
        return lambda u: measure_quadratic_offset(a, b * u**k), abs(b) ** (-1.0 / k)
    if case == 5:
        return lambda u: measure_quadratic_linear(a * u, b * u * u), (4.0 * abs(a) / (b * b)) ** (1.0 / 3.0)
    return lambda u: measure_quadratic_linear(a, b * u**k), (4.0 * abs(a) / (b * b)) ** (0.5 / k)


def measure_case(bc: BoundCase, epsrel: float = 1e-6) -> float:
    if bc.case == 1:
        return measure_quadratic_offset(bc.a, bc.b)
    if bc.case == 4:
        return measure_quadratic_linear(bc.a, bc.b)
    f, kink = _inner(bc.case, bc.a, bc.b, bc.k)
    # with u = kink * e^s the only kink sits at s = 0 and both tails decay
    # exponentially (at least like e^(-s/2)), so s in [-60, 90] loses < 1e-19
    g = lambda s: f(kink * math.exp(s)) * kink * math.exp(s)
    pieces = [(-60.0, -1.0), (-1.0, 0.0), (0.0, 1.0), (1.0, 90.0)]
    total = 0.0
    for lo, hi in pieces:
        val, _ = integrate.quad(g, lo, hi, epsrel=epsrel, epsabs=0.0, limit=400)
        total += val
    return total


def bound_value(bc: BoundCase) -> float:
    a, b, k = abs(bc.a), abs(bc.b), bc.k
    if bc.case == 1:
        return min(a**-0.5, (a * b) ** -0.5)
    if bc.case == 2:
        return (a * b ** (1.0 / k)) ** -0.5
    if bc.case == 3:
        return a**-0.5 * b ** (-1.0 / k)
    if bc.case == 4:
        return min(a**-0.5, 1.0 / b)
    if bc.case == 5:
        return (a * b) ** (-1.0 / 3.0)
    return a ** (-(k - 1.0) / (2.0 * k)) * b ** (-1.0 / k)


def log_grid(points: int = 13, lo: float = 1e-3, hi: float = 1e3) -> list[tuple[float, float]]:
    """All (a, b) with |a|, |b| log-spaced on [lo, hi], in all four sign quadrants."""
    mags = np.logspace(math.log10(lo), math.log10(hi), points)
    return [(sa * x, sb * y) for sa in (1, -1) for sb in (1, -1) for x in mags for y in mags]


@dataclass(frozen=True)
class SweepResult:
    case: int
    k: float | None
    max_ratio: float
    argmax: tuple[float, float]
    rows: tuple[tuple[float, float, float, float, float], ...]  # a, b, measure, bound, ratio


def bound_ratio_sweep(case: int, grid: Iterable[tuple[float, float]], k: float | None = None) -> SweepResult:
    rows = []
    best, arg = -1.0, (math.nan, math.nan)
    for a, b in grid:
        bc = BoundCase(case, a, b, k)
        m = measure_case(bc)
        bd = bound_value(bc)
        ratio = m / bd
        if not math.isfinite(ratio):
            raise ArithmeticError(f"non-finite ratio at {bc}")
        rows.append((a, b, m, bd, ratio))
        if ratio > best:
            best, arg = ratio, (a, b)
    return SweepResult(case, k, best, arg, tuple(rows))


def write_sweep_csv(results: Sequence[SweepResult], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["case", "a", "b", "k", "measure", "bound", "ratio"])
        for res in results:
            for a, b, m, bd, r in res.rows:
                w.writerow([res.case, repr(a), repr(b), "" if res.k is None else res.k, repr(m), repr(bd), repr(r)])


# default exponents used by the standard sweep
STANDARD_K = {1: (None,), 2: (2.0, 3.0), 3: (3.0, 4.0), 4: (None,), 5: (None,), 6: (2.0, 3.0)}


def standard_sweeps(points: int = 13) -> list[SweepResult]:
    grid = log_grid(points)
    return [bound_ratio_sweep(c, grid, k) for c in range(1, 7) for k in STANDARD_K[c]]


# ---------------------------------------------------------------------------
# sums of theta(n) / n^kappa


@dataclass(frozen=True)
class KappaEnvelope:
    kappa: float
    C: float
    constant: float  # max over the grid of |partial sum| / reference
    ratios: tuple[float, ...]


def sum_kappa_envelope(
    theta: np.ndarray, kappa: float, t_grid: Sequence[int], C: float, t1: int = 0
) -> KappaEnvelope:
    """Compare sum_{t1 < n <= t} theta(n)/n^kappa with its regime's reference.

    ``theta[n]`` holds theta(n) for 1 <= n < len(theta).  The references are
    t^(1-kappa) log(t+2)^C for kappa < 1, log(t+2)^(C+1) for kappa = 1, and
    log(t1+2)^C / t1^(kappa-1) for kappa > 1 (which needs t1 >= 1).
    """
    if kappa > 1 and t1 < 1:
        raise ValueError("kappa > 1 needs t1 >= 1")
    n = np.arange(len(theta), dtype=np.float64)
    terms = np.zeros(len(theta))
    terms[1:] = theta[1:] / n[1:] ** kappa
    cums = np.cumsum(terms)
    ratios = []
    for t in t_grid:
        if t >= len(theta):
            raise ValueError("t-grid exceeds the theta table")
        s = abs(cums[t] - cums[t1])
        if kappa < 1:
            ref = t ** (1 - kappa) * math.log(t + 2) ** C
        elif kappa == 1:
            ref = math.log(t + 2) ** (C + 1)
        else:
            ref = math.log(t1 + 2) ** C / t1 ** (kappa - 1)
        ratios.append(s / ref)
    return KappaEnvelope(kappa, C, max(ratios), tuple(ratios))
