"""Multiplicative functions given by per-prime local data.

A function is described by a constant c and, for each prime p, a sequence
A_p(0), A_p(1), ... that is eventually constant:

    theta(n) = c * prod_{p^v || n} A_p(v) * prod_{p not dividing n} A_p(0).

Generic primes share one rule (A_p(0) and A_p(v >= 1) as polynomials in
q = 1/p); finitely many exceptional primes carry explicit sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numba
import numpy as np
import sympy as sp

from .local_factors import ConvergenceError, _poly, _val, check_convergent, euler_tail
from .local_factors import q as qsym
from .numtheory import factorize, omega, primes_upto, smallest_prime_factor_table


@dataclass(frozen=True)
class Theta2Params:
    """Declared bounds: |A_p(v) - A_p(v-1)| <= C1 if p^v | b, else C2 p^-v; |c prod A_p(0)| <= C3."""

    b: int
    C1: float
    C2: float
    C3: float

    @property
    def C4(self) -> float:
        n_div = math.prod(e + 1 for e in factorize(self.b).values()) if self.b > 1 else 1
        return n_div * (self.C1 * self.C2) ** omega(self.b) * self.C3


@dataclass(frozen=True)
class MultiplicativeData:
    c: Fraction
    generic0: sp.Poly
    generic1: sp.Poly
    exceptional: Mapping[int, tuple[Fraction, ...]] = field(default_factory=dict)
    theta2: Theta2Params | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "generic0", _poly(self.generic0))
        object.__setattr__(self, "generic1", _poly(self.generic1))
        exc = {}
        for p, seq in self.exceptional.items():
            if not seq:
                raise ValueError(f"empty sequence at p={p}")
            exc[int(p)] = tuple(Fraction(x) for x in seq)
        object.__setattr__(self, "exceptional", exc)

    def A(self, p: int, nu: int) -> Fraction:
        seq = self.exceptional.get(p)
        if seq is not None:
            return seq[min(nu, len(seq) - 1)]
        return _val(self.generic0 if nu == 0 else self.generic1, Fraction(1, p))

    def depth(self, p: int) -> int:
        """Stabilisation depth: A_p(v) = A_p(depth) for v >= depth."""
        seq = self.exceptional.get(p)
        return 1 if seq is None else max(1, len(seq) - 1)

    @property
    def exact_generic(self) -> bool:
        return self.generic0 == sp.Poly(1, qsym, domain="QQ")


# ---------------------------------------------------------------------------
# shipped instances

_ONE = sp.Poly(1, qsym, domain="QQ")


def constant_one() -> MultiplicativeData:
    return MultiplicativeData(Fraction(1), _ONE, _ONE, theta2=Theta2Params(1, 1, 1, 1), name="one")


def phi_star_data() -> MultiplicativeData:
    """phi(n)/n."""
    return MultiplicativeData(
        Fraction(1), _ONE, sp.Poly(1 - qsym, qsym, domain="QQ"), theta2=Theta2Params(1, 1, 1, 1), name="phi*"
    )


def phi_dagger_data() -> MultiplicativeData:
    """prod_{p | n} (1 + 1/p)."""
    return MultiplicativeData(
        Fraction(1), _ONE, sp.Poly(1 + qsym, qsym, domain="QQ"), theta2=Theta2Params(1, 1, 1, 1), name="phi-dagger"
    )


def f_ab_data(a: int, b: int) -> MultiplicativeData:
    """f_{a,b}: A_p(v >= 1) is 0 if p | b, 1 if p | a and p does not divide b, else 1 - 1/p."""
    if a < 1 or b < 1:
        raise ValueError("a, b must be positive")
    exc = {}
    for p in factorize(a * b) if a * b > 1 else {}:
        exc[p] = (Fraction(1), Fraction(0) if b % p == 0 else Fraction(1))
    rad_b = math.prod(factorize(b)) if b > 1 else 1
    return MultiplicativeData(
        Fraction(1),
        _ONE,
        sp.Poly(1 - qsym, qsym, domain="QQ"),
        exc,
        theta2=Theta2Params(rad_b, 1, 1, 1),
        name=f"f_{{{a},{b}}}",
    )


# ---------------------------------------------------------------------------
# evaluation


def _tail_factor_product(data: MultiplicativeData, avoid: set[int], prime_limit: int) -> float:
    """prod over p not in ``avoid`` of A_p(0), truncated; needs A_p(0) = 1 + O(q^2)."""
    check_convergent(data.generic0)
    ps = primes_upto(prime_limit)
    coeffs = np.array([float(c) for c in data.generic0.all_coeffs()])
    vals = np.polyval(coeffs, 1.0 / ps.astype(np.float64))
    logs = np.log(vals)
    special = [p for p in set(avoid) | set(data.exceptional) if p <= prime_limit]
    out = float(np.sum(logs)) - sum(math.log(np.polyval(coeffs, 1.0 / p)) for p in special)
    res = math.exp(out)
    for p in data.exceptional:
        if p not in avoid:
            res *= float(data.A(p, 0))
    return res


def eval_theta(data: MultiplicativeData, n: int, prime_limit: int = 10**6):
    """theta(n); a Fraction when the generic A_p(0) is 1, else a float."""
    if n < 1:
        raise ValueError("n must be >= 1")
    f = factorize(n) if n > 1 else {}
    out = data.c
    for p, v in f.items():
        out *= data.A(p, v)
    if data.exact_generic:
        for p in data.exceptional:
            if p not in f:
                out *= data.A(p, 0)
        return out
    return float(out) * _tail_factor_product(data, set(f), prime_limit)


def convolve_mu_formula(data: MultiplicativeData, n: int, prime_limit: int = 10**6):
    """c * prod_{p not | n} A_p(0) * prod_{p^v || n} (A_p(v) - A_p(v-1))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    f = factorize(n) if n > 1 else {}
    out = data.c
    for p, v in f.items():
        out *= data.A(p, v) - data.A(p, v - 1)
    if data.exact_generic:
        for p in data.exceptional:
            if p not in f:
                out *= data.A(p, 0)
        return out
    return float(out) * _tail_factor_product(data, set(f), prime_limit)


def theta_values(data: MultiplicativeData, N: int) -> list:
    """[theta(0) := 0, theta(1), ..., theta(N)], exact when possible."""
    return [Fraction(0)] + [eval_theta(data, n) for n in range(1, N + 1)]


def convolve_mu_direct(data: MultiplicativeData, N: int) -> list:
    """(theta * mu)(n) for n <= N by direct divisor sums (index 0 unused)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    th = theta_values(data, N)
    spf = smallest_prime_factor_table(N)
    out = [Fraction(0)] * (N + 1) if data.exact_generic else [0.0] * (N + 1)
    for d in range(1, N + 1):
        mu = _mu_from_spf(d, spf)
        if mu == 0:
            continue
        for m in range(d, N + 1, d):
            out[m] += mu * th[m // d]
    return out


def _mu_from_spf(n: int, spf: np.ndarray) -> int:
    mu = 1
    while n > 1:
        p = int(spf[n])
        n //= p
        if n % p == 0:
            return 0
        mu = -mu
    return mu


# ---------------------------------------------------------------------------
# averages


def local_average_factor(data: MultiplicativeData, p: int) -> Fraction:
    """(1 - 1/p) sum_v A_p(v) / p^v, summed in closed form past the stable depth."""
    s = data.depth(p)
    x = Fraction(1, p)
    head = sum(data.A(p, v) * x**v for v in range(s))
    return (1 - x) * head + data.A(p, s) * x**s


@dataclass(frozen=True)
class AverageOrder:
    value: float
    tail: float
    prime_limit: int


def average_order(data: MultiplicativeData, q: int = 1, prime_limit: int = 10**7) -> AverageOrder:
    """The average of theta over n = a mod q, as a truncated Euler product."""
    if data.theta2 is None:
        raise ValueError("average_order needs declared bounds (theta2)")
    if q < 1:
        raise ValueError("q must be >= 1")
    generic = sp.Poly((1 - qsym) * data.generic0.as_expr() + qsym * data.generic1.as_expr(), qsym, domain="QQ")
    try:
        check_convergent(generic)
    except ConvergenceError:
        raise ConvergenceError(f"{data.name}: Euler product does not converge") from None
    q_primes = set(factorize(q)) if q > 1 else set()
    special = q_primes | set(data.exceptional)
    ps = primes_upto(prime_limit)
    coeffs = np.array([float(c) for c in generic.all_coeffs()])
    vals = np.polyval(coeffs, 1.0 / ps.astype(np.float64))
    mask = np.ones(len(ps), dtype=bool)
    mask[np.isin(ps, np.array(sorted(special), dtype=np.int64))] = False
    if np.any(vals[mask] <= 0):
        raise ConvergenceError("non-positive Euler factor")
    log_generic = float(np.sum(np.log(vals[mask])))
    exact = Fraction(data.c)
    for p in special:
        exact *= data.A(p, 0) if p in q_primes else local_average_factor(data, p)
    value = float(exact) * math.exp(log_generic)
    return AverageOrder(value, abs(value) * euler_tail(generic, prime_limit), prime_limit)


# ---------------------------------------------------------------------------
# fast float tables for empirical sums


def _prime_table(data: MultiplicativeData, N: int, diff: bool) -> tuple[np.ndarray, np.ndarray]:
    depth = max([1] + [data.depth(p) for p in data.exceptional])
    ps = primes_upto(N)
    table = np.zeros((N + 1, depth + 1))
    x = 1.0 / np.maximum(ps, 1)
    g0 = np.polyval(np.array([float(c) for c in data.generic0.all_coeffs()]), x)
    g1 = np.polyval(np.array([float(c) for c in data.generic1.all_coeffs()]), x)
    table[ps, 0] = g0
    table[ps, 1:] = g1[:, None]
    for p in data.exceptional:
        if p <= N:
            for v in range(depth + 1):
                table[p, v] = float(data.A(p, v))
    if diff:
        # differences vanish past the stable depth: extra zero column
        d = np.zeros((N + 1, depth + 2))
        d[:, 0] = table[:, 0]
        d[:, 1 : depth + 1] = table[:, 1:] - table[:, :-1]
        table = d
    exc = np.array(sorted(data.exceptional), dtype=np.int64)
    return table, exc


@numba.njit(cache=True)
def _values_kernel(N, spf, table, c, exc_p, exc_a0):
    depth = table.shape[1] - 1
    out = np.zeros(N + 1)
    for n in range(1, N + 1):
        val = c
        x = n
        while x > 1:
            p = spf[x]
            v = 0
            while x % p == 0:
                x //= p
                v += 1
            val *= table[p, min(v, depth)]
        for j in range(len(exc_p)):
            if n % exc_p[j] != 0:
                val *= exc_a0[j]
        out[n] = val
    return out


def theta_float_table(data: MultiplicativeData, N: int, mu_convolved: bool = False) -> np.ndarray:
    """theta(n) (or (theta * mu)(n)) for 0 <= n <= N as floats; needs generic A_p(0) = 1."""
    if not data.exact_generic:
        raise ValueError("float tables need generic A_p(0) = 1")
    table, exc = _prime_table(data, N, mu_convolved)
    exc_a0 = np.array([float(data.A(int(p), 0)) for p in exc])
    return _values_kernel(N, smallest_prime_factor_table(N), table, float(data.c), exc, exc_a0)


def empirical_average(data: MultiplicativeData, q: int, a: int, t: int) -> float:
    """Sum of theta(n) over 0 < n <= t with n = a mod q."""
    if math.gcd(a, q) != 1:
        raise ValueError("need gcd(a, q) = 1")
    th = theta_float_table(data, t)
    start = a % q or q
    return float(np.sum(th[start : t + 1 : q]))


def log_grid_int(t_max: int, per_decade: int = 8, t_min: int = 10) -> list[int]:
    pts = np.unique(np.round(np.logspace(math.log10(t_min), math.log10(t_max), 1 + per_decade * round(math.log10(t_max / t_min)))))
    return [int(x) for x in pts]


@dataclass(frozen=True)
class Envelope:
    constant: float
    argmax: int
    ratios: tuple[float, ...]
    grid: tuple[int, ...]


def average_envelope(
    data: MultiplicativeData, q: int, a: int, t_grid: Sequence[int], log_power: float | None = None
) -> Envelope:
    """max over t of |sum_{n <= t, n = a (q)} theta(n) - (t/q) A| / log(t+2)^C2."""
    C = data.theta2.C2 if log_power is None else log_power
    t_max = max(t_grid)
    avg = average_order(data, q).value
    th = theta_float_table(data, t_max)
    sel = np.zeros(t_max + 1)
    start = a % q or q
    sel[start::q] = th[start::q]
    cums = np.cumsum(sel)
    ratios = [abs(cums[t] - t / q * avg) / math.log(t + 2) ** C for t in t_grid]
    i = int(np.argmax(ratios))
    return Envelope(ratios[i], int(t_grid[i]), tuple(ratios), tuple(t_grid))


def mu_sum_envelope(data: MultiplicativeData, t_grid: Sequence[int]) -> Envelope:
    """sum_{n <= t} |(theta*mu)(n)| n against C4 t log(t+2)^(C2 - 1)."""
    p2 = data.theta2
    t_max = max(t_grid)
    tm = theta_float_table(data, t_max, mu_convolved=True)
    cums = np.cumsum(np.abs(tm) * np.arange(t_max + 1))
    ratios = [cums[t] / (p2.C4 * t * math.log(t + 2) ** (p2.C2 - 1)) for t in t_grid]
    i = int(np.argmax(ratios))
    return Envelope(ratios[i], int(t_grid[i]), tuple(ratios), tuple(t_grid))


def power_sum_envelope(values: np.ndarray, t_grid: Sequence[int], log_power: float) -> Envelope:
    """max over t of sum_{n <= t} values[n] / (t log(t+2)^log_power)."""
    cums = np.cumsum(values)
    ratios = [cums[t] / (t * math.log(t + 2) ** log_power) for t in t_grid]
    i = int(np.argmax(ratios))
    return Envelope(ratios[i], int(t_grid[i]), tuple(ratios), tuple(t_grid))
