"""Local-factor systems in several variables.

A system assigns to each subset I of {1..r} a polynomial theta_p(I) in q = 1/p,
and defines

    theta(eta_1, ..., eta_r) = prod_p theta_p({i : p | eta_i}).

Averaging one variable over the positive integers replaces theta_p(I) by
(1 - q) theta_p(I) + q theta_p(I + {r}); averaging everything leaves a single
polynomial whose Euler product is the average of theta.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numba
import numpy as np
import sympy as sp

from .numtheory import prime_divisors, primes_upto, smallest_prime_factor_table

q = sp.Symbol("q")


class ConvergenceError(ArithmeticError):
    """The averaged Euler factor is not 1 + O(q^2)."""


def _poly(v) -> sp.Poly:
    return v if isinstance(v, sp.Poly) else sp.Poly(sp.nsimplify(v), q, domain="QQ")


def _val(poly: sp.Poly, qv: Fraction) -> Fraction:
    out = Fraction(0)
    for (deg,), coeff in poly.terms():
        out += Fraction(int(coeff.p), int(coeff.q)) * qv**deg
    return out


@dataclass(frozen=True)
class LocalFactorSystem:
    """theta_p(I) for every I in {1..r}; subsets absent from ``table`` get ``default``.

    ``overrides`` maps an exceptional prime to {I: value} replacing the generic
    polynomial at that prime.
    """

    r: int
    table: Mapping[frozenset, sp.Poly]
    default: sp.Poly = field(default_factory=lambda: sp.Poly(0, q, domain="QQ"))
    overrides: Mapping[int, Mapping[frozenset, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be non-negative")
        full = {}
        for I in subsets(self.r):
            full[I] = _poly(self.table.get(I, self.default))
        extra = set(self.table) - set(full)
        if extra:
            raise ValueError(f"subsets outside 1..{self.r}: {sorted(map(sorted, extra))}")
        object.__setattr__(self, "table", full)

    def factor(self, I: frozenset) -> sp.Poly:
        return self.table[frozenset(I)]

    def value_at(self, p: int, I: frozenset) -> Fraction:
        ov = self.overrides.get(p)
        if ov is not None and I in ov:
            return Fraction(ov[I])
        return _val(self.table[I], Fraction(1, p))

    def eval(self, eta: Sequence[int]) -> Fraction:
        """Finite product over the primes dividing eta_1 ... eta_r."""
        if len(eta) != self.r:
            raise ValueError(f"expected {self.r} arguments")
        if any(e < 1 for e in eta):
            raise ValueError("arguments must be positive")
        if self.table[frozenset()] != sp.Poly(1, q, domain="QQ") or any(
            frozenset() in ov and ov[frozenset()] != 1 for ov in self.overrides.values()
        ):
            raise ValueError("eval needs theta_p(empty) = 1")
        primes = set()
        for e in eta:
            primes.update(prime_divisors(e) if e > 1 else ())
        out = Fraction(1)
        for p in primes:
            I = frozenset(i + 1 for i, e in enumerate(eta) if e % p == 0)
            out *= self.value_at(p, I)
            if out == 0:
                break
        return out

    def eval_with_tail(self, eta: Sequence[int], prime_limit: int = 10**6) -> tuple[float, float]:
        """Value when theta_p(empty) = 1 + O(q^2): truncated product and tail bound."""
        if len(eta) != self.r or any(e < 1 for e in eta):
            raise ValueError(f"expected {self.r} positive arguments")
        empty = self.table[frozenset()]
        check_convergent(empty)
        base, tail = euler_product(empty, prime_limit)
        primes = set(self.overrides)
        for e in eta:
            primes.update(prime_divisors(e) if e > 1 else ())
        ratio = Fraction(1)
        for p in primes:
            I = frozenset(i + 1 for i, e in enumerate(eta) if e % p == 0)
            e0 = _val(empty, Fraction(1, p))
            if p <= prime_limit:
                ratio *= self.value_at(p, I) / e0
            else:
                ratio *= self.value_at(p, I)
        return base * float(ratio), tail * abs(float(ratio))


def subsets(r: int):
    for n in range(r + 1):
        for c in itertools.combinations(range(1, r + 1), n):
            yield frozenset(c)


def constant_system(r: int) -> LocalFactorSystem:
    return LocalFactorSystem(r, {}, default=sp.Poly(1, q, domain="QQ"))


def average_last(system: LocalFactorSystem) -> LocalFactorSystem:
    """Average over the last variable."""
    r = system.r
    if r < 1:
        raise ValueError("nothing left to average")
    one_minus = sp.Poly(1 - q, q, domain="QQ")
    qq = sp.Poly(q, q, domain="QQ")
    table = {I: one_minus * system.table[I] + qq * system.table[I | {r}] for I in subsets(r - 1)}
    overrides = {}
    for p, ov in system.overrides.items():
        qp = Fraction(1, p)
        overrides[p] = {
            I: (1 - qp) * system.value_at(p, I) + qp * system.value_at(p, I | {r}) for I in subsets(r - 1)
        }
    return LocalFactorSystem(r - 1, table, overrides=overrides)


@dataclass(frozen=True)
class EulerAverage:
    polynomial: sp.Poly
    value: float
    tail: float
    prime_limit: int


def euler_tail(poly: sp.Poly, prime_limit: int) -> float:
    """Bound on |prod_{p > P} f(1/p) - 1| for f = 1 + O(q^2)."""
    coeffs = {deg: abs(float(c)) for (deg,), c in poly.terms()}
    q0 = 1.0 / prime_limit
    M = sum(c * q0 ** (d - 2) for d, c in coeffs.items() if d >= 2)
    # |f - 1| <= M q^2 <= 1/2 for q <= q0, so |log f| <= 2 M q^2
    tau = 2.0 * M / (prime_limit - 1)
    return math.expm1(tau)


def euler_product(poly: sp.Poly, prime_limit: int) -> tuple[float, float]:
    """prod_{p <= limit} f(1/p) and an absolute tail bound."""
    coeffs = np.array([float(c) for c in poly.all_coeffs()])  # highest degree first
    ps = primes_upto(prime_limit).astype(np.float64)
    vals = np.polyval(coeffs, 1.0 / ps)
    if np.any(vals <= 0):
        raise ConvergenceError("non-positive Euler factor")
    value = float(np.exp(np.sum(np.log(vals))))
    return value, value * euler_tail(poly, prime_limit)


def check_convergent(poly: sp.Poly) -> None:
    c0 = poly.coeff_monomial(1)
    c1 = poly.coeff_monomial(q)
    if c0 != 1 or c1 != 0:
        raise ConvergenceError(f"Euler factor {poly.as_expr()} is not 1 + O(q^2)")


def average_all(system: LocalFactorSystem, prime_limit: int = 10**7) -> EulerAverage:
    """Average over all variables: per-prime polynomial and its Euler product."""
    if system.overrides:
        raise NotImplementedError("exceptional primes are not supported by average_all")
    s = system
    while s.r:
        s = average_last(s)
    poly = s.table[frozenset()]
    check_convergent(poly)
    value, tail = euler_product(poly, prime_limit)
    return EulerAverage(poly, value, tail, prime_limit)


# ---------------------------------------------------------------------------
# class membership


def _nonneg_on_half(g: sp.Poly) -> Fraction | None:
    """None if g >= 0 on (0, 1/2], else a rational point where g < 0."""
    if g.is_zero:
        return None
    half = Fraction(1, 2)
    pts = {half}
    if g.degree() > 0:
        for (a, b), _ in g.sqf_part().intervals():
            for x in (Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q))):
                if 0 < x <= half:
                    pts.add(x)
    ordered = sorted(pts)
    tests = set(ordered) | {ordered[0] / 2}
    tests.update((x + y) / 2 for x, y in zip(ordered, ordered[1:]))
    for x in sorted(tests):
        if _val(g, x) < 0:
            return x
    return None


@dataclass(frozen=True)
class MembershipResult:
    ok: bool
    subset: frozenset | None = None
    condition: str = ""
    q_value: Fraction | None = None

    def __bool__(self):
        return self.ok


def verify_class_membership(system: LocalFactorSystem, C) -> MembershipResult:
    """Check the defining inequalities on q in (0, 1/2] exactly."""
    C = sp.Rational(C)
    one = sp.Poly(1, q, domain="QQ")
    Cq = sp.Poly(C * q, q, domain="QQ")
    for I in subsets(system.r):
        d = system.table[I] - one
        conds = []
        if not I:
            bound = sp.Poly(C * q**2, q, domain="QQ")
            conds += [("|theta(empty)-1| <= Cq^2", bound - d), ("|theta(empty)-1| <= Cq^2", bound + d)]
        else:
            if len(I) == 1:
                conds += [("|theta(I)-1| <= Cq", Cq - d), ("|theta(I)-1| <= Cq", Cq + d)]
            cst = sp.Poly(C, q, domain="QQ")
            conds += [
                ("|theta(I)-1| <= C", cst - d),
                ("|theta(I)-1| <= C", cst + d),
                ("theta(I) <= 1 + #I Cq", sp.Poly(len(I), q, domain="QQ") * Cq - d),
            ]
        for name, g in conds:
            bad = _nonneg_on_half(g)
            if bad is not None:
                return MembershipResult(False, I, name, bad)
    for p, ov in system.overrides.items():
        qp = Fraction(1, p)
        for I, v in ov.items():
            d = abs(Fraction(v) - 1)
            lim = Fraction(C.p, C.q)
            if (not I and d > lim * qp * qp) or (len(I) == 1 and d > lim * qp) or (I and d > lim):
                return MembershipResult(False, I, f"override at p={p}", qp)
    return MembershipResult(True)


# ---------------------------------------------------------------------------
# the quartic surface

_ONE_MINUS_Q = ({4}, {5}, {6}, {1, 3}, {2, 3}, {3, 4}, {4, 6}, {5, 6}, {5, 7})


def theta1_qa1a3() -> LocalFactorSystem:
    """Local factors of the first-summation density for the A3+A1 quartic."""
    table = {frozenset(I): sp.Poly(1, q, domain="QQ") for I in ((), (1,), (2,), (7,))}
    table.update({frozenset(I): sp.Poly(1 - q, q, domain="QQ") for I in _ONE_MINUS_Q})
    table[frozenset({3})] = sp.Poly(1 - 2 * q, q, domain="QQ")
    return LocalFactorSystem(7, table)


OMEGA_P_POLY = sp.Poly((1 - q) ** 6 * (1 + 6 * q + q**2), q, domain="QQ")


def phi_star_system() -> LocalFactorSystem:
    """phi(n)/n as a one-variable system."""
    return LocalFactorSystem(1, {frozenset(): sp.Poly(1, q, domain="QQ"), frozenset({1}): sp.Poly(1 - q, q, domain="QQ")})


# ---------------------------------------------------------------------------
# empirical averages


def _prime_masks(values: Sequence[int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for i, v in enumerate(values):
        for p in prime_divisors(v) if v > 1 else ():
            out[p] = out.get(p, 0) | (1 << i)
    return out


def empirical_average_last_two(system: LocalFactorSystem, prefix: Sequence[int], T: int) -> float:
    """(1/T^2) * sum over eta_{r-1}, eta_r <= T of theta(prefix, eta_{r-1}, eta_r)."""
    r = system.r
    if len(prefix) != r - 2:
        raise ValueError("prefix must fix all but the last two variables")
    pre = _prime_masks(prefix)
    pmax = max([T, 2] + list(pre))
    allp = primes_upto(pmax)
    index = np.full(pmax + 1, -1, dtype=np.int64)
    index[allp] = np.arange(len(allp))
    table = np.zeros((len(allp), 1 << r))
    for j, p in enumerate(allp):
        for I in subsets(r):
            table[j, sum(1 << (i - 1) for i in I)] = float(system.value_at(int(p), I))
    in_pre = np.zeros(len(allp), dtype=np.bool_)
    pre_p = np.array(sorted(pre), dtype=np.int64)
    pre_m = np.array([pre[p] for p in sorted(pre)], dtype=np.int64)
    in_pre[index[pre_p]] = True
    spf = smallest_prime_factor_table(T)
    return _pair_sum(T, r, spf, index, table, in_pre, pre_p, pre_m) / (T * T)


@numba.njit(cache=True)
def _pair_sum(T, r, spf, index, table, in_pre, pre_p, pre_m):
    bit_a = 1 << (r - 2)
    bit_b = 1 << (r - 1)
    total = 0.0
    for a in range(1, T + 1):
        for b in range(1, T + 1):
            prod = 1.0
            for j in range(len(pre_p)):
                p = pre_p[j]
                m = pre_m[j]
                if a % p == 0:
                    m |= bit_a
                if b % p == 0:
                    m |= bit_b
                prod *= table[index[p], m]
            x = a
            while x > 1 and prod != 0.0:
                p = spf[x]
                while x % p == 0:
                    x //= p
                if not in_pre[index[p]]:
                    m = bit_a
                    if b % p == 0:
                        m |= bit_b
                    prod *= table[index[p], m]
            x = b
            while x > 1 and prod != 0.0:
                p = spf[x]
                while x % p == 0:
                    x //= p
                if not in_pre[index[p]] and a % p != 0:
                    prod *= table[index[p], bit_b]
            total += prod
    return total
