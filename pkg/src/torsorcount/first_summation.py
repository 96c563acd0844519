"""The first summation: counting (beta0, gamma0) over fixed remaining variables.

A counting problem of *special form* has one torsor equation

    alpha0^a0 * Pi(alpha) + beta0^b0 * Pi(beta) + gamma0 * Pi(gamma) = 0,

a height condition that only constrains beta0 to finitely many intervals, and
coprimality conditions read off an extended Dynkin diagram (three chains
A0-Ar-...-A1-D, B0-Bs-...-B1-D, C0-Ct-...-C1-D plus the triangle A0, B0, C0).

Everything here is exact: the Moebius-inverted count ``n1_moebius`` must agree
with the direct count ``n1_direct`` as integers, and ``theta1_prop`` is a
Fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .analytic import count_ap_interval, psi_frac
from .numtheory import omega, phi_star, squarefree_divisors
from . import torsor

Vertex = tuple[str, int]


@dataclass(frozen=True)
class FirstStepTuple:
    """The fixed variables (alpha0, alpha, beta, gamma, delta)."""

    alpha0: int
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    gamma: tuple[int, ...]
    delta: int


@dataclass(frozen=True)
class PiProducts:
    pi_a: int
    pi_prime_a: int
    pi_b: int
    pi_prime_b: int
    pi_c: int
    pi_prime_c: int


@dataclass(frozen=True)
class SpecialFormInstance:
    """Exponents, ranges and the beta0-height interface of one counting problem.

    ``intervals(tup, B)`` returns the real beta0-intervals where h <= 1, and
    ``integer_ranges(tup, B)`` the integers in them as disjoint inclusive
    ranges, decided exactly.
    """

    a: tuple[int, ...]  # (a0, a1, ..., ar)
    b: tuple[int, ...]  # (b0, b1, ..., bs)
    c: tuple[int, ...]  # (c1, ..., ct)
    intervals: Callable[[FirstStepTuple, float], list[tuple[float, float]]]
    integer_ranges: Callable[[FirstStepTuple, int], list[tuple[int, int]]]
    alpha0_nonzero: bool = True
    name: str = ""
    edges: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if min(self.a + self.b + self.c, default=1) < 1:
            raise ValueError("exponents must be positive")
        object.__setattr__(self, "edges", _dynkin_edges(self.r, self.s, self.t))

    @property
    def r(self) -> int:
        return len(self.a) - 1

    @property
    def s(self) -> int:
        return len(self.b) - 1

    @property
    def t(self) -> int:
        return len(self.c)

    @property
    def b0(self) -> int:
        return self.b[0]

    def products(self, tup: FirstStepTuple) -> PiProducts:
        def pi(xs, es):
            return math.prod(x**e for x, e in zip(xs, es))

        def pi_prime(xs):
            return tup.delta * math.prod(xs[:-1]) if xs else 1

        return PiProducts(
            pi(tup.alpha, self.a[1:]),
            pi_prime(tup.alpha),
            pi(tup.beta, self.b[1:]),
            pi_prime(tup.beta),
            pi(tup.gamma, self.c),
            pi_prime(tup.gamma),
        )

    def check_shape(self, tup: FirstStepTuple) -> None:
        if (len(tup.alpha), len(tup.beta), len(tup.gamma)) != (self.r, self.s, self.t):
            raise ValueError("tuple does not match (r, s, t)")
        if min(tup.alpha + tup.beta + tup.gamma + (tup.delta,)) < 1:
            raise ValueError("alpha, beta, gamma, delta must be positive")
        if self.alpha0_nonzero and tup.alpha0 == 0:
            raise ValueError("alpha0 must be non-zero for this instance")


def _dynkin_edges(r: int, s: int, t: int) -> frozenset:
    edges = {frozenset({("A", 0), ("B", 0)}), frozenset({("A", 0), ("C", 0)}), frozenset({("B", 0), ("C", 0)})}
    for name, n in (("A", r), ("B", s), ("C", t)):
        chain = [(name, 0)] + [(name, i) for i in range(n, 0, -1)] + [("D", 0)]
        edges.update(frozenset(pair) for pair in zip(chain, chain[1:]))
    return frozenset(edges)


def _values(tup: FirstStepTuple, beta0: int, gamma0: int) -> dict[Vertex, int]:
    vals = {("A", 0): tup.alpha0, ("B", 0): beta0, ("C", 0): gamma0, ("D", 0): tup.delta}
    for name, xs in (("A", tup.alpha), ("B", tup.beta), ("C", tup.gamma)):
        for i, x in enumerate(xs, start=1):
            vals[(name, i)] = x
    return vals


def torsor_value(inst: SpecialFormInstance, tup: FirstStepTuple, beta0: int, gamma0: int) -> int:
    p = inst.products(tup)
    return tup.alpha0 ** inst.a[0] * p.pi_a + beta0**inst.b0 * p.pi_b + gamma0 * p.pi_c


def _triple_rule_active(inst: SpecialFormInstance) -> bool:
    return sum(n == 0 for n in (inst.r, inst.s, inst.t)) >= 2


def _triple_rule_ok(tup: FirstStepTuple, beta0: int, gamma0: int) -> bool:
    """Each prime dividing delta divides at most one of alpha0, beta0, gamma0."""
    x = (tup.alpha0, beta0, gamma0)
    return all(math.gcd(tup.delta, x[i], x[j]) == 1 for i in range(3) for j in range(i + 1, 3))


def full_coprimality(inst: SpecialFormInstance, tup: FirstStepTuple, beta0: int, gamma0: int) -> bool:
    vals = _values(tup, beta0, gamma0)
    vs = list(vals)
    for i, u in enumerate(vs):
        for v in vs[i + 1 :]:
            if frozenset({u, v}) not in inst.edges and math.gcd(vals[u], vals[v]) != 1:
                return False
    if _triple_rule_active(inst):
        return _triple_rule_ok(tup, beta0, gamma0)
    return True


def reduced_rest_ok(inst: SpecialFormInstance, tup: FirstStepTuple) -> bool:
    """Coprimality among alpha, beta, gamma, delta alone."""
    vals = {k: v for k, v in _values(tup, 0, 0).items() if k[1] != 0 or k[0] == "D"}
    vs = list(vals)
    for i, u in enumerate(vs):
        for v in vs[i + 1 :]:
            if frozenset({u, v}) not in inst.edges and math.gcd(vals[u], vals[v]) != 1:
                return False
    return True


def alpha0_ok(inst: SpecialFormInstance, tup: FirstStepTuple) -> bool:
    p = inst.products(tup)
    return math.gcd(tup.alpha0, p.pi_prime_a * p.pi_b * p.pi_c) == 1


def admissible(inst: SpecialFormInstance, tup: FirstStepTuple) -> bool:
    """The outer conditions under which N1 is defined and summed."""
    return alpha0_ok(inst, tup) and reduced_rest_ok(inst, tup)


def beta0_ok(inst: SpecialFormInstance, tup: FirstStepTuple, beta0: int) -> bool:
    p = inst.products(tup)
    return math.gcd(beta0, p.pi_prime_b * p.pi_a) == 1


def gamma0_ok(inst: SpecialFormInstance, tup: FirstStepTuple, gamma0: int) -> bool:
    return math.gcd(gamma0, inst.products(tup).pi_prime_c) == 1


def coprimality_reduced_equiv(
    inst: SpecialFormInstance, tup: FirstStepTuple, beta0: int, gamma0: int
) -> tuple[bool, bool]:
    """(verdict of the full diagram, verdict of the reduced conditions)."""
    if torsor_value(inst, tup, beta0, gamma0) != 0:
        raise ValueError("torsor equation violated")
    full = full_coprimality(inst, tup, beta0, gamma0)
    reduced = (
        alpha0_ok(inst, tup)
        and beta0_ok(inst, tup, beta0)
        and gamma0_ok(inst, tup, gamma0)
        and reduced_rest_ok(inst, tup)
    )
    if _triple_rule_active(inst):
        reduced = reduced and _triple_rule_ok(tup, beta0, gamma0)
    return full, reduced


def rho_solutions(modulus: int, A1: int, B1: int, b0: int) -> list[int]:
    if modulus < 1:
        raise ValueError("modulus must be positive")
    if math.gcd(A1, modulus) != 1 or math.gcd(B1, modulus) != 1:
        raise ValueError("A1 and B1 must be coprime to the modulus")
    return [
        rho
        for rho in range(1, modulus + 1)
        if math.gcd(rho, modulus) == 1 and (A1 + pow(rho, b0, modulus) * B1) % modulus == 0
    ]


def count_rho(kc: int, pi_gamma: int, A1: int, B1: int, b0: int) -> int:
    """#{1 <= rho <= m : gcd(rho, m) = 1, A1 = -rho^b0 B1 mod m}, m = kc Pi(gamma)."""
    return len(rho_solutions(kc * pi_gamma, A1, B1, b0))


def _require_no_triple(inst: SpecialFormInstance) -> None:
    # the inverted count has no term for the triple rule at delta
    if _triple_rule_active(inst):
        raise NotImplementedError("the inverted count needs at most one of r, s, t to be zero")


def _kc_range(inst: SpecialFormInstance, tup: FirstStepTuple, p: PiProducts):
    block = tup.alpha0 * p.pi_a * p.pi_b
    for kc, mu in squarefree_divisors(p.pi_prime_c):
        if math.gcd(kc, block) == 1:
            yield kc, mu


def theta1_prop(inst: SpecialFormInstance, tup: FirstStepTuple) -> Fraction:
    """Density theta_1 of the first summation, with A2 = B2 = 1."""
    _require_no_triple(inst)
    p = inst.products(tup)
    A1 = tup.alpha0 ** inst.a[0] * p.pi_a
    B1 = p.pi_b
    M = p.pi_prime_b * p.pi_a
    total = Fraction(0)
    for kc, mu in _kc_range(inst, tup, p):
        m = kc * p.pi_c
        n_rho = count_rho(kc, p.pi_c, A1, B1, inst.b0)
        if n_rho:
            total += mu * phi_star(M) / (kc * phi_star(math.gcd(p.pi_prime_b, m))) * n_rho
    return total


def n1_direct(inst: SpecialFormInstance, tup: FirstStepTuple, B: int) -> int:
    """Direct count of (beta0, gamma0) for fixed outer variables."""
    inst.check_shape(tup)
    p = inst.products(tup)
    lhs = tup.alpha0 ** inst.a[0] * p.pi_a
    triple = _triple_rule_active(inst)
    count = 0
    for lo, hi in inst.integer_ranges(tup, B):
        for beta0 in range(lo, hi + 1):
            q, rem = divmod(-(lhs + beta0**inst.b0 * p.pi_b), p.pi_c)
            if rem:
                continue
            if not beta0_ok(inst, tup, beta0) or not gamma0_ok(inst, tup, q):
                continue
            if triple and not _triple_rule_ok(tup, beta0, q):
                continue
            count += 1
    return count


def n1_moebius(inst: SpecialFormInstance, tup: FirstStepTuple, B: int) -> int:
    """The same count after both Moebius inversions, as exact AP counts."""
    inst.check_shape(tup)
    _require_no_triple(inst)
    p = inst.products(tup)
    ranges = inst.integer_ranges(tup, B)
    if not ranges:
        return 0
    A1 = tup.alpha0 ** inst.a[0] * p.pi_a
    B1 = p.pi_b
    total = 0
    for kc, mu_c in _kc_range(inst, tup, p):
        m = kc * p.pi_c
        for rho in rho_solutions(m, A1, B1, inst.b0):
            for kb, mu_b in squarefree_divisors(p.pi_prime_b * p.pi_a):
                if math.gcd(kb, m) != 1:
                    continue
                # beta0 = kb * beta0', kb * beta0' = rho mod m
                target = rho * pow(kb, -1, m) % m if m > 1 else 0
                for lo, hi in ranges:
                    lo_q = -((-lo) // kb)
                    hi_q = hi // kb
                    if lo_q <= hi_q:
                        total += mu_c * mu_b * count_ap_interval(lo_q - 1, hi_q, target, m)
    return total


def v1(inst: SpecialFormInstance, tup: FirstStepTuple, B: float) -> float:
    p = inst.products(tup)
    return sum(hi - lo for lo, hi in inst.intervals(tup, B)) / p.pi_c


def r1_psi(inst: SpecialFormInstance, tup: FirstStepTuple, B: float) -> float:
    """The sawtooth error term R1 (half-open interval convention)."""
    _require_no_triple(inst)
    p = inst.products(tup)
    ivs = inst.intervals(tup, B)
    if not ivs:
        return 0.0
    A1 = tup.alpha0 ** inst.a[0] * p.pi_a
    total = 0.0
    for kc, mu_c in _kc_range(inst, tup, p):
        m = kc * p.pi_c
        for rho in rho_solutions(m, A1, p.pi_b, inst.b0):
            for kb, mu_b in squarefree_divisors(p.pi_prime_b * p.pi_a):
                if math.gcd(kb, m) != 1:
                    continue
                shift = rho * pow(kb, -1, m) % m if m > 1 else 0
                for t0, t1 in ivs:
                    total += mu_c * mu_b * (
                        psi_frac((t0 / kb - shift) / m) - psi_frac((t1 / kb - shift) / m)
                    )
    return total


def r1_bound_shape(inst: SpecialFormInstance, tup: FirstStepTuple) -> int:
    """2^omega(Pi'(d,g)) * 2^omega(Pi'(d,b) Pi(a)) * b0^omega(delta Pi(g))."""
    p = inst.products(tup)
    return (
        2 ** omega(p.pi_prime_c)
        * 2 ** omega(p.pi_prime_b * p.pi_a)
        * inst.b0 ** omega(tup.delta * p.pi_c)
    )


# ---------------------------------------------------------------------------
# the quartic A3 + A1 surface as a special-form instance
#
#   (alpha0; alpha) = (eta7; eta4, eta6, eta5),  a = (1; 1, 2, 3)
#   (beta0; beta)   = (eta8; eta2),              b = (1; 1)
#   (gamma0; gamma) = (eta9; eta1),              c = (1,)
#   delta = eta3


def quartic_tuple(eta17: Sequence[int]) -> FirstStepTuple:
    e1, e2, e3, e4, e5, e6, e7 = eta17
    return FirstStepTuple(e7, (e4, e6, e5), (e2,), (e1,), e3)


def quartic_eta(tup: FirstStepTuple) -> tuple[int, ...]:
    e4, e6, e5 = tup.alpha
    return (tup.gamma[0], tup.beta[0], tup.delta, e4, e5, e6, tup.alpha0)


QUARTIC = SpecialFormInstance(
    a=(1, 1, 2, 3),
    b=(1, 1),
    c=(1,),
    intervals=lambda tup, B: torsor.eta8_intervals(quartic_eta(tup), B),
    integer_ranges=lambda tup, B: torsor.eta8_integer_ranges(quartic_eta(tup), B),
    alpha0_nonzero=True,
    name="A3+A1 quartic",
)


def quartic_local_theta1(eta17: Sequence[int]) -> Fraction:
    """theta_1 as a product of per-prime factors depending on divisibility only."""
    from .local_factors import theta1_qa1a3

    return theta1_qa1a3().eval(tuple(abs(x) for x in eta17))


def error_envelope(samples: Sequence[tuple[FirstStepTuple, int]], inst: SpecialFormInstance = QUARTIC) -> float:
    """max |N1 - theta1 V1| / bound-shape over (tuple, B) samples."""
    worst = 0.0
    for tup, B in samples:
        r1 = n1_direct(inst, tup, B) - float(theta1_prop(inst, tup)) * v1(inst, tup, B)
        worst = max(worst, abs(r1) / r1_bound_shape(inst, tup))
    return worst


__all__ = [
    "FirstStepTuple",
    "PiProducts",
    "SpecialFormInstance",
    "QUARTIC",
    "admissible",
    "coprimality_reduced_equiv",
    "count_rho",
    "error_envelope",
    "n1_direct",
    "n1_moebius",
    "quartic_eta",
    "quartic_local_theta1",
    "quartic_tuple",
    "r1_psi",
    "r1_bound_shape",
    "theta1_prop",
    "v1",
]
