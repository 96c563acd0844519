import math
import random
from fractions import Fraction

import pytest
import sympy as sp

from torsorcount import local_factors as lf
from torsorcount.numtheory import prime_divisors

q = lf.q


def P(expr):
    return sp.Poly(expr, q, domain="QQ")


def permuted(system, perm):
    """Relabel variable i as perm[i] (1-based)."""
    return lf.LocalFactorSystem(
        system.r, {frozenset(perm[i] for i in I): v for I, v in system.table.items()}
    )


def test_table_entries():
    s = lf.theta1_qa1a3()
    assert s.factor(frozenset()) == P(1)
    assert s.factor({5, 7}) == P(1 - q)
    assert s.factor({3}) == P(1 - 2 * q)
    assert s.factor({1, 2}) == P(0)
    assert s.factor({7}) == P(1)
    assert s.factor({1, 2, 3}) == P(0)


def test_eval_examples():
    assert lf.constant_system(4).eval((6, 10, 15, 7)) == 1
    s = lf.theta1_qa1a3()
    assert s.eval((1,) * 7) == 1
    assert s.eval((1, 1, 2, 1, 1, 1, 1)) == 0
    assert s.eval((1, 1, 3, 1, 1, 1, 1)) == Fraction(1, 3)
    # {4}: 1 - 1/p at p = 5, {7}: 1
    assert s.eval((1, 1, 1, 5, 1, 1, 7)) == Fraction(4, 5)
    with pytest.raises(ValueError):
        s.eval((1,) * 6)


def test_eval_requires_unit_empty_factor():
    s = lf.average_last(lf.average_last(lf.theta1_qa1a3()))
    # (1 - q) * 1 + q * (1 - q)^2
    assert s.factor(frozenset()) == P(1 - 2 * q**2 + q**3)
    with pytest.raises(ValueError):
        s.eval((1,) * 5)
    val, tail = s.eval_with_tail((1,) * 5)
    assert val > 0 and tail < 1e-5


def test_average_last_examples():
    c = lf.average_last(lf.constant_system(3))
    assert c.r == 2 and all(v == P(1) for v in c.table.values())
    one = lf.LocalFactorSystem(1, {frozenset(): P(1), frozenset({1}): P(1 - q)})
    assert lf.average_last(one).factor(frozenset()) == P(1 - q**2)


def test_full_average_is_the_omega_p_polynomial():
    s = lf.theta1_qa1a3()
    while s.r:
        s = lf.average_last(s)
    assert s.factor(frozenset()) == lf.OMEGA_P_POLY
    assert lf.OMEGA_P_POLY == P((1 - q) ** 6 * (1 + 6 * q + q**2))


@pytest.mark.parametrize("seed", range(6))
def test_average_last_commutes(seed):
    rng = random.Random(seed)
    r = 3
    table = {}
    for I in lf.subsets(r):
        table[I] = P(sum(Fraction(rng.randint(-3, 3), rng.randint(1, 4)) * q**k for k in range(3)))
    s = lf.LocalFactorSystem(r, table)
    a = lf.average_last(lf.average_last(s))
    b = lf.average_last(lf.average_last(permuted(s, {1: 1, 2: 3, 3: 2})))
    assert a.table == b.table


def test_average_all():
    assert lf.average_all(lf.constant_system(3)).value == pytest.approx(1.0)
    res = lf.average_all(lf.phi_star_system(), prime_limit=10**6)
    assert res.polynomial == P(1 - q**2)
    assert abs(res.value - 6 / math.pi**2) <= res.tail + 1e-12


def test_euler_tail_and_convergence():
    with pytest.raises(lf.ConvergenceError):
        lf.check_convergent(P(1 - q))
    lf.check_convergent(P(1 - q**2))
    val, tail = lf.euler_product(P(1 - q**2), 10**5)
    assert abs(val - 6 / math.pi**2) <= tail
    assert tail < 1e-4


def test_class_membership():
    assert lf.verify_class_membership(lf.theta1_qa1a3(), 2)
    assert lf.verify_class_membership(lf.constant_system(3), 1)
    bad = lf.LocalFactorSystem(1, {frozenset(): P(1), frozenset({1}): P(1 + 3 * q)})
    res = lf.verify_class_membership(bad, 2)
    assert not res
    assert res.subset == frozenset({1})


def phi_dagger(n):
    return math.prod(Fraction(p + 1, p) for p in prime_divisors(n)) if n > 1 else Fraction(1)


def test_pointwise_bound_by_phi_dagger():
    s = lf.theta1_qa1a3()
    rng = random.Random(9)
    C = 2
    for _ in range(2000):
        eta = tuple(rng.randint(1, 60) for _ in range(7))
        primes = set().union(*(prime_divisors(e) for e in eta if e > 1))
        bound = math.prod(phi_dagger(e) ** C for e in eta) * math.prod(1 + Fraction(C, p * p) for p in primes)
        assert abs(s.eval(eta)) <= bound


def test_two_variable_empirical_average():
    s = lf.theta1_qa1a3()
    prefix = (1, 1, 1, 1, 1)
    target, tail = lf.average_last(lf.average_last(s)).eval_with_tail(prefix)
    assert target == pytest.approx(0.42825, abs=1e-5)
    for T in (1000, 3000, 10**4):
        e = lf.empirical_average_last_two(s, prefix, T)
        assert abs(e - target) * T / math.log(T) <= 0.1


def test_rejects_bad_tables():
    with pytest.raises(ValueError):
        lf.LocalFactorSystem(2, {frozenset({3}): P(1)})
    with pytest.raises(ValueError):
        lf.empirical_average_last_two(lf.theta1_qa1a3(), (1, 1), 10)
