"""Small exact number-theory helpers shared by the counting modules."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator

import numpy as np


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of ``|n|`` by trial division (n is small here)."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@lru_cache(maxsize=1 << 16)
def prime_divisors(n: int) -> tuple[int, ...]:
    if n == 0:
        raise ValueError("prime_divisors(0) is undefined")
    return tuple(sorted(factorize(n)))


def radical(n: int) -> int:
    return math.prod(prime_divisors(n)) if abs(n) > 1 else 1


def omega(n: int) -> int:
    """Number of distinct prime factors."""
    return len(prime_divisors(n)) if abs(n) > 1 else 0


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    f = factorize(n) if n > 1 else {}
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def squarefree_divisors(n: int) -> Iterator[tuple[int, int]]:
    """Yield ``(d, mu(d))`` for the squarefree divisors d of n."""
    ps = prime_divisors(n) if abs(n) > 1 else ()
    for mask in range(1 << len(ps)):
        d, sign = 1, 1
        for i, p in enumerate(ps):
            if mask >> i & 1:
                d *= p
                sign = -sign
        yield d, sign


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n).items() if abs(n) > 1 else ():
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def phi_star(n: int):
    """phi(n)/n as an exact Fraction."""
    from fractions import Fraction

    out = Fraction(1)
    for p in prime_divisors(n) if n > 1 else ():
        out *= Fraction(p - 1, p)
    return out


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n (sieve of Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def smallest_prime_factor_table(n: int) -> np.ndarray:
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in primes_upto(n):
        block = spf[p::p]
        block[block == 0] = p
    if n >= 1:
        spf[1] = 1
    return spf


def phi_star_table(n: int) -> np.ndarray:
    """Float table of phi(k)/k for 0 <= k <= n (entry 0 unused)."""
    out = np.ones(n + 1, dtype=np.float64)
    for p in primes_upto(n):
        out[p::p] *= 1.0 - 1.0 / p
    return out


def omega_table(n: int) -> np.ndarray:
    out = np.zeros(n + 1, dtype=np.int64)
    for p in primes_upto(n):
        out[p::p] += 1
    return out


def mobius_table(n: int) -> np.ndarray:
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_upto(n):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu
