"""Prime sieves and small multiplicative-function tables.

Everything here is desk-scale: bounds up to a few 10^6, dense numpy arrays.
"""
from __future__ import annotations

import numpy as np

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def sieve_primes(bound: int) -> np.ndarray:
    """Primes <= bound as an int64 array (empty for bound < 2)."""
    if bound < 2:
        return np.empty(0, dtype=np.int64)
    is_comp = np.zeros(bound + 1, dtype=bool)
    is_comp[:2] = True
    for p in range(2, int(bound**0.5) + 1):
        if not is_comp[p]:
            is_comp[p * p :: p] = True
    return np.flatnonzero(~is_comp).astype(np.int64)


def spf_sieve(bound: int) -> np.ndarray:
    """Smallest-prime-factor table: spf[n] is the least prime dividing n (spf[1] = 1)."""
    spf = np.arange(bound + 1, dtype=np.int64)
    for p in range(2, int(bound**0.5) + 1):
        if spf[p] == p:  # p prime
            block = spf[p * p :: p]
            block[block == np.arange(p * p, bound + 1, p)] = p
    if bound >= 1:
        spf[1] = 1
    return spf


def phi_sieve(bound: int) -> np.ndarray:
    """Euler totient for 0..bound (phi[0] = 0)."""
    phi = np.arange(bound + 1, dtype=np.int64)
    for p in range(2, bound + 1):
        if phi[p] == p:  # untouched, hence prime
            phi[p::p] -= phi[p::p] // p
    if bound >= 0:
        phi[0] = 0
    return phi


def factorize(n: int, spf: np.ndarray) -> dict[int, int]:
    """Prime factorization of n >= 1 using a precomputed spf table."""
    out: dict[int, int] = {}
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out[p] = e
    return out


def factorize_slow(n: int) -> dict[int, int]:
    """Trial-division factorization, for the occasional value above any sieve."""
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


def phi_from_factors(fac: dict[int, int]) -> int:
    v = 1
    for p, e in fac.items():
        v *= (p - 1) * p ** (e - 1)
    return v


def divisors_from_factors(fac: dict[int, int]) -> list[int]:
    divs = [1]
    for p, e in fac.items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 64-bit inputs."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True
