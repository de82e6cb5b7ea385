"""Primality testing for user-supplied moduli."""

from __future__ import annotations

from functools import lru_cache

from .errors import InvalidModulusError

# Deterministic for n < 3.3e24, which covers every 64-bit input.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    """Miller-Rabin with a fixed base set.

    Exact for ``n < 2**64``. Above that the answer is a strong-probable-prime
    verdict for the same bases.
    """
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_modulus(p: int) -> int:
    if not isinstance(p, int) or p < 2:
        raise InvalidModulusError(f"modulus must be an integer >= 2, got {p!r}")
    return p


def require_prime(p: int) -> int:
    require_modulus(p)
    if not is_prime(p):
        raise InvalidModulusError(f"modulus must be prime, got {p}")
    return p


def require_odd_prime(p: int) -> int:
    require_prime(p)
    if p == 2:
        raise InvalidModulusError("modulus must be an odd prime, got 2")
    return p
