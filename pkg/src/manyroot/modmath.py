"""Exact modular arithmetic on Python integers.

Everything here is a pure function. Moduli in this package are capped at
``MODULUS_CAP`` so products of two residues stay small, but the functions
themselves are exact for any size.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from .errors import (
    InvalidModulusError,
    NonCoprimeModuliError,
    NotInvertibleError,
    NotPrimeError,
    UndefinedGcdError,
)

MODULUS_CAP = 2**32


@dataclass(frozen=True)
class Residue:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise InvalidModulusError(f"modulus must be >= 2, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"{self.value} is not reduced mod {self.modulus}")

    def __int__(self):
        return self.value


def pow_mod(base: int, exponent: int, modulus: int) -> int:
    """Right-to-left square-and-multiply."""
    if modulus < 2:
        raise InvalidModulusError(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    result = 1
    base %= modulus
    while exponent:
        if exponent & 1:
            result = result * base % modulus
        base = base * base % modulus
        exponent >>= 1
    return result


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = gcd(a, b) > 0`` and ``s*a + t*b = g``."""
    if a == 0 and b == 0:
        raise UndefinedGcdError("gcd(0, 0) is undefined")
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def inv_mod(a: int, modulus: int) -> int:
    if modulus < 2:
        raise InvalidModulusError(f"modulus must be >= 2, got {modulus}")
    g, s, _ = egcd(a % modulus, modulus)
    if g != 1:
        raise NotInvertibleError(a, modulus, g)
    return s % modulus


def crt_combine(r1: int, m1: int, r2: int, m2: int) -> int:
    """Unique ``x`` in ``[0, m1*m2)`` with ``x = r1 (mod m1)``, ``x = r2 (mod m2)``."""
    g, s, _ = egcd(m1, m2)
    if g != 1:
        raise NonCoprimeModuliError(f"moduli {m1} and {m2} share factor {g}")
    # s*m1 = 1 (mod m2), so r1 + m1*s*(r2 - r1) hits both residues
    n = m1 * m2
    return (r1 + m1 * (s * (r2 - r1) % m2)) % n


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def totient_semiprime(p: int, q: int) -> int:
    if p == q:
        raise NotPrimeError(f"factors must be distinct, got {p} twice")
    for f in (p, q):
        if not is_prime(f):
            raise NotPrimeError(f"{f} is not prime")
    return (p - 1) * (q - 1)
