"""The many-to-one map ``c = m**x mod n`` and the structure of its preimages.

A cipher ``c`` generally has several preimages ("roots"). Every root of a
unit cipher is another root multiplied by an x-th root of unity, which is
what lets a holder of one root find the rest, and what lets a party holding
the whole class multiply it back into the cipher.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import NamedTuple

from .errors import NotInvertibleError, OutOfRangeError, ParamsRejected, ScaleGuardError
from .modmath import MODULUS_CAP, crt_combine, inv_mod, is_prime, pow_mod

ORACLE_SCALE = 2**24
TABLE_SCALE = 2**16


def oracle_scale() -> int:
    """Largest modulus the brute-force routines accept (env-overridable)."""
    raw = os.environ.get("MANYROOT_SCALE_GUARD")
    return int(raw) if raw else ORACLE_SCALE


@dataclass(frozen=True)
class ParamSet:
    p: int
    q: int
    x: int
    n: int = field(init=False)
    phi: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", self.p * self.q)
        object.__setattr__(self, "phi", (self.p - 1) * (self.q - 1))

    @property
    def divisibility_ok(self) -> bool:
        return self.phi % self.x == 0

    @property
    def tag_compatible(self) -> bool:
        # x = 1 (mod p-1) means m**x = m (mod p) for every m
        return (self.x - 1) % (self.p - 1) == 0

    @property
    def paper_regime(self) -> bool:
        return is_prime(self.x) and (self.q - 1) % self.x == 0 and self.tag_compatible

    def public(self) -> tuple[int, int]:
        return self.n, self.x

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "x": self.x,
            "n": self.n,
            "phi": self.phi,
            "divisibility_ok": self.divisibility_ok,
            "tag_compatible": self.tag_compatible,
            "paper_regime": self.paper_regime,
        }


def make_params(p: int, q: int, x: int) -> ParamSet:
    """Validate ``(p, q, x)`` and return a ParamSet ordered so that ``p < q``.

    Raises ParamsRejected with one of the reason codes ``p-not-prime``,
    ``q-not-prime``, ``p-equals-q``, ``x-too-small``, ``modulus-too-large``,
    ``x-does-not-divide-phi``.
    """
    if not is_prime(p):
        raise ParamsRejected("p-not-prime", f"p={p} is not prime")
    if not is_prime(q):
        raise ParamsRejected("q-not-prime", f"q={q} is not prime")
    if p == q:
        raise ParamsRejected("p-equals-q", f"p and q must differ (both {p})")
    if x < 2:
        raise ParamsRejected("x-too-small", f"x must be >= 2, got {x}")
    if p > q:
        p, q = q, p
    if p * q >= MODULUS_CAP:
        raise ParamsRejected("modulus-too-large", f"n={p * q} exceeds 2^32")
    params = ParamSet(p, q, x)
    if not params.divisibility_ok:
        raise ParamsRejected(
            "x-does-not-divide-phi", f"x does not divide phi: {x} does not divide {params.phi}"
        )
    return params


@dataclass(frozen=True)
class RootClass:
    cipher: int
    roots: tuple[int, ...]
    unity_factors: tuple[int, ...] = ()

    def __len__(self):
        return len(self.roots)

    def to_dict(self) -> dict:
        return {"c": self.cipher, "roots": list(self.roots)}


def encrypt(m: int, params: ParamSet) -> int:
    if not 0 <= m < params.n:
        raise OutOfRangeError(f"message {m} outside [0, {params.n})")
    return pow_mod(m, params.x, params.n)


def _check_cipher(c: int, params: ParamSet):
    if not 0 <= c < params.n:
        raise OutOfRangeError(f"cipher {c} outside [0, {params.n})")


def _guard(params: ParamSet, limit: int, what: str):
    if params.n > limit:
        raise ScaleGuardError(f"{what}: n={params.n} exceeds scale guard {limit}")


def _make_class(c: int, roots, params: ParamSet) -> RootClass:
    roots = tuple(sorted(roots))
    unity = roots_of_unity(params) if roots and gcd(c, params.n) == 1 else ()
    return RootClass(c, roots, unity)


def roots_bruteforce(c: int, params: ParamSet) -> RootClass:
    """Scan every m in [0, n). The ground truth for root enumeration."""
    _check_cipher(c, params)
    _guard(params, oracle_scale(), "roots_bruteforce")
    n, x = params.n, params.x
    return _make_class(c, [m for m in range(n) if pow(m, x, n) == c], params)


def bruteforce_classes(params: ParamSet) -> dict[int, tuple[int, ...]]:
    """Preimage sets of every cipher from one scan over [0, n)."""
    _guard(params, oracle_scale(), "bruteforce_classes")
    n, x = params.n, params.x
    classes: dict[int, list[int]] = {}
    for m in range(n):
        classes.setdefault(pow(m, x, n), []).append(m)
    return {c: tuple(rs) for c, rs in sorted(classes.items())}


@lru_cache(maxsize=256)
def _prime_roots(prime: int, x: int) -> dict[int, tuple[int, ...]]:
    table: dict[int, list[int]] = {}
    for r in range(prime):
        table.setdefault(pow_mod(r, x, prime), []).append(r)
    return {k: tuple(v) for k, v in table.items()}


def roots_crt(c: int, params: ParamSet) -> RootClass:
    """Roots mod p and mod q found separately, then glued by CRT."""
    _check_cipher(c, params)
    p, q = params.p, params.q
    mod_p = _prime_roots(p, params.x).get(c % p, ())
    mod_q = _prime_roots(q, params.x).get(c % q, ())
    roots = [crt_combine(a, p, b, q) for a in mod_p for b in mod_q]
    return _make_class(c, roots, params)


@lru_cache(maxsize=256)
def _unity(params: ParamSet) -> tuple[int, ...]:
    p, q = params.p, params.q
    return tuple(
        sorted(
            crt_combine(a, p, b, q)
            for a in _prime_roots(p, params.x)[1]
            for b in _prime_roots(q, params.x)[1]
        )
    )


def roots_of_unity(params: ParamSet) -> tuple[int, ...]:
    """All f in [1, n) with f**x = 1 (mod n), ascending."""
    return _unity(params)


def is_unit_class(rc: RootClass, params: ParamSet) -> bool:
    return bool(rc.roots) and gcd(rc.cipher, params.n) == 1


def is_full_unit_class(rc: RootClass, params: ParamSet) -> bool:
    """A unit cipher whose class has exactly x roots."""
    return is_unit_class(rc, params) and len(rc.roots) == params.x


def expected_root_count(params: ParamSet) -> int:
    """Class size of any unit cipher that has roots at all."""
    return gcd(params.x, params.p - 1) * gcd(params.x, params.q - 1)


class PairCheck(NamedTuple):
    a: int
    b: int
    difference: int
    divisor: str | None  # "p", "q", "pq" or None


@dataclass(frozen=True)
class Property1Report:
    cipher: int
    pairs: tuple[PairCheck, ...]

    @property
    def holds(self) -> bool:
        return all(pc.divisor is not None for pc in self.pairs)

    @property
    def violations(self) -> tuple[PairCheck, ...]:
        return tuple(pc for pc in self.pairs if pc.divisor is None)


def check_property1(rc: RootClass, params: ParamSet) -> Property1Report:
    """Classify each root difference as a multiple of p, of q, of both, or neither."""
    p, q = params.p, params.q
    pairs = []
    for a, b in combinations(rc.roots, 2):
        d = b - a
        by_p, by_q = d % p == 0, d % q == 0
        divisor = "pq" if by_p and by_q else "p" if by_p else "q" if by_q else None
        pairs.append(PairCheck(a, b, d, divisor))
    return Property1Report(rc.cipher, tuple(pairs))


def find_factor(m_a: int, m_b: int, params: ParamSet) -> int:
    """The F with ``F * m_a = m_b (mod n)``."""
    return m_b * inv_mod(m_a, params.n) % params.n


def derive_root(m_a: int, f: int, params: ParamSet) -> int:
    return f * m_a % params.n


def shares_class(m_a: int, m_b: int, params: ParamSet) -> bool:
    """True if the factor between two unit roots is an x-th root of unity."""
    try:
        f = find_factor(m_a, m_b, params)
    except NotInvertibleError:
        return False
    return f in roots_of_unity(params)


class ProductCheck(NamedTuple):
    product: int
    equals_cipher: bool


def product_of_roots(rc: RootClass, params: ParamSet) -> ProductCheck:
    if not rc.roots:
        raise ValueError("empty root class")
    prod = 1
    for r in rc.roots:
        prod = prod * r % params.n
    return ProductCheck(prod, prod == rc.cipher)


def table_cipher_map(params: ParamSet) -> list[tuple[int, int]]:
    _guard(params, TABLE_SCALE, "table_cipher_map")
    return [(m, encrypt(m, params)) for m in range(1, params.n)]


def table_root_classes(params: ParamSet) -> list[tuple[int, tuple[int, ...]]]:
    """Rows of the cipher map grouped by cipher, ordered by cipher."""
    classes: dict[int, list[int]] = {}
    for m, c in table_cipher_map(params):
        classes.setdefault(c, []).append(m)
    return [(c, tuple(sorted(ms))) for c, ms in sorted(classes.items())]


def cipher_map_csv(rows) -> str:
    lines = ["m,c"] + [f"{m},{c}" for m, c in rows]
    return "\n".join(lines) + "\n"


def root_classes_csv(classes) -> str:
    width = max((len(rs) for _, rs in classes), default=0)
    header = ",".join(["c"] + [f"root{i}" for i in range(1, width + 1)])
    lines = [header] + [",".join(str(v) for v in (c, *rs)) for c, rs in classes]
    return "\n".join(lines) + "\n"


def tables_json(rows, classes) -> dict:
    return {
        "cipher_map": [{"m": m, "c": c} for m, c in rows],
        "root_classes": [{"c": c, "roots": list(rs)} for c, rs in classes],
    }
