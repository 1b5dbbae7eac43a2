"""Tags that tell the receiver which root of a cipher was meant.

A root ``m`` of cipher ``c`` is sent as ``(c, t)`` with
``t = (m - (c mod p)) / p``; whoever holds the private factor ``p`` undoes it
with ``m = t*p + (c mod p)``. The division is exact only when
``m = c (mod p)``, which holds for every root iff ``x = 1 (mod p-1)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import MalformedTagError, TagIncompatibleError
from .transform import ParamSet, encrypt


@dataclass(frozen=True)
class TaggedCipher:
    cipher: int
    tag: int

    def to_json(self) -> str:
        return json.dumps({"c": self.cipher, "t": self.tag}, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "TaggedCipher":
        obj = json.loads(text)
        c, t = obj["c"], obj["t"]
        if not (isinstance(c, int) and isinstance(t, int)) or c < 0 or t < 0:
            raise MalformedTagError(f"bad tagged cipher {obj!r}")
        return cls(c, t)


def tag_encode(m: int, c: int, p: int) -> TaggedCipher:
    offset = m - c % p
    if offset % p:
        raise TagIncompatibleError(m % p, c % p, p)
    return TaggedCipher(c, offset // p)


def tag_decode(t: int, c: int, p: int, n: int | None = None) -> int:
    """Recover the root from its tag; ``n`` bounds the result when given."""
    if t < 0:
        raise MalformedTagError(f"negative tag {t}")
    m = t * p + c % p
    if n is not None and m >= n:
        raise MalformedTagError(f"tag {t} decodes to {m} >= n={n}")
    return m


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    root: int | None = None
    reason: str | None = None


def verify_tagged(tc: TaggedCipher, params: ParamSet) -> Verdict:
    """Accept iff the tag decodes to a genuine root of the tagged cipher."""
    if not 0 <= tc.cipher < params.n:
        return Verdict(False, reason="malformed")
    try:
        m = tag_decode(tc.tag, tc.cipher, params.p, params.n)
    except MalformedTagError:
        return Verdict(False, reason="malformed")
    if encrypt(m, params) != tc.cipher:
        return Verdict(False, root=m, reason="not-a-root")
    return Verdict(True, root=m)
