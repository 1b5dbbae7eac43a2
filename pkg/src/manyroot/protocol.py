"""Deterministic simulation of the multi-user root-sharing protocol.

A group shares one cipher ``C``; each user holds a distinct root of ``C``.
A trusted verifier (the stand-in for the tamper-proof user interface) holds
the private factors, checks tags, relays messages, and gates the vault,
which opens only when two distinct users each pass a second tag check and
their roots are shown to belong to the same class.

Every state change is appended to the verifier's audit log as a
:class:`ProtocolEvent`; a scenario run returns those events as a transcript.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import cycle
from math import gcd
from typing import Any, Iterable, Sequence

from .errors import (
    GroupError,
    IncompleteClassError,
    ParamsRejected,
    ScaleGuardError,
    ScenarioError,
    TagIncompatibleError,
)
from .tagcodec import TaggedCipher, Verdict, tag_decode, tag_encode, verify_tagged
from .transform import (
    ParamSet,
    encrypt,
    find_factor,
    make_params,
    oracle_scale,
    product_of_roots,
    roots_bruteforce,
    roots_crt,
    shares_class,
)

EVENT_KINDS = (
    "register",
    "auth_request",
    "auth_ok",
    "auth_fail",
    "msg_send",
    "msg_deliver",
    "db_request",
    "db_grant",
    "db_deny",
    "reconstruct",
    "refresh",
    "observe",
)
VERIFIER = "verifier"
ADVERSARY = "adversary"


@dataclass(frozen=True)
class ProtocolEvent:
    step: int
    actor: str
    kind: str
    payload: dict

    @property
    def is_error(self) -> bool:
        return "error" in self.payload

    def to_json(self) -> str:
        obj = {"step": self.step, "actor": self.actor, "kind": self.kind, "payload": self.payload}
        return json.dumps(obj, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "ProtocolEvent":
        obj = json.loads(line)
        return cls(obj["step"], obj["actor"], obj["kind"], obj["payload"])


@dataclass
class UserAgent:
    id: str
    root: int
    authenticated: bool = False
    session_nonce: int = 0


@dataclass
class VerifierState:
    params: ParamSet
    group_cipher: int
    registry: dict[str, int]
    audit_log: list[ProtocolEvent] = field(default_factory=list)
    rng: random.Random = field(default_factory=random.Random, repr=False, compare=False)

    def emit(self, actor: str, kind: str, **payload: Any) -> ProtocolEvent:
        assert kind in EVENT_KINDS, kind
        step = self.audit_log[-1].step + 1 if self.audit_log else 1
        event = ProtocolEvent(step, actor, kind, payload)
        self.audit_log.append(event)
        return event

    def device_tag(self, m: int) -> TaggedCipher:
        """What a user's sealed device transmits for value ``m``."""
        return tag_encode(m, encrypt(m, self.params), self.params.p)


@dataclass(frozen=True)
class VaultEntry:
    name: str
    ciphertext: bytes
    key_cipher: int

    @classmethod
    def seal(cls, name: str, plaintext: bytes, key_cipher: int) -> "VaultEntry":
        return cls(name, keystream_xor(plaintext, key_cipher), key_cipher)


def keystream_xor(data: bytes, key_cipher: int) -> bytes:
    """Toy cipher: XOR with the repeated decimal digits of ``key_cipher``. Not secure."""
    return bytes(b ^ k for b, k in zip(data, cycle(str(key_cipher).encode("ascii"))))


def _assign(ids: Iterable[str], roots: Sequence[int]) -> dict[str, int]:
    return dict(zip(sorted(ids), roots))


def _group_class(params: ParamSet, seed_message: int, needed: int):
    if not params.tag_compatible:
        raise GroupError(f"x={params.x} is not 1 mod p-1={params.p - 1}; tags would not be integral")
    if not 0 <= seed_message < params.n or gcd(seed_message, params.n) != 1:
        raise GroupError(f"seed message {seed_message} is not a unit mod {params.n}")
    rc = roots_crt(encrypt(seed_message, params), params)
    if needed > len(rc.roots):
        raise GroupError(f"class of {rc.cipher} has only {len(rc.roots)} roots for {needed} users")
    return rc


def setup_group(
    params: ParamSet,
    seed_message: int,
    user_ids: Sequence[str],
    rng_seed: int = 0,
    announce: bool = True,
) -> tuple[VerifierState, list[UserAgent]]:
    """Create the verifier and one agent per id, each holding a distinct root.

    Roots are handed out in ascending order to the ids sorted by name.
    With ``announce`` a ``register`` event is logged per user.
    """
    if len(set(user_ids)) != len(user_ids):
        raise GroupError("duplicate user ids")
    rc = _group_class(params, seed_message, len(user_ids))
    registry = _assign(user_ids, rc.roots)
    verifier = VerifierState(params, rc.cipher, registry, rng=random.Random(rng_seed))
    if announce:
        for uid in sorted(registry):
            verifier.emit(uid, "register", root=registry[uid], c=rc.cipher)
    return verifier, [UserAgent(uid, registry[uid]) for uid in user_ids]


def authenticate(
    agent: UserAgent, verifier: VerifierState, presented: TaggedCipher | None = None
) -> Verdict:
    """First-stage check: the agent's tag must decode to its registered root.

    ``presented`` overrides what the agent's device would send (forgery).
    """
    if presented is None:
        try:
            presented = verifier.device_tag(agent.root)
        except TagIncompatibleError:
            presented = TaggedCipher(verifier.group_cipher, 0)
    verifier.emit(agent.id, "auth_request", c=presented.cipher, t=presented.tag)

    def fail(reason, **extra):
        agent.authenticated = False
        verifier.emit(agent.id, "auth_fail", error=reason, **extra)
        return Verdict(False, extra.get("decoded"), reason)

    if agent.id not in verifier.registry:
        return fail("unknown-user")
    if presented.cipher != verifier.group_cipher:
        return fail("wrong-cipher")
    verdict = verify_tagged(presented, verifier.params)
    if not verdict.accepted:
        return fail(verdict.reason, decoded=verdict.root)
    if verdict.root != verifier.registry[agent.id]:
        return fail("root-mismatch", decoded=verdict.root)
    agent.authenticated = True
    agent.session_nonce = verifier.rng.getrandbits(32)
    verifier.emit(VERIFIER, "auth_ok", user=agent.id, root=verdict.root, nonce=agent.session_nonce)
    return verdict


def inter_user_send(
    sender: UserAgent,
    recipients: Sequence[UserAgent],
    message: int,
    verifier: VerifierState,
) -> list[ProtocolEvent]:
    """Encrypt ``message`` once and deliver it to every recipient."""
    start = len(verifier.audit_log)
    to = [r.id for r in recipients]
    locked = [a.id for a in (sender, *recipients) if not a.authenticated]
    if not 0 <= message < verifier.params.n:
        verifier.emit(sender.id, "msg_send", to=to, error="message-out-of-range")
    elif locked:
        verifier.emit(sender.id, "msg_send", to=to, error="auth-required", unauthenticated=locked)
    else:
        wire = verifier.device_tag(message)
        verifier.emit(sender.id, "msg_send", to=to, c=wire.cipher, t=wire.tag)
        for r in recipients:
            m = tag_decode(wire.tag, wire.cipher, verifier.params.p, verifier.params.n)
            verifier.emit(r.id, "msg_deliver", sender=sender.id, c=wire.cipher, t=wire.tag, m=m)
    return verifier.audit_log[start:]


@dataclass(frozen=True)
class AccessOutcome:
    granted: bool
    reason: str | None = None
    plaintext: bytes | None = None


_WITHHELD = object()


def db_access(
    u1: UserAgent,
    u2: UserAgent,
    entry_name: str,
    verifier: VerifierState,
    vault: Sequence[VaultEntry],
    presentations: dict[str, TaggedCipher | None] | None = None,
) -> AccessOutcome:
    """Two-user, two-stage gate on a vault entry.

    Both users must already be authenticated. Each then presents a fresh
    tag (by default its device's tag of its own root; ``None`` in
    ``presentations`` withholds it). The decoded roots must be distinct,
    related by an x-th root of unity, equal to the registered roots and
    members of the entry's key class.
    """
    presentations = presentations or {}
    users = [u1.id, u2.id]
    verifier.emit(u1.id, "db_request", users=users, entry=entry_name)

    def deny(reason, **extra):
        verifier.emit(u1.id, "db_deny", users=users, entry=entry_name, error=reason, **extra)
        return AccessOutcome(False, reason)

    if u1.id == u2.id:
        return deny("need-two-users")
    entry = next((e for e in vault if e.name == entry_name), None)
    if entry is None:
        return deny("unknown-entry")
    locked = [u.id for u in (u1, u2) if not u.authenticated]
    if locked:
        return deny("auth-required", unauthenticated=locked)

    roots = []
    for u in (u1, u2):
        tc = presentations.get(u.id, _WITHHELD)
        if tc is _WITHHELD:
            try:
                tc = verifier.device_tag(u.root)
            except TagIncompatibleError:
                return deny("tag-invalid", user=u.id)
        if tc is None:
            return deny("second-auth-missing", user=u.id)
        verdict = verify_tagged(tc, verifier.params)
        if not verdict.accepted:
            return deny("tag-invalid", user=u.id, detail=verdict.reason)
        roots.append(verdict.root)

    r1, r2 = roots
    if r1 == r2:
        return deny("need-two-users", detail="same-root")
    if not shares_class(r1, r2, verifier.params):
        extra = {}
        if gcd(r1, verifier.params.n) == 1:
            extra["factor"] = find_factor(r1, r2, verifier.params)
        return deny("class-mismatch", roots=[r1, r2], **extra)
    for u, r in zip((u1, u2), roots):
        if verifier.registry.get(u.id) != r:
            return deny("root-mismatch", user=u.id)
    if encrypt(r1, verifier.params) != entry.key_cipher:
        return deny("wrong-key-class", roots=[r1, r2])

    plaintext = keystream_xor(entry.ciphertext, entry.key_cipher)
    verifier.emit(
        u1.id,
        "db_grant",
        users=users,
        entry=entry_name,
        roots=[r1, r2],
        factor=find_factor(r1, r2, verifier.params),
        key_cipher=entry.key_cipher,
        plaintext_hex=plaintext.hex(),
    )
    return AccessOutcome(True, plaintext=plaintext)


def reconstruct_cipher(roots: Sequence[int], params: ParamSet) -> int:
    """Multiply a complete root class back into its cipher."""
    if not roots:
        raise IncompleteClassError(0, "no roots given")
    c = encrypt(roots[0], params)
    if params.n <= oracle_scale():
        full = roots_bruteforce(c, params)
    else:
        full = roots_crt(c, params)
    given = set(roots)
    stray = given - set(full.roots)
    if stray:
        raise IncompleteClassError(0, f"roots {sorted(stray)} are not in the class of {c}")
    missing = len(full.roots) - len(given)
    if missing:
        raise IncompleteClassError(missing)
    return product_of_roots(full, params).product


def refresh_params(
    verifier: VerifierState,
    new_params: ParamSet,
    new_seed: int,
    agents: Sequence[UserAgent] = (),
    vault: list[VaultEntry] | None = None,
) -> tuple[VerifierState, dict[str, int]]:
    """Move the group to a new modulus and cipher.

    Returns a new verifier; the old one is left untouched, including when
    the refresh is refused. Given agents are deauthenticated and handed
    their new roots; vault entries keyed by the old group cipher are
    re-sealed under the new one.
    """
    rc = _group_class(new_params, new_seed, len(verifier.registry))
    mapping = _assign(verifier.registry, rc.roots)
    rng = random.Random()
    rng.setstate(verifier.rng.getstate())
    fresh = VerifierState(new_params, rc.cipher, mapping, list(verifier.audit_log), rng)

    rekeyed = []
    if vault is not None:
        for i, e in enumerate(vault):
            if e.key_cipher == verifier.group_cipher:
                plain = keystream_xor(e.ciphertext, e.key_cipher)
                vault[i] = VaultEntry.seal(e.name, plain, rc.cipher)
                rekeyed.append(e.name)
    for a in agents:
        a.authenticated = False
        a.session_nonce = 0
        if a.id in mapping:
            a.root = mapping[a.id]
    fresh.emit(
        VERIFIER,
        "refresh",
        params={"p": new_params.p, "q": new_params.q, "x": new_params.x},
        c=rc.cipher,
        reassigned=mapping,
        rekeyed=rekeyed,
    )
    return fresh, mapping


def adversary_candidates(observed_cipher: int, public: tuple[int, int]) -> tuple[int, tuple[int, ...]]:
    """Every plaintext an eavesdropper knowing only (n, x, C) must consider."""
    n, x = public
    if n > oracle_scale():
        raise ScaleGuardError(f"n={n} exceeds scale guard")
    cands = tuple(m for m in range(n) if pow(m, x, n) == observed_cipher)
    return len(cands), cands


def adversary_factor_leak(
    observations: Iterable[tuple[int, int, int]], n: int | None = None
) -> int | None:
    """Recover the private factor from known (message, cipher, tag) triples.

    Each triple with a nonzero tag pins ``p`` to the values solving
    ``m = t*p + (c mod p)``, all at most ``m // t``. With ``n`` known the
    candidates must also divide it. The smallest survivor is returned, or
    None if no triple is informative.
    """
    candidates: set[int] | None = None
    for m, c, t in observations:
        if t <= 0:
            continue
        found = {p for p in range(2, m // t + 1) if t * p + c % p == m}
        candidates = found if candidates is None else candidates & found
    if not candidates:
        return None
    if n is not None:
        candidates = {p for p in candidates if n % p == 0 and 1 < p < n}
    return min(candidates) if candidates else None


# --- scenario engine -------------------------------------------------------

STEP_OPS = ("auth", "send", "db_access", "reconstruct", "refresh", "observe")


def _need(obj: dict, key: str, kind, idx):
    val = obj.get(key)
    if not isinstance(val, kind) or isinstance(val, bool):
        raise ScenarioError(idx, f"field {key!r} missing or not {kind.__name__}")
    return val


def _need_ids(step: dict, key: str, idx, users):
    ids = step.get(key)
    if not isinstance(ids, list) or not all(isinstance(u, str) for u in ids):
        raise ScenarioError(idx, f"field {key!r} must be a list of user ids")
    for u in ids:
        if u not in users:
            raise ScenarioError(idx, f"unknown user {u!r}")
    return ids


def _parse_params(obj, idx) -> ParamSet:
    if not isinstance(obj, dict):
        raise ScenarioError(idx, "params must be an object")
    try:
        return make_params(*(_need(obj, k, int, idx) for k in ("p", "q", "x")))
    except ParamsRejected as exc:
        raise ScenarioError(idx, f"params rejected: {exc}") from exc


@dataclass(frozen=True)
class Scenario:
    params: ParamSet
    seed_message: int
    users: tuple[str, ...]
    vault: tuple[dict, ...]
    steps: tuple[dict, ...]
    rng_seed: int = 0

    @classmethod
    def from_dict(cls, obj: Any) -> "Scenario":
        """Validate a decoded scenario document; errors name the step index."""
        if not isinstance(obj, dict):
            raise ScenarioError(None, "scenario must be a JSON object")
        params = _parse_params(obj.get("params"), None)
        seed = _need(obj, "seed_message", int, None)
        users = obj.get("users")
        if not isinstance(users, list) or not all(isinstance(u, str) for u in users):
            raise ScenarioError(None, "users must be a list of strings")
        vault = obj.get("vault", [])
        if not isinstance(vault, list):
            raise ScenarioError(None, "vault must be a list")
        for v in vault:
            if not isinstance(v, dict) or not isinstance(v.get("name"), str):
                raise ScenarioError(None, "vault entries need a name")
            try:
                bytes.fromhex(v.get("plaintext_hex", ""))
            except (TypeError, ValueError) as exc:
                raise ScenarioError(None, f"vault entry {v['name']!r}: bad plaintext_hex") from exc
        steps = obj.get("steps", [])
        if not isinstance(steps, list):
            raise ScenarioError(None, "steps must be a list")
        rng_seed = obj.get("rng_seed", 0)
        if not isinstance(rng_seed, int):
            raise ScenarioError(None, "rng_seed must be an integer")
        for i, step in enumerate(steps):
            _validate_step(step, i, set(users))
        return cls(params, seed, tuple(users), tuple(vault), tuple(steps), rng_seed)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(None, f"invalid JSON: {exc}") from exc
        return cls.from_dict(obj)


def _validate_step(step, i, users):
    if not isinstance(step, dict):
        raise ScenarioError(i, "step must be an object")
    op = step.get("op")
    if op not in STEP_OPS:
        raise ScenarioError(i, f"unknown op {op!r}")
    if op == "auth":
        uid = _need(step, "user", str, i)
        if uid not in users:
            raise ScenarioError(i, f"unknown user {uid!r}")
        for k in ("forge_tag", "forge_cipher"):
            if k in step:
                _need(step, k, int, i)
    elif op == "send":
        if _need(step, "from", str, i) not in users:
            raise ScenarioError(i, f"unknown user {step['from']!r}")
        _need_ids(step, "to", i, users)
        _need(step, "message", int, i)
    elif op == "db_access":
        ids = _need_ids(step, "users", i, users)
        if not 1 <= len(ids) <= 2:
            raise ScenarioError(i, "db_access takes one or two users")
        _need(step, "entry", str, i)
        if "withhold" in step:
            _need_ids(step, "withhold", i, users)
        for uid, tc in step.get("present", {}).items():
            if uid not in users or not isinstance(tc, dict):
                raise ScenarioError(i, f"bad presentation for {uid!r}")
            _need(tc, "c", int, i)
            _need(tc, "t", int, i)
    elif op == "reconstruct":
        if "users" in step:
            _need_ids(step, "users", i, users)
    elif op == "refresh":
        _parse_params(step.get("params"), i)
        _need(step, "seed_message", int, i)
    elif op == "observe":
        if "cipher" in step:
            _need(step, "cipher", int, i)


class Simulation:
    """Runs a scenario's steps in order against one verifier."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        try:
            self.verifier, agents = setup_group(
                scenario.params,
                scenario.seed_message,
                list(scenario.users),
                rng_seed=scenario.rng_seed,
                announce=False,
            )
        except GroupError as exc:
            raise ScenarioError(None, str(exc)) from exc
        self.agents = {a.id: a for a in agents}
        self.vault = [
            VaultEntry.seal(
                v["name"],
                bytes.fromhex(v.get("plaintext_hex", "")),
                v.get("key_cipher", self.verifier.group_cipher),
            )
            for v in scenario.vault
        ]
        self.wire: list[tuple[int, int, int]] = []
        self.unexpected_failures: list[int] = []

    @property
    def transcript(self) -> list[ProtocolEvent]:
        return list(self.verifier.audit_log)

    def run(self) -> list[ProtocolEvent]:
        for i, step in enumerate(self.scenario.steps):
            start = len(self.verifier.audit_log)
            getattr(self, f"_do_{step['op']}")(step)
            produced = self.verifier.audit_log[start:]
            if any(e.is_error for e in produced) and not step.get("expect_fail", False):
                self.unexpected_failures.append(i)
        return self.transcript

    def _do_auth(self, step):
        presented = None
        if "forge_tag" in step or "forge_cipher" in step:
            presented = TaggedCipher(
                step.get("forge_cipher", self.verifier.group_cipher), step.get("forge_tag", 0)
            )
        authenticate(self.agents[step["user"]], self.verifier, presented)

    def _do_send(self, step):
        sender = self.agents[step["from"]]
        recipients = [self.agents[u] for u in step["to"]]
        for e in inter_user_send(sender, recipients, step["message"], self.verifier):
            if e.kind == "msg_send" and not e.is_error:
                self.wire.append((step["message"], e.payload["c"], e.payload["t"]))

    def _do_db_access(self, step):
        ids = step["users"]
        u1 = self.agents[ids[0]]
        u2 = self.agents[ids[-1]]
        pres: dict[str, TaggedCipher | None] = {
            uid: TaggedCipher(tc["c"], tc["t"]) for uid, tc in step.get("present", {}).items()
        }
        for uid in step.get("withhold", []):
            pres[uid] = None
        db_access(u1, u2, step["entry"], self.verifier, self.vault, pres)

    def _do_reconstruct(self, step):
        ids = step.get("users", sorted(self.verifier.registry))
        roots = [self.verifier.registry[u] for u in ids]
        c = self.verifier.group_cipher
        try:
            product = reconstruct_cipher(roots, self.verifier.params)
        except IncompleteClassError as exc:
            self.verifier.emit(
                VERIFIER, "reconstruct", users=ids, error="incomplete-class", missing=exc.missing
            )
            return
        self.verifier.emit(
            VERIFIER, "reconstruct", users=ids, product=product, cipher=c, equals_cipher=product == c
        )

    def _do_refresh(self, step):
        p = step["params"]
        new_params = make_params(p["p"], p["q"], p["x"])
        try:
            self.verifier, _ = refresh_params(
                self.verifier, new_params, step["seed_message"], list(self.agents.values()), self.vault
            )
        except GroupError as exc:
            self.verifier.emit(VERIFIER, "refresh", error="refused", detail=str(exc))
            return
        # observations from the old modulus say nothing about the new one
        self.wire.clear()

    def _do_observe(self, step):
        params = self.verifier.params
        if "cipher" in step:
            c = step["cipher"]
        elif self.wire:
            c = self.wire[-1][1]
        else:
            c = self.verifier.group_cipher
        count, cands = adversary_candidates(c, params.public())
        payload: dict[str, Any] = {"c": c, "candidates": count, "set": list(cands)}
        if step.get("known_plaintext"):
            payload["leaked_p"] = adversary_factor_leak(self.wire, params.n)
        self.verifier.emit(ADVERSARY, "observe", **payload)


def simulate(scenario: Scenario) -> tuple[list[ProtocolEvent], list[int]]:
    """Run a scenario; also return indices of steps that failed unexpectedly."""
    sim = Simulation(scenario)
    events = sim.run()
    return events, sim.unexpected_failures


def run_scenario(scenario: Scenario | dict) -> list[ProtocolEvent]:
    if isinstance(scenario, dict):
        scenario = Scenario.from_dict(scenario)
    return simulate(scenario)[0]


def transcript_lines(events: Iterable[ProtocolEvent]) -> str:
    return "".join(e.to_json() + "\n" for e in events)
