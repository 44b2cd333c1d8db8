"""Storage formats and the per-host payloads that realise them.

==================  ============================================
format              payload at each host
==================  ============================================
LocalCleartext(h)   h: Value
Replicated(hs)      each h: its own copy (Value)
AdditiveShares(hs)  each h: tuple of uint64 shares, one per element
Committed(o; vs)    o: (Value, nonce); each v: sha256 digest
Public              "*": Value (literals and size parameters)
Plain               "*": Value (cleartext reference runs only)
==================  ============================================

Commitment digest: ``sha256(b"circir-commit\\0" + encode(value) + nonce)``
with a 16-byte nonce drawn from the run's seeded RNG.  ``encode`` writes the
element tag (``i``/``b``), the rank and each dimension as 8-byte
little-endian unsigned ints, then every element as 8-byte little-endian
two's complement.
"""

from __future__ import annotations

import hashlib
import random
import struct
from dataclasses import dataclass
from typing import Union

from ..errors import CannotStore, CircirError
from ..ir import PROTOCOLS, Protocol
from ..values import MASK, Value, wrap


@dataclass(frozen=True)
class LocalCleartext:
    host: str

    @property
    def hosts(self):
        return (self.host,)

    def __str__(self):
        return f"Local({self.host})"


@dataclass(frozen=True)
class Replicated:
    hosts: tuple[str, ...]

    def __post_init__(self):
        if not self.hosts:
            raise ValueError("replication needs at least one host")

    def __str__(self):
        return f"Repl({', '.join(self.hosts)})"


@dataclass(frozen=True)
class AdditiveShares:
    hosts: tuple[str, ...]

    def __post_init__(self):
        if len(self.hosts) < 2:
            raise ValueError("additive sharing needs at least two hosts")

    def __str__(self):
        return f"MPC({', '.join(self.hosts)})"


@dataclass(frozen=True)
class Committed:
    owner: str
    verifiers: tuple[str, ...]

    @property
    def hosts(self):
        return (self.owner, *self.verifiers)

    def __str__(self):
        return f"Commit({self.owner}; {', '.join(self.verifiers)})"


@dataclass(frozen=True)
class Public:
    hosts = ("*",)

    def __str__(self):
        return "public"


@dataclass(frozen=True)
class Plain:
    hosts = ("*",)

    def __str__(self):
        return "plain"


StorageFormat = Union[LocalCleartext, Replicated, AdditiveShares, Committed, Public, Plain]
PUBLIC = Public()
PLAIN = Plain()


def format_of(proto: Protocol, universe: tuple[str, ...]) -> StorageFormat:
    """The storage format a protocol literal denotes."""
    info = PROTOCOLS.get(proto.name)
    if info is None:
        raise CircirError(f"unknown protocol {proto.name!r}")
    if not info.can_store:
        raise CannotStore(f"{proto.name} cannot store values")
    hosts = proto.resolve(universe).hosts
    try:
        if proto.name == "Local":
            if len(hosts) != 1:
                raise ValueError("Local takes exactly one host")
            return LocalCleartext(hosts[0])
        if proto.name == "Repl":
            return Replicated(hosts)
        if proto.name == "MPC":
            return AdditiveShares(hosts)
        if proto.name == "Commit":
            if len(hosts) < 2:
                raise ValueError("Commit needs an owner and at least one verifier")
            return Committed(hosts[0], hosts[1:])
    except ValueError as e:
        raise CircirError(f"{proto}: {e}") from None
    raise CannotStore(f"no storage format for protocol {proto.name}")


@dataclass(frozen=True)
class StoredValue:
    fmt: StorageFormat
    payloads: dict
    elem: str
    shape: tuple[int, ...]

    def __post_init__(self):
        if set(self.payloads) != set(self.fmt.hosts):
            raise CircirError(f"payload hosts {sorted(self.payloads)} do not match {self.fmt}")


# -- additive secret sharing --------------------------------------------------


def share(v, hosts, rng: random.Random) -> dict[str, int]:
    """Split a 64-bit scalar into one share per host, summing to v mod 2**64."""
    hosts = tuple(hosts)
    if len(hosts) < 2:
        raise ValueError("secret sharing needs at least two hosts")
    x = int(v.item() if isinstance(v, Value) else v)
    rand = [rng.getrandbits(64) for _ in hosts[1:]]
    first = (x - sum(rand)) & MASK
    return dict(zip(hosts, [first, *rand]))


def reconstruct_scalar(shares) -> int:
    vals = shares.values() if isinstance(shares, dict) else shares
    return wrap(sum(vals))


def share_value(value: Value, hosts, rng: random.Random) -> dict[str, tuple[int, ...]]:
    per_elem = [share(x, hosts, rng) for x in value.data]
    return {h: tuple(s[h] for s in per_elem) for h in hosts}


def unshare_value(payloads: dict, elem: str, shape) -> Value:
    hosts = list(payloads)
    n = len(payloads[hosts[0]])
    data = []
    for k in range(n):
        x = reconstruct_scalar([payloads[h][k] for h in hosts])
        data.append(bool(x) if elem == "bool" else x)
    return Value(elem, tuple(shape), tuple(data))


# -- commitments --------------------------------------------------------------


def encode_value(v: Value) -> bytes:
    out = [b"i" if v.elem == "int" else b"b", struct.pack("<Q", v.rank)]
    out += [struct.pack("<Q", d) for d in v.shape]
    out += [struct.pack("<q", int(x)) for x in v.data]
    return b"".join(out)


def commitment_digest(v: Value, nonce: bytes) -> bytes:
    return hashlib.sha256(b"circir-commit\0" + encode_value(v) + nonce).digest()


def make_commitment(v: Value, fmt: Committed, rng: random.Random) -> StoredValue:
    nonce = rng.getrandbits(128).to_bytes(16, "little")
    digest = commitment_digest(v, nonce)
    payloads = {fmt.owner: (v, nonce)}
    payloads.update({h: digest for h in fmt.verifiers})
    return StoredValue(fmt, payloads, v.elem, v.shape)


# -- construction and inspection ----------------------------------------------


def store(v: Value, fmt: StorageFormat, rng: random.Random) -> StoredValue:
    """Lay out a value that is known in cleartext by whoever produces it."""
    if isinstance(fmt, (LocalCleartext, Replicated)):
        payloads = {h: v for h in fmt.hosts}
    elif isinstance(fmt, AdditiveShares):
        payloads = share_value(v, fmt.hosts, rng)
    elif isinstance(fmt, Committed):
        return make_commitment(v, fmt, rng)
    elif isinstance(fmt, (Public, Plain)):
        payloads = {"*": v}
    else:
        raise CannotStore(f"cannot store in {fmt}")
    return StoredValue(fmt, payloads, v.elem, v.shape)


def cleartext_holders(fmt: StorageFormat) -> tuple[str, ...]:
    """Hosts that can read the value without interaction ("*" = everyone)."""
    if isinstance(fmt, (LocalCleartext, Replicated, Public, Plain)):
        return fmt.hosts
    if isinstance(fmt, Committed):
        return (fmt.owner,)
    return ()


def cleartext_at(sv: StoredValue, host: str) -> Value:
    if isinstance(sv.fmt, (Public, Plain)):
        return sv.payloads["*"]
    if isinstance(sv.fmt, Committed):
        return sv.payloads[host][0]
    return sv.payloads[host]


def reconstruct(sv: StoredValue) -> Value:
    """The value a stored payload denotes (for control flow and checks)."""
    fmt = sv.fmt
    if isinstance(fmt, AdditiveShares):
        return unshare_value(sv.payloads, sv.elem, sv.shape)
    if isinstance(fmt, Committed):
        return sv.payloads[fmt.owner][0]
    return cleartext_at(sv, cleartext_holders(fmt)[0])
