"""Transfers between storage formats.

Supported conversions (anything else raises NoTransferRule):

=====================  ==================================================
from                   to
=====================  ==================================================
Local(h) / public      Local (send), Repl (broadcast + equivocation check),
                       MPC (owner shares), Commit(h; ...) (owner commits)
Repl(hs)               anything a cleartext holder could produce: one host
                       in hs acts as the sender; Commit needs owner in hs
MPC(hs)                Local, Repl (shares sent to and summed at targets)
Commit(o; vs)          Repl only: open, verifiers check the digest
=====================  ==================================================

Unsupported: MPC to a different MPC host set, MPC to Commit, Commit to
anything but Repl, and committing on behalf of a host that does not hold
the value.
"""

from __future__ import annotations

from ..errors import CommitmentMismatch, EquivocationError, NoTransferRule
from ..values import Value
from .formats import (
    AdditiveShares, Committed, LocalCleartext, Plain, Replicated, StorageFormat, StoredValue,
    cleartext_at, cleartext_holders, commitment_digest, make_commitment, reconstruct, share_value,
)
from .trace import EquivocationCheckEvent, ExportEvent


def equivocation_check(sv: StoredValue, world, var: str, sender: str | None = None) -> None:
    """All hosts of a replicated value must hold bit-identical copies."""
    if not isinstance(sv.fmt, Replicated):
        raise TypeError(f"equivocation check on {sv.fmt}")
    hosts = sv.fmt.hosts
    ref_host = sender if sender in sv.payloads else hosts[0]
    ref = sv.payloads[ref_host]
    bad = [h for h in hosts if sv.payloads[h] != ref]
    if not bad:
        world.emit(EquivocationCheckEvent, var=var, fmt=str(sv.fmt), ok=True)
        return
    named = tuple(h for h in hosts if h == ref_host or h in bad)
    world.emit(EquivocationCheckEvent, var=var, fmt=str(sv.fmt), ok=False, hosts=named)
    raise EquivocationError(var, named)


def _received(world, var: str, host: str, v: Value) -> Value:
    bad = world.take_corruption(var, host)
    return v if bad is None else bad


def _broadcast(v: Value, sender: str, target: Replicated, world, var: str) -> StoredValue:
    copies = {h: _received(world, var, h, v) for h in target.hosts}
    sv = StoredValue(target, copies, v.elem, v.shape)
    equivocation_check(sv, world, var, sender)
    return sv


def _pick_sender(holders, target_hosts) -> str:
    for h in holders:
        if h in target_hosts:
            return h
    return holders[0]


def open_commitment(sv: StoredValue, world, var: str) -> Value:
    fmt = sv.fmt
    value, nonce = sv.payloads[fmt.owner]
    revealed = _received(world, var, fmt.owner, value)
    for h in fmt.verifiers:
        if commitment_digest(revealed, nonce) != sv.payloads[h]:
            raise CommitmentMismatch(f"opening of {var} by {fmt.owner} fails verification at {h}")
    return revealed


def transfer(sv: StoredValue, target: StorageFormat, world, var: str = "?", log: bool = True) -> StoredValue:
    """Move a stored value into ``target``, logging an export event."""
    if sv.fmt == target or isinstance(target, Plain):
        if isinstance(target, Plain) and not isinstance(sv.fmt, Plain):
            return StoredValue(target, {"*": reconstruct(sv)}, sv.elem, sv.shape)
        return sv
    src = sv.fmt
    rng = world.rng
    if isinstance(src, Committed):
        if not isinstance(target, Replicated):
            raise NoTransferRule(src, target)
        v = open_commitment(sv, world, var)
        out = _broadcast(v, src.owner, target, world, var)
    elif isinstance(src, AdditiveShares):
        v = reconstruct(sv)
        if isinstance(target, LocalCleartext):
            out = StoredValue(target, {target.host: v}, v.elem, v.shape)
        elif isinstance(target, Replicated):
            # every target sums the shares it was sent
            out = _broadcast(v, None, target, world, var)
        else:
            raise NoTransferRule(src, target)
    else:
        holders = cleartext_holders(src)
        if isinstance(target, Committed):
            if "*" not in holders and target.owner not in holders:
                raise NoTransferRule(src, target)
            v = sv.payloads["*"] if "*" in holders else cleartext_at(sv, target.owner)
            out = make_commitment(v, target, rng)
        else:
            sender = "*" if "*" in holders else _pick_sender(holders, target.hosts)
            v = cleartext_at(sv, sender)
            if isinstance(target, LocalCleartext):
                out = StoredValue(target, {target.host: v}, v.elem, v.shape)
            elif isinstance(target, Replicated):
                out = _broadcast(v, sender, target, world, var)
            elif isinstance(target, AdditiveShares):
                out = StoredValue(target, share_value(v, target.hosts, rng), v.elem, v.shape)
            else:
                raise NoTransferRule(src, target)
    if log:
        digest = None
        if isinstance(out.fmt, Committed):
            digest = out.payloads[out.fmt.verifiers[0]].hex()
        world.emit(ExportEvent, var=var, source=str(src), target=str(target), digest=digest)
    return out
