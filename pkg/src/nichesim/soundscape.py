"""Messages, signals and the shared 9-band soundscape."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .network import activate, activate_batch

N_BITS = 3
N_BANDS = 9
N_MESSAGES = 2 ** N_BITS
SPECIES = ("A", "B")

# tie rule shared by band usage and conspecific classification
THRESHOLD = 0.5


class TransmissionMode(str, Enum):
    BINARY = "binary"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class Message:
    bits: tuple

    def __post_init__(self):
        if len(self.bits) != N_BITS or any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"a message is {N_BITS} bits in {{0, 1}}, got {self.bits}")

    @classmethod
    def from_index(cls, k):
        return cls(tuple((k >> (N_BITS - 1 - i)) & 1 for i in range(N_BITS)))

    def as_array(self):
        return np.array(self.bits, dtype=np.float64)


ALL_MESSAGES = tuple(Message.from_index(k) for k in range(N_MESSAGES))
MESSAGE_BITS = np.array([m.bits for m in ALL_MESSAGES], dtype=np.float64)


def binarize(channels):
    return np.asarray(channels) >= THRESHOLD


@dataclass(frozen=True)
class Signal:
    channels: tuple
    origin_species: str
    origin_sender: int
    source_message: Message

    def __post_init__(self):
        if len(self.channels) != N_BANDS:
            raise ValueError(f"a signal has {N_BANDS} channels, got {len(self.channels)}")

    @property
    def used_bands(self):
        return tuple(bool(b) for b in binarize(self.channels))


@dataclass(frozen=True)
class DecodedOutput:
    m: tuple

    @property
    def bits(self):
        return self.m[:N_BITS]

    @property
    def conspecific_confidence(self):
        return self.m[N_BITS]

    @property
    def says_conspecific(self):
        return self.m[N_BITS] >= THRESHOLD


def _check_arity(net, n_in, n_out, role):
    if net.n_inputs != n_in or net.n_outputs != n_out:
        raise ValueError(f"{role} network must be {n_in}-in/{n_out}-out, "
                         f"got {net.n_inputs}-in/{net.n_outputs}-out")


def encode(sender_net, msg, species="A", sender=0):
    _check_arity(sender_net, N_BITS, N_BANDS, "sender")
    channels = activate(sender_net, msg.as_array())
    return Signal(tuple(float(c) for c in channels), species, sender, msg)


def encode_all(sender_net):
    """Channels for all 8 messages, shape (8, 9), in ``ALL_MESSAGES`` order."""
    _check_arity(sender_net, N_BITS, N_BANDS, "sender")
    return activate_batch(sender_net, MESSAGE_BITS)


def transmit(sig, mode=TransmissionMode.BINARY):
    channels = sig.channels if isinstance(sig, Signal) else sig
    return transmit_array(np.asarray(channels, dtype=np.float64), mode)


def transmit_array(channels, mode=TransmissionMode.BINARY):
    """Vectorised ``transmit`` over any array whose last axis is the 9 bands."""
    mode = TransmissionMode(mode)
    channels = np.asarray(channels, dtype=np.float64)
    if mode is TransmissionMode.BINARY:
        return binarize(channels).astype(np.float64)
    return channels.copy()


def decode(receiver_net, transmitted):
    _check_arity(receiver_net, N_BANDS, N_BITS + 1, "receiver")
    return DecodedOutput(tuple(float(v) for v in activate(receiver_net, transmitted)))


def decode_batch(receiver_net, transmitted, dedupe=False):
    """Decode every row of ``transmitted``; with ``dedupe`` each distinct row is evaluated once."""
    _check_arity(receiver_net, N_BANDS, N_BITS + 1, "receiver")
    x = np.asarray(transmitted, dtype=np.float64)
    if not dedupe:
        return activate_batch(receiver_net, x)
    unique, inverse = np.unique(x, axis=0, return_inverse=True)
    return activate_batch(receiver_net, unique)[inverse.reshape(-1)]


def band_usage(signals):
    """Per-species counts of signals using each band."""
    counts = {s: [0] * N_BANDS for s in SPECIES}
    for sig in signals:
        row = counts.setdefault(sig.origin_species, [0] * N_BANDS)
        for i, used in enumerate(sig.used_bands):
            row[i] += int(used)
    return counts


def band_usage_array(channels):
    """Counts per band for an array of raw channels with bands on the last axis."""
    flat = np.asarray(channels).reshape(-1, N_BANDS)
    return binarize(flat).sum(axis=0).astype(int)
