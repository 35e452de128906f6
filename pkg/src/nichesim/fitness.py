"""Fitness equations and the generation-wide evaluation protocol.

Under H1 every receiver hears all signals from both species and must flag
conspecific ones; under H0 receivers only hear their own species and are
scored on decoding alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .network import build_network
from .soundscape import (
    ALL_MESSAGES, MESSAGE_BITS, N_BANDS, N_BITS, N_MESSAGES, SPECIES, THRESHOLD,
    DecodedOutput, Signal, TransmissionMode, band_usage_array, decode_batch, encode_all,
    transmit_array,
)

SHARPNESS = 8.0
# bonus(1, N) for N = 0..3
_BONUS = np.array([1.0, 1.1, 1.1 * 1.2, 1.1 * 1.2 * 1.3])


class FitnessMode(str, Enum):
    H1 = "H1"
    H0 = "H0"


def f_adj(x):
    """Smooth step centred on 0.5."""
    return 0.5 * (np.tanh(SHARPNESS * (np.asarray(x, dtype=np.float64) - 0.5)) + 1.0)


def species_fitness(m3, is_conspecific):
    m3 = np.asarray(m3, dtype=np.float64)
    return np.where(is_conspecific, f_adj(1.0 - np.abs(1.0 - m3)), f_adj(1.0 - np.abs(m3)))


def decoding_fitness(o, m):
    """3 * prod_i f_adj(1 - |o_i - m_i|) over the three message bits.

    ``o`` may be a Message or bit array; ``m`` a DecodedOutput or array whose
    first three entries along the last axis are the decoded bits.
    """
    o = o.as_array() if hasattr(o, "as_array") else np.asarray(o, dtype=np.float64)
    m = np.asarray(m.m if isinstance(m, DecodedOutput) else m, dtype=np.float64)
    bits = m[..., :N_BITS]
    return 3.0 * np.prod(f_adj(1.0 - np.abs(o - bits)), axis=-1)


def bonus(e_s, n_correct):
    if e_s == 0:
        return 1.0
    if not 0 <= n_correct <= N_BITS:
        raise ValueError(f"correct bit count must be in 0..{N_BITS}, got {n_correct}")
    out = 1.0
    for i in range(n_correct + 1):
        out *= i / 10 + 1
    return out


def total_fitness(e_s, e_d, f_s, f_d, f_b):
    return (e_s * f_s + e_d * f_d) * f_b


def correct_bits(o, m):
    """Number of bits with |o_i - m_i| < 0.5 (the boundary counts as wrong)."""
    o = np.asarray(o, dtype=np.float64)
    return (np.abs(o - np.asarray(m)[..., :N_BITS]) < 0.5).sum(axis=-1)


@dataclass
class EvaluationRecord:
    sender_species: str
    sender_index: int
    receiver_species: str
    receiver_index: int
    message: object
    decoded: DecodedOutput
    species_id_correct: bool | None
    correct_bit_count: int
    f_s: float
    f_d: float
    f_b: float
    f_t: float


@dataclass
class FitnessTables:
    """Mean fitness per population plus per-species score metrics.

    ``fitness`` is keyed by ("sender" | "receiver", species). Score metrics
    are per receiving species; ``species_id_rate`` is None under H0.
    """

    fitness: dict
    species_id_rate: dict
    bit_rate: dict
    msg_rate: dict


@dataclass
class GenerationEvaluation:
    tables: FitnessTables
    # raw sender outputs per species, shape (population, 8, 9)
    channels: dict
    records: list = field(default_factory=list)

    def signals(self):
        out = []
        for sp in SPECIES:
            for s, block in enumerate(self.channels[sp]):
                for k, row in enumerate(block):
                    out.append(Signal(tuple(float(v) for v in row), sp, s, ALL_MESSAGES[k]))
        return out

    def band_usage(self):
        return {sp: band_usage_array(self.channels[sp]) for sp in SPECIES}


def _score_block(outputs, conspecific, messages, mode):
    """Per-decode quantities for one receiver population.

    ``outputs``: (receivers, signals, 4); ``conspecific``: (signals,) bool;
    ``messages``: (signals, 3) source bits.
    """
    m3 = outputs[..., N_BITS]
    n_ok = correct_bits(messages, outputs)
    f_d = decoding_fitness(messages, outputs)
    if mode is FitnessMode.H0:
        e_s = 0
        e_d = np.ones_like(m3)
        f_s = np.zeros_like(m3)
        f_b = np.ones_like(m3)
        n_used = n_ok
        says_con = None
    else:
        e_s = 1
        says_con = m3 >= THRESHOLD
        e_d = (conspecific[None, :] & says_con).astype(np.float64)
        f_s = species_fitness(m3, conspecific[None, :])
        n_used = np.where(e_d > 0, n_ok, 0)
        f_b = _BONUS[n_used]
    f_t = total_fitness(e_s, e_d, f_s, f_d, f_b)
    return dict(f_t=f_t, f_s=f_s, f_d=f_d, f_b=f_b, n_ok=n_ok, n_used=n_used, says_con=says_con)


def evaluate_generation(senders_a, receivers_a, senders_b, receivers_b,
                        mode=FitnessMode.H1, tmode=TransmissionMode.BINARY,
                        slope=None, with_records=False):
    """Evaluate all four populations for one generation.

    Populations may be genome lists or already-built networks. Returns a
    GenerationEvaluation with fitness tables, raw channels, and (when
    ``with_records``) one EvaluationRecord per decode.
    """
    mode = FitnessMode(mode)
    tmode = TransmissionMode(tmode)
    pops = {"A": (senders_a, receivers_a), "B": (senders_b, receivers_b)}
    sizes = {len(p) for pair in pops.values() for p in pair}
    if len(sizes) != 1:
        raise ValueError(f"all four populations must have equal size, got {sorted(sizes)}")
    n_pop = sizes.pop()

    nets = {sp: tuple(_networks(p, slope) for p in pair) for sp, pair in pops.items()}
    channels = {sp: np.stack([encode_all(net) for net in nets[sp][0]]) for sp in SPECIES}
    heard = {sp: transmit_array(channels[sp], tmode).reshape(-1, N_BANDS) for sp in SPECIES}
    msg_of = np.tile(MESSAGE_BITS, (n_pop, 1))
    n_own = n_pop * N_MESSAGES

    fitness, sid, bit, msg = {}, {}, {}, {}
    records = []
    for sp in SPECIES:
        other = SPECIES[1 - SPECIES.index(sp)]
        if mode is FitnessMode.H1:
            inputs = np.concatenate([heard[sp], heard[other]])
            messages = np.concatenate([msg_of, msg_of])
        else:
            inputs = heard[sp]
            messages = msg_of
        conspecific = np.arange(len(inputs)) < n_own
        if tmode is TransmissionMode.BINARY:
            # every receiver hears the same inputs; evaluate each distinct pattern once
            codes = inputs @ (2.0 ** np.arange(N_BANDS))
            _, first, inverse = np.unique(codes, return_index=True, return_inverse=True)
            distinct = inputs[first]
            outputs = np.stack([decode_batch(net, distinct)[inverse] for net in nets[sp][1]])
        else:
            outputs = np.stack([decode_batch(net, inputs) for net in nets[sp][1]])
        q = _score_block(outputs, conspecific, messages, mode)
        f_t = q["f_t"]

        fitness[("receiver", sp)] = f_t.mean(axis=1)
        own = f_t[:, :n_own].reshape(n_pop, n_pop, N_MESSAGES)
        fitness[("sender", sp)] = own.mean(axis=(0, 2))

        if q["says_con"] is None:
            sid[sp] = None
        else:
            sid[sp] = float((q["says_con"] == conspecific[None, :]).mean())
        n_ok_own = q["n_ok"][:, :n_own]
        bit[sp] = float(n_ok_own.mean() / N_BITS)
        msg[sp] = float((n_ok_own == N_BITS).mean())

        if with_records:
            records.extend(_records(sp, other, outputs, q, conspecific, n_own, mode))

    tables = FitnessTables(fitness, sid, bit, msg)
    return GenerationEvaluation(tables, channels, records)


def _networks(pop, slope):
    out = []
    for item in pop:
        if hasattr(item, "evaluation_order"):
            out.append(item)
        elif slope is None:
            out.append(build_network(item))
        else:
            out.append(build_network(item, slope))
    return out


def _records(sp, other, outputs, q, conspecific, n_own, mode):
    recs = []
    n_recv, n_sig, _ = outputs.shape
    for r in range(n_recv):
        for j in range(n_sig):
            own = bool(conspecific[j])
            sender = (j if own else j - n_own) // N_MESSAGES
            message = ALL_MESSAGES[j % N_MESSAGES]
            if mode is FitnessMode.H0:
                sid_ok = None
            else:
                sid_ok = bool(q["says_con"][r, j]) == own
            recs.append(EvaluationRecord(
                sender_species=sp if own else other,
                sender_index=int(sender),
                receiver_species=sp,
                receiver_index=r,
                message=message,
                decoded=DecodedOutput(tuple(float(v) for v in outputs[r, j])),
                species_id_correct=sid_ok,
                correct_bit_count=int(q["n_used"][r, j]),
                f_s=float(q["f_s"][r, j]),
                f_d=float(q["f_d"][r, j]),
                f_b=float(q["f_b"][r, j]),
                f_t=float(q["f_t"][r, j]),
            ))
    return recs
