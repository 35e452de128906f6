"""Named, decorrelated random streams derived from a single master seed.

Every stream is a Philox (counter-based) generator keyed by the master seed
plus a spawn key built from the stream's name, so streams never depend on the
order in which they are requested.
"""

import zlib

import numpy as np


def _key(name):
    return zlib.crc32(name.encode("utf-8"))


def stream(seed, *names):
    """Return a generator for the sub-stream ``names`` of master ``seed``."""
    spawn_key = tuple(_key(str(n)) for n in names)
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(ss))
