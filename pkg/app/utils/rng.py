"""Seeded random streams.

Every random draw in the package comes from a Philox generator keyed by
``SeedSequence(seed, spawn_key=(module_id, party, crc32(purpose)))``. The
trial index is the seed, so a trial is reproducible from its index alone and
streams for different modules, parties and purposes never overlap.
"""
import zlib

import numpy as np

MODULE_IDS = {
    "synthetic": 0,
    "partition": 1,
    "anchor": 2,
    "obfuscation": 3,
    "attack": 4,
    "mlp": 5,
}


def stream(seed: int, module: str, party: int = 0, purpose: str = "") -> np.random.Generator:
    if module not in MODULE_IDS:
        raise KeyError(f"Unknown random stream module: {module}")
    spawn_key = (MODULE_IDS[module], int(party), zlib.crc32(purpose.encode("utf-8")))
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(seq))
