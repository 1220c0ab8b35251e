"""Seeded random streams.

Every run gets a private Philox stream derived from a master seed and an
integer key path, so replication ``r`` of cell ``c`` can be regenerated in
isolation and in any order.
"""

from __future__ import annotations

import numpy as np


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Return an independent counter-based generator for ``key``.

    Args:
        master_seed: Experiment-wide seed.
        *key: Integer path identifying the stream, e.g. ``(cell, replication)``.

    Returns:
        A ``numpy.random.Generator`` backed by Philox.
    """
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))
