"""Named random substreams derived from a single experiment seed.

Every stochastic stage (thermal noise, phase-noise paths, frame symbols)
draws from its own labeled substream, so adding or removing one consumer
never perturbs the draws seen by the others.
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream(seed: int, *labels: str) -> np.random.Generator:
    """Return a Generator for the substream identified by ``labels``.

    The mapping (seed, labels) -> stream is stable across runs and
    independent of the order in which substreams are created.
    """
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for label in labels:
        digest = hashlib.sha256(label.encode("utf-8")).digest()
        words.append(int.from_bytes(digest[:8], "little"))
    return np.random.default_rng(np.random.SeedSequence(words))
