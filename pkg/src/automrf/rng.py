"""Deterministic random-stream management.

All stochastic code in this package draws from counter-based Philox
generators keyed by ``(seed, stream path)``.  Distinct paths give
statistically independent streams, so chains, inner samplers, tuning
pilots, and per-draw diagnostic workers can run concurrently without
sharing state while remaining bit-reproducible.
"""

from __future__ import annotations

from numpy.random import Generator, Philox, SeedSequence

# Stream namespaces.  Keep these stable: serialized runs reference them
# implicitly through the seed alone.
STREAM_CHAIN = 1
STREAM_INNER = 2
STREAM_TUNE = 3
STREAM_ACD = 4
STREAM_SIM = 5
STREAM_PREDICT = 6


def substream(seed: int, *path: int) -> Generator:
    """Return a Philox generator for the given seed and stream path.

    ``substream(seed, a, b)`` is independent of ``substream(seed, a, c)``
    for ``b != c`` and deterministic across platforms and processes.
    """
    return Generator(Philox(SeedSequence(seed, spawn_key=tuple(path))))
