"""Counter-based random streams.

Every uniform consumed by a sampler has a fixed address: draw ``i`` of
iteration ``s`` on a named stream is word ``(s - 1) * width + i`` of a
Philox stream keyed by ``(seed, stream)``. Values therefore never depend on
evaluation order, block size or thread count.
"""

import numpy as np
from numpy.random import Generator, Philox

FLIPS = 0
ACCEPT = 1
CAP = 2
BD_EVENTS = 3

_WORDS_PER_COUNTER = 4


def _key(seed, stream):
    seed = int(seed)
    if seed < 0 or seed >= 1 << 64:
        raise ValueError("seed must be in [0, 2**64)")
    return seed | (int(stream) << 64)


class CounterStream:
    """Uniform draws addressed by (iteration, index) for a fixed width."""

    def __init__(self, seed, stream, width):
        if width < 1:
            raise ValueError("width must be positive")
        self.seed = int(seed)
        self.stream = int(stream)
        self.width = int(width)
        self._key = _key(seed, stream)

    def block(self, s_start, n_iter):
        """Uniforms for iterations ``s_start .. s_start + n_iter - 1``, shape (n_iter, width)."""
        if s_start < 1:
            raise ValueError("iterations are numbered from 1")
        offset = (s_start - 1) * self.width
        bitgen = Philox(key=self._key)
        bitgen.advance(offset // _WORDS_PER_COUNTER)
        gen = Generator(bitgen)
        skip = offset % _WORDS_PER_COUNTER
        if skip:
            gen.random(skip)
        return gen.random(n_iter * self.width).reshape(n_iter, self.width)

    def uniform(self, s, i):
        return float(self.block(s, 1)[0, i])


class BlockedUniforms:
    """Sequential reader over a :class:`CounterStream`, fetching blocks lazily."""

    def __init__(self, stream, block_iters=4096):
        self._stream = stream
        self._block_iters = max(1, int(block_iters))
        self._start = None
        self._buf = None

    def row(self, s):
        if self._buf is None or not (self._start <= s < self._start + len(self._buf)):
            self._start = s
            self._buf = self._stream.block(s, self._block_iters)
        return self._buf[s - self._start]


def iteration_generator(seed, stream, s):
    """Fresh generator owned by iteration ``s`` of ``stream`` (for variable-size draws)."""
    return Generator(Philox(key=_key(seed, stream), counter=[0, 0, 0, int(s)]))
