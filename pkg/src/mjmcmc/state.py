"""Binary model states.

A model is a fixed-length vector of 0/1 values. Samplers work on raw
``uint8`` arrays internally; :class:`BinaryModel` is the public, immutable
wrapper. For small spaces a state can be bit-packed into an integer code
with element ``i`` stored in bit ``i``.
"""

import numpy as np


class BinaryModel:
    __slots__ = ("_bits",)

    def __init__(self, bits):
        arr = np.asarray(bits)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("a binary model needs a non-empty 1-d bit vector")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("model entries must be 0 or 1")
        self._bits = arr.astype(np.uint8)
        self._bits.setflags(write=False)

    @classmethod
    def zeros(cls, k):
        return cls(np.zeros(k, dtype=np.uint8))

    @classmethod
    def from_code(cls, code, k):
        return cls(unpack(code, k))

    @property
    def bits(self):
        return self._bits

    @property
    def k(self):
        return self._bits.size

    def __len__(self):
        return self._bits.size

    def __getitem__(self, i):
        return int(self._bits[i])

    def flip(self, i):
        """Return the model with element(s) ``i`` switched."""
        out = self._bits.copy()
        out[i] ^= 1
        return BinaryModel(out)

    def hamming(self, other):
        other = other.bits if isinstance(other, BinaryModel) else np.asarray(other)
        if other.shape != self._bits.shape:
            raise ValueError("models have different lengths")
        return int(np.count_nonzero(self._bits != other))

    def differing(self, other):
        other = other.bits if isinstance(other, BinaryModel) else np.asarray(other)
        return np.flatnonzero(self._bits != other)

    def code(self):
        return pack(self._bits)

    def __eq__(self, other):
        if not isinstance(other, BinaryModel):
            return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash(self._bits.tobytes())

    def __repr__(self):
        return f"BinaryModel({''.join(map(str, self._bits.tolist()))})"


def as_bits(m):
    """Return a writable uint8 copy of ``m`` (BinaryModel or array-like)."""
    if isinstance(m, BinaryModel):
        return m.bits.copy()
    return np.asarray(m, dtype=np.uint8).copy()


_POWERS = 1 << np.arange(62, dtype=np.int64)


def pack(bits):
    bits = np.asarray(bits)
    if bits.size > 62:
        raise ValueError("bit packing is limited to k <= 62")
    return int(_POWERS[:bits.size] @ bits)


def unpack(code, k):
    return ((int(code) >> np.arange(k)) & 1).astype(np.uint8)


def all_states(k):
    """(2**k, k) matrix of every state, row ``c`` holding code ``c``."""
    codes = np.arange(1 << k, dtype=np.int64)
    return ((codes[:, None] >> np.arange(k)) & 1).astype(np.uint8)
