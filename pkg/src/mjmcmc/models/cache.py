"""Thread-safe LRU cache keyed by (node, neighbour set)."""

import threading
from collections import OrderedDict

import numpy as np

DEFAULT_CAPACITY = 1_000_000


def neighbourhood_key(node, neighbours):
    return node, np.asarray(neighbours, dtype=np.int32).tobytes()


class NodeCache:
    """Values only, never insertion order, leak out of the cache."""

    def __init__(self, capacity=DEFAULT_CAPACITY, enabled=True):
        self.capacity = int(capacity)
        self.enabled = enabled and self.capacity > 0
        self._data = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get_or_compute(self, key, compute):
        if not self.enabled:
            return compute()
        with self._lock:
            value = self._data.get(key)
            if value is not None:
                self._data.move_to_end(key)
                self.hits += 1
                return value
        value = compute()
        with self._lock:
            self.misses += 1
            self._data[key] = value
            if len(self._data) > self.capacity:
                self._data.popitem(last=False)
        return value

    def __contains__(self, key):
        with self._lock:
            return key in self._data

    def __len__(self):
        return len(self._data)

    def clear(self):
        with self._lock:
            self._data.clear()
