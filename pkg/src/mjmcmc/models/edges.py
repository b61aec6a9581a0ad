"""Edge index <-> node pair bijection.

Edges of a graph on ``p`` nodes are numbered lexicographically over pairs
``(i, j)`` with ``i < j``: (0,1), (0,2), ..., (0,p-1), (1,2), ...
"""

import numpy as np


def n_edges(p):
    return p * (p - 1) // 2


def edge_pairs(p):
    """(k, 2) array; row ``e`` is the pair of edge ``e``."""
    i, j = np.triu_indices(p, k=1)
    return np.column_stack([i, j])


def edge_index(i, j, p):
    if i == j or not (0 <= i < p and 0 <= j < p):
        raise ValueError(f"invalid pair ({i}, {j}) for p={p}")
    if i > j:
        i, j = j, i
    return i * p - i * (i + 1) // 2 + (j - i - 1)


def n_nodes(k):
    p = int(round((1 + np.sqrt(1 + 8 * k)) / 2))
    if n_edges(p) != k:
        raise ValueError(f"{k} is not a triangular edge count")
    return p


def adjacency(bits, p):
    a = np.zeros((p, p), dtype=np.uint8)
    i, j = np.triu_indices(p, k=1)
    a[i, j] = bits
    a[j, i] = bits
    return a


def edges_from_adjacency(a):
    a = np.asarray(a)
    return a[np.triu_indices(a.shape[0], k=1)].astype(np.uint8)
