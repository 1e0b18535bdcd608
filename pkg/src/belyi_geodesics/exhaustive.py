"""Brute-force enumeration of all 2^N turn-word products with numpy.

Words are in lexicographic order with ``L < R`` (word index read as a binary
number, first letter most significant, ``L = 0``).
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

MAX_ARRAY_BITS = 20  # 2^20 words per chunk


def word_matrices(N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Entry arrays ``(a, b, c, d)`` of all ``2^N`` products, int64."""
    if not 0 <= N <= 24:
        raise ValueError(f"N must be in [0, 24], got {N}")
    a = np.ones(1, dtype=np.int64)
    b = np.zeros(1, dtype=np.int64)
    c = np.zeros(1, dtype=np.int64)
    d = np.ones(1, dtype=np.int64)
    for _ in range(N):
        ab, cd = a + b, c + d
        # children (M L, M R) interleaved
        a = np.stack([a, ab], axis=1).ravel()
        c = np.stack([c, cd], axis=1).ravel()
        b = np.stack([ab, b], axis=1).ravel()
        d = np.stack([cd, d], axis=1).ravel()
    return a, b, c, d


def iter_traces(N: int, chunk_bits: int = MAX_ARRAY_BITS) -> Iterator[np.ndarray]:
    """Traces of all ``2^N`` words in order, in chunks of ``2^min(N, chunk_bits)``."""
    if N < 0:
        raise ValueError("N must be >= 0")
    m = min(N, chunk_bits)
    sa, sb, sc, sd = word_matrices(m)
    head = N - m
    for p in range(2**head):
        pa, pb, pc, pd = 1, 0, 0, 1
        for j in range(head - 1, -1, -1):
            if (p >> j) & 1:
                pa, pc = pa + pb, pc + pd
            else:
                pb, pd = pa + pb, pc + pd
        yield pa * sa + pb * sc + pc * sb + pd * sd


def uniform_word_indices(N: int) -> tuple[int, int]:
    return 0, 2**N - 1
