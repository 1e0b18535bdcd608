"""Short simple cycles of a rotation graph and how they meet.

A cycle is stored as its cyclic sequence of ``(in_stub, out_stub)`` pairs, one
per visited vertex, so parallel edges and loops are distinguished. The
canonical form is the lexicographically least flattening over all rotations
and both traversal directions.
"""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, TextIO

from .rotation_graph import RotationGraph

DEFAULT_EPS = 0.02


class CycleCapError(ValueError):
    """Requested cycle length exceeds the alpha cutoff."""


def alpha_cap(vertex_count: int, eps: float = DEFAULT_EPS) -> int:
    """Largest cycle length allowed on ``vertex_count`` vertices.

    alpha = (1 - eps) * log2(V): below it, pairs of cycles meeting in two or
    more components are asymptotically negligible.
    """
    if vertex_count < 2:
        return 0
    return math.floor((1 - eps) * math.log2(vertex_count) + 1e-12)


def check_cap(vertex_count: int, max_len: int, *, unsafe: bool = False, eps: float = DEFAULT_EPS) -> None:
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    cap = alpha_cap(vertex_count, eps)
    if max_len > cap and not unsafe:
        raise CycleCapError(
            f"max_len={max_len} exceeds the alpha cutoff {cap} = floor((1-{eps})*log2({vertex_count})); "
            "pass unsafe=True to override"
        )


def _canonical(flat: tuple[int, ...]) -> tuple[int, ...]:
    k = len(flat)
    rev = flat[::-1]
    best = flat
    for i in range(0, k, 2):
        for seq in (flat, rev):
            cand = seq[i:] + seq[:i]
            if cand < best:
                best = cand
    return best


@dataclass(frozen=True, order=True)
class Cycle:
    flat: tuple[int, ...]  # canonical (in0, out0, in1, out1, ...)

    @classmethod
    def from_out_stubs(cls, outs: Iterable[int], mate: tuple[int, ...]) -> Cycle:
        outs = tuple(outs)
        flat: list[int] = []
        k = len(outs)
        for t in range(k):
            flat.append(mate[outs[t - 1]])
            flat.append(outs[t])
        return cls(_canonical(tuple(flat)))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> Cycle:
        return cls(_canonical(tuple(s for pair in pairs for s in pair)))

    @property
    def length(self) -> int:
        return len(self.flat) // 2

    @property
    def stubs(self) -> tuple[tuple[int, int], ...]:
        f = self.flat
        return tuple((f[i], f[i + 1]) for i in range(0, len(f), 2))

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(self.flat[i] // 3 for i in range(0, len(self.flat), 2))

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        f, k = self.flat, len(self.flat)
        # edge t joins out_t and in_{t+1}
        return frozenset(
            (min(f[i + 1], f[(i + 2) % k]), max(f[i + 1], f[(i + 2) % k])) for i in range(0, k, 2)
        )

    def label(self) -> str:
        return "-".join(map(str, self.flat))


def _walks(g: RotationGraph, max_len: int) -> Iterator[tuple[int, ...]]:
    """Out-stub sequences of every simple closed walk, rooted at its least vertex.

    Each cycle is produced exactly twice, once per direction.
    """
    mate = g.mate
    path: list[int] = []
    on_path = [False] * g.vertex_count

    def extend(root: int, in_stub: int, depth: int) -> Iterator[tuple[int, ...]]:
        base = in_stub - in_stub % 3
        for o in (base, base + 1, base + 2):
            if o == in_stub:
                continue
            t = mate[o]
            w = t // 3
            if w == root:
                path.append(o)
                yield tuple(path)
                path.pop()
            elif w > root and depth < max_len and not on_path[w]:
                path.append(o)
                on_path[w] = True
                yield from extend(root, t, depth + 1)
                on_path[w] = False
                path.pop()

    for r in range(g.vertex_count):
        on_path[r] = True
        for s0 in (3 * r, 3 * r + 1, 3 * r + 2):
            t = mate[s0]
            w = t // 3
            if w == r:
                yield (s0,)
            elif w > r and max_len >= 2:
                path.append(s0)
                on_path[w] = True
                yield from extend(r, t, 2)
                on_path[w] = False
                path.pop()
        on_path[r] = False


def count_cycles(g: RotationGraph, max_len: int, *, unsafe: bool = False) -> list[int]:
    """``counts[i]`` = number of simple cycles of length ``i`` (index 0 unused)."""
    check_cap(g.vertex_count, max_len, unsafe=unsafe)
    counts = [0] * (max_len + 1)
    mate = g.mate
    V = g.vertex_count
    on_path = bytearray(V)

    # Same search as _walks without materializing paths.
    def extend(root: int, in_stub: int, depth: int) -> None:
        base = in_stub - in_stub % 3
        for o in (base, base + 1, base + 2):
            if o == in_stub:
                continue
            w = mate[o] // 3
            if w == root:
                counts[depth] += 1
            elif w > root and depth < max_len and not on_path[w]:
                on_path[w] = 1
                extend(root, mate[o], depth + 1)
                on_path[w] = 0

    for r in range(V):
        on_path[r] = 1
        for s0 in (3 * r, 3 * r + 1, 3 * r + 2):
            t = mate[s0]
            w = t // 3
            if w == r:
                counts[1] += 1
            elif w > r and max_len >= 2:
                on_path[w] = 1
                extend(r, t, 2)
                on_path[w] = 0
        on_path[r] = 0
    return [c // 2 for c in counts]


def enumerate_cycles(g: RotationGraph, max_len: int, *, unsafe: bool = False) -> set[Cycle]:
    """All distinct simple cycles of length <= ``max_len`` in canonical form."""
    check_cap(g.vertex_count, max_len, unsafe=unsafe)
    mate = g.mate
    return {Cycle.from_out_stubs(outs, mate) for outs in _walks(g, max_len)}


def cycle_in_graph(g: RotationGraph, c: Cycle) -> bool:
    mate = g.mate
    pairs = c.stubs
    k = len(pairs)
    for t, (i, o) in enumerate(pairs):
        if i == o or i // 3 != o // 3 or not 0 <= i < g.stub_count:
            return False
        if mate[o] != pairs[(t + 1) % k][0]:
            return False
    return len(set(c.vertices)) == k


class IntersectionProfile(NamedTuple):
    shared_edges: int
    components: int


def intersection_profile(c1: Cycle, c2: Cycle) -> IntersectionProfile:
    """Shared edge count ``j`` and component count ``p`` of ``c1 & c2``."""
    if c1 == c2:
        raise ValueError("intersection_profile needs two distinct cycles")
    verts = set(c1.vertices) & set(c2.vertices)
    shared = c1.edge_set & c2.edge_set
    parent = {v: v for v in verts}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in shared:
        ra, rb = find(a // 3), find(b // 3)
        if ra != rb:
            parent[ra] = rb
    return IntersectionProfile(len(shared), len({find(v) for v in verts}))


def _components(g: RotationGraph, allowed: set[int] | None, starts: Iterable[int]) -> list[set[int]]:
    nbrs = g.neighbors
    seen: set[int] = set()
    comps = []
    for s in starts:
        if s in seen or (allowed is not None and s not in allowed):
            continue
        comp = {s}
        seen.add(s)
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in nbrs[v]:
                if w not in seen and (allowed is None or w in allowed):
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        comps.append(comp)
    return comps


def is_disconnecting(g: RotationGraph, cycles: Cycle | Iterable[Cycle]) -> bool:
    """Does deleting the cycles' vertices split a connected component of ``g``?

    Only the components that contain the cycles are examined. A component
    that is consumed entirely counts as not disconnected.
    """
    if isinstance(cycles, Cycle):
        cycles = [cycles]
    removed = {v for c in cycles for v in c.vertices}
    if not removed:
        raise ValueError("is_disconnecting needs at least one cycle")
    for comp in _components(g, None, sorted(removed)):
        rest = comp - removed
        if len(_components(g, rest, sorted(rest))) >= 2:
            return True
    return False


def write_cycles_csv(out: TextIO, rows: Iterable[tuple[str, Cycle, bool]]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["graph_id", "length", "stubs", "disconnecting"])
    for gid, c, disc in rows:
        w.writerow([gid, c.length, c.label(), int(disc)])
