"""Random oriented cubic multigraphs from the configuration model.

Vertex ``v`` owns the stubs ``3v, 3v+1, 3v+2``. A graph is a perfect matching
on the stubs plus a cyclic order (rotation) of the three stubs at every vertex.
Loops and parallel edges are kept.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

DEFAULT_SEED = 20240601


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed`` and an optional derived stream key.

    ``make_rng(seed, t)`` is the stream used for trial ``t``; streams with
    different keys are statistically independent (numpy ``SeedSequence``
    spawn keys), so trials can run in any order or process.
    """
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=stream)))


@dataclass(frozen=True)
class RotationGraph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    rotation: tuple[tuple[int, ...], ...]
    _mate: tuple[int, ...] | None = field(default=None, repr=False, compare=False)

    @property
    def stub_count(self) -> int:
        return 3 * self.vertex_count

    @cached_property
    def mate(self) -> tuple[int, ...]:
        """``mate[s]`` is the stub matched to ``s``."""
        if self._mate is not None:
            return self._mate
        m = [-1] * self.stub_count
        for a, b in self.edges:
            m[a] = b
            m[b] = a
        return tuple(m)

    @cached_property
    def succ(self) -> tuple[int, ...]:
        """Successor of each stub in its vertex rotation."""
        s = [-1] * self.stub_count
        for r in self.rotation:
            for k in range(len(r)):
                s[r[k]] = r[(k + 1) % len(r)]
        return tuple(s)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Vertex adjacency with multiplicity (a loop lists its vertex twice)."""
        mate = self.mate
        return tuple(
            tuple(mate[s] // 3 for s in range(3 * v, 3 * v + 3)) for v in range(self.vertex_count)
        )

    def faces(self) -> list[tuple[int, ...]]:
        """Orbits of ``succ o mate``: the left-turn boundary walks of the ribbon graph."""
        mate, succ = self.mate, self.succ
        seen = [False] * self.stub_count
        out = []
        for s0 in range(self.stub_count):
            if seen[s0]:
                continue
            orbit = []
            s = s0
            while not seen[s]:
                seen[s] = True
                orbit.append(s)
                s = succ[mate[s]]
            out.append(tuple(orbit))
        return out

    def genus(self) -> float:
        """Genus from Euler's formula, assuming the graph is connected."""
        n = self.vertex_count // 2
        return 1 + (n - len(self.faces())) / 2

    def flipped(self) -> RotationGraph:
        """Same matching with every rotation reversed."""
        return RotationGraph(
            self.vertex_count, self.edges, tuple((r[0], r[2], r[1]) for r in self.rotation)
        )

    @classmethod
    def from_vertex_edges(
        cls, vertex_count: int, pairs: list[tuple[int, int]], flips: list[int] | None = None
    ) -> RotationGraph:
        """Build from vertex pairs, assigning each vertex's stubs in edge order.

        ``flips[v] = 1`` reverses the default rotation ``(3v, 3v+1, 3v+2)``.
        """
        nxt = [3 * v for v in range(vertex_count)]
        edges = []
        for u, v in pairs:
            su = nxt[u]
            nxt[u] += 1
            sv = nxt[v]
            nxt[v] += 1
            edges.append((min(su, sv), max(su, sv)))
        flips = flips or [0] * vertex_count
        rotation = tuple(
            (3 * v, 3 * v + 2, 3 * v + 1) if flips[v] else (3 * v, 3 * v + 1, 3 * v + 2)
            for v in range(vertex_count)
        )
        return cls(vertex_count, tuple(sorted(edges)), rotation)

    def with_rotation(self, flips: list[int]) -> RotationGraph:
        rotation = tuple(
            (3 * v, 3 * v + 2, 3 * v + 1) if flips[v] else (3 * v, 3 * v + 1, 3 * v + 2)
            for v in range(self.vertex_count)
        )
        return RotationGraph(self.vertex_count, self.edges, rotation)

    def to_dict(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "edges": [list(e) for e in self.edges],
            "rotation": [list(r) for r in self.rotation],
        }

    @classmethod
    def from_dict(cls, data: dict) -> RotationGraph:
        return cls(
            int(data["vertex_count"]),
            tuple((int(a), int(b)) for a, b in data["edges"]),
            tuple(tuple(int(s) for s in r) for r in data["rotation"]),
        )

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), separators=(",", ":")) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> RotationGraph:
        return cls.from_dict(json.loads(Path(path).read_text()))


def sample_graph(n: int, seed: int = DEFAULT_SEED, *, rng: np.random.Generator | None = None) -> RotationGraph:
    """Oriented cubic multigraph on ``2n`` vertices.

    The matching pairs consecutive entries of a uniform shuffle of the ``6n``
    stubs, which is uniform over perfect matchings. Each vertex then gets one
    fair bit choosing between its two cyclic orders.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if rng is None:
        rng = make_rng(seed)
    perm = rng.permutation(6 * n)
    pairs = perm.reshape(-1, 2)
    pairs.sort(axis=1)
    edges = tuple(sorted(map(tuple, pairs.tolist())))
    mate = np.empty(6 * n, dtype=np.int64)
    mate[pairs[:, 0]] = pairs[:, 1]
    mate[pairs[:, 1]] = pairs[:, 0]
    bits = rng.integers(0, 2, size=2 * n)
    rotation = tuple(
        (3 * v, 3 * v + 1, 3 * v + 2) if b == 0 else (3 * v, 3 * v + 2, 3 * v + 1)
        for v, b in enumerate(bits.tolist())
    )
    return RotationGraph(2 * n, edges, rotation, tuple(mate.tolist()))


def degree_check(g: RotationGraph) -> bool:
    """True iff ``g`` is a well-formed oriented cubic multigraph."""
    V = g.vertex_count
    if not isinstance(V, int) or V <= 0 or V % 2:
        return False
    seen = [0] * (3 * V)
    for e in g.edges:
        if len(e) != 2:
            return False
        for s in e:
            if not 0 <= s < 3 * V:
                return False
            seen[s] += 1
    if any(c != 1 for c in seen):
        return False
    if len(g.rotation) != V:
        return False
    for v, r in enumerate(g.rotation):
        if len(r) != 3 or sorted(r) != [3 * v, 3 * v + 1, 3 * v + 2]:
            return False
    return True
