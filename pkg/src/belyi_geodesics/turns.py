"""Turn words of cycles, their SL(2, Z) products, and geodesic lengths.

``L = [[1, 1], [0, 1]]`` and ``R = [[1, 0], [1, 1]]``. A closed path of turn
word ``w`` corresponds to a geodesic with ``2 cosh(length / 2) = tr(W_1 ... W_k)``.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

from .cycles import Cycle, cycle_in_graph, is_disconnecting
from .rotation_graph import RotationGraph


class TurnMatrix(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, o: TurnMatrix) -> TurnMatrix:  # type: ignore[override]
        return TurnMatrix(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )


IDENTITY = TurnMatrix(1, 0, 0, 1)
L = TurnMatrix(1, 1, 0, 1)
R = TurnMatrix(1, 0, 1, 1)


class TurnWord(str):
    """A non-empty word over ``{'L', 'R'}``."""

    def __new__(cls, letters: str) -> TurnWord:
        if not letters or set(letters) - {"L", "R"}:
            raise ValueError(f"turn word must be a non-empty string over L/R, got {letters!r}")
        return super().__new__(cls, letters)

    @property
    def trivial(self) -> bool:
        """All letters equal: the path circles a cusp."""
        return len(set(self)) == 1

    def swapped(self) -> TurnWord:
        return TurnWord(self.translate(str.maketrans("LR", "RL")))

    def reversed(self) -> TurnWord:
        return TurnWord(self[::-1])


def cycle_to_word(g: RotationGraph, c: Cycle) -> TurnWord:
    """``L`` at a vertex iff the out-stub follows the in-stub in the rotation.

    The word starts at the first pair of the canonical form.
    """
    if not cycle_in_graph(g, c):
        raise ValueError(f"cycle {c.label()} is not a cycle of this graph")
    succ = g.succ
    return TurnWord("".join("L" if succ[i] == o else "R" for i, o in c.stubs))


def word_to_matrix(w: str) -> TurnMatrix:
    a, b, c, d = 1, 0, 0, 1
    for ch in w:
        # right-multiplication by L or R
        if ch == "L":
            b, d = a + b, c + d
        elif ch == "R":
            a, c = a + b, c + d
        else:
            raise ValueError(f"bad letter {ch!r}")
    return TurnMatrix(a, b, c, d)


def length_from_trace(trace: float | int) -> float:
    """``2 arccosh(trace / 2)``; exact 0 at trace 2."""
    if trace < 2:
        raise ValueError(f"trace must be >= 2, got {trace}")
    if trace == 2:
        return 0.0
    if isinstance(trace, int) and trace > 2**52:
        # 2 arccosh(t/2) = 2 log t - 2/t^2 + ..., below double resolution here
        return 2.0 * math.log(trace)
    return 2.0 * math.acosh(trace / 2)


def geodesic_length(m: TurnMatrix | int | float) -> float:
    t = m.trace if isinstance(m, TurnMatrix) else m
    return length_from_trace(t)


class GeodesicClass(str, enum.Enum):
    NONTRIVIAL = "nontrivial"
    CUSP_TRIVIAL = "cusp_trivial"
    DISCONNECTING_TRIVIAL = "disconnecting_trivial"


def classify_geodesic(g: RotationGraph, c: Cycle) -> GeodesicClass:
    if cycle_to_word(g, c).trivial:
        return GeodesicClass.CUSP_TRIVIAL
    if is_disconnecting(g, c):
        return GeodesicClass.DISCONNECTING_TRIVIAL
    return GeodesicClass.NONTRIVIAL


def min_nontrivial_trace(k: int) -> int:
    """Least trace of a non-uniform word of length ``k`` (attained by ``L^(k-1) R``)."""
    if k < 2:
        raise ValueError("no non-uniform word of length < 2")
    return k + 1
