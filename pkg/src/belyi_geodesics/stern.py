"""Stern sequence rows and exact moments of turn-matrix entries.

The top row ``(a, b)`` of the product over a word of length ``i`` runs through
the consecutive pairs of the Stern row started from ``(1, 0)``, so every sum
over rows below is also a sum over the ``2^i`` words. All moments are exact
``int`` or ``Fraction``; floats appear only in the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

ROW_CAP = 30
SQRT17 = math.sqrt(17)
CORRELATION_LIMIT = (51 - 11 * SQRT17) / (34 - 6 * SQRT17)


@dataclass(frozen=True)
class SternRow:
    step: int
    seed: tuple[int, int]
    values: np.ndarray  # 2^step + 1 entries

    def trimmed(self) -> np.ndarray:
        """Drop the zero endpoint contributed by a ``(x, 0)`` or ``(0, x)`` seed."""
        if self.seed[1] == 0:
            return self.values[:-1]
        if self.seed[0] == 0:
            return self.values[1:]
        return self.values


def stern_row(i: int, seed: tuple[int, int] = (1, 0)) -> SternRow:
    if not 0 <= i <= ROW_CAP:
        raise ValueError(f"step must be in [0, {ROW_CAP}], got {i}")
    a, b = seed
    if a < 0 or b < 0:
        raise ValueError("seed values must be nonnegative")
    # entries are bounded by (a + b) * Fibonacci(i + 1)
    bound = (a + b) * round(1.6181 ** (i + 2))
    dtype = np.int64 if bound < 2**62 else object
    row = np.array([a, b], dtype=dtype)
    for _ in range(i):
        nxt = np.empty(2 * len(row) - 1, dtype=dtype)
        nxt[0::2] = row
        nxt[1::2] = row[:-1] + row[1:]
        row = nxt
    return SternRow(i, (a, b), row)


def entry_mean(i: int) -> Fraction:
    """Mean diagonal entry over all words of length ``i``: ``(3^i + 1) / 2^(i+1)``."""
    if i < 0:
        raise ValueError("i must be >= 0")
    return Fraction(3**i + 1, 2 ** (i + 1))


def trace_mean(i: int) -> Fraction:
    if i < 0:
        raise ValueError("i must be >= 0")
    return Fraction(3**i + 1, 2**i)


# --- moment vector engine -------------------------------------------------

VARS = "abcd"
LINEAR = tuple(VARS)
QUADRATIC = tuple(VARS[p] + VARS[q] for p in range(4) for q in range(p, 4))
KEYS = LINEAR + QUADRATIC  # 4 + 10 tracked sums

# new entries as combinations of (a, b, c, d) after right-multiplying by L, R
_LIN_L = ((1, 0, 0, 0), (1, 1, 0, 0), (0, 0, 1, 0), (0, 0, 1, 1))
_LIN_R = ((1, 1, 0, 0), (0, 1, 0, 0), (0, 0, 1, 1), (0, 0, 0, 1))


def _substitution(lin: tuple[tuple[int, ...], ...]) -> list[list[int]]:
    idx = {k: n for n, k in enumerate(KEYS)}
    T = [[0] * len(KEYS) for _ in KEYS]
    for p in range(4):
        for q, coef in enumerate(lin[p]):
            T[idx[VARS[p]]][idx[VARS[q]]] += coef
    for p in range(4):
        for q in range(p, 4):
            row = T[idx[VARS[p] + VARS[q]]]
            for s in range(4):
                for t in range(4):
                    coef = lin[p][s] * lin[q][t]
                    if coef:
                        u, v = min(s, t), max(s, t)
                        row[idx[VARS[u] + VARS[v]]] += coef
    return T


TRANSFER = [
    [x + y for x, y in zip(rl, rr)] for rl, rr in zip(_substitution(_LIN_L), _substitution(_LIN_R))
]


@dataclass(frozen=True)
class MomentVector:
    """Exact sums over all ``2^step`` words of entries and their pairwise products."""

    step: int
    sums: tuple[int, ...]

    def __getitem__(self, key: str) -> int:
        return self.sums[KEYS.index(key)]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(KEYS, self.sums))

    @classmethod
    def identity(cls) -> MomentVector:
        vals = {"a": 1, "d": 1, "aa": 1, "ad": 1, "dd": 1}
        return cls(0, tuple(vals.get(k, 0) for k in KEYS))


def moment_vector_step(v: MomentVector) -> MomentVector:
    return MomentVector(v.step + 1, tuple(sum(t * x for t, x in zip(row, v.sums)) for row in TRANSFER))


_MOMENTS: list[MomentVector] = [MomentVector.identity()]


def moment_vector(i: int) -> MomentVector:
    if i < 0:
        raise ValueError("i must be >= 0")
    while len(_MOMENTS) <= i:
        _MOMENTS.append(moment_vector_step(_MOMENTS[-1]))
    return _MOMENTS[i]


# --- power sums, diagonal products, covariance ----------------------------


def power_sums(i: int) -> tuple[int, int]:
    """``(A(i), B(i))``: sum of squares and of neighbour products of the trimmed row.

    Iterates ``A' = 3A + 2B - 1``, ``B' = 2A + 2B - 1`` from ``A(1) = 2, B(1) = 1``.
    """
    if i < 1:
        raise ValueError("i must be >= 1")
    A, B = 2, 1
    for _ in range(i - 1):
        A, B = 3 * A + 2 * B - 1, 2 * A + 2 * B - 1
    return A, B


def power_sum_three_term(i: int) -> int:
    """``A(i) = 5 A(i-1) - 2 A(i-2) - 1`` from ``A(1) = 2, A(2) = 7``."""
    if i < 1:
        raise ValueError("i must be >= 1")
    prev, cur = 2, 7
    if i == 1:
        return prev
    for _ in range(i - 2):
        prev, cur = cur, 5 * cur - 2 * prev - 1
    return cur


def power_sum_closed_form(i: float) -> float:
    s = SQRT17
    num = 17 * 2**i * (-5 + s) + (5 + s) ** i * (-34 + 6 * s) + (5 - s) ** i * (-51 + 11 * s)
    return 2 ** (-i - 1) * num / (17 * (-5 + s))


def diag_product_sum(i: int) -> int:
    """``C(i)``: sum over all words of the product of the two diagonal entries."""
    if i < 1:
        raise ValueError("i must be >= 1")
    return moment_vector(i)["ad"]


def diag_product_closed_form(i: float) -> float:
    s = SQRT17
    return 2 ** (-i - 2) * (17 * 2 ** (2 * i + 1) - (-17 + s) * (5 + s) ** i + (5 - s) ** i * (17 + s)) / 17


def trace_covariance(i: int) -> Fraction:
    """Covariance of the two diagonal entries over uniformly random words."""
    if i < 1:
        raise ValueError("i must be >= 1")
    return Fraction(diag_product_sum(i), 2**i) - entry_mean(i) ** 2


def covariance_closed_form(i: float) -> float:
    s = SQRT17
    num = (
        17 * (-1 + 2 ** (2 * i + 1) - 2 * 3**i - 9**i)
        - (-17 + s) * (5 + s) ** i
        + (5 - s) ** i * (17 + s)
    )
    return num / (17 * 4 ** (i + 1))


def entry_variance(i: int) -> Fraction:
    v = moment_vector(i)
    return Fraction(v["dd"], 2**i) - entry_mean(i) ** 2


def trace_variance(i: int) -> Fraction:
    if i < 1:
        raise ValueError("i must be >= 1")
    v = moment_vector(i)
    second = Fraction(v["aa"] + 2 * v["ad"] + v["dd"], 2**i)
    return second - trace_mean(i) ** 2


def trace_variance_closed_form(i: float) -> float:
    s = SQRT17
    return 4 ** (-i) * (-1 + 2**i - 2 * 3**i + 4**i - 9**i + (5 - s) ** i + (5 + s) ** i)


def diagonal_correlation(i: int) -> float:
    """Correlation of the diagonal entries; both have the same variance."""
    var = entry_variance(i)
    if var == 0:
        return 0.0
    return float(trace_covariance(i) / var)


def covariance_sign_change(limit: int = 100) -> int:
    """First step at which the diagonal covariance turns positive."""
    for i in range(1, limit + 1):
        if trace_covariance(i) > 0:
            return i
    raise RuntimeError(f"covariance still non-positive at step {limit}")


def moment_table(steps: int) -> list[dict]:
    rows = []
    for i in range(1, steps + 1):
        rows.append(
            {
                "step": i,
                "mean": float(entry_mean(i)),
                "trace_mean": float(trace_mean(i)),
                "trace_variance": float(trace_variance(i)),
                "covariance": float(trace_covariance(i)),
                "correlation": diagonal_correlation(i),
            }
        )
    return rows
