"""Systole expectation series, entry growth-rate bounds and the length window."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .exhaustive import iter_traces, word_matrices

Weight = Literal["printed", "alternative"]
Conditioning = Literal["all", "exclude_uniform"]

UPPER_KMAX = 60
LOWER_KMAX = 20
LOWER_KMAX_CAP = 24
GROWTH_BLOCK_CAP = 20
REFERENCE_GROWTH_5 = 1.35502
REFERENCE_GROWTH_15 = 1.43925


def cycle_mean(k: int) -> float:
    """Poisson mean of the number of k-cycles, ``2^k / (2k)``."""
    return 2**k / (2 * k)


def nontrivial_fraction(k: int, weight: Weight = "printed") -> float:
    if weight == "printed":
        return (2 ** (k - 2) - 1) / 2 ** (k - 2)
    if weight == "alternative":
        return (2**k - 2) / 2**k
    raise ValueError(f"unknown weight {weight!r}")


def p_k(k: int, weight: Weight = "printed") -> float:
    """Probability that some k-cycle yields a nontrivial geodesic."""
    return nontrivial_fraction(k, weight) * -math.expm1(-cycle_mean(k))


@dataclass(frozen=True)
class SystoleSeriesTerm:
    k: int
    p: float
    survival: float  # prod_{j<k} (1 - p(j))
    length_term: float

    @property
    def weight(self) -> float:
        return self.p * self.survival

    @property
    def contribution(self) -> float:
        return self.weight * self.length_term


def _series(length_terms: dict[int, float], weight: Weight) -> list[SystoleSeriesTerm]:
    terms = []
    survival = 1.0
    for k in sorted(length_terms):
        p = p_k(k, weight)
        terms.append(SystoleSeriesTerm(k, p, survival, length_terms[k]))
        survival *= 1.0 - p
    return terms


def mean_trace_length(k: int) -> float:
    """``2 arccosh(E tr / 2)`` with ``E tr = (3^k + 1) / 2^k``."""
    return 2.0 * math.acosh((3**k + 1) / 2 ** (k + 1))


@dataclass(frozen=True)
class SeriesResult:
    terms: list[SystoleSeriesTerm]
    remainder: float

    @property
    def partial_sums(self) -> list[float]:
        return list(np.cumsum([t.contribution for t in self.terms]))

    @property
    def value(self) -> float:
        return math.fsum(t.contribution for t in self.terms)

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"k": t.k, "p": t.p, "survival": t.survival, "length_term": t.length_term,
                 "contribution": t.contribution}
                for t in self.terms
            ],
            "partial_sums": [float(x) for x in self.partial_sums],
            "remainder": self.remainder,
            "value": self.value,
        }


def _upper_tail(k_max: int, weight: Weight, extra: int = 40) -> float:
    """Sum of the upper-series terms past ``k_max`` (they decay doubly exponentially).

    By concavity this also bounds the tail of the lower series.
    """
    terms = _series({k: mean_trace_length(k) for k in range(2, k_max + extra + 1)}, weight)
    return math.fsum(t.contribution for t in terms if t.k > k_max)


def systole_upper_series(k_max: int = UPPER_KMAX, weight: Weight = "printed") -> SeriesResult:
    if k_max < 3:
        raise ValueError("k_max must be >= 3")
    terms = _series({k: mean_trace_length(k) for k in range(2, k_max + 1)}, weight)
    return SeriesResult(terms, _upper_tail(k_max, weight))


def systole_upper(k_max: int = UPPER_KMAX, weight: Weight = "printed") -> float:
    return systole_upper_series(k_max, weight).value


def mean_word_length(k: int, conditioning: Conditioning = "all") -> float:
    """Exhaustive mean of ``2 arccosh(tr / 2)`` over words of length ``k``.

    ``"all"`` averages over every word, so uniform words add length 0.
    ``"exclude_uniform"`` averages over the ``2^k - 2`` non-uniform words.
    """
    if not 1 <= k <= LOWER_KMAX_CAP:
        raise ValueError(f"k must be in [1, {LOWER_KMAX_CAP}], got {k}")
    total = math.fsum(float(np.sum(2.0 * np.arccosh(t / 2.0))) for t in iter_traces(k))
    if conditioning == "all":
        return total / 2**k
    if conditioning == "exclude_uniform":
        # the two uniform words have trace 2 and length 0
        return total / (2**k - 2) if k > 1 else 0.0
    raise ValueError(f"unknown conditioning {conditioning!r}")


def systole_lower_series(
    k_max: int = LOWER_KMAX, weight: Weight = "printed", conditioning: Conditioning = "all"
) -> SeriesResult:
    if not 2 <= k_max <= LOWER_KMAX_CAP:
        raise ValueError(f"k_max must be in [2, {LOWER_KMAX_CAP}]")
    terms = _series({k: mean_word_length(k, conditioning) for k in range(2, k_max + 1)}, weight)
    return SeriesResult(terms, _upper_tail(k_max, weight))


def systole_lower(
    k_max: int = LOWER_KMAX, weight: Weight = "printed", conditioning: Conditioning = "all"
) -> float:
    return systole_lower_series(k_max, weight, conditioning).value


# --- growth of the tracked diagonal entry ---------------------------------


@dataclass(frozen=True)
class GrowthBound:
    block: int
    factor: float
    method: Literal["paper_radical", "enumerated"]


def block_multipliers(b: int) -> tuple[np.ndarray, np.ndarray]:
    """Guaranteed multipliers of the right entry of a pair over each of the ``2^b`` blocks.

    A block maps the pair ``(x, y)`` to one whose right entry is ``p x + q y``.
    Over ``x < y`` the ratio to ``y`` can be as small as ``q``; over ``x > y`` it
    is at least ``p + q``. Returns ``(q, p + q)`` per word.
    """
    if not 1 <= b <= GROWTH_BLOCK_CAP:
        raise ValueError(f"block size must be in [1, {GROWTH_BLOCK_CAP}], got {b}")
    # the pair is the top row of the product; (p, q) is its second column
    _, p, _, q = word_matrices(b)
    return q, p + q


def growth_lower_bound(b: int) -> GrowthBound:
    """Per-step geometric-mean growth guaranteed over blocks of ``b`` turns.

    Both order states of the pair are weighted 1/2.
    """
    lo, hi = block_multipliers(b)
    log_sum = math.fsum(np.log(lo.astype(float))) + math.fsum(np.log(hi.astype(float)))
    return GrowthBound(b, math.exp(log_sum / (2 * 2**b * b)), "enumerated")


def block_multiplier_product(b: int) -> int:
    """Exact product of all ``2^(b+1)`` guaranteed multipliers."""
    lo, hi = block_multipliers(b)
    return math.prod(int(x) for x in lo) * math.prod(int(x) for x in hi)


def paper_radical_value() -> float:
    return (
        2 ** (37 / 320) * 3 ** (1 / 16) * 5 ** (3 / 80) * 7 ** (1 / 40) * 11 ** (1 / 80) * 13 ** (1 / 160)
    )


def length_window(N: int) -> tuple[float, float]:
    """Asymptotic ``(N log 1.43925, N log 1.5)`` window for mean length.

    Finite-N means need not lie inside it.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    return N * math.log(REFERENCE_GROWTH_15), N * math.log(1.5)
