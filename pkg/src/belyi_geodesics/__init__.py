"""Short geodesics on random surfaces built from oriented cubic graphs."""

__version__ = "0.1.0"

from .rotation_graph import RotationGraph, degree_check, make_rng, sample_graph  # noqa: E402
from .turns import TurnMatrix, TurnWord, cycle_to_word, geodesic_length, word_to_matrix  # noqa: E402

__all__ = [
    "RotationGraph",
    "TurnMatrix",
    "TurnWord",
    "cycle_to_word",
    "degree_check",
    "geodesic_length",
    "make_rng",
    "sample_graph",
    "word_to_matrix",
]
