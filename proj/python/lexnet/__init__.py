"""Exact-arithmetic citation network analysis between two document hierarchies.

The heavy lifting lives in the compiled extension; this package re-exports
its surface. All masses and weights arrive as fractions.Fraction, never
floats, so equality checks are exact.
"""

from ._core import (
    Corpus,
    CorpusError,
    SynthError,
    generate,
    grid,
    rank_names,
)

__all__ = [
    "Corpus",
    "CorpusError",
    "SynthError",
    "generate",
    "grid",
    "rank_names",
]
