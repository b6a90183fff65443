"""Edit-distance kernel selection.

Imports the compiled extension when present and falls back to the pure
Python implementation otherwise. `BACKEND` reports which one is active;
benchmarks/bench_editdist.py compares the two.
"""

from __future__ import annotations

try:
    from newstalk._editdist import levenshtein, levenshtein_within

    BACKEND = "c"
except ImportError:  # extension not built; functionally identical fallback
    from newstalk._editdist_py import levenshtein, levenshtein_within

    BACKEND = "python"

__all__ = ["BACKEND", "levenshtein", "levenshtein_within"]
