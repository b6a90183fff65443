"""Pure-Python Levenshtein kernels.

Reference implementation for the compiled extension and the fallback used
when it is not built. Both must return identical values for all inputs.
"""

from __future__ import annotations


def levenshtein(a: str, b: str) -> int:
    """Plain Levenshtein distance (unit insert/delete/substitute costs)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) > len(b):
        a, b = b, a
    prev = list(range(len(a) + 1))
    for j in range(1, len(b) + 1):
        cb = b[j - 1]
        cur = [j]
        for i in range(1, len(a) + 1):
            cost = 0 if a[i - 1] == cb else 1
            cur.append(min(prev[i] + 1, cur[i - 1] + 1, prev[i - 1] + cost))
        prev = cur
    return prev[-1]


def levenshtein_within(a: str, b: str, limit: int) -> int:
    """Levenshtein distance capped at `limit`.

    Returns the exact distance when it is <= limit, else limit + 1. Rows
    whose minimum already exceeds the cap abort early, which is where
    nearly all the time goes when scanning a large alias inventory.
    """
    if limit < 0:
        raise ValueError("limit must be >= 0")
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if abs(la - lb) > limit:
        return limit + 1
    if la > lb:
        a, b, la, lb = b, a, lb, la
    prev = list(range(la + 1))
    for j in range(1, lb + 1):
        cb = b[j - 1]
        cur = [j]
        row_min = j
        for i in range(1, la + 1):
            cost = 0 if a[i - 1] == cb else 1
            val = min(prev[i] + 1, cur[i - 1] + 1, prev[i - 1] + cost)
            cur.append(val)
            if val < row_min:
                row_min = val
        if row_min > limit:
            return limit + 1
        prev = cur
    return prev[la] if prev[la] <= limit else limit + 1
