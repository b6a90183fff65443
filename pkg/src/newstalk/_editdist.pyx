# cython: boundscheck=False, wraparound=False
"""Compiled Levenshtein kernels; must match newstalk._editdist_py exactly."""

from libc.stdlib cimport free, malloc


def levenshtein(str a, str b):
    """Plain Levenshtein distance (unit insert/delete/substitute costs)."""
    if a == b:
        return 0
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    if la > lb:
        a, b = b, a
        la, lb = lb, la
    cdef int *prev = <int *> malloc((la + 1) * sizeof(int))
    cdef int *cur = <int *> malloc((la + 1) * sizeof(int))
    if prev == NULL or cur == NULL:
        free(prev)
        free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef int cost, val, tmp_v
    cdef Py_UCS4 cb
    cdef int *tmp
    try:
        for i in range(la + 1):
            prev[i] = <int> i
        for j in range(1, lb + 1):
            cb = b[j - 1]
            cur[0] = <int> j
            for i in range(1, la + 1):
                cost = 0 if a[i - 1] == cb else 1
                val = prev[i] + 1
                tmp_v = cur[i - 1] + 1
                if tmp_v < val:
                    val = tmp_v
                tmp_v = prev[i - 1] + cost
                if tmp_v < val:
                    val = tmp_v
                cur[i] = val
            tmp = prev
            prev = cur
            cur = tmp
        return prev[la]
    finally:
        free(prev)
        free(cur)


def levenshtein_within(str a, str b, int limit):
    """Levenshtein distance capped at `limit` (returns limit + 1 past it)."""
    if limit < 0:
        raise ValueError("limit must be >= 0")
    if a == b:
        return 0
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la - lb > limit or lb - la > limit:
        return limit + 1
    if la > lb:
        a, b = b, a
        la, lb = lb, la
    cdef int *prev = <int *> malloc((la + 1) * sizeof(int))
    cdef int *cur = <int *> malloc((la + 1) * sizeof(int))
    if prev == NULL or cur == NULL:
        free(prev)
        free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef int cost, val, tmp_v, row_min
    cdef Py_UCS4 cb
    cdef int *tmp
    try:
        for i in range(la + 1):
            prev[i] = <int> i
        for j in range(1, lb + 1):
            cb = b[j - 1]
            cur[0] = <int> j
            row_min = <int> j
            for i in range(1, la + 1):
                cost = 0 if a[i - 1] == cb else 1
                val = prev[i] + 1
                tmp_v = cur[i - 1] + 1
                if tmp_v < val:
                    val = tmp_v
                tmp_v = prev[i - 1] + cost
                if tmp_v < val:
                    val = tmp_v
                cur[i] = val
                if val < row_min:
                    row_min = val
            if row_min > limit:
                return limit + 1
            tmp = prev
            prev = cur
            cur = tmp
        return prev[la] if prev[la] <= limit else limit + 1
    finally:
        free(prev)
        free(cur)
