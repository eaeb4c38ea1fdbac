# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gaussian elimination over a prime field."""

from libc.stdlib cimport malloc, free

ctypedef long long i64


cdef i64 _inverse(i64 a, i64 p) nogil:
    cdef i64 t = 0, new_t = 1, r = p, new_r = a, q, tmp
    while new_r != 0:
        q = r // new_r
        tmp = t - q * new_t
        t = new_t
        new_t = tmp
        tmp = r - q * new_r
        r = new_r
        new_r = tmp
    if t < 0:
        t += p
    return t


cdef Py_ssize_t _eliminate(i64* a, Py_ssize_t nrows, Py_ssize_t ncols, i64 p) nogil:
    cdef Py_ssize_t rank = 0, col, r, j, pivot
    cdef i64 inv, f, tmp
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = -1
        for r in range(rank, nrows):
            if a[r * ncols + col] != 0:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for j in range(col, ncols):
                tmp = a[pivot * ncols + j]
                a[pivot * ncols + j] = a[rank * ncols + j]
                a[rank * ncols + j] = tmp
        inv = _inverse(a[rank * ncols + col], p)
        for j in range(col, ncols):
            a[rank * ncols + j] = (a[rank * ncols + j] * inv) % p
        for r in range(rank + 1, nrows):
            f = a[r * ncols + col]
            if f == 0:
                continue
            for j in range(col, ncols):
                a[r * ncols + j] = (a[r * ncols + j] - (f * a[rank * ncols + j]) % p + p) % p
        rank += 1
    return rank


def rank_mod_p(rows, Py_ssize_t ncols, i64 p):
    """Rank of an integer matrix (sequence of rows) modulo a prime ``p < 2**31``."""
    if p < 2 or p >= 2147483648:
        raise ValueError("compiled kernel needs 2 <= p < 2**31")
    cdef Py_ssize_t nrows = len(rows), i, j
    if nrows == 0 or ncols == 0:
        return 0
    cdef i64* a = <i64*> malloc(nrows * ncols * sizeof(i64))
    if a == NULL:
        raise MemoryError()
    try:
        for i in range(nrows):
            row = rows[i]
            if len(row) != ncols:
                raise ValueError(f"row {i} has length {len(row)}, expected {ncols}")
            for j in range(ncols):
                a[i * ncols + j] = <i64> (row[j] % p)
        with nogil:
            i = _eliminate(a, nrows, ncols, p)
        return i
    finally:
        free(a)
