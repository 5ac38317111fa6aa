# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled enumeration kernels; same contracts as ``_purepy``."""

from libc.stdlib cimport malloc, free


cpdef bint is_preorder(tuple rows):
    cdef Py_ssize_t n = len(rows), i, j
    cdef unsigned long long r
    cdef unsigned long long buf[64]
    if n > 64:
        raise ValueError("at most 64 points")
    for i in range(n):
        buf[i] = rows[i]
    for i in range(n):
        r = buf[i]
        if not (r >> i) & 1:
            return False
        for j in range(n):
            if (r >> j) & 1 and (buf[j] & ~r):
                return False
    return True


def enumerate_preorders(int n):
    cdef int npairs = n * (n - 1), k, i, j, ok
    cdef unsigned long long pattern, total, r
    cdef unsigned long long rows[8]
    cdef int pi[56]
    cdef int pj[56]
    if n > 8:
        raise ValueError("at most 8 points")
    k = 0
    for i in range(n):
        for j in range(n):
            if i != j:
                pi[k] = i
                pj[k] = j
                k += 1
    out = []
    total = 1ULL << npairs
    pattern = 0
    while pattern < total:
        for i in range(n):
            rows[i] = 1ULL << i
        for k in range(npairs):
            if (pattern >> k) & 1:
                rows[pi[k]] |= 1ULL << pj[k]
        ok = 1
        for i in range(n):
            r = rows[i]
            for j in range(n):
                if (r >> j) & 1 and (rows[j] & ~r):
                    ok = 0
                    break
            if not ok:
                break
        if ok:
            out.append(tuple([rows[i] for i in range(n)]))
        pattern += 1
    return out


def monotone_maps(tuple dom, tuple cod, long limit=-1):
    cdef Py_ssize_t n = len(dom), m = len(cod), i, k, v, w
    cdef unsigned long long *d = <unsigned long long *> malloc(max(n, 1) * sizeof(unsigned long long))
    cdef unsigned long long *c = <unsigned long long *> malloc(max(m, 1) * sizeof(unsigned long long))
    cdef long *table = <long *> malloc(max(n, 1) * sizeof(long))
    cdef int good
    out = []
    try:
        for i in range(n):
            d[i] = dom[i]
        for i in range(m):
            c[i] = cod[i]
        if n == 0:
            return [()]
        if m == 0:
            return []
        # iterative backtracking; table[i] = candidate value at depth i
        i = 0
        table[0] = -1
        while i >= 0:
            table[i] += 1
            if table[i] >= m:
                i -= 1
                continue
            v = table[i]
            good = 1
            for k in range(i):
                w = table[k]
                if (d[k] >> i) & 1 and not (c[w] >> v) & 1:
                    good = 0
                    break
                if (d[i] >> k) & 1 and not (c[v] >> w) & 1:
                    good = 0
                    break
            if not good:
                continue
            if i == n - 1:
                out.append(tuple([table[k] for k in range(n)]))
                if limit >= 0 and len(out) > limit:
                    break
            else:
                i += 1
                table[i] = -1
        return out
    finally:
        free(d)
        free(c)
        free(table)
