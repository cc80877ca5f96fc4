# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; drop-in equivalents of ``relgrid._pykernels``."""

from libc.stdint cimport uint32_t

cdef extern from *:
    int __builtin_ctz(unsigned int) nogil

cdef enum:
    MAX_NODES = 16


def relation_matrix(const unsigned char[:] rows, const unsigned char[:] cols,
                    const unsigned char[:] colors, const unsigned char[:] shapes,
                    const unsigned char[:] sizes, const unsigned char[:] boxes):
    cdef Py_ssize_t n = rows.shape[0]
    cdef bytearray out = bytearray(n * n)
    cdef unsigned char[:] view = out
    cdef Py_ssize_t i, j
    cdef unsigned char m, s
    with nogil:
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                m = 0
                if not boxes[i] and not boxes[j]:
                    if rows[i] == rows[j]:
                        m |= 1
                    if cols[i] == cols[j]:
                        m |= 2
                if colors[i] == colors[j]:
                    m |= 4
                if shapes[i] == shapes[j]:
                    m |= 8
                if sizes[i] == sizes[j]:
                    m |= 16
                if boxes[j] and not boxes[i]:
                    s = sizes[j]
                    if rows[j] <= rows[i] < rows[j] + s and cols[j] <= cols[i] < cols[j] + s:
                        m |= 32
                view[i * n + j] = m
    return bytes(out)


cdef bint _extend(int i, int k, int n, const unsigned char[:] rel, uint32_t* cand,
                  int* parent, int* ebit, int* assign, uint32_t used) nogil:
    if i == k:
        return True
    cdef int p = assign[parent[i]] * n
    cdef int bit = ebit[i]
    cdef uint32_t m = cand[i] & ~used
    cdef uint32_t low
    cdef int x
    while m:
        low = m & (~m + 1)
        x = __builtin_ctz(m)
        m ^= low
        if rel[p + x] & bit:
            assign[i] = x
            if _extend(i + 1, k, n, rel, cand, parent, ebit, assign, used | low):
                return True
    return False


cdef int _load(cand, parent, ebit, uint32_t* c_cand, int* c_parent, int* c_ebit) except -1:
    cdef int k = len(cand)
    if k > MAX_NODES:
        raise ValueError("command graph too large for the compiled kernel")
    for i in range(k):
        c_cand[i] = cand[i]
        c_parent[i] = parent[i]
        c_ebit[i] = ebit[i]
    return k


def embed_roots(int n, const unsigned char[:] rel, cand, parent, ebit):
    if n > 32:
        raise ValueError("at most 32 world objects")
    cdef uint32_t c_cand[MAX_NODES]
    cdef int c_parent[MAX_NODES]
    cdef int c_ebit[MAX_NODES]
    cdef int assign[MAX_NODES]
    cdef int k = _load(cand, parent, ebit, c_cand, c_parent, c_ebit)
    cdef uint32_t roots = 0, m, low
    with nogil:
        m = c_cand[0]
        while m:
            low = m & (~m + 1)
            assign[0] = __builtin_ctz(m)
            m ^= low
            if _extend(1, k, n, rel, c_cand, c_parent, c_ebit, assign, low):
                roots |= low
    return roots


def find_witness(int n, const unsigned char[:] rel, cand, parent, ebit, int root):
    cdef uint32_t c_cand[MAX_NODES]
    cdef int c_parent[MAX_NODES]
    cdef int c_ebit[MAX_NODES]
    cdef int assign[MAX_NODES]
    cdef int k = _load(cand, parent, ebit, c_cand, c_parent, c_ebit)
    cdef bint found
    if not (c_cand[0] >> root) & 1:
        return None
    assign[0] = root
    with nogil:
        found = _extend(1, k, n, rel, c_cand, c_parent, c_ebit, assign, (<uint32_t>1) << root)
    if not found:
        return None
    return tuple(assign[i] for i in range(k))
