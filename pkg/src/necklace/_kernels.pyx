# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels; mirrors ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def component_labels(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices,
                     const cnp.uint8_t[::1] alive):
    cdef Py_ssize_t V = alive.shape[0]
    labels_arr = np.full(V, -1, dtype=np.int32)
    stack_arr = np.empty(max(V, 1), dtype=np.int32)
    cdef cnp.int32_t[::1] labels = labels_arr
    cdef cnp.int32_t[::1] stack = stack_arr
    cdef Py_ssize_t root, top, v, w
    cdef cnp.int64_t e
    cdef int count = 0
    with nogil:
        for root in range(V):
            if not alive[root] or labels[root] >= 0:
                continue
            labels[root] = count
            stack[0] = <cnp.int32_t>root
            top = 1
            while top > 0:
                top -= 1
                v = stack[top]
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    if alive[w] and labels[w] < 0:
                        labels[w] = count
                        stack[top] = <cnp.int32_t>w
                        top += 1
            count += 1
    return labels_arr


def articulation_mask(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices,
                      const cnp.uint8_t[::1] alive):
    cdef Py_ssize_t V = alive.shape[0]
    n = max(V, 1)
    disc_arr = np.full(n, -1, dtype=np.int32)
    low_arr = np.zeros(n, dtype=np.int32)
    out_arr = np.zeros(V, dtype=np.uint8)
    sv_arr = np.empty(n, dtype=np.int32)
    sp_arr = np.empty(n, dtype=np.int32)
    se_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int32_t[::1] disc = disc_arr
    cdef cnp.int32_t[::1] low = low_arr
    cdef cnp.uint8_t[::1] out = out_arr
    cdef cnp.int32_t[::1] sv = sv_arr
    cdef cnp.int32_t[::1] sp = sp_arr
    cdef cnp.int64_t[::1] se = se_arr
    cdef Py_ssize_t root, top, v, w, p, parent
    cdef cnp.int64_t e, end
    cdef int t = 0, root_children
    cdef bint advanced
    with nogil:
        for root in range(V):
            if not alive[root] or disc[root] >= 0:
                continue
            disc[root] = t
            low[root] = t
            t += 1
            root_children = 0
            sv[0] = <cnp.int32_t>root
            sp[0] = -1
            se[0] = indptr[root]
            top = 1
            while top > 0:
                v = sv[top - 1]
                parent = sp[top - 1]
                e = se[top - 1]
                end = indptr[v + 1]
                advanced = False
                while e < end:
                    w = indices[e]
                    e += 1
                    if not alive[w] or w == parent:
                        continue
                    if disc[w] < 0:
                        se[top - 1] = e
                        disc[w] = t
                        low[w] = t
                        t += 1
                        sv[top] = <cnp.int32_t>w
                        sp[top] = <cnp.int32_t>v
                        se[top] = indptr[w]
                        top += 1
                        advanced = True
                        break
                    if disc[w] < low[v]:
                        low[v] = disc[w]
                if advanced:
                    continue
                top -= 1
                if top > 0:
                    p = sv[top - 1]
                    if low[v] < low[p]:
                        low[p] = low[v]
                    if p == root:
                        root_children += 1
                    elif low[v] >= disc[p]:
                        out[p] = 1
            if root_children >= 2:
                out[root] = 1
    return out_arr
