"""Pure-Python graph kernels; same signatures as the compiled ``_kernels``.

Graphs are CSR arrays (``indptr``, ``indices``); ``alive`` is a 0/1 mask of
the vertices that take part in the computation.
"""

import numpy as np


def component_labels(indptr, indices, alive):
    """Label alive vertices by connected component, -1 for dead ones.

    Components are numbered in order of their smallest vertex.
    """
    ptr = indptr.tolist()
    nbr = indices.tolist()
    live = alive.tolist()
    V = len(live)
    labels = [-1] * V
    count = 0
    for root in range(V):
        if not live[root] or labels[root] >= 0:
            continue
        labels[root] = count
        stack = [root]
        while stack:
            v = stack.pop()
            for e in range(ptr[v], ptr[v + 1]):
                w = nbr[e]
                if live[w] and labels[w] < 0:
                    labels[w] = count
                    stack.append(w)
        count += 1
    return np.asarray(labels, dtype=np.int32)


def articulation_mask(indptr, indices, alive):
    """1 for every articulation point of the subgraph induced by ``alive``."""
    ptr = indptr.tolist()
    nbr = indices.tolist()
    live = alive.tolist()
    V = len(live)
    disc = [-1] * V
    low = [0] * V
    out = [0] * V
    t = 0
    for root in range(V):
        if not live[root] or disc[root] >= 0:
            continue
        disc[root] = low[root] = t
        t += 1
        root_children = 0
        # frames: (vertex, parent, next edge offset)
        stack = [[root, -1, ptr[root]]]
        while stack:
            frame = stack[-1]
            v, parent, e = frame
            end = ptr[v + 1]
            advanced = False
            while e < end:
                w = nbr[e]
                e += 1
                if not live[w] or w == parent:
                    continue
                if disc[w] < 0:
                    frame[2] = e
                    disc[w] = low[w] = t
                    t += 1
                    stack.append([w, v, ptr[w]])
                    advanced = True
                    break
                if disc[w] < low[v]:
                    low[v] = disc[w]
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                if low[v] < low[p]:
                    low[p] = low[v]
                if p == root:
                    root_children += 1
                elif low[v] >= disc[p]:
                    out[p] = 1
        if root_children >= 2:
            out[root] = 1
    return np.asarray(out, dtype=np.uint8)
