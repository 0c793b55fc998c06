# cython: language_level=3
"""Compiled inner loops: separable zero-padded convolution and Dinic max-flow.

Signatures mirror :mod:`compactseg._fallback` exactly; callers never touch this
module directly, they go through :mod:`compactseg._backend`.
"""
import numpy as np

from libc.math cimport INFINITY


def convolve_sep(const double[:, ::1] field, const double[::1] w):
    """Zero-padded 2-D convolution with the separable kernel ``outer(w, w)``.

    ``w`` must be symmetric with odd length, so convolution equals correlation.
    """
    cdef Py_ssize_t H = field.shape[0], W = field.shape[1]
    cdef Py_ssize_t n = (w.shape[0] - 1) // 2
    cdef Py_ssize_t i, j, k, lo, hi
    cdef double acc
    tmp_arr = np.empty((H, W), dtype=np.float64)
    out_arr = np.empty((H, W), dtype=np.float64)
    cdef double[:, ::1] tmp = tmp_arr
    cdef double[:, ::1] out = out_arr

    with nogil:
        for i in range(H):
            for j in range(W):
                lo = j - n
                if lo < 0:
                    lo = 0
                hi = j + n
                if hi > W - 1:
                    hi = W - 1
                acc = 0.0
                for k in range(lo, hi + 1):
                    acc = acc + w[k - j + n] * field[i, k]
                tmp[i, j] = acc
        for i in range(H):
            lo = i - n
            if lo < 0:
                lo = 0
            hi = i + n
            if hi > H - 1:
                hi = H - 1
            for j in range(W):
                out[i, j] = 0.0
            for k in range(lo, hi + 1):
                for j in range(W):
                    out[i, j] = out[i, j] + w[k - i + n] * tmp[k, j]
    return out_arr


cdef bint _bfs_levels(Py_ssize_t nn, Py_ssize_t s, Py_ssize_t t,
                      const long[::1] start, const long[::1] to,
                      double[::1] cap, long[::1] level, long[::1] queue,
                      double eps) noexcept nogil:
    cdef Py_ssize_t v, head, tail, a, u
    for v in range(nn):
        level[v] = -1
    level[s] = 0
    queue[0] = s
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        for a in range(start[u], start[u + 1]):
            v = to[a]
            if level[v] < 0 and cap[a] > eps:
                level[v] = level[u] + 1
                queue[tail] = v
                tail += 1
    return level[t] >= 0


def max_flow(const long[::1] start, const long[::1] to, const long[::1] rev,
             double[::1] cap, long s, long t, double eps):
    """Dinic max-flow on a CSR arc list; ``cap`` is overwritten with residuals.

    Returns the flow value.
    """
    cdef Py_ssize_t nn = start.shape[0] - 1
    cdef long[::1] level = np.empty(nn, dtype=np.int64)
    cdef long[::1] queue = np.empty(nn, dtype=np.int64)
    cdef long[::1] it = np.empty(nn, dtype=np.int64)
    cdef long[::1] path = np.empty(nn, dtype=np.int64)
    cdef long[::1] nodes = np.empty(nn + 1, dtype=np.int64)
    cdef Py_ssize_t depth, v, w, a, i, cut
    cdef double flow = 0.0, f
    cdef bint advanced

    with nogil:
        while _bfs_levels(nn, s, t, start, to, cap, level, queue, eps):
            for v in range(nn):
                it[v] = start[v]
            depth = 0
            nodes[0] = s
            v = s
            while True:
                if v == t:
                    f = INFINITY
                    for i in range(depth):
                        if cap[path[i]] < f:
                            f = cap[path[i]]
                    cut = depth
                    for i in range(depth):
                        a = path[i]
                        cap[a] -= f
                        cap[rev[a]] += f
                        if cut == depth and cap[a] <= eps:
                            cut = i
                    flow += f
                    depth = cut
                    v = nodes[depth]
                    continue
                advanced = False
                while it[v] < start[v + 1]:
                    a = it[v]
                    w = to[a]
                    if cap[a] > eps and level[w] == level[v] + 1:
                        advanced = True
                        break
                    it[v] += 1
                if advanced:
                    path[depth] = a
                    depth += 1
                    nodes[depth] = w
                    v = w
                else:
                    level[v] = -1
                    if depth == 0:
                        break
                    depth -= 1
                    v = nodes[depth]
                    it[v] += 1
    return flow


def reachable(const long[::1] start, const long[::1] to, const double[::1] cap,
              long s, double eps):
    """Nodes reachable from ``s`` through arcs with residual above ``eps``."""
    cdef Py_ssize_t nn = start.shape[0] - 1
    out_arr = np.zeros(nn, dtype=np.uint8)
    cdef unsigned char[::1] seen = out_arr
    cdef long[::1] queue = np.empty(nn, dtype=np.int64)
    cdef Py_ssize_t head = 0, tail = 1, u, v, a
    with nogil:
        queue[0] = s
        seen[s] = 1
        while head < tail:
            u = queue[head]
            head += 1
            for a in range(start[u], start[u + 1]):
                v = to[a]
                if not seen[v] and cap[a] > eps:
                    seen[v] = 1
                    queue[tail] = v
                    tail += 1
    return out_arr
