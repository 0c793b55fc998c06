"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and same algorithms; used when the extension is unavailable
or when ``COMPACTSEG_BACKEND=python`` is set.
"""
from collections import deque

import numpy as np


def convolve_sep(field, w):
    """Zero-padded 2-D convolution with the separable kernel ``outer(w, w)``."""
    field = np.asarray(field, dtype=np.float64)
    H, W = field.shape
    n = (len(w) - 1) // 2

    padded = np.zeros((H, W + 2 * n))
    padded[:, n:n + W] = field
    tmp = np.zeros((H, W))
    for k in range(2 * n + 1):
        tmp += w[k] * padded[:, k:k + W]

    padded = np.zeros((H + 2 * n, W))
    padded[n:n + H] = tmp
    out = np.zeros((H, W))
    for k in range(2 * n + 1):
        out += w[k] * padded[k:k + H]
    return out


def _levels(start, to, cap, s, eps):
    level = [-1] * (len(start) - 1)
    level[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        lu = level[u] + 1
        for a in range(start[u], start[u + 1]):
            v = to[a]
            if level[v] < 0 and cap[a] > eps:
                level[v] = lu
                queue.append(v)
    return level


def max_flow(start, to, rev, cap, s, t, eps):
    """Dinic max-flow on a CSR arc list; ``cap`` is overwritten with residuals."""
    start = start.tolist()
    to = to.tolist()
    rev = rev.tolist()
    res = cap.tolist()
    flow = 0.0

    while True:
        level = _levels(start, to, res, s, eps)
        if level[t] < 0:
            break
        it = start[:-1]
        path = []
        nodes = [s]
        v = s
        while True:
            if v == t:
                f = min(res[a] for a in path)
                cut = len(path)
                for i, a in enumerate(path):
                    res[a] -= f
                    res[rev[a]] += f
                    if cut == len(path) and res[a] <= eps:
                        cut = i
                flow += f
                del path[cut:]
                del nodes[cut + 1:]
                v = nodes[-1]
                continue
            end = start[v + 1]
            a = it[v]
            while a < end:
                w = to[a]
                if res[a] > eps and level[w] == level[v] + 1:
                    break
                a += 1
            it[v] = a
            if a < end:
                path.append(a)
                nodes.append(w)
                v = w
            else:
                level[v] = -1
                if not path:
                    break
                path.pop()
                nodes.pop()
                v = nodes[-1]
                it[v] += 1

    cap[:] = res
    return flow


def reachable(start, to, cap, s, eps):
    """Nodes reachable from ``s`` through arcs with residual above ``eps``."""
    nn = len(start) - 1
    seen = np.zeros(nn, dtype=np.uint8)
    seen[s] = 1
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for a in range(start[u], start[u + 1]):
            v = to[a]
            if not seen[v] and cap[a] > eps:
                seen[v] = 1
                queue.append(v)
    return seen
