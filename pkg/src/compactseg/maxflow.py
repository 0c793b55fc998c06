"""Exact binary labeling on a 4-connected grid by s-t minimum cut.

Minimizes ``sum_x D(x) u(x) + sum_{x~y} w_xy |u(x) - u(y)|`` over binary ``u``
for nonnegative pairwise weights. The max-flow itself (Dinic, an
augmenting-path method on level graphs) runs in the compiled kernel when it is
available.
"""
import numpy as np

from . import _backend


def grid_graph(unary, w_h, w_v):
    """CSR arc arrays for the grid labeling problem.

    Returns ``(start, to, rev, cap, source, sink)``. Node ``i * W + j`` is pixel
    ``(i, j)``; the source side of the cut is label 1.
    """
    unary = np.asarray(unary, dtype=np.float64)
    H, W = unary.shape
    N = H * W
    s, t = N, N + 1
    w_h = np.broadcast_to(np.asarray(w_h, dtype=np.float64), (H, W - 1))
    w_v = np.broadcast_to(np.asarray(w_v, dtype=np.float64), (H - 1, W))
    if (w_h < 0).any() or (w_v < 0).any():
        raise ValueError("pairwise weights must be nonnegative")

    ids = np.arange(N, dtype=np.int64).reshape(H, W)
    d = unary.ravel()
    neg = np.flatnonzero(d < 0)
    pos = np.flatnonzero(d > 0)

    # one entry per arc pair: forward capacity and reverse capacity
    tails = np.concatenate([ids[:, :-1].ravel(), ids[:-1, :].ravel(), np.full(neg.size, s), pos])
    heads = np.concatenate([ids[:, 1:].ravel(), ids[1:, :].ravel(), neg, np.full(pos.size, t)])
    fwd = np.concatenate([w_h.ravel(), w_v.ravel(), -d[neg], d[pos]])
    bwd = np.concatenate([w_h.ravel(), w_v.ravel(), np.zeros(neg.size), np.zeros(pos.size)])

    P = tails.size
    arc_tail = np.concatenate([tails, heads])
    arc_head = np.concatenate([heads, tails])
    arc_cap = np.concatenate([fwd, bwd])
    arc_rev = np.concatenate([np.arange(P, 2 * P), np.arange(P)])

    order = np.argsort(arc_tail, kind="stable")
    where = np.empty_like(order)
    where[order] = np.arange(order.size)
    start = np.zeros(N + 3, dtype=np.int64)
    np.cumsum(np.bincount(arc_tail, minlength=N + 2), out=start[1:])
    return (
        start,
        np.ascontiguousarray(arc_head[order], dtype=np.int64),
        np.ascontiguousarray(where[arc_rev[order]], dtype=np.int64),
        np.ascontiguousarray(arc_cap[order]),
        s,
        t,
    )


def grid_min_cut(unary, w_h, w_v=None, backend=None, return_flow=False):
    """Minimizing binary labeling for unary differences ``unary`` and edge weights.

    Parameters
    ----------
    unary : (H, W) array
        ``cost(u=1) - cost(u=0)`` per pixel.
    w_h, w_v : scalar or array
        Weights of horizontal ``(H, W-1)`` and vertical ``(H-1, W)`` edges;
        ``w_v`` defaults to ``w_h`` when both are scalars.
    """
    if w_v is None:
        w_v = w_h
    start, to, rev, cap, s, t = grid_graph(unary, w_h, w_v)
    eps = 1e-12 * max(1.0, float(cap.max(initial=0.0)))
    impl = _backend.get(backend)
    flow = impl.max_flow(start, to, rev, cap, s, t, eps)
    side = impl.reachable(start, to, cap, s, eps)
    H, W = np.shape(unary)
    mask = np.ascontiguousarray(side[:H * W].reshape(H, W), dtype=np.uint8)
    if return_flow:
        return mask, flow
    return mask


def labeling_energy(u, unary, w_h, w_v=None):
    """Objective value of a labeling, for checks against brute force."""
    if w_v is None:
        w_v = w_h
    u = np.asarray(u, dtype=np.float64)
    return float(
        np.sum(unary * u)
        + np.sum(w_h * np.abs(np.diff(u, axis=1)))
        + np.sum(w_v * np.abs(np.diff(u, axis=0)))
    )
