"""Numba kernels for regression-tree growth and traversal.

Trees are stored as flat parallel arrays (feature == -1 marks a leaf).
Split gain uses the regularized score

    gain = GL^2/(HL+lam) + GR^2/(HR+lam) - G^2/(H+lam) - gamma

which at lam=0, gamma=0 is exactly the squared-error (variance-reduction)
criterion with leaf value = mean target.  Two growth modes:

  * exact      — candidate thresholds are midpoints between consecutive
                 distinct sorted feature values (used for small fits, and
                 what the split-enumeration oracle checks against);
  * histogram  — features pre-binned to <=256 quantile bins, thresholds are
                 bin edges (used for large fits).

Ties in gain keep the first candidate in scan order: lowest feature index,
then lowest threshold.
"""

import numpy as np
from numba import njit

LEAF = -1


@njit(cache=True)
def build_exact(X, y, max_depth, min_leaf, lam, gamma):
    n, n_feat = X.shape
    cap = 2 * n + 1
    feature = np.full(cap, LEAF, np.int64)
    threshold = np.zeros(cap, np.float64)
    left = np.full(cap, LEAF, np.int64)
    right = np.full(cap, LEAF, np.int64)
    value = np.zeros(cap, np.float64)

    idx = np.arange(n)
    buf = np.empty(n, np.int64)
    stack = np.empty((cap, 4), np.int64)  # start, end, depth, node
    stack[0] = (0, n, 0, 0)
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        start, end, depth, node = stack[top]
        m = end - start
        g_tot = 0.0
        for k in range(start, end):
            g_tot += y[idx[k]]
        h_tot = float(m)
        value[node] = g_tot / (h_tot + lam)
        if depth >= max_depth or m < 2 * min_leaf:
            continue

        parent_score = g_tot * g_tot / (h_tot + lam)
        best_gain = gamma
        best_f = -1
        best_thr = 0.0
        best_leftmax = 0.0

        vals = np.empty(m, np.float64)
        for fi in range(n_feat):
            for k in range(m):
                vals[k] = X[idx[start + k], fi]
            order = np.argsort(vals)
            gl = 0.0
            hl = 0.0
            for k in range(m - 1):
                gl += y[idx[start + order[k]]]
                hl += 1.0
                v_lo = vals[order[k]]
                v_hi = vals[order[k + 1]]
                if v_lo == v_hi:
                    continue
                if hl < min_leaf or (m - hl) < min_leaf:
                    continue
                gr = g_tot - gl
                hr = h_tot - hl
                gain = gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent_score
                if gain > best_gain:
                    best_gain = gain
                    best_f = fi
                    best_thr = 0.5 * (v_lo + v_hi)
                    best_leftmax = v_lo

        if best_f < 0:
            continue

        # Stable partition on the training-data boundary value.
        nl = 0
        nr = 0
        for k in range(start, end):
            if X[idx[k], best_f] <= best_leftmax:
                buf[start + nl] = idx[k]
                nl += 1
            else:
                nr += 1
        pos = start + nl
        for k in range(start, end):
            if X[idx[k], best_f] > best_leftmax:
                buf[pos] = idx[k]
                pos += 1
        for k in range(start, end):
            idx[k] = buf[k]

        feature[node] = best_f
        threshold[node] = best_thr
        lchild = n_nodes
        rchild = n_nodes + 1
        n_nodes += 2
        left[node] = lchild
        right[node] = rchild
        stack[top] = (start, start + nl, depth + 1, lchild)
        top += 1
        stack[top] = (start + nl, end, depth + 1, rchild)
        top += 1

    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes],
            right[:n_nodes], value[:n_nodes])


@njit(cache=True)
def build_hist(codes, n_bins, edges, y, max_depth, min_leaf, lam, gamma):
    """codes: (n, f) uint8 bin codes; edges[f, b] = upper value of bin b."""
    n, n_feat = codes.shape
    cap = 2 * n + 1
    feature = np.full(cap, LEAF, np.int64)
    threshold = np.zeros(cap, np.float64)
    left = np.full(cap, LEAF, np.int64)
    right = np.full(cap, LEAF, np.int64)
    value = np.zeros(cap, np.float64)

    idx = np.arange(n)
    buf = np.empty(n, np.int64)
    hist_g = np.zeros(256, np.float64)
    hist_h = np.zeros(256, np.float64)
    stack = np.empty((cap, 4), np.int64)
    stack[0] = (0, n, 0, 0)
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        start, end, depth, node = stack[top]
        m = end - start
        g_tot = 0.0
        for k in range(start, end):
            g_tot += y[idx[k]]
        h_tot = float(m)
        value[node] = g_tot / (h_tot + lam)
        if depth >= max_depth or m < 2 * min_leaf:
            continue

        parent_score = g_tot * g_tot / (h_tot + lam)
        best_gain = gamma
        best_f = -1
        best_bin = -1

        for fi in range(n_feat):
            nb = n_bins[fi]
            if nb < 2:
                continue
            for b in range(nb):
                hist_g[b] = 0.0
                hist_h[b] = 0.0
            for k in range(start, end):
                c = codes[idx[k], fi]
                hist_g[c] += y[idx[k]]
                hist_h[c] += 1.0
            gl = 0.0
            hl = 0.0
            for b in range(nb - 1):
                gl += hist_g[b]
                hl += hist_h[b]
                if hl < min_leaf or (h_tot - hl) < min_leaf or hl == 0.0 or hl == h_tot:
                    continue
                gr = g_tot - gl
                hr = h_tot - hl
                gain = gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent_score
                if gain > best_gain:
                    best_gain = gain
                    best_f = fi
                    best_bin = b

        if best_f < 0:
            continue

        nl = 0
        for k in range(start, end):
            if codes[idx[k], best_f] <= best_bin:
                buf[start + nl] = idx[k]
                nl += 1
        pos = start + nl
        for k in range(start, end):
            if codes[idx[k], best_f] > best_bin:
                buf[pos] = idx[k]
                pos += 1
        for k in range(start, end):
            idx[k] = buf[k]

        feature[node] = best_f
        threshold[node] = edges[best_f, best_bin]
        lchild = n_nodes
        rchild = n_nodes + 1
        n_nodes += 2
        left[node] = lchild
        right[node] = rchild
        stack[top] = (start, start + nl, depth + 1, lchild)
        top += 1
        stack[top] = (start + nl, end, depth + 1, rchild)
        top += 1

    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes],
            right[:n_nodes], value[:n_nodes])


@njit(cache=True)
def predict_tree(X, feature, threshold, left, right, value, out):
    n = X.shape[0]
    for i in range(n):
        node = 0
        while feature[node] != LEAF:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]


@njit(cache=True)
def add_tree_prediction(X, feature, threshold, left, right, value, scale, out):
    n = X.shape[0]
    for i in range(n):
        node = 0
        while feature[node] != LEAF:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] += scale * value[node]
