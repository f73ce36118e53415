"""Hot numeric kernels.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics. The numba path is used unless numba is
missing or ``PUNGEN_DISABLE_NUMBA`` is set to a truthy value at import time.
Both variants stay importable (``numba_*`` / ``numpy_*``) so they can be
checked against each other and benchmarked.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return decorator


def _flag_disabled() -> bool:
    return os.environ.get("PUNGEN_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = NUMBA_AVAILABLE and not _flag_disabled()


# ---------------------------------------------------------------------------
# sorted-key lookup (n-gram count tables)
# ---------------------------------------------------------------------------


def numpy_sorted_lookup(keys: np.ndarray, values: np.ndarray, queries: np.ndarray, default: float) -> np.ndarray:
    """Return ``values[i]`` where ``keys[i] == query``, else ``default``. ``keys`` must be sorted and unique."""
    queries = np.asarray(queries, dtype=np.int64)
    out = np.full(queries.shape, default, dtype=np.float64)
    if keys.size == 0:
        return out
    pos = np.searchsorted(keys, queries)
    pos_c = np.minimum(pos, keys.size - 1)
    hit = keys[pos_c] == queries
    out[hit] = values[pos_c[hit]]
    return out


@njit(cache=True)
def _nb_sorted_lookup(keys, values, queries, default):
    n = keys.shape[0]
    out = np.empty(queries.shape[0], dtype=np.float64)
    for i in range(queries.shape[0]):
        q = queries[i]
        lo = 0
        hi = n
        while lo < hi:
            mid = (lo + hi) >> 1
            if keys[mid] < q:
                lo = mid + 1
            else:
                hi = mid
        if lo < n and keys[lo] == q:
            out[i] = values[lo]
        else:
            out[i] = default
    return out


def numba_sorted_lookup(keys: np.ndarray, values: np.ndarray, queries: np.ndarray, default: float) -> np.ndarray:
    q = np.ascontiguousarray(np.asarray(queries, dtype=np.int64))
    flat = _nb_sorted_lookup(keys, values.astype(np.float64, copy=False), q.ravel(), float(default))
    return flat.reshape(q.shape)


# ---------------------------------------------------------------------------
# skip-gram pair extraction
# ---------------------------------------------------------------------------


def numpy_skipgram_pairs(tokens: np.ndarray, reduced: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    """(center, context) id pairs ordered by center position, then offset from -window to +window.

    ``tokens`` holds ids with ``-1`` as a sentence separator; ``reduced[i]`` is
    the effective window of position ``i`` (word2vec's dynamic window).
    """
    n = tokens.shape[0]
    # sentence index of each position so windows never cross a separator
    sent = np.cumsum(tokens < 0)
    pos_list = []
    off_list = []
    for off in range(-window, window + 1):
        if off == 0:
            continue
        i = np.arange(max(0, -off), min(n, n - off))
        j = i + off
        ok = (tokens[i] >= 0) & (tokens[j] >= 0) & (sent[i] == sent[j]) & (abs(off) <= reduced[i])
        pos_list.append(i[ok])
        off_list.append(np.full(int(ok.sum()), off, dtype=np.int64))
    if not pos_list:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    pos = np.concatenate(pos_list)
    off = np.concatenate(off_list)
    order = np.lexsort((off, pos))
    pos = pos[order]
    off = off[order]
    return tokens[pos].astype(np.int64), tokens[pos + off].astype(np.int64)


@njit(cache=True)
def _nb_skipgram_pairs(tokens, reduced, window):
    n = tokens.shape[0]
    count = 0
    for i in range(n):
        if tokens[i] < 0:
            continue
        r = reduced[i]
        for off in range(-window, window + 1):
            if off == 0 or abs(off) > r:
                continue
            j = i + off
            if j < 0 or j >= n:
                continue
            # stop at separators between i and j
            blocked = False
            lo = min(i, j)
            hi = max(i, j)
            for k in range(lo, hi + 1):
                if tokens[k] < 0:
                    blocked = True
                    break
            if not blocked:
                count += 1
    centers = np.empty(count, dtype=np.int64)
    contexts = np.empty(count, dtype=np.int64)
    c = 0
    for i in range(n):
        if tokens[i] < 0:
            continue
        r = reduced[i]
        for off in range(-window, window + 1):
            if off == 0 or abs(off) > r:
                continue
            j = i + off
            if j < 0 or j >= n:
                continue
            blocked = False
            lo = min(i, j)
            hi = max(i, j)
            for k in range(lo, hi + 1):
                if tokens[k] < 0:
                    blocked = True
                    break
            if not blocked:
                centers[c] = tokens[i]
                contexts[c] = tokens[j]
                c += 1
    return centers, contexts


def numba_skipgram_pairs(tokens: np.ndarray, reduced: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    return _nb_skipgram_pairs(
        np.ascontiguousarray(tokens, dtype=np.int64), np.ascontiguousarray(reduced, dtype=np.int64), int(window)
    )


# ---------------------------------------------------------------------------
# skip-gram negative-sampling updates
# ---------------------------------------------------------------------------
#
# Updates are applied per minibatch: all gradients of a batch are computed
# from the weights at the start of the batch, then added in pair order
# (context rows, then negative rows, then center rows). Both variants follow
# this order so they agree up to floating-point summation differences.


def numpy_sgns_train(w_in, w_out, centers, contexts, negatives, lrs, batch):
    """Train in place; returns the mean positive-pair log-loss per batch."""
    n = centers.shape[0]
    n_batches = (n + batch - 1) // batch
    losses = np.zeros(n_batches, dtype=np.float64)
    d = w_in.shape[1]
    for b in range(n_batches):
        lo = b * batch
        hi = min(n, lo + batch)
        c = centers[lo:hi]
        o = contexts[lo:hi]
        neg = negatives[lo:hi]
        lr = np.float32(lrs[b])
        h = w_in[c]
        u = w_out[o]
        nv = w_out[neg]
        s_pos = 1.0 / (1.0 + np.exp(-np.sum(h * u, axis=1)))
        s_neg = 1.0 / (1.0 + np.exp(-np.einsum("bd,bkd->bk", h, nv)))
        losses[b] = float(np.mean(-np.log(np.maximum(s_pos, 1e-12))))
        g_pos = ((1.0 - s_pos) * lr).astype(np.float32)
        g_neg = ((0.0 - s_neg) * lr).astype(np.float32)
        dh = g_pos[:, None] * u + np.einsum("bk,bkd->bd", g_neg, nv)
        du = g_pos[:, None] * h
        dn = g_neg[:, :, None] * h[:, None, :]
        np.add.at(w_out, o, du)
        np.add.at(w_out, neg.ravel(), dn.reshape(-1, d))
        np.add.at(w_in, c, dh)
    return losses


@njit(cache=True)
def _nb_sgns_train(w_in, w_out, centers, contexts, negatives, lrs, batch):
    n = centers.shape[0]
    d = w_in.shape[1]
    k = negatives.shape[1]
    n_batches = (n + batch - 1) // batch
    losses = np.zeros(n_batches, dtype=np.float64)
    dh = np.zeros((batch, d), dtype=np.float32)
    du = np.zeros((batch, d), dtype=np.float32)
    dn = np.zeros((batch, k, d), dtype=np.float32)
    for b in range(n_batches):
        lo = b * batch
        hi = min(n, lo + batch)
        lr = np.float32(lrs[b])
        loss = 0.0
        for i in range(hi - lo):
            ci = centers[lo + i]
            oi = contexts[lo + i]
            dot = np.float32(0.0)
            for t in range(d):
                dot += w_in[ci, t] * w_out[oi, t]
            s = 1.0 / (1.0 + np.exp(-dot))
            loss += -np.log(max(s, 1e-12))
            gp = np.float32((1.0 - s) * lr)
            for t in range(d):
                dh[i, t] = gp * w_out[oi, t]
                du[i, t] = gp * w_in[ci, t]
            for j in range(k):
                ni = negatives[lo + i, j]
                dot = np.float32(0.0)
                for t in range(d):
                    dot += w_in[ci, t] * w_out[ni, t]
                s = 1.0 / (1.0 + np.exp(-dot))
                gn = np.float32((0.0 - s) * lr)
                for t in range(d):
                    dh[i, t] += gn * w_out[ni, t]
                    dn[i, j, t] = gn * w_in[ci, t]
        losses[b] = loss / (hi - lo)
        for i in range(hi - lo):
            oi = contexts[lo + i]
            for t in range(d):
                w_out[oi, t] += du[i, t]
        for i in range(hi - lo):
            for j in range(k):
                ni = negatives[lo + i, j]
                for t in range(d):
                    w_out[ni, t] += dn[i, j, t]
        for i in range(hi - lo):
            ci = centers[lo + i]
            for t in range(d):
                w_in[ci, t] += dh[i, t]
    return losses


def numba_sgns_train(w_in, w_out, centers, contexts, negatives, lrs, batch):
    return _nb_sgns_train(
        w_in,
        w_out,
        np.ascontiguousarray(centers, dtype=np.int64),
        np.ascontiguousarray(contexts, dtype=np.int64),
        np.ascontiguousarray(negatives, dtype=np.int64),
        np.ascontiguousarray(lrs, dtype=np.float64),
        int(batch),
    )


if USE_NUMBA:
    sorted_lookup = numba_sorted_lookup
    skipgram_pairs = numba_skipgram_pairs
    sgns_train = numba_sgns_train
else:
    sorted_lookup = numpy_sorted_lookup
    skipgram_pairs = numpy_skipgram_pairs
    sgns_train = numpy_sgns_train


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
