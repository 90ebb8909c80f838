"""Hot numeric kernels with a numba and a pure-numpy implementation.

Set ``PIM_DISABLE_NUMBA=1`` to force the numpy path.  Both paths return
identical arrays; ``tests/test_kernels.py`` checks them against each other.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

_OPS = 4  # xor, seq, para, loop (column order of the bipartition kernel)


def _env_disabled() -> bool:
    return os.environ.get("PIM_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


# ---------------------------------------------------------------- numpy path


def follows_counts_numpy(events, offsets, counts, n):
    """dfg, ifg, unary, start, end counts over a flattened multiset of traces.

    ``events[offsets[t]:offsets[t+1]]`` is trace ``t`` (activity indices in
    ``0..n-1``) occurring ``counts[t]`` times.  ``ifg[a, b]`` counts each
    occurrence of ``b`` once if some ``a`` occurs at least two positions earlier.
    """
    dfg = np.zeros((n, n), dtype=np.int64)
    ifg = np.zeros((n, n), dtype=np.int64)
    unary = np.zeros(n, dtype=np.int64)
    start = np.zeros(n, dtype=np.int64)
    end = np.zeros(n, dtype=np.int64)
    for t in range(len(counts)):
        lo, hi = offsets[t], offsets[t + 1]
        if hi == lo:
            continue
        trace = events[lo:hi]
        c = counts[t]
        start[trace[0]] += c
        end[trace[-1]] += c
        np.add.at(unary, trace, c)
        if len(trace) > 1:
            np.add.at(dfg, (trace[:-1], trace[1:]), c)
        if len(trace) > 2:
            first = np.full(n, len(trace), dtype=np.int64)
            pos = np.arange(len(trace))
            np.minimum.at(first, trace, pos)
            # seen[j, a]: some a occurs at a position <= j - 2
            seen = first[None, :] <= (pos[:, None] - 2)
            contrib = np.zeros((n, n), dtype=np.int64)
            np.add.at(contrib.T, trace, seen.astype(np.int64))
            ifg += c * contrib
    return dfg, ifg, unary, start, end


def _loop_sets_numpy(member, adj):
    """Redo entry/exit sets for a batch of Σ1 membership rows."""
    m = member.astype(np.int64)
    out_side = ~member
    s2 = out_side & ((m @ adj.astype(np.int64)) > 0)
    e2 = out_side & ((m @ adj.T.astype(np.int64)) > 0)
    empty_s = ~s2.any(axis=1)
    empty_e = ~e2.any(axis=1)
    s2[empty_s] = out_side[empty_s]
    e2[empty_e] = out_side[empty_e]
    return s2, e2


def score_cuts_numpy(member, xor, seq, para, loop_s, loop_i, adj, start, end, r):
    """Aggregated scores for a batch of cuts.

    ``member`` is a (m, k) boolean array marking Σ1; columns of the result are
    xor, seq, para, loop.
    """
    member = np.atleast_2d(np.asarray(member, dtype=bool))
    cross = member[:, :, None] & ~member[:, None, :]
    npairs = cross.sum(axis=(1, 2)).astype(np.float64)
    out = np.empty((member.shape[0], _OPS))
    for col, table in ((0, xor), (1, seq)):
        total = (cross * table).sum(axis=(1, 2))
        mean = total / npairs
        sq = (cross * (table[None] - mean[:, None, None]) ** 2).sum(axis=(1, 2))
        out[:, col] = mean - np.sqrt(sq / npairs)
    rr = min(r, 1.0)
    out[:, 2] = (cross * para).sum(axis=(1, 2)) / npairs * rr
    s2, e2 = _loop_sets_numpy(member, adj)
    border = (end[None, :, None] & s2[:, None, :]) | (e2[:, :, None] & start[None, None, :])
    inner = cross & ~border
    total = (border * loop_s).sum(axis=(1, 2)) + (inner * loop_i).sum(axis=(1, 2))
    mean = total / (border.sum(axis=(1, 2)) + inner.sum(axis=(1, 2)))
    out[:, 3] = mean + mean * (1.0 - rr)
    return out


def _masks_to_members(masks, k):
    return ((masks[:, None] >> np.arange(k)) & 1).astype(bool)


def enumerate_cuts_numpy(k, xor, seq, para, loop_s, loop_i, adj, start, end, r, chunk=512):
    """Scores of every bipartition (Σ1 given by bitmask 1..2^k-2), shape (2^k-2, 4)."""
    masks = np.arange(1, (1 << k) - 1, dtype=np.int64)
    out = np.empty((len(masks), _OPS))
    for lo in range(0, len(masks), chunk):
        member = _masks_to_members(masks[lo:lo + chunk], k)
        out[lo:lo + chunk] = score_cuts_numpy(member, xor, seq, para, loop_s, loop_i, adj, start, end, r)
    return out


def min_indel_numpy(trace, model_events, model_offsets):
    """Smallest insert/delete edit distance from ``trace`` to any model trace."""
    n_models = len(model_offsets) - 1
    if n_models == 0:
        return -1
    lengths = np.diff(model_offsets)
    width = int(lengths.max()) if n_models else 0
    padded = np.full((n_models, max(width, 1)), -1, dtype=np.int64)
    for t in range(n_models):
        padded[t, : lengths[t]] = model_events[model_offsets[t]:model_offsets[t + 1]]
    # LCS by rows over the trace, vectorized across model traces
    prev = np.zeros((n_models, width + 1), dtype=np.int64)
    for a in trace:
        cur = np.zeros_like(prev)
        match = padded[:, :width] == a
        for j in range(1, width + 1):
            cur[:, j] = np.where(
                match[:, j - 1],
                prev[:, j - 1] + 1,
                np.maximum(prev[:, j], cur[:, j - 1]),
            )
        prev = cur
    lcs = prev[np.arange(n_models), lengths]
    return int((len(trace) + lengths - 2 * lcs).min())


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def follows_counts_numba(events, offsets, counts, n):
        dfg = np.zeros((n, n), dtype=np.int64)
        ifg = np.zeros((n, n), dtype=np.int64)
        unary = np.zeros(n, dtype=np.int64)
        start = np.zeros(n, dtype=np.int64)
        end = np.zeros(n, dtype=np.int64)
        seen = np.zeros(n, dtype=np.bool_)
        for t in range(counts.shape[0]):
            lo = offsets[t]
            hi = offsets[t + 1]
            if hi == lo:
                continue
            c = counts[t]
            start[events[lo]] += c
            end[events[hi - 1]] += c
            seen[:] = False
            for j in range(lo, hi):
                b = events[j]
                unary[b] += c
                if j > lo:
                    dfg[events[j - 1], b] += c
                if j - 2 >= lo:
                    seen[events[j - 2]] = True
                    for a in range(n):
                        if seen[a]:
                            ifg[a, b] += c
        return dfg, ifg, unary, start, end

    @njit(cache=True)
    def _score_one_numba(member, xor, seq, para, loop_s, loop_i, adj, start, end, rr, out):
        k = member.shape[0]
        npairs = 0
        sx = 0.0
        ss = 0.0
        sp = 0.0
        for i in range(k):
            if not member[i]:
                continue
            for j in range(k):
                if member[j]:
                    continue
                npairs += 1
                sx += xor[i, j]
                ss += seq[i, j]
                sp += para[i, j]
        mx = sx / npairs
        ms = ss / npairs
        vx = 0.0
        vs = 0.0
        for i in range(k):
            if not member[i]:
                continue
            for j in range(k):
                if member[j]:
                    continue
                vx += (xor[i, j] - mx) ** 2
                vs += (seq[i, j] - ms) ** 2
        out[0] = mx - np.sqrt(vx / npairs)
        out[1] = ms - np.sqrt(vs / npairs)
        out[2] = sp / npairs * rr

        s2 = np.zeros(k, dtype=np.bool_)
        e2 = np.zeros(k, dtype=np.bool_)
        any_s = False
        any_e = False
        for j in range(k):
            if member[j]:
                continue
            for i in range(k):
                if member[i]:
                    if adj[i, j]:
                        s2[j] = True
                    if adj[j, i]:
                        e2[j] = True
            any_s = any_s or s2[j]
            any_e = any_e or e2[j]
        for j in range(k):
            if not member[j]:
                if not any_s:
                    s2[j] = True
                if not any_e:
                    e2[j] = True
        total = 0.0
        count = 0
        for i in range(k):
            for j in range(k):
                border = (end[i] and s2[j]) or (e2[i] and start[j])
                if border:
                    total += loop_s[i, j]
                    count += 1
                elif member[i] and not member[j]:
                    total += loop_i[i, j]
                    count += 1
        mean = total / count
        out[3] = mean + mean * (1.0 - rr)

    @njit(cache=True)
    def score_cuts_numba(member, xor, seq, para, loop_s, loop_i, adj, start, end, r):
        rr = min(r, 1.0)
        out = np.empty((member.shape[0], 4))
        for m in range(member.shape[0]):
            _score_one_numba(member[m], xor, seq, para, loop_s, loop_i, adj, start, end, rr, out[m])
        return out

    @njit(cache=True)
    def enumerate_cuts_numba(k, xor, seq, para, loop_s, loop_i, adj, start, end, r):
        rr = min(r, 1.0)
        total = (1 << k) - 2
        out = np.empty((total, 4))
        member = np.zeros(k, dtype=np.bool_)
        for idx in range(total):
            mask = idx + 1
            for i in range(k):
                member[i] = ((mask >> i) & 1) == 1
            _score_one_numba(member, xor, seq, para, loop_s, loop_i, adj, start, end, rr, out[idx])
        return out

    @njit(cache=True)
    def min_indel_numba(trace, model_events, model_offsets):
        n_models = model_offsets.shape[0] - 1
        if n_models == 0:
            return -1
        n = trace.shape[0]
        best = -1
        width = 0
        for t in range(n_models):
            width = max(width, model_offsets[t + 1] - model_offsets[t])
        prev = np.zeros(width + 1, dtype=np.int64)
        cur = np.zeros(width + 1, dtype=np.int64)
        for t in range(n_models):
            lo = model_offsets[t]
            m = model_offsets[t + 1] - lo
            # a lower bound on the distance is the length difference
            if best >= 0 and abs(n - m) >= best:
                continue
            prev[: m + 1] = 0
            for i in range(n):
                a = trace[i]
                cur[0] = 0
                for j in range(1, m + 1):
                    if model_events[lo + j - 1] == a:
                        cur[j] = prev[j - 1] + 1
                    else:
                        cur[j] = max(prev[j], cur[j - 1])
                prev[: m + 1] = cur[: m + 1]
            d = n + m - 2 * prev[m]
            if best < 0 or d < best:
                best = d
                if best == 0:
                    break
        return best


def get_kernels(backend: str | None = None) -> SimpleNamespace:
    """Kernel table for ``"numba"`` or ``"numpy"``; default honours ``PIM_DISABLE_NUMBA``."""
    if backend is None:
        backend = "numba" if HAVE_NUMBA and not _env_disabled() else "numpy"
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not installed")
        return SimpleNamespace(
            name="numba",
            follows_counts=follows_counts_numba,
            score_cuts=score_cuts_numba,
            enumerate_cuts=enumerate_cuts_numba,
            min_indel=min_indel_numba,
        )
    if backend == "numpy":
        return SimpleNamespace(
            name="numpy",
            follows_counts=follows_counts_numpy,
            score_cuts=score_cuts_numpy,
            enumerate_cuts=enumerate_cuts_numpy,
            min_indel=min_indel_numpy,
        )
    raise ValueError(f"unknown backend {backend!r}")


def active() -> SimpleNamespace:
    """The kernel table selected by the environment (re-read on every call)."""
    return get_kernels()
