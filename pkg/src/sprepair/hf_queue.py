"""Bounded queue for the high-frequency pairs.

Records ``(a, b, P, L, F)`` sit in an array of at most ``capacity`` rows and
are found through the pair hash.  ``F`` is the live frequency, ``[P, P + L)``
the slice of the position array holding the pair's occurrences.  ``max`` and
``min`` scan the array (ties go to the lowest row); the minimum is cached
until it may have changed.

The kernels take ``(B, H, meta)`` so that the compression engine can call
them directly; :class:`HfQueue` is the Python-facing wrapper.
"""
import numpy as np
from numba import njit

from ._hash import DEFAULT_SEED, hash_clear, hash_delete, hash_get, hash_put
from .pair_sorter import sort_range_kernel
from .queue_common import (
    COL_A, COL_B, COL_F, COL_L, COL_P, HASH_ROW_WORDS, HF_RECORD_WORDS,
    M_CAP, M_DUPLICATE, M_EVICTED, M_FREE, M_FRONTIER, M_INSERTED,
    M_MINIDX, M_MISMATCH, M_REJECTED, M_SEED, M_SIZE, M_SYNC_CALLS,
    M_SYNC_WORK, M_USED, M_ADMIT, NULL, QueueEmptyError, as_pair, new_meta,
)
from .text_buffer import next_nonblank


def hf_capacity(n):
    """Smallest ``c`` with ``121 c^2 >= n`` (at least 1)."""
    c = max(1, int(np.sqrt(n) / 11))
    while 121 * c * c < n:
        c += 1
    while c > 1 and 121 * (c - 1) * (c - 1) >= n:
        c -= 1
    return c


def hf_threshold(n):
    """Smallest ``t`` with ``9 t^2 >= n``: pairs this frequent are high-frequency."""
    t = max(1, int(np.sqrt(n) / 3))
    while 9 * t * t < n:
        t += 1
    while t > 1 and 9 * (t - 1) * (t - 1) >= n:
        t -= 1
    return t


def hf_words(capacity):
    return capacity * (HF_RECORD_WORDS + 2 * HASH_ROW_WORDS)


def hf_views(storage, capacity):
    nb = capacity * HF_RECORD_WORDS
    B = storage[:nb].reshape(capacity, HF_RECORD_WORDS)
    H = storage[nb : nb + 2 * capacity * HASH_ROW_WORDS].reshape(2 * capacity, HASH_ROW_WORDS)
    return B, H


@njit(cache=True)
def hf_reset(B, H, meta):
    hash_clear(H)
    for i in range(B.shape[0]):
        B[i, COL_A] = NULL
    meta[M_SIZE] = 0
    meta[M_USED] = 0
    meta[M_FREE] = NULL
    meta[M_MINIDX] = NULL
    meta[M_FRONTIER] = 0


@njit(cache=True)
def hf_find(B, H, meta, a, b):
    return hash_get(H, meta[M_SEED], a, b)


@njit(cache=True, inline="always")
def _before(B, i, j):
    """Row ``i`` is a strictly better minimum than row ``j``."""
    fi = B[i, COL_F]
    fj = B[j, COL_F]
    return fi < fj or (fi == fj and i < j)


@njit(cache=True)
def hf_insert(B, H, meta, a, b, P, L, F):
    idx = meta[M_FREE]
    if idx != NULL:
        meta[M_FREE] = B[idx, COL_P]
    else:
        idx = meta[M_USED]
        meta[M_USED] += 1
    B[idx, COL_A] = a
    B[idx, COL_B] = b
    B[idx, COL_P] = P
    B[idx, COL_L] = L
    B[idx, COL_F] = F
    hash_put(H, meta[M_SEED], a, b, idx)
    meta[M_SIZE] += 1
    meta[M_INSERTED] += 1
    mi = meta[M_MINIDX]
    if meta[M_SIZE] == 1 or (mi != NULL and _before(B, idx, mi)):
        meta[M_MINIDX] = idx
    return idx


@njit(cache=True)
def hf_remove_index(B, H, meta, idx):
    hash_delete(H, meta[M_SEED], B[idx, COL_A], B[idx, COL_B])
    B[idx, COL_A] = NULL
    B[idx, COL_P] = meta[M_FREE]
    meta[M_FREE] = idx
    meta[M_SIZE] -= 1
    if meta[M_MINIDX] == idx:
        meta[M_MINIDX] = NULL


@njit(cache=True)
def hf_remove(B, H, meta, a, b):
    idx = hash_get(H, meta[M_SEED], a, b)
    if idx == NULL:
        return False
    hf_remove_index(B, H, meta, idx)
    return True


@njit(cache=True)
def hf_max(B, meta):
    best = NULL
    for i in range(meta[M_USED]):
        if B[i, COL_A] != NULL and (best == NULL or B[i, COL_F] > B[best, COL_F]):
            best = i
    return best


@njit(cache=True)
def hf_min(B, meta):
    mi = meta[M_MINIDX]
    if mi != NULL or meta[M_SIZE] == 0:
        return mi
    for i in range(meta[M_USED]):
        if B[i, COL_A] != NULL and (mi == NULL or _before(B, i, mi)):
            mi = i
    meta[M_MINIDX] = mi
    return mi


@njit(cache=True)
def hf_set_frequency(B, meta, idx, f):
    old = B[idx, COL_F]
    B[idx, COL_F] = f
    mi = meta[M_MINIDX]
    if f < old:
        if mi != NULL and _before(B, idx, mi):
            meta[M_MINIDX] = idx
    elif f > old and mi == idx:
        meta[M_MINIDX] = NULL


@njit(cache=True)
def hf_decrease(B, H, meta, a, b, keep):
    """Lower F by one; drop the pair once it falls below admission unless ``keep``."""
    idx = hash_get(H, meta[M_SEED], a, b)
    if idx == NULL:
        return
    hf_set_frequency(B, meta, idx, B[idx, COL_F] - 1)
    if not keep and B[idx, COL_F] < meta[M_ADMIT]:
        hf_remove_index(B, H, meta, idx)


@njit(cache=True)
def _raise_frontier(meta, value):
    if value > meta[M_FRONTIER]:
        meta[M_FRONTIER] = value


@njit(cache=True)
def hf_offer(B, H, meta, a, b, P, k):
    """Admit a pair of true frequency ``k`` found outside the queue."""
    if hash_get(H, meta[M_SEED], a, b) != NULL:
        meta[M_DUPLICATE] += 1
        return
    if meta[M_SIZE] < meta[M_CAP]:
        hf_insert(B, H, meta, a, b, P, k, k)
        return
    mi = hf_min(B, meta)
    fm = B[mi, COL_F]
    if k > fm:
        # the evicted pair may still have up to F (and up to L - F hidden) occurrences
        _raise_frontier(meta, max(fm, B[mi, COL_L] - fm))
        hf_remove_index(B, H, meta, mi)
        hf_insert(B, H, meta, a, b, P, k, k)
        meta[M_EVICTED] += 1
    else:
        _raise_frontier(meta, k)
        meta[M_REJECTED] += 1


@njit(cache=True)
def hf_build(T, A, npairs, B, H, meta):
    """Fill the queue with the most frequent clusters of a freshly sorted array.

    A first scan keeps a running top-``capacity`` selection to find the
    cutoff frequency; the second admits every cluster above the cutoff and,
    in pair order, as many at the cutoff as still fit.  So among equal
    frequencies the smaller pairs win.  The largest frequency left out is
    recorded as the frontier.
    """
    admit = meta[M_ADMIT]
    cap = meta[M_CAP]
    counts = meta[M_EVICTED:M_INSERTED + 1].copy()
    i = 0
    while i < npairs:
        p = A[i]
        a = T[p]
        b = T[p + 1]
        j = i + 1
        while j < npairs and T[A[j]] == a and T[A[j] + 1] == b:
            j += 1
        if j - i >= admit:
            hf_offer(B, H, meta, a, b, i, j - i)
        i = j
    cutoff = admit
    quota = npairs
    if meta[M_SIZE] == cap:
        cutoff = B[hf_min(B, meta), COL_F]
        quota = cap
        for r in range(meta[M_USED]):
            if B[r, COL_A] != NULL and B[r, COL_F] > cutoff:
                quota -= 1
    hf_reset(B, H, meta)
    meta[M_EVICTED:M_INSERTED + 1] = counts
    i = 0
    while i < npairs:
        p = A[i]
        a = T[p]
        b = T[p + 1]
        j = i + 1
        while j < npairs and T[A[j]] == a and T[A[j] + 1] == b:
            j += 1
        k = j - i
        take = False
        if k >= admit:
            if k > cutoff:
                take = True
            elif k == cutoff and quota > 0:
                take = True
                quota -= 1
        if take:
            hf_insert(B, H, meta, a, b, i, k, k)
        elif k > meta[M_FRONTIER]:
            meta[M_FRONTIER] = k
        i = j


@njit(cache=True)
def hf_synchronize(cells, length, star, A, B, H, meta, lo, hi, oa, ob, debug):
    """Re-sort ``A[lo:hi]`` and re-count every pair found there.

    The owner pair ``(oa, ob)`` (``oa < 0`` for none) gets its exact range and
    frequency; other pairs frequent enough are offered to the queue.
    """
    meta[M_SYNC_CALLS] += 1
    meta[M_SYNC_WORK] += hi - lo
    v = sort_range_kernel(cells, length, star, A, lo, hi)
    end = lo + v
    found = False
    admit = meta[M_ADMIT]
    q = lo
    while q < end:
        p = A[q]
        a = cells[p]
        b = cells[next_nonblank(cells, length, star, p)]
        r = q + 1
        while r < end and cells[A[r]] == a and cells[next_nonblank(cells, length, star, A[r])] == b:
            r += 1
        k = r - q
        if a == oa and b == ob:
            found = True
            idx = hash_get(H, meta[M_SEED], a, b)
            if idx != NULL:
                if debug and B[idx, COL_F] != k:
                    meta[M_MISMATCH] += 1
                B[idx, COL_P] = q
                B[idx, COL_L] = k
                hf_set_frequency(B, meta, idx, k)
        elif k >= admit:
            hf_offer(B, H, meta, a, b, q, k)
        elif k > meta[M_FRONTIER]:
            meta[M_FRONTIER] = k
        q = r
    if oa >= 0 and not found:
        idx = hash_get(H, meta[M_SEED], oa, ob)
        if idx != NULL:
            if debug and B[idx, COL_F] != 0:
                meta[M_MISMATCH] += 1
            B[idx, COL_P] = lo
            B[idx, COL_L] = 0
            hf_set_frequency(B, meta, idx, 0)


class HfQueue:
    """Python view of a high-frequency queue.

    ``threshold`` is the admission frequency.  ``storage`` may be a
    preallocated word array of at least ``hf_words(capacity)`` words.
    """

    def __init__(self, capacity, threshold, seed=DEFAULT_SEED, storage=None):
        self.capacity = int(capacity)
        if self.capacity < 1:
            raise ValueError("capacity must be positive")
        if storage is None:
            storage = np.zeros(hf_words(self.capacity), dtype=np.int64)
        self.B, self.H = hf_views(storage, self.capacity)
        self.meta = new_meta(self.capacity, max(int(threshold), 1), int(seed))
        hf_reset(self.B, self.H, self.meta)

    @classmethod
    def for_length(cls, n, seed=DEFAULT_SEED, storage=None):
        return cls(hf_capacity(n), max(hf_threshold(n), 2), seed, storage)

    @classmethod
    def build(cls, text, tp, capacity, threshold, seed=DEFAULT_SEED):
        q = cls(capacity, threshold, seed)
        hf_build(text.cells, tp.words, tp.used, q.B, q.H, q.meta)
        return q

    @property
    def threshold(self):
        return int(self.meta[M_ADMIT])

    @property
    def frontier(self):
        return int(self.meta[M_FRONTIER])

    def size(self):
        return int(self.meta[M_SIZE])

    __len__ = size

    def _index(self, pair):
        a, b = as_pair(pair)
        return int(hf_find(self.B, self.H, self.meta, a, b))

    def contains(self, pair):
        return self._index(pair) != NULL

    __contains__ = contains

    def get(self, pair):
        """``(P, L, F)`` for a queued pair, else ``None``."""
        idx = self._index(pair)
        if idx == NULL:
            return None
        row = self.B[idx]
        return int(row[COL_P]), int(row[COL_L]), int(row[COL_F])

    def _pair_at(self, idx):
        if idx == NULL:
            raise QueueEmptyError("queue is empty")
        return int(self.B[idx, COL_A]), int(self.B[idx, COL_B])

    def max(self):
        return self._pair_at(hf_max(self.B, self.meta))

    def min(self):
        return self._pair_at(hf_min(self.B, self.meta))

    def insert(self, pair, P, L, F):
        a, b = as_pair(pair)
        if self.contains((a, b)):
            raise KeyError(f"pair {(a, b)} already queued")
        if self.size() >= self.capacity:
            raise OverflowError("queue is full")
        hf_insert(self.B, self.H, self.meta, a, b, int(P), int(L), int(F))

    def remove(self, pair):
        a, b = as_pair(pair)
        return bool(hf_remove(self.B, self.H, self.meta, a, b))

    def decrease(self, pair, keep=False):
        a, b = as_pair(pair)
        hf_decrease(self.B, self.H, self.meta, a, b, keep)

    def synchronize(self, pair, text, tp, debug=False):
        """Rebuild the owner's range from the position array; see :func:`hf_synchronize`."""
        entry = self.get(pair)
        if entry is None:
            raise KeyError(f"pair {pair} is not queued")
        P, L, _ = entry
        a, b = as_pair(pair)
        hf_synchronize(text.cells, text.length, text.star, tp.words, self.B, self.H,
                       self.meta, P, P + L, a, b, debug)

    def entries(self):
        """``{pair: (P, L, F)}`` for every queued pair."""
        out = {}
        for i in range(int(self.meta[M_USED])):
            row = self.B[i]
            if row[COL_A] != NULL:
                out[(int(row[COL_A]), int(row[COL_B]))] = (int(row[COL_P]), int(row[COL_L]), int(row[COL_F]))
        return out
