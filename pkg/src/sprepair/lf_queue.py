"""Queue for the low-frequency pairs, bucketed by frequency.

Records are ``(a, b, P, L, F, prev, next)``: the last two link the record
into the bucket of pairs sharing its frequency ``F``.  The frequency vector
has one row ``(head, lower, upper)`` per frequency below ``nf``; ``lower`` and
``upper`` chain the non-empty buckets in increasing order, so the extreme
buckets ``MAX`` and ``MIN`` are always at hand.  Buckets are LIFO.

Capacity is fixed per build.  For the space-light variant the engine grows
it between rounds with :func:`light_next_capacity`.
"""
import math

import numpy as np
from numba import njit

from ._hash import DEFAULT_SEED, hash_clear, hash_delete, hash_get, hash_put
from .pair_sorter import sort_range_kernel
from .queue_common import (
    COL_A, COL_B, COL_F, COL_L, COL_NEXT, COL_P, COL_PREV, HASH_ROW_WORDS,
    LF_RECORD_WORDS, M_ADMIT, M_CAP, M_DUPLICATE, M_EVICTED, M_FREE,
    M_FRONTIER, M_INSERTED, M_MAXF, M_MINF, M_MISMATCH, M_NF, M_REJECTED,
    M_SEED, M_SIZE, M_SYNC_CALLS, M_SYNC_WORK, M_USED, NULL, QueueEmptyError,
    as_pair, new_meta,
)
from .text_buffer import next_nonblank

F_HEAD, F_LOWER, F_UPPER = 0, 1, 2
LF_RECORD_TOTAL = LF_RECORD_WORDS + 2 * HASH_ROW_WORDS  # 13 words per slot


def lf_rows(n):
    """Rows of the frequency vector: every frequency below the HF threshold."""
    from .hf_queue import hf_threshold
    return max(hf_threshold(n), 2) + 1


def lf_words(capacity):
    return capacity * LF_RECORD_TOTAL


def lf_views(storage, capacity):
    nb = capacity * LF_RECORD_WORDS
    B = storage[:nb].reshape(capacity, LF_RECORD_WORDS)
    H = storage[nb : nb + 2 * capacity * HASH_ROW_WORDS].reshape(2 * capacity, HASH_ROW_WORDS)
    return B, H


def light_next_capacity(current, reclaimed_words):
    """Capacity after ``reclaimed_words`` more words were freed by compaction."""
    return int(current) + int(reclaimed_words) // LF_RECORD_TOTAL


@njit(cache=True)
def lf_reset(B, H, Fv, meta):
    hash_clear(H)
    for i in range(B.shape[0]):
        B[i, COL_A] = NULL
    for f in range(Fv.shape[0]):
        Fv[f, F_HEAD] = NULL
        Fv[f, F_LOWER] = NULL
        Fv[f, F_UPPER] = NULL
    meta[M_SIZE] = 0
    meta[M_USED] = 0
    meta[M_FREE] = NULL
    meta[M_MAXF] = NULL
    meta[M_MINF] = NULL
    meta[M_FRONTIER] = 0


@njit(cache=True)
def _unlink(B, Fv, meta, idx):
    f = B[idx, COL_F]
    pv = B[idx, COL_PREV]
    nx = B[idx, COL_NEXT]
    if pv != NULL:
        B[pv, COL_NEXT] = nx
    else:
        Fv[f, F_HEAD] = nx
    if nx != NULL:
        B[nx, COL_PREV] = pv
    if Fv[f, F_HEAD] == NULL:
        lo = Fv[f, F_LOWER]
        up = Fv[f, F_UPPER]
        if lo != NULL:
            Fv[lo, F_UPPER] = up
        if up != NULL:
            Fv[up, F_LOWER] = lo
        if meta[M_MAXF] == f:
            meta[M_MAXF] = lo
        if meta[M_MINF] == f:
            meta[M_MINF] = up
        Fv[f, F_LOWER] = NULL
        Fv[f, F_UPPER] = NULL


@njit(cache=True)
def _push(B, Fv, meta, idx, f, lower):
    """Put record ``idx`` at the head of bucket ``f``.

    If the bucket was empty it is spliced into the frequency chain above
    ``lower``, the largest non-empty frequency below ``f``; pass ``-2`` to
    search for it.
    """
    B[idx, COL_F] = f
    B[idx, COL_PREV] = NULL
    head = Fv[f, F_HEAD]
    B[idx, COL_NEXT] = head
    Fv[f, F_HEAD] = idx
    if head != NULL:
        B[head, COL_PREV] = idx
        return
    if lower == -2:
        lower = f - 1
        while lower >= 0 and Fv[lower, F_HEAD] == NULL:
            lower -= 1
    if lower >= 0:
        up = Fv[lower, F_UPPER]
        Fv[lower, F_UPPER] = f
    else:
        lower = NULL
        up = meta[M_MINF]
    Fv[f, F_LOWER] = lower
    Fv[f, F_UPPER] = up
    if up != NULL:
        Fv[up, F_LOWER] = f
    if meta[M_MAXF] == NULL or f > meta[M_MAXF]:
        meta[M_MAXF] = f
    if meta[M_MINF] == NULL or f < meta[M_MINF]:
        meta[M_MINF] = f


@njit(cache=True)
def lf_find(B, H, meta, a, b):
    return hash_get(H, meta[M_SEED], a, b)


@njit(cache=True)
def lf_insert(B, H, Fv, meta, a, b, P, L, F):
    idx = meta[M_FREE]
    if idx != NULL:
        meta[M_FREE] = B[idx, COL_NEXT]
    else:
        idx = meta[M_USED]
        meta[M_USED] += 1
    B[idx, COL_A] = a
    B[idx, COL_B] = b
    B[idx, COL_P] = P
    B[idx, COL_L] = L
    _push(B, Fv, meta, idx, F, -2)
    hash_put(H, meta[M_SEED], a, b, idx)
    meta[M_SIZE] += 1
    meta[M_INSERTED] += 1
    return idx


@njit(cache=True)
def lf_remove_index(B, H, Fv, meta, idx):
    _unlink(B, Fv, meta, idx)
    hash_delete(H, meta[M_SEED], B[idx, COL_A], B[idx, COL_B])
    B[idx, COL_A] = NULL
    B[idx, COL_NEXT] = meta[M_FREE]
    meta[M_FREE] = idx
    meta[M_SIZE] -= 1


@njit(cache=True)
def lf_remove(B, H, Fv, meta, a, b):
    idx = hash_get(H, meta[M_SEED], a, b)
    if idx == NULL:
        return False
    lf_remove_index(B, H, Fv, meta, idx)
    return True


@njit(cache=True)
def lf_max(Fv, meta):
    f = meta[M_MAXF]
    return NULL if f == NULL else Fv[f, F_HEAD]


@njit(cache=True)
def lf_min(Fv, meta):
    f = meta[M_MINF]
    return NULL if f == NULL else Fv[f, F_HEAD]


@njit(cache=True)
def lf_set_frequency(B, Fv, meta, idx, f):
    if B[idx, COL_F] != f:
        _unlink(B, Fv, meta, idx)
        _push(B, Fv, meta, idx, f, -2)


@njit(cache=True)
def lf_decrease(B, H, Fv, meta, a, b, keep):
    """Lower F by one; drop the pair once it falls below admission unless ``keep``."""
    idx = hash_get(H, meta[M_SEED], a, b)
    if idx == NULL:
        return
    f = B[idx, COL_F]
    lower = Fv[f, F_LOWER]
    _unlink(B, Fv, meta, idx)
    _push(B, Fv, meta, idx, f - 1, lower)
    if not keep and f - 1 < meta[M_ADMIT]:
        lf_remove_index(B, H, Fv, meta, idx)


@njit(cache=True)
def _raise_frontier(meta, value):
    if value > meta[M_FRONTIER]:
        meta[M_FRONTIER] = value


@njit(cache=True)
def lf_offer(B, H, Fv, meta, a, b, P, k):
    """Admit a pair of true frequency ``k`` found outside the queue."""
    if hash_get(H, meta[M_SEED], a, b) != NULL:
        meta[M_DUPLICATE] += 1
        return
    if k >= meta[M_NF]:
        _raise_frontier(meta, k)
        meta[M_REJECTED] += 1
        return
    if meta[M_SIZE] < meta[M_CAP]:
        lf_insert(B, H, Fv, meta, a, b, P, k, k)
        return
    mi = lf_min(Fv, meta)
    fm = B[mi, COL_F]
    if k > fm:
        _raise_frontier(meta, max(fm, B[mi, COL_L] - fm))
        lf_remove_index(B, H, Fv, meta, mi)
        lf_insert(B, H, Fv, meta, a, b, P, k, k)
        meta[M_EVICTED] += 1
    else:
        _raise_frontier(meta, k)
        meta[M_REJECTED] += 1


@njit(cache=True)
def lf_build(T, A, npairs, B, H, Fv, meta):
    """Fill the queue with the most frequent clusters of a freshly sorted array.

    A histogram of cluster frequencies (kept in the head column of the
    frequency vector) gives the cutoff; clusters are then admitted in pair
    order, so ties at the cutoff go to the smaller pairs.
    """
    nf = meta[M_NF]
    admit = meta[M_ADMIT]
    cap = meta[M_CAP]
    for f in range(nf):
        Fv[f, F_HEAD] = 0
    i = 0
    while i < npairs:
        p = A[i]
        a = T[p]
        b = T[p + 1]
        j = i + 1
        while j < npairs and T[A[j]] == a and T[A[j] + 1] == b:
            j += 1
        k = j - i
        if admit <= k < nf:
            Fv[k, F_HEAD] += 1
        i = j
    cutoff = admit
    quota = 0
    acc = 0
    f = nf - 1
    while f >= admit:
        c = Fv[f, F_HEAD]
        if acc + c >= cap:
            cutoff = f
            quota = cap - acc
            break
        acc += c
        f -= 1
    if f < admit:
        cutoff = admit
        quota = Fv[admit, F_HEAD] if admit < nf else 0
    for f in range(nf):
        Fv[f, F_HEAD] = NULL
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
        if admit <= k < nf:
            if k > cutoff:
                take = True
            elif k == cutoff and quota > 0:
                take = True
                quota -= 1
        if take:
            idx = meta[M_USED]
            meta[M_USED] += 1
            B[idx, COL_A] = a
            B[idx, COL_B] = b
            B[idx, COL_P] = i
            B[idx, COL_L] = k
            B[idx, COL_F] = k
            B[idx, COL_PREV] = NULL
            head = Fv[k, F_HEAD]
            B[idx, COL_NEXT] = head
            if head != NULL:
                B[head, COL_PREV] = idx
            Fv[k, F_HEAD] = idx
            hash_put(H, meta[M_SEED], a, b, idx)
            meta[M_SIZE] += 1
            meta[M_INSERTED] += 1
        elif k > meta[M_FRONTIER]:
            meta[M_FRONTIER] = k
        i = j
    last = NULL
    for f in range(nf):
        if Fv[f, F_HEAD] != NULL:
            Fv[f, F_LOWER] = last
            if last != NULL:
                Fv[last, F_UPPER] = f
            else:
                meta[M_MINF] = f
            last = f
    meta[M_MAXF] = last


@njit(cache=True)
def lf_synchronize(cells, length, star, A, B, H, Fv, meta, lo, hi, oa, ob, debug):
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
                lf_set_frequency(B, Fv, meta, idx, k)
        elif k >= admit:
            lf_offer(B, H, Fv, meta, a, b, q, k)
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
            lf_set_frequency(B, Fv, meta, idx, 0)


class LfQueue:
    """Python view of a low-frequency queue.

    ``nf`` is the number of frequency rows; pairs at least that frequent are
    never admitted.  ``storage``/``fstorage`` may be preallocated word arrays
    of ``lf_words(capacity)`` and ``3 * nf`` words.
    """

    def __init__(self, capacity, nf, admit=2, seed=DEFAULT_SEED, storage=None, fstorage=None):
        self.capacity = int(capacity)
        if self.capacity < 1:
            raise ValueError("capacity must be positive")
        nf = max(int(nf), admit + 1)
        if storage is None:
            storage = np.zeros(lf_words(self.capacity), dtype=np.int64)
        if fstorage is None:
            fstorage = np.zeros(3 * nf, dtype=np.int64)
        self.B, self.H = lf_views(storage, self.capacity)
        self.Fv = fstorage[: 3 * nf].reshape(nf, 3)
        self.meta = new_meta(self.capacity, int(admit), int(seed), nf)
        lf_reset(self.B, self.H, self.Fv, self.meta)

    @classmethod
    def for_length(cls, n, epsilon=1.0, seed=DEFAULT_SEED):
        return cls(max(1, math.ceil(epsilon * n / LF_RECORD_TOTAL)), lf_rows(n), 2, seed)

    @classmethod
    def build(cls, text, tp, capacity, nf, seed=DEFAULT_SEED):
        q = cls(capacity, nf, 2, seed)
        lf_build(text.cells, tp.words, tp.used, q.B, q.H, q.Fv, q.meta)
        return q

    @property
    def frontier(self):
        return int(self.meta[M_FRONTIER])

    def size(self):
        return int(self.meta[M_SIZE])

    __len__ = size

    def _index(self, pair):
        a, b = as_pair(pair)
        return int(lf_find(self.B, self.H, self.meta, a, b))

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
        return self._pair_at(lf_max(self.Fv, self.meta))

    def min(self):
        return self._pair_at(lf_min(self.Fv, self.meta))

    @property
    def max_frequency(self):
        f = int(self.meta[M_MAXF])
        return None if f == NULL else f

    @property
    def min_frequency(self):
        f = int(self.meta[M_MINF])
        return None if f == NULL else f

    def insert(self, pair, P, L, F):
        a, b = as_pair(pair)
        if self.contains((a, b)):
            raise KeyError(f"pair {(a, b)} already queued")
        if self.size() >= self.capacity:
            raise OverflowError("queue is full")
        if not 0 <= F < self.Fv.shape[0]:
            raise ValueError(f"frequency {F} outside the frequency vector")
        lf_insert(self.B, self.H, self.Fv, self.meta, a, b, int(P), int(L), int(F))

    def remove(self, pair):
        a, b = as_pair(pair)
        return bool(lf_remove(self.B, self.H, self.Fv, self.meta, a, b))

    def decrease(self, pair, keep=False):
        a, b = as_pair(pair)
        lf_decrease(self.B, self.H, self.Fv, self.meta, a, b, keep)

    def synchronize(self, pair, text, tp, debug=False):
        entry = self.get(pair)
        if entry is None:
            raise KeyError(f"pair {pair} is not queued")
        P, L, _ = entry
        a, b = as_pair(pair)
        lf_synchronize(text.cells, text.length, text.star, tp.words, self.B, self.H,
                       self.Fv, self.meta, P, P + L, a, b, debug)

    def bucket(self, f):
        """Pairs currently in the bucket of frequency ``f``, head first."""
        out = []
        idx = int(self.Fv[f, F_HEAD])
        while idx != NULL:
            out.append((int(self.B[idx, COL_A]), int(self.B[idx, COL_B])))
            idx = int(self.B[idx, COL_NEXT])
        return out

    def frequencies(self):
        """Non-empty frequencies from the chain, ascending."""
        out = []
        f = int(self.meta[M_MINF])
        while f != NULL:
            out.append(f)
            f = int(self.Fv[f, F_UPPER])
        return out

    def entries(self):
        out = {}
        for i in range(int(self.meta[M_USED])):
            row = self.B[i]
            if row[COL_A] != NULL:
                out[(int(row[COL_A]), int(row[COL_B]))] = (int(row[COL_P]), int(row[COL_L]), int(row[COL_F]))
        return out
