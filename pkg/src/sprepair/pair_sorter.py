"""Sorting text positions by the pair of symbols starting there.

``sort_pairs`` fills a position array of ``n`` words in phases: each phase
expands the next third of the remaining pairs into 3-word keys
``(a, b, position)`` occupying the free tail of the array, sorts them in
place, and squeezes them back to bare positions.  The sorted segments are
then merged right to left with an in-place rotation merge.  Apart from the
array itself only a 32-word digit table and O(1) locals are used.

``sort_position_range`` reorders a slice of an existing position array over
a text that still contains blank runs.  It uses a three-way quicksort on
pair keys read from the text on demand: such slices usually hold only a few
distinct pairs.
"""
import numpy as np
from numba import njit

from .text_buffer import END, is_blank, next_nonblank

DIGIT_BITS = 4
RADIX = 1 << DIGIT_BITS
SCRATCH_WORDS = 2 * RADIX
SMALL_SORT = 24


# -- 3-word records -------------------------------------------------------


@njit(cache=True, inline="always")
def _rec_less(A, i, j):
    if A[i] != A[j]:
        return A[i] < A[j]
    if A[i + 1] != A[j + 1]:
        return A[i + 1] < A[j + 1]
    return A[i + 2] < A[j + 2]


@njit(cache=True, inline="always")
def _rec_swap(A, i, j):
    for k in range(3):
        t = A[i + k]
        A[i + k] = A[j + k]
        A[j + k] = t


@njit(cache=True)
def _rec_insertion_sort(A, base, lo, hi):
    for i in range(lo + 1, hi):
        j = i
        while j > lo and _rec_less(A, base + 3 * j, base + 3 * (j - 1)):
            _rec_swap(A, base + 3 * j, base + 3 * (j - 1))
            j -= 1


@njit(cache=True, inline="always")
def _digit(A, rec, d, per_word):
    w = d // per_word
    shift = (per_word - 1 - d % per_word) * DIGIT_BITS
    return (A[rec + w] >> shift) & (RADIX - 1)


@njit(cache=True, inline="always")
def _same_prefix(A, r1, r2, d, per_word):
    """True if records agree on all digits before digit ``d``."""
    w = d // per_word
    for k in range(w):
        if A[r1 + k] != A[r2 + k]:
            return False
    shift = (per_word - d % per_word) * DIGIT_BITS
    if shift >= 63:
        return True
    return (A[r1 + w] >> shift) == (A[r2 + w] >> shift)


@njit(cache=True)
def radix_sort_records(A, base, count, value_bits, scratch):
    """In-place MSD radix sort of ``count`` 3-word records at ``A[base:]``.

    Digits are processed level by level; group borders at each level are
    found by comparing the already-sorted prefix of neighbouring records, so
    no recursion stack is needed.  ``scratch`` holds ``2 * RADIX`` words.
    """
    if count <= SMALL_SORT:
        _rec_insertion_sort(A, base, 0, count)
        return
    per_word = max(1, (value_bits + DIGIT_BITS - 1) // DIGIT_BITS)
    heads = scratch[:RADIX]
    ends = scratch[RADIX:2 * RADIX]
    for d in range(3 * per_word):
        split = False
        g = 0
        while g < count:
            h = g + 1
            while h < count and _same_prefix(A, base + 3 * g, base + 3 * h, d, per_word):
                h += 1
            size = h - g
            if size <= 1:
                pass
            elif size <= SMALL_SORT:
                # fully sorted now; later levels find nothing to move
                _rec_insertion_sort(A, base, g, h)
            else:
                split = True
                for k in range(RADIX):
                    ends[k] = 0
                for i in range(g, h):
                    ends[_digit(A, base + 3 * i, d, per_word)] += 1
                acc = g
                for k in range(RADIX):
                    heads[k] = acc
                    acc += ends[k]
                    ends[k] = acc
                for k in range(RADIX):
                    while heads[k] < ends[k]:
                        i = heads[k]
                        dk = _digit(A, base + 3 * i, d, per_word)
                        if dk == k:
                            heads[k] += 1
                        else:
                            _rec_swap(A, base + 3 * i, base + 3 * heads[dk])
                            heads[dk] += 1
            g = h
        if not split:
            break


# -- positions keyed by the compacted text --------------------------------


@njit(cache=True, inline="always")
def _pos_less(T, p, q):
    if T[p] != T[q]:
        return T[p] < T[q]
    if T[p + 1] != T[q + 1]:
        return T[p + 1] < T[q + 1]
    return p < q


@njit(cache=True)
def _reverse(A, lo, hi):
    hi -= 1
    while lo < hi:
        t = A[lo]
        A[lo] = A[hi]
        A[hi] = t
        lo += 1
        hi -= 1


@njit(cache=True)
def _rotate(A, lo, mid, hi):
    _reverse(A, lo, mid)
    _reverse(A, mid, hi)
    _reverse(A, lo, hi)


@njit(cache=True)
def _symmerge(T, A, a, m, b):
    """Merge sorted ``A[a:m]`` and ``A[m:b]`` in place by rotations."""
    if m - a == 1:
        lo, hi = m, b
        while lo < hi:
            h = (lo + hi) // 2
            if _pos_less(T, A[h], A[a]):
                lo = h + 1
            else:
                hi = h
        t = A[a]
        for k in range(a, lo - 1):
            A[k] = A[k + 1]
        A[lo - 1] = t
        return
    if b - m == 1:
        lo, hi = a, m
        while lo < hi:
            h = (lo + hi) // 2
            if not _pos_less(T, A[m], A[h]):
                lo = h + 1
            else:
                hi = h
        t = A[m]
        for k in range(m, lo, -1):
            A[k] = A[k - 1]
        A[lo] = t
        return
    mid = (a + b) // 2
    n = mid + m
    if m > mid:
        start = n - b
        r = mid
    else:
        start = a
        r = m
    p = n - 1
    while start < r:
        c = (start + r) // 2
        if not _pos_less(T, A[p - c], A[c]):
            start = c + 1
        else:
            r = c
    end = n - start
    if start < m < end:
        _rotate(A, start, m, end)
    if a < start < mid:
        _symmerge(T, A, a, start, mid)
    if mid < end < b:
        _symmerge(T, A, mid, end, b)


@njit(cache=True)
def _run_start(T, A, end):
    i = end - 1
    while i > 0 and _pos_less(T, A[i - 1], A[i]):
        i -= 1
    return i


@njit(cache=True)
def sort_pairs_kernel(T, m, A, scratch, value_bits, phases):
    """Sort positions ``0..m-2`` of the blank-free text ``T`` into ``A``.

    ``phases[0]`` receives the number of phases; ``phases[1:]`` (if room)
    the number of pairs handled by each.  Returns the number of pairs.
    """
    npairs = m - 1
    if npairs <= 0:
        phases[0] = 0
        return 0
    W = len(A)
    done = 0
    k = 0
    while done < npairs:
        rem = npairs - done
        s = min(rem, (W - done) // 3)
        if s <= 1:
            # fewer than three free words per remaining pair: sort bare positions
            for j in range(rem):
                A[done + j] = done + j
            for i in range(done + 1, npairs):
                j = i
                while j > done and _pos_less(T, A[j], A[j - 1]):
                    t = A[j]
                    A[j] = A[j - 1]
                    A[j - 1] = t
                    j -= 1
            s = rem
        else:
            for j in range(s):
                p = done + j
                A[done + 3 * j] = T[p]
                A[done + 3 * j + 1] = T[p + 1]
                A[done + 3 * j + 2] = p
            radix_sort_records(A, done, s, value_bits, scratch)
            for j in range(s):
                A[done + j] = A[done + 3 * j + 2]
        k += 1
        if k < len(phases):
            phases[k] = s
        done += s
    phases[0] = k
    end = npairs
    start = _run_start(T, A, end)
    while start > 0:
        left = _run_start(T, A, start)
        _symmerge(T, A, left, start, end)
        start = left
    return npairs


@njit(cache=True)
def max_cluster(T, A, npairs):
    best = 0
    i = 0
    while i < npairs:
        p = A[i]
        j = i + 1
        while j < npairs and T[A[j]] == T[p] and T[A[j] + 1] == T[p + 1]:
            j += 1
        if j - i > best:
            best = j - i
        i = j
    return best


@njit(cache=True)
def cluster_table(T, A, npairs):
    """Rows ``(a, b, count, first_index)`` for each maximal cluster."""
    out = np.empty((max(npairs, 1), 4), dtype=np.int64)
    c = 0
    i = 0
    while i < npairs:
        p = A[i]
        j = i + 1
        while j < npairs and T[A[j]] == T[p] and T[A[j] + 1] == T[p + 1]:
            j += 1
        out[c, 0] = T[p]
        out[c, 1] = T[p + 1]
        out[c, 2] = j - i
        out[c, 3] = i
        c += 1
        i = j
    return out[:c]


# -- ranges over a text with blanks ---------------------------------------


@njit(cache=True, inline="always")
def range_key_less(cells, length, star, p, q):
    a1 = cells[p]
    a2 = cells[q]
    if a1 != a2:
        return a1 < a2
    b1 = cells[next_nonblank(cells, length, star, p)]
    b2 = cells[next_nonblank(cells, length, star, q)]
    if b1 != b2:
        return b1 < b2
    return p < q


@njit(cache=True, inline="always")
def _pair_key(cells, length, star, p, limit):
    return cells[p] * limit + cells[next_nonblank(cells, length, star, p)]


@njit(cache=True)
def _range_quicksort(cells, length, star, A, lo, hi, limit):
    """Three-way quicksort of positions by pair code; equal pairs by position.

    Recurses into the smaller side only, so the stack stays logarithmic.
    """
    while hi - lo > 1:
        if hi - lo <= SMALL_SORT:
            for i in range(lo + 1, hi):
                j = i
                while j > lo and range_key_less(cells, length, star, A[j], A[j - 1]):
                    t = A[j]
                    A[j] = A[j - 1]
                    A[j - 1] = t
                    j -= 1
            return
        k1 = _pair_key(cells, length, star, A[lo], limit)
        k2 = _pair_key(cells, length, star, A[(lo + hi) // 2], limit)
        k3 = _pair_key(cells, length, star, A[hi - 1], limit)
        pivot = max(min(k1, k2), min(max(k1, k2), k3))
        lt = lo
        i = lo
        gt = hi
        while i < gt:
            k = _pair_key(cells, length, star, A[i], limit)
            if k < pivot:
                t = A[i]
                A[i] = A[lt]
                A[lt] = t
                lt += 1
                i += 1
            elif k > pivot:
                gt -= 1
                t = A[i]
                A[i] = A[gt]
                A[gt] = t
            else:
                i += 1
        A[lt:gt].sort()
        if lt - lo < hi - gt:
            _range_quicksort(cells, length, star, A, lo, lt, limit)
            lo = gt
        else:
            _range_quicksort(cells, length, star, A, gt, hi, limit)
            hi = lt


@njit(cache=True)
def sort_range_kernel(cells, length, star, A, lo, hi):
    """Move stale positions of ``A[lo:hi]`` to the end and sort the rest.

    A position is stale if it is blank or has no following symbol.  Valid
    positions are ordered by ``(pair, position)``; pair keys are read from the
    text on demand.  Returns the number of valid positions.
    """
    i = lo
    j = hi
    while i < j:
        p = A[i]
        if (0 <= p < length and not is_blank(cells, length, star, p)
                and next_nonblank(cells, length, star, p) != END):
            i += 1
        else:
            j -= 1
            A[i] = A[j]
            A[j] = p
    size = i - lo
    if size < 2:
        return size
    # skip the sort when already ordered (common right after a full sort)
    ordered = True
    for k in range(lo + 1, i):
        if not range_key_less(cells, length, star, A[k - 1], A[k]):
            ordered = False
            break
    if ordered:
        return size
    _range_quicksort(cells, length, star, A, lo, i, star + 2)
    return size


# -- wrappers -------------------------------------------------------------


def _value_bits(text, m):
    return max(int(text.code_limit) - 1, m, 1).bit_length()


class PositionArray:
    """Text positions clustered by pair; ``words`` is the backing arena."""

    def __init__(self, words, used=0, phase_sizes=()):
        self.words = words
        self.used = used
        self.phase_sizes = list(phase_sizes)

    def __len__(self):
        return self.used

    def positions(self):
        return [int(p) for p in self.words[: self.used]]


def _require_compacted(text):
    if text.live_count != text.length:
        raise ValueError("text must be compacted before sorting its pairs")


def sort_pairs(text, accountant=None, arena=None) -> PositionArray:
    """Cluster all positions of a compacted text by pair, position-ascending."""
    from .core import ArenaAccountant

    _require_compacted(text)
    accountant = accountant if accountant is not None else ArenaAccountant()
    if arena is None:
        arena = accountant.allocate("tp", text.n)
    scratch = accountant.allocate("radix", SCRATCH_WORDS)
    phases = np.zeros(128, dtype=np.int64)
    m = text.length
    npairs = sort_pairs_kernel(text.cells, m, arena, scratch, _value_bits(text, m), phases)
    accountant.release("radix")
    k = int(phases[0])
    return PositionArray(arena, int(npairs), phases[1 : 1 + min(k, 127)].tolist())


def sort_position_range(text, tp: PositionArray, lo: int, hi: int) -> int:
    """Partition stale positions of ``tp[lo:hi]`` to the end, sort the rest.

    Returns the length of the sorted valid prefix.
    """
    if not 0 <= lo <= hi <= len(tp.words):
        raise IndexError("range outside the position array")
    return int(sort_range_kernel(text.cells, text.length, text.star, tp.words, lo, hi))


def count_frequencies(tp: PositionArray, text):
    """Yield ``((a, b), count, first_index)`` per maximal cluster."""
    _require_compacted(text)
    for a, b, k, i in cluster_table(text.cells, tp.words, tp.used):
        yield (int(a), int(b)), int(k), int(i)


def highest_frequency(text, accountant=None) -> int:
    """Largest number of positions sharing one pair (overlaps counted)."""
    if text.length < 2:
        return 0
    tp = sort_pairs(text, accountant)
    return int(max_cluster(text.cells, tp.words, tp.used))
