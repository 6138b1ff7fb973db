"""Rewritable text with constant-time skipping of blank runs.

Two codes at the top of the code space are reserved: ``star = limit - 2``
delimits run lengths and ``blank = limit - 1`` fills deleted cells.  A run of
``r < 10`` deleted cells is all ``blank``; a longer run starts and ends with
the five cells ``blank star (r-1) star blank``.  A cell holds a blank iff its
value is ``>= star``, or it is flanked by two ``star`` cells (a length field).

The kernels below take ``(cells, length, star)`` and are shared with the
compression engine; :class:`TextBuffer` wraps them for direct use.
"""
import numpy as np
from numba import njit

END = -1
LONG_RUN = 10


@njit(cache=True, inline="always")
def is_blank(cells, length, star, j):
    v = cells[j]
    if v >= star:
        return True
    return 0 < j < length - 1 and cells[j - 1] == star and cells[j + 1] == star


@njit(cache=True)
def _scan_next(cells, length, star, pos):
    q = pos + 1
    while q < length and is_blank(cells, length, star, q):
        q += 1
    return q if q < length else END


@njit(cache=True)
def next_nonblank(cells, length, star, pos):
    """Next non-blank position after ``pos``; ``END`` if none."""
    if is_blank(cells, length, star, pos):
        # only run heads are O(1); inside a run fall back to a scan
        return _scan_next(cells, length, star, pos)
    blank = star + 1
    q = pos + 1
    if q >= length:
        return END
    if cells[q] != blank:
        return q
    if q + 1 < length and cells[q + 1] == star:
        q += cells[q + 2] + 1
    else:
        q += 1
        while q < length and cells[q] == blank:
            q += 1
    return q if q < length else END


@njit(cache=True)
def prev_nonblank(cells, length, star, pos):
    """Previous non-blank position before ``pos``; ``END`` (-1) if none."""
    blank = star + 1
    if pos < length and is_blank(cells, length, star, pos):
        q = pos - 1
        while q >= 0 and is_blank(cells, length, star, q):
            q -= 1
        return q
    q = pos - 1
    if q < 0:
        return END
    if cells[q] != blank:
        return q
    if q >= 1 and cells[q - 1] == star:
        q -= cells[q - 2] + 1
    else:
        q -= 1
        while q >= 0 and cells[q] == blank:
            q -= 1
    return q


@njit(cache=True, inline="always")
def _run_at(cells, start, r, star):
    blank = star + 1
    if r < LONG_RUN:
        return
    end = start + r - 1
    cells[start] = blank
    cells[start + 1] = star
    cells[start + 2] = r - 1
    cells[start + 3] = star
    cells[start + 4] = blank
    cells[end - 4] = blank
    cells[end - 3] = star
    cells[end - 2] = r - 1
    cells[end - 1] = star
    cells[end] = blank


@njit(cache=True)
def replace_pair(cells, length, star, pos_a, symbol):
    """Write ``symbol`` at ``pos_a`` and blank out the next symbol.

    The run left of the blanked cell, the cell itself and the run right of it
    are merged into one well-formed run with a constant number of cell
    operations.  Returns the blanked position.
    """
    blank = star + 1
    pos_b = next_nonblank(cells, length, star, pos_a)
    cells[pos_a] = symbol
    left = pos_b - pos_a - 1
    right = 0
    rs = pos_b + 1
    if rs < length and cells[rs] == blank:
        if rs + 1 < length and cells[rs + 1] == star:
            right = cells[rs + 2] + 1
        else:
            right = 1
            while rs + right < length and cells[rs + right] == blank:
                right += 1
    if left >= LONG_RUN:
        for k in range(pos_b - 5, pos_b):
            cells[k] = blank
    if right >= LONG_RUN:
        for k in range(rs, rs + 5):
            cells[k] = blank
    cells[pos_b] = blank
    _run_at(cells, pos_a + 1, left + 1 + right, star)
    return pos_b


@njit(cache=True)
def compact(cells, length, star):
    """Shift all symbols to a prefix, preserving order; return the new length."""
    blank = star + 1
    w = 0
    p = 0
    while p < length:
        v = cells[p]
        if v < star:
            cells[w] = v
            w += 1
            p += 1
        elif v == blank and p + 1 < length and cells[p + 1] == star:
            p += cells[p + 2] + 1
        else:
            p += 1
    return w


@njit(cache=True)
def check_encoding(cells, length, star):
    """Return the first malformed position, or -1 if every run is well formed."""
    blank = star + 1
    p = 0
    while p < length:
        if cells[p] < star:
            p += 1
            continue
        if cells[p] != blank:
            return p
        if p + 1 < length and cells[p + 1] == star:
            if p + 2 >= length:
                return p
            r = cells[p + 2] + 1
            end = p + r - 1
            if r < LONG_RUN or end >= length:
                return p
            if cells[p + 3] != star or cells[p + 4] != blank:
                return p
            if cells[end] != blank or cells[end - 1] != star or cells[end - 2] != r - 1:
                return end
            if cells[end - 3] != star or cells[end - 4] != blank:
                return end
            for k in range(p + 5, end - 4):
                if cells[k] != blank:
                    return k
            if end + 1 < length and cells[end + 1] >= star:
                return end + 1
            p = end + 1
        else:
            r = 0
            while p + r < length and cells[p + r] == blank:
                r += 1
            if r >= LONG_RUN:
                return p
            if p + r < length and cells[p + r] >= star:
                return p + r
            p += r
    return -1


class TextBuffer:
    """The text being compressed, rewritten in place.

    ``code_limit`` fixes the reserved codes (``code_limit - 2`` and
    ``code_limit - 1``); it defaults to the buffer size ``n``.
    """

    def __init__(self, cells, code_limit=None, live_count=None):
        self.cells = np.ascontiguousarray(cells, dtype=np.int64)
        self.n = len(self.cells)
        self.length = self.n
        self.code_limit = self.n if code_limit is None else int(code_limit)
        self.star = self.code_limit - 2
        self.blank = self.code_limit - 1
        if live_count is None:
            live_count = sum(1 for _ in self._iter_live())
        self.live_count = live_count
        self.reclaimed = 0

    @classmethod
    def from_symbols(cls, symbols, code_limit=None):
        cells = np.asarray(symbols, dtype=np.int64)
        buf = cls(cells, code_limit, live_count=len(cells))
        if len(cells) and cells.max() >= buf.star:
            raise ValueError("symbol collides with a reserved blank code")
        return buf

    def _check(self, pos):
        if not 0 <= pos < self.length:
            raise IndexError(f"position {pos} outside text of length {self.length}")

    def is_blank(self, pos):
        self._check(pos)
        return bool(is_blank(self.cells, self.length, self.star, pos))

    def read(self, pos):
        """Symbol at ``pos``, or ``None`` for a blank cell."""
        if self.is_blank(pos):
            return None
        return int(self.cells[pos])

    def next_nonblank(self, pos):
        self._check(pos)
        q = next_nonblank(self.cells, self.length, self.star, pos)
        return None if q == END else int(q)

    def prev_nonblank(self, pos):
        self._check(pos)
        q = prev_nonblank(self.cells, self.length, self.star, pos)
        return None if q == END else int(q)

    def replace_pair(self, pos_a, symbol):
        if self.read(pos_a) is None or self.next_nonblank(pos_a) is None:
            raise RuntimeError(f"no pair starts at position {pos_a}")
        if not 0 <= symbol < self.star:
            raise ValueError(f"symbol {symbol} outside the code space")
        pos_b = replace_pair(self.cells, self.length, self.star, pos_a, symbol)
        self.live_count -= 1
        return int(pos_b)

    def compact(self):
        new_length = compact(self.cells, self.length, self.star)
        self.reclaimed += self.length - new_length
        self.length = new_length
        self.live_count = new_length
        return new_length

    def _iter_live(self):
        p = 0
        if self.length == 0:
            return
        if is_blank(self.cells, self.length, self.star, 0):
            p = next_nonblank(self.cells, self.length, self.star, 0)
        while p != END:
            yield p
            p = next_nonblank(self.cells, self.length, self.star, p)

    def decode_plain(self):
        return [(p, int(self.cells[p])) for p in self._iter_live()]

    def symbols(self):
        return [s for _, s in self.decode_plain()]

    def validate(self):
        bad = check_encoding(self.cells, self.length, self.star)
        if bad != -1:
            raise AssertionError(f"malformed blank run at position {bad}")
