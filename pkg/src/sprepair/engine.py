"""Re-Pair driver: high-frequency rounds, then low-frequency rounds.

Each round sorts the text positions by pair, loads the most frequent pairs
into a bounded queue and drains it.  Draining repeatedly takes the most
frequent queued pair ``AB``, replaces its occurrences by a fresh symbol
``X`` and keeps the counts of the neighbouring pairs exact.  A pair whose
slice of the position array has become mostly stale (``F <= L/2``) is
re-sorted in place, which also discovers the new pairs ``xX`` and ``Xy``.

The queue only holds the most frequent pairs.  Whenever a pair that might
be more frequent than everything queued is left out, its frequency is
recorded as the queue's frontier; once the queue's maximum drops below the
frontier the round ends early and the next round re-sorts the text.
"""
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit

from ._hash import DEFAULT_SEED
from .core import ArenaAccountant, Grammar, Rule, remap_input, trivial_grammar
from .hf_queue import (
    hf_build, hf_capacity, hf_decrease, hf_find, hf_max, hf_remove_index,
    hf_reset, hf_synchronize, hf_threshold, hf_views, hf_words,
)
from .lf_queue import (
    LF_RECORD_TOTAL, lf_build, lf_decrease, lf_find, lf_max, lf_remove_index,
    lf_reset, lf_rows, lf_synchronize, lf_views, light_next_capacity,
)
from .pair_sorter import SCRATCH_WORDS, max_cluster, sort_pairs_kernel
from .queue_common import (
    COL_A, COL_B, COL_F, COL_L, COL_P, META_WORDS, M_DUPLICATE, M_EVICTED,
    M_FRONTIER, M_MISMATCH, M_REJECTED, M_SIZE, M_SYNC_CALLS, M_SYNC_WORK,
    M_USED, NULL, new_meta,
)
from .text_buffer import END, TextBuffer, is_blank, next_nonblank, prev_nonblank, replace_pair

VARIANTS = ("fast", "light")
HF, LF = 0, 1
DONE, FLUSH, FULL = 0, 1, 2
RULE_CHUNK = 512
SLACK_WORDS = 4096

# counters filled by the drain kernel
C_REPLACED, C_RULES, C_FLUSHES, C_VIOLATIONS = range(4)


def bound_words(n, variant="fast", epsilon=1.0):
    """Working-space budget in words for an input of ``n`` symbols."""
    extra = math.isqrt(n - 1) + 1 if n > 0 else 0
    if variant == "light":
        return n + extra + SLACK_WORDS
    return int(math.floor((1 + epsilon) * n)) + extra + SLACK_WORDS


def side_words(n):
    """Words shared by the high-frequency queue and the frequency vector."""
    return max(hf_words(hf_capacity(n)), 3 * lf_rows(n))


# -- queue dispatch (kind is HF or LF) ------------------------------------


@njit(cache=True)
def _q_find(kind, B, H, meta, a, b):
    if kind == HF:
        return hf_find(B, H, meta, a, b)
    return lf_find(B, H, meta, a, b)


@njit(cache=True)
def _q_max(kind, B, Fv, meta):
    if kind == HF:
        return hf_max(B, meta)
    return lf_max(Fv, meta)


@njit(cache=True)
def _q_remove_index(kind, B, H, Fv, meta, idx):
    if kind == HF:
        hf_remove_index(B, H, meta, idx)
    else:
        lf_remove_index(B, H, Fv, meta, idx)


@njit(cache=True)
def _q_decrease(kind, B, H, Fv, meta, a, b):
    if kind == HF:
        hf_decrease(B, H, meta, a, b, True)
    else:
        lf_decrease(B, H, Fv, meta, a, b, True)


@njit(cache=True)
def _q_synchronize(kind, cells, length, star, A, B, H, Fv, meta, lo, hi, oa, ob, debug):
    if kind == HF:
        hf_synchronize(cells, length, star, A, B, H, meta, lo, hi, oa, ob, debug)
    else:
        lf_synchronize(cells, length, star, A, B, H, Fv, meta, lo, hi, oa, ob, debug)


@njit(cache=True)
def _count_violations(B, meta):
    bad = 0
    for i in range(meta[M_USED]):
        if B[i, COL_A] != NULL and 2 * B[i, COL_F] <= B[i, COL_L]:
            bad += 1
    return bad


@njit(cache=True)
def _check_pair(kind, cells, length, star, A, B, H, Fv, meta, a, b, admit, debug):
    """Re-sort a queued pair's slice if mostly stale; drop it if too rare."""
    idx = _q_find(kind, B, H, meta, a, b)
    if idx == NULL:
        return
    if 2 * B[idx, COL_F] <= B[idx, COL_L]:
        lo = B[idx, COL_P]
        _q_synchronize(kind, cells, length, star, A, B, H, Fv, meta,
                       lo, lo + B[idx, COL_L], a, b, debug)
        idx = _q_find(kind, B, H, meta, a, b)
        if idx == NULL:
            return
    f = B[idx, COL_F]
    if f < admit:
        # anything still hidden in its slice is rarer than what is left
        hidden = B[idx, COL_L] - f
        if hidden > meta[M_FRONTIER]:
            meta[M_FRONTIER] = hidden
        _q_remove_index(kind, B, H, Fv, meta, idx)


@njit(cache=True)
def drain_kernel(cells, length, star, A, kind, B, H, Fv, meta, X, admit,
                 rules_out, counters, debug):
    """Run substitution rounds until the queue is exhausted or must be rebuilt.

    Returns ``(status, next_symbol, rules_written)``; ``status`` is DONE when
    no queued pair reaches ``admit``, FLUSH when a pair outside the queue may
    be more frequent, FULL when ``rules_out`` has no room left.
    """
    nr = 0
    while True:
        if nr == rules_out.shape[0]:
            return FULL, X, nr
        idx = _q_max(kind, B, Fv, meta)
        if idx == NULL or B[idx, COL_F] < admit:
            return DONE, X, nr
        if B[idx, COL_F] < meta[M_FRONTIER]:
            counters[C_FLUSHES] += 1
            return FLUSH, X, nr
        if debug:
            counters[C_VIOLATIONS] += _count_violations(B, meta)
        a = B[idx, COL_A]
        b = B[idx, COL_B]
        P = B[idx, COL_P]
        L = B[idx, COL_L]
        _q_remove_index(kind, B, H, Fv, meta, idx)
        rules_out[nr, 0] = a
        rules_out[nr, 1] = b
        nr += 1
        counters[C_RULES] += 1
        # pass 1: replace left to right, counting the pairs that disappear
        for q in range(P, P + L):
            i = A[q]
            if i >= length or cells[i] != a or is_blank(cells, length, star, i):
                continue
            j = next_nonblank(cells, length, star, i)
            if j == END or cells[j] != b:
                continue
            x = prev_nonblank(cells, length, star, i)
            y = next_nonblank(cells, length, star, j)
            if x != END:
                _q_decrease(kind, B, H, Fv, meta, cells[x], a)
            if y != END:
                _q_decrease(kind, B, H, Fv, meta, b, cells[y])
            replace_pair(cells, length, star, i, X)
            counters[C_REPLACED] += 1
        # pass 2: look at the pairs that used to flank each occurrence
        for q in range(P, P + L):
            i = A[q]
            if i >= length or cells[i] != X or is_blank(cells, length, star, i):
                continue
            x = prev_nonblank(cells, length, star, i)
            if x != END:
                cx = cells[x]
                if cx == X:
                    cx = b
                _check_pair(kind, cells, length, star, A, B, H, Fv, meta, cx, a, admit, debug)
            y = next_nonblank(cells, length, star, i)
            if y != END:
                cy = cells[y]
                if cy == X:
                    cy = a
                _check_pair(kind, cells, length, star, A, B, H, Fv, meta, b, cy, admit, debug)
        # new pairs starting with X all live in AB's slice
        _q_synchronize(kind, cells, length, star, A, B, H, Fv, meta, P, P + L, -1, -1, debug)
        X += 1


# -- context helpers ------------------------------------------------------


def get_context(text, i):
    """``(x, A, B, y)`` around the pair starting at ``i``; ``None`` past either end."""
    A_ = text.read(i)
    j = text.next_nonblank(i)
    if A_ is None or j is None:
        raise ValueError(f"no pair starts at position {i}")
    B_ = text.read(j)
    x = text.prev_nonblank(i)
    y = text.next_nonblank(j)
    return (None if x is None else text.read(x), A_, B_, None if y is None else text.read(y))


def get_left_context(text, i, rule):
    """Left context of a freshly written ``X`` with every ``X`` expanded to ``AB``.

    Returns the last three symbols of the expansion of ``text[prev] X``;
    ``x`` is ``None`` at the start of the text.
    """
    X, A_, B_ = rule
    if text.read(i) != X:
        raise ValueError(f"position {i} does not hold {X}")
    s = []
    p = text.prev_nonblank(i)
    if p is not None:
        s.append(text.read(p))
    s.append(X)
    out = []
    for c in s:
        out.extend((A_, B_) if c == X else (c,))
    out = out[-3:]
    if len(out) < 3:
        return (None, out[0], out[1])
    return tuple(out)


# -- driver ---------------------------------------------------------------


@dataclass
class EngineStats:
    n: int = 0
    sigma: int = 0
    variant: str = "fast"
    epsilon: float = 1.0
    rules: int = 0
    final_len: int = 0
    hf_rounds: int = 0
    lf_rounds: int = 0
    flushes: int = 0
    replacements: int = 0
    sync_calls: int = 0
    sync_work: int = 0
    tp_built: int = 0
    evictions: int = 0
    rejections: int = 0
    invariant_violations: int = 0
    count_mismatches: int = 0
    duplicate_offers: int = 0
    lf_capacities: list = field(default_factory=list)
    peak_words: int = 0
    bound_words: int = 0
    elapsed_ms: float = 0.0
    fallback: bool = False

    def as_dict(self):
        return asdict(self)


class _Run:
    """State of one compression; all buffers come from the accountant."""

    def __init__(self, codes, sigma, variant, epsilon, seed, debug, accountant, emit):
        self.n = n = len(codes)
        self.variant = variant
        self.epsilon = epsilon
        self.seed = seed
        self.debug = debug
        self.emit = emit
        self.acc = accountant
        self.text = TextBuffer(codes, code_limit=sigma + n + 2, live_count=n)
        self.X = sigma
        self.stats = EngineStats(n=n, sigma=sigma, variant=variant, epsilon=epsilon)
        light = variant == "light"
        self.arena = accountant.allocate("tp", n + LF_RECORD_TOTAL if light else n)
        self.side = accountant.allocate("side", side_words(n))
        self.scratch = accountant.allocate("radix", SCRATCH_WORDS)
        self.rules = accountant.allocate("rules", 2 * RULE_CHUNK).reshape(RULE_CHUNK, 2)
        self.meta = accountant.allocate("meta", META_WORDS)
        self.lf_store = None
        if not light:
            self.lf_cap = max(1, math.ceil(epsilon * n / LF_RECORD_TOTAL))
            self.lf_store = accountant.allocate("lf", LF_RECORD_TOTAL * self.lf_cap)
        self.counters = np.zeros(4, dtype=np.int64)
        self.phases = np.zeros(128, dtype=np.int64)
        self.npairs = 0
        self.sorted = False
        self.vbits = (sigma + n + 2).bit_length()

    def compact(self):
        before = self.text.length
        self.text.compact()
        return before - self.text.length

    def sort(self):
        t = self.text
        self.npairs = int(sort_pairs_kernel(t.cells, t.length, self.arena, self.scratch,
                                            self.vbits, self.phases))
        self.stats.tp_built += self.npairs
        self.sorted = True
        return int(max_cluster(t.cells, self.arena, self.npairs))

    def reset_meta(self, capacity, admit, nf=0):
        self.meta[:] = new_meta(capacity, admit, self.seed, nf)

    def drain(self, kind, B, H, Fv, admit):
        t = self.text
        while True:
            status, X, nr = drain_kernel(t.cells, t.length, t.star, self.arena, kind, B, H, Fv,
                                         self.meta, self.X, admit, self.rules, self.counters,
                                         self.debug)
            for k in range(nr):
                self.emit(Rule(self.X + k, int(self.rules[k, 0]), int(self.rules[k, 1])))
            self.X = int(X)
            if status != FULL:
                break
        m = self.meta
        s = self.stats
        s.sync_calls += int(m[M_SYNC_CALLS])
        s.sync_work += int(m[M_SYNC_WORK])
        s.evictions += int(m[M_EVICTED])
        s.rejections += int(m[M_REJECTED])
        s.count_mismatches += int(m[M_MISMATCH])
        s.duplicate_offers += int(m[M_DUPLICATE])
        self.sorted = False

    def high_frequency_phase(self):
        n = self.n
        admit = max(hf_threshold(n), 2)
        cap = hf_capacity(n)
        B, H = hf_views(self.side, cap)
        Fv = np.zeros((1, 3), dtype=np.int64)
        while True:
            self.compact()
            if self.sort() < admit:
                return
            self.reset_meta(cap, admit)
            hf_reset(B, H, self.meta)
            hf_build(self.text.cells, self.arena, self.npairs, B, H, self.meta)
            self.stats.hf_rounds += 1
            self.drain(HF, B, H, Fv, admit)

    def low_frequency_phase(self):
        n = self.n
        nf = lf_rows(n)
        Fv = self.side[: 3 * nf].reshape(nf, 3)
        entitled = 1
        pool = 0  # reclaimed words not yet turned into capacity
        while True:
            reclaimed = self.compact()
            if self.variant == "light" and self.stats.lf_rounds:
                pool += reclaimed
                entitled = light_next_capacity(entitled, pool)
                pool %= LF_RECORD_TOTAL
            if self.sorted:
                top = int(max_cluster(self.text.cells, self.arena, self.npairs))
            else:
                top = self.sort()
            if top < 2:
                return
            if self.variant == "light":
                # no point holding more slots than there are repeated pairs
                capacity = min(entitled, distinct_repeated_pairs(self.text.cells, self.arena, self.npairs))
                lo = self.npairs
                hi = lo + LF_RECORD_TOTAL * capacity
                if hi > len(self.arena):
                    raise AssertionError("light queue does not fit in the reclaimed arena")
                store = self.arena[lo:hi]
            else:
                capacity = self.lf_cap
                store = self.lf_store
            self.stats.lf_capacities.append(capacity)
            B, H = lf_views(store, capacity)
            self.reset_meta(capacity, 2, nf)
            lf_reset(B, H, Fv, self.meta)
            lf_build(self.text.cells, self.arena, self.npairs, B, H, Fv, self.meta)
            self.stats.lf_rounds += 1
            self.drain(LF, B, H, Fv, 2)

    def run(self):
        self.high_frequency_phase()
        self.low_frequency_phase()
        self.compact()
        c = self.counters
        s = self.stats
        s.replacements = int(c[C_REPLACED])
        s.rules = int(c[C_RULES])
        s.flushes = int(c[C_FLUSHES])
        s.invariant_violations = int(c[C_VIOLATIONS])
        s.final_len = self.text.length
        return self.text.cells[: self.text.length].copy()


@njit(cache=True)
def distinct_repeated_pairs(T, A, npairs):
    c = 0
    i = 0
    while i < npairs:
        p = A[i]
        j = i + 1
        while j < npairs and T[A[j]] == T[p] and T[A[j] + 1] == T[p + 1]:
            j += 1
        if j - i >= 2:
            c += 1
        i = j
    return max(c, 1)


def _check_options(variant, epsilon):
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if not (0 < epsilon <= 1):
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")


def compress(data, variant="fast", epsilon=1.0, seed=DEFAULT_SEED, rule_sink=None,
             debug=False, accountant=None) -> Grammar:
    """Re-Pair grammar of ``data`` (bytes-like).

    ``rule_sink`` receives each :class:`Rule` as soon as it is created.  The
    returned grammar carries an :class:`EngineStats` in ``grammar.stats``.
    Working memory is drawn from ``accountant``; by default one with the
    variant's budget, so exceeding it raises :class:`SpaceBoundError`.
    """
    _check_options(variant, epsilon)
    start = time.perf_counter()
    codes, alphabet = remap_input(data)
    n = len(codes)
    bound = bound_words(n, variant, epsilon)
    if accountant is None:
        accountant = ArenaAccountant(budget_words=bound)
    rules = []

    def emit(rule):
        rules.append(rule)
        if rule_sink is not None:
            rule_sink(rule)

    if n < 2:
        grammar = trivial_grammar(data, variant)
        stats = EngineStats(n=n, sigma=alphabet.sigma, variant=variant, epsilon=epsilon, final_len=n)
    elif alphabet.fallback:
        from .oracle import naive_repair
        grammar = naive_repair(data)
        grammar.variant = variant
        for rule in grammar.rules:
            if rule_sink is not None:
                rule_sink(rule)
        stats = EngineStats(n=n, sigma=alphabet.sigma, variant=variant, epsilon=epsilon,
                            rules=len(grammar.rules), final_len=len(grammar.final_sequence),
                            fallback=True)
    else:
        run = _Run(codes, alphabet.sigma, variant, epsilon, seed, debug, accountant, emit)
        final = run.run()
        accountant.release_all()
        grammar = Grammar(alphabet, rules, final, n, variant)
        stats = run.stats
    stats.peak_words = accountant.peak_words
    stats.bound_words = bound
    stats.elapsed_ms = (time.perf_counter() - start) * 1000.0
    grammar.stats = stats
    return grammar
