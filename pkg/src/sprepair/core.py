"""Shared symbol, alphabet and grammar types plus the working-space accountant.

Symbols are plain integers.  Input bytes are remapped to dense codes
``[0, sigma)`` in first-occurrence order; every emitted rule takes the
next free code, so rule ``i`` owns code ``sigma + i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numba import njit

WORD = np.int64


class GrammarError(ValueError):
    """Raised for structurally invalid grammars (bad codes, cycles, truncation)."""


class SpaceBoundError(RuntimeError):
    """Raised when working allocations exceed the accountant's budget."""


class Rule(NamedTuple):
    lhs: int
    left: int
    right: int


@dataclass(frozen=True)
class AlphabetMap:
    """Bijection between the distinct input bytes and dense codes.

    ``dense_to_original[c]`` is the byte for dense code ``c``; unused bytes map
    to -1 in ``original_to_dense``.
    """

    dense_to_original: bytes
    n: int = 0

    @property
    def sigma(self) -> int:
        return len(self.dense_to_original)

    @property
    def original_to_dense(self) -> np.ndarray:
        table = np.full(256, -1, dtype=WORD)
        table[np.frombuffer(self.dense_to_original, dtype=np.uint8)] = np.arange(self.sigma)
        return table

    @property
    def fallback(self) -> bool:
        # two codes are reserved for the blank markers of the text buffer
        return self.sigma > self.n - 2


@dataclass
class Grammar:
    alphabet: AlphabetMap
    rules: list[Rule]
    final_sequence: np.ndarray
    original_length: int
    variant: str = "fast"
    stats: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.final_sequence = np.asarray(self.final_sequence, dtype=WORD)

    @property
    def sigma(self) -> int:
        return self.alphabet.sigma

    def __eq__(self, other):
        if not isinstance(other, Grammar):
            return NotImplemented
        return (
            self.alphabet.dense_to_original == other.alphabet.dense_to_original
            and [tuple(r) for r in self.rules] == [tuple(r) for r in other.rules]
            and np.array_equal(self.final_sequence, other.final_sequence)
            and self.original_length == other.original_length
        )


def remap_input(data) -> tuple[np.ndarray, AlphabetMap]:
    """Return ``(codes, alphabet)`` with codes assigned by first occurrence."""
    raw = np.frombuffer(bytes(data), dtype=np.uint8)
    if raw.size == 0:
        return np.zeros(0, dtype=WORD), AlphabetMap(b"", 0)
    values, first = np.unique(raw, return_index=True)
    order = values[np.argsort(first, kind="stable")]
    table = np.full(256, -1, dtype=WORD)
    table[order] = np.arange(order.size)
    return table[raw], AlphabetMap(order.tobytes(), int(raw.size))


def trivial_grammar(data, variant="fast") -> Grammar:
    codes, alphabet = remap_input(data)
    return Grammar(alphabet, [], codes, len(codes), variant)


def check_rules(sigma: int, rules) -> None:
    for i, (lhs, left, right) in enumerate(rules):
        if lhs != sigma + i:
            raise GrammarError(f"rule {i} has lhs {lhs}, expected {sigma + i}")
        if not (0 <= left < lhs and 0 <= right < lhs):
            raise GrammarError(f"rule {i} references undefined code")


@njit(cache=True)
def _expand_codes(sigma, left, right, seq, out_len):
    out = np.empty(out_len, dtype=np.int64)
    stack = np.empty(max(len(left), 1) + 1, dtype=np.int64)
    w = 0
    for s in seq:
        stack[0] = s
        top = 1
        while top > 0:
            top -= 1
            c = stack[top]
            if c < sigma:
                if w >= out_len:
                    return out, -1
                out[w] = c
                w += 1
            else:
                r = c - sigma
                stack[top] = right[r]
                stack[top + 1] = left[r]
                top += 2
    return out, w


def expand_codes(grammar: Grammar) -> np.ndarray:
    """Expand the final sequence to dense alphabet codes."""
    sigma = grammar.sigma
    check_rules(sigma, grammar.rules)
    d = len(grammar.rules)
    seq = grammar.final_sequence
    if seq.size and (seq.min() < 0 or seq.max() >= sigma + d):
        raise GrammarError("final sequence references undefined code")
    rules = np.asarray(grammar.rules, dtype=WORD).reshape(-1, 3)
    # depth of the explicit stack never exceeds rule count + 1 since rhs < lhs
    out, w = _expand_codes(sigma, rules[:, 1].copy(), rules[:, 2].copy(), seq, grammar.original_length)
    if w != grammar.original_length:
        raise GrammarError(f"expansion length mismatch (expected {grammar.original_length})")
    return out


def expand(grammar: Grammar) -> bytes:
    codes = expand_codes(grammar)
    table = np.frombuffer(grammar.alphabet.dense_to_original, dtype=np.uint8)
    return table[codes].tobytes()


@dataclass
class ArenaAccountant:
    """Counts words of working memory allocated on top of the input text.

    Every buffer the compressor needs (position array, queues, scratch) is
    obtained through :meth:`allocate`, so ``peak_words`` is the quantity the
    space bounds talk about.
    """

    budget_words: int | None = None
    current_words: int = 0
    peak_words: int = 0
    regions: dict = field(default_factory=dict)

    def allocate(self, label: str, words: int) -> np.ndarray:
        words = int(words)
        if label in self.regions:
            self.release(label)
        if self.budget_words is not None and self.current_words + words > self.budget_words:
            raise SpaceBoundError(
                f"allocating {words} words for {label!r} exceeds budget "
                f"({self.current_words} + {words} > {self.budget_words})"
            )
        buf = np.zeros(words, dtype=WORD)
        self.regions[label] = words
        self.current_words += words
        self.peak_words = max(self.peak_words, self.current_words)
        return buf

    def release(self, label: str) -> None:
        self.current_words -= self.regions.pop(label)

    def release_all(self) -> None:
        for label in list(self.regions):
            self.release(label)
