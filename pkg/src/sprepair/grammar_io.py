"""Binary grammar files and the streaming decompressor.

Layout, all integers little-endian::

    "RPSE"  version:u8  flags:u8  n:u64  sigma:u32  alphabet:sigma bytes
    d:u32   d x (left:u32, right:u32)
    seq_len:u64   seq_len x code:u32

Rule ``i`` defines code ``sigma + i``.  Flag bit 0 is set for the
space-light variant.
"""
import io
import struct

import numpy as np

from .core import AlphabetMap, Grammar, GrammarError, Rule, _expand_codes, check_rules

MAGIC = b"RPSE"
VERSION = 1
FLAG_LIGHT = 1
_HEAD = struct.Struct("<4sBBQI")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
HEADER_BYTES = _HEAD.size + _U32.size + _U64.size  # 30 fixed bytes
CODE_LIMIT = 1 << 32


def file_size(grammar):
    return HEADER_BYTES + grammar.sigma + 8 * len(grammar.rules) + 4 * len(grammar.final_sequence)


def write_grammar(grammar: Grammar, sink) -> None:
    """Serialize ``grammar`` to the binary stream ``sink``."""
    sigma = grammar.sigma
    d = len(grammar.rules)
    if grammar.original_length >= CODE_LIMIT or sigma + d >= CODE_LIMIT:
        raise GrammarError("grammar too large for 32-bit codes")
    check_rules(sigma, grammar.rules)
    flags = FLAG_LIGHT if grammar.variant == "light" else 0
    sink.write(_HEAD.pack(MAGIC, VERSION, flags, grammar.original_length, sigma))
    sink.write(grammar.alphabet.dense_to_original)
    sink.write(_U32.pack(d))
    rules = np.asarray([(r.left, r.right) for r in grammar.rules], dtype="<u4").reshape(-1, 2)
    sink.write(rules.tobytes())
    seq = np.asarray(grammar.final_sequence)
    sink.write(_U64.pack(len(seq)))
    sink.write(seq.astype("<u4").tobytes())


def dumps(grammar) -> bytes:
    buf = io.BytesIO()
    write_grammar(grammar, buf)
    return buf.getvalue()


def _read_exact(source, size, what):
    data = source.read(size)
    if len(data) != size:
        raise GrammarError(f"truncated file while reading {what}")
    return data


def read_grammar(source) -> Grammar:
    """Parse and validate a grammar from the binary stream ``source``."""
    magic, version, flags, n, sigma = _HEAD.unpack(_read_exact(source, _HEAD.size, "header"))
    if magic != MAGIC:
        raise GrammarError(f"bad magic {magic!r}")
    if version != VERSION:
        raise GrammarError(f"unsupported version {version}")
    alphabet = _read_exact(source, sigma, "alphabet")
    if len(set(alphabet)) != sigma:
        raise GrammarError("alphabet table repeats a byte")
    (d,) = _U32.unpack(_read_exact(source, 4, "rule count"))
    raw = np.frombuffer(_read_exact(source, 8 * d, "rules"), dtype="<u4").astype(np.int64).reshape(d, 2)
    rules = [Rule(sigma + i, int(a), int(b)) for i, (a, b) in enumerate(raw)]
    check_rules(sigma, rules)
    (m,) = _U64.unpack(_read_exact(source, 8, "sequence length"))
    seq = np.frombuffer(_read_exact(source, 4 * m, "final sequence"), dtype="<u4").astype(np.int64)
    if m and seq.max() >= sigma + d:
        raise GrammarError("final sequence references undefined code")
    if source.read(1):
        raise GrammarError("trailing bytes after final sequence")
    variant = "light" if flags & FLAG_LIGHT else "fast"
    return Grammar(AlphabetMap(alphabet, n), rules, seq, n, variant)


def loads(data) -> Grammar:
    return read_grammar(io.BytesIO(data))


def decompress(source, sink, chunk_symbols=1 << 12) -> int:
    """Expand the grammar file ``source`` into ``sink``; return bytes written.

    Final-sequence symbols are expanded a chunk at a time with an explicit
    stack, so memory beyond the grammar itself stays proportional to the
    chunk's output.
    """
    g = read_grammar(source)
    sigma = g.sigma
    rules = np.asarray([(r.left, r.right) for r in g.rules], dtype=np.int64).reshape(-1, 2)
    left = rules[:, 0].copy()
    right = rules[:, 1].copy()
    lengths = _symbol_lengths(sigma, left, right)
    table = np.frombuffer(g.alphabet.dense_to_original, dtype=np.uint8)
    seq = g.final_sequence
    total = int(lengths[seq].sum()) if len(seq) else 0
    if total != g.original_length:
        raise GrammarError(f"grammar expands to {total} bytes, header says {g.original_length}")
    written = 0
    for s in range(0, len(seq), chunk_symbols):
        part = seq[s : s + chunk_symbols]
        want = int(lengths[part].sum())
        out, w = _expand_codes(sigma, left, right, part, want)
        if w != want:
            raise GrammarError("expansion length mismatch")
        sink.write(table[out].tobytes())
        written += w
    return written


def _symbol_lengths(sigma, left, right):
    d = len(left)
    lengths = np.ones(sigma + d, dtype=np.int64)
    for i in range(d):
        lengths[sigma + i] = lengths[left[i]] + lengths[right[i]]
    return lengths
