"""Re-Pair grammar compression with working space close to the text size.

>>> from sprepair import compress, expand
>>> g = compress(b"abracadabra")
>>> len(g.rules), expand(g)
(3, b'abracadabra')
"""
from .core import (
    AlphabetMap, ArenaAccountant, Grammar, GrammarError, Rule, SpaceBoundError,
    expand, remap_input,
)
from .engine import EngineStats, bound_words, compress
from .grammar_io import decompress, dumps, loads, read_grammar, write_grammar
from .hf_queue import HfQueue
from .lf_queue import LfQueue
from .oracle import naive_repair, replay_validate
from .pair_sorter import sort_pairs, sort_position_range
from .text_buffer import TextBuffer

__all__ = [
    "AlphabetMap", "ArenaAccountant", "EngineStats", "Grammar", "GrammarError",
    "HfQueue", "LfQueue", "Rule", "SpaceBoundError", "TextBuffer", "bound_words",
    "compress", "decompress", "dumps", "expand", "loads", "naive_repair",
    "read_grammar", "remap_input", "replay_validate", "sort_pairs",
    "sort_position_range", "write_grammar",
]
