"""A short tour of sprepair, meant to be read top to bottom and run.

    python demos/walkthrough.py
"""
import io

import numpy as np

from sprepair import LfQueue, TextBuffer, compress, dumps, expand, loads, naive_repair, sort_pairs
from sprepair.grammar_io import decompress

# Compressing a word: every rule replaces one most frequent pair.
data = b"abracadabra"
g = compress(data)
letters = g.alphabet.dense_to_original.decode()
print("alphabet:", letters)


def show(code):
    return letters[code] if code < g.sigma else f"X{code - g.sigma}"


for r in g.rules:
    print(f"  {show(r.lhs)} -> {show(r.left)}{show(r.right)}")
print("final:", " ".join(show(c) for c in g.final_sequence))
print("expands back:", expand(g) == data)

# The reference implementation agrees on the rule count (ties may differ).
print("naive rules:", len(naive_repair(data).rules))

# The text buffer marks deleted cells in place.  Long gaps store their
# length at both ends so they can be skipped in one step.
t = TextBuffer.from_symbols(np.arange(14) % 3, code_limit=40)
for _ in range(11):
    t.replace_pair(1, 9)
print("cells:", t.cells.tolist())
print("after position 1 comes", t.next_nonblank(1))

# Positions sorted by the pair that starts there.
t = TextBuffer.from_symbols([0, 1, 0, 1, 0, 2], code_limit=20)
tp = sort_pairs(t)
print("sorted positions:", tp.positions())

# The bucketed queue used for rare pairs.
q = LfQueue.build(t, tp, capacity=4, nf=8)
print("queued:", q.entries(), "max:", q.max())

# Grammar files are plain little-endian records.
blob = dumps(compress(b"to be or not to be, that is the question"))
print("file bytes:", len(blob))
out = io.BytesIO()
decompress(io.BytesIO(blob), out)
print(out.getvalue().decode())
print("rules read back:", len(loads(blob).rules))
