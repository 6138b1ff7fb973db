"""Deterministic input generators shared by the heavier tests."""
import numpy as np

KINDS = ("random", "repetitive", "periodic", "single", "text", "dna")
LARGE_KINDS = KINDS + ("bytes", "wiki")

_WORDS = (
    "the of and to in a is that for it as was with be by on not he this are or "
    "his from at which but have an they you were her she there been one all "
    "would their we him has when who will more if no out so said what up its "
    "about into than them can only other new some could time these two may "
    "then do first any my now such like our over man me even most made after "
    "also did many before must through back years where much your way well "
    "down should because each just those people how too little state good very "
    "make world still own see men work long get here between both life being "
    "under never day same another know while last might us great old year off "
    "come since against go came right used take three"
).split()


def dna(rng, n):
    return np.frombuffer(b"ACGT", np.uint8)[rng.integers(0, 4, n)].tobytes()


def text(rng, n):
    """Word salad with punctuation, a rough stand-in for natural language."""
    vocab = np.array(_WORDS)
    # Zipf-like word choice
    ranks = (rng.zipf(1.3, n // 3 + 8) - 1) % len(vocab)
    out = []
    size = 0
    for i, r in enumerate(ranks):
        w = vocab[r]
        if i % 13 == 0:
            w = w.capitalize()
        out.append(w)
        size += len(w) + 1
        if i % 11 == 10:
            out[-1] += ","
        if i % 17 == 16:
            out[-1] += ".\n"
        if size >= n:
            break
    return " ".join(out).encode()[:n].ljust(n, b" ")


def periodic(rng, n):
    period = rng.integers(0, 256, int(rng.integers(1, 64)), dtype=np.uint8)
    return np.resize(period, n).tobytes()


def repetitive(rng, n):
    """Copies of earlier material with a few point mutations."""
    if n == 0:
        return b""
    sigma = int(rng.integers(2, 30))
    buf = bytearray(rng.integers(97, 97 + sigma, min(n, 64), dtype=np.uint8).tobytes())
    while len(buf) < n:
        start = int(rng.integers(0, len(buf)))
        length = int(rng.integers(1, 256))
        piece = bytearray(buf[start : start + length])
        for _ in range(int(rng.integers(0, 3))):
            if piece:
                piece[int(rng.integers(0, len(piece)))] = int(rng.integers(97, 97 + sigma))
        buf += piece
    return bytes(buf[:n])


def random_input(rng, n):
    sigma = int(rng.choice([1, 2, 4, 16, 256]))
    return rng.integers(0, sigma, n, dtype=np.uint8).tobytes()


def byte_noise(rng, n):
    return rng.integers(0, 256, n, dtype=np.uint8).tobytes()


def wiki(rng, n):
    """Word salad wrapped in wiki-dump markup."""
    parts = [b"<page>\n<title>"]
    size = 0
    while size < n:
        words = text(rng, int(rng.integers(40, 400))).split()
        body = []
        for i, w in enumerate(words):
            if i % 9 == 4:
                w = b"[[" + w + b"]]"
            elif i % 23 == 7:
                w = b"'''" + w + b"'''"
            body.append(w)
        chunk = (words[0] + b"</title>\n<text>== " + words[-1] + b" ==\n" + b" ".join(body)
                 + b"\n</text>\n</page>\n<page>\n<title>")
        parts.append(chunk)
        size += len(chunk)
    return b"".join(parts)[:n]


def single(rng, n):
    return bytes([int(rng.integers(0, 256))]) * n


_MAKERS = {
    "random": random_input,
    "repetitive": repetitive,
    "periodic": periodic,
    "single": single,
    "text": text,
    "dna": dna,
    "bytes": byte_noise,
    "wiki": wiki,
}


def make(kind, rng, n):
    return _MAKERS[kind](rng, n)


def fuzz_length(rng, top=1 << 16):
    """Log-uniform length in [0, top]."""
    return min(top, int(np.exp(rng.uniform(0, np.log(top + 1)))) - 1 + int(rng.integers(0, 2)))
