"""Record and header layouts shared by the two pair queues and the engine.

Queue records live in an ``int64`` matrix ``B``; the first five columns are
common to both queues.  Scalar queue state is kept in a small header array
so the compiled kernels can share it without Python objects.
"""
import numpy as np

NULL = -1

# record columns
COL_A, COL_B, COL_P, COL_L, COL_F, COL_PREV, COL_NEXT = range(7)
HF_RECORD_WORDS = 5
LF_RECORD_WORDS = 7
HASH_ROW_WORDS = 3

# header slots
(
    M_SIZE,
    M_CAP,
    M_USED,
    M_FREE,
    M_ADMIT,
    M_SEED,
    M_MINIDX,
    M_MAXF,
    M_MINF,
    M_FRONTIER,
    M_NF,
    M_EVICTED,
    M_REJECTED,
    M_INSERTED,
    M_SYNC_WORK,
    M_SYNC_CALLS,
    M_MISMATCH,
    M_DUPLICATE,
) = range(18)
META_WORDS = 20


class QueueEmptyError(IndexError):
    """max()/min() on an empty queue."""


def new_meta(capacity, admit, seed, nf=0):
    meta = np.zeros(META_WORDS, dtype=np.int64)
    meta[M_CAP] = capacity
    meta[M_FREE] = NULL
    meta[M_ADMIT] = admit
    meta[M_SEED] = seed
    meta[M_MINIDX] = NULL
    meta[M_MAXF] = NULL
    meta[M_MINF] = NULL
    meta[M_NF] = nf
    return meta


def as_pair(pair):
    a, b = pair
    return int(a), int(b)
