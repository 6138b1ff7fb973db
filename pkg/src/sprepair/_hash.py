"""Open-addressing hash from symbol pairs to small integers.

Rows of ``table`` are ``(a, b, value)``; ``a == -1`` marks an empty slot.
Collisions use linear probing and deletion shifts later entries back, so
the table never accumulates tombstones.
"""
import numpy as np
from numba import njit

EMPTY = -1
DEFAULT_SEED = 0x5EED

_M1 = np.uint64(0x9E3779B97F4A7C15)
_M2 = np.uint64(0xC2B2AE3D27D4EB4F)
_S = np.uint64(29)


@njit(cache=True, inline="always")
def home_slot(a, b, seed, nslots):
    x = (np.uint64(a) * _M1) ^ ((np.uint64(b) + np.uint64(seed)) * _M2)
    x ^= x >> _S
    x *= _M1
    return np.int64((x >> np.uint64(32)) % np.uint64(nslots))


@njit(cache=True)
def hash_clear(table):
    table[:, 0] = EMPTY


@njit(cache=True)
def hash_slot(table, seed, a, b):
    """Slot holding ``(a, b)``, or -1."""
    nslots = table.shape[0]
    i = home_slot(a, b, seed, nslots)
    while table[i, 0] != EMPTY:
        if table[i, 0] == a and table[i, 1] == b:
            return i
        i += 1
        if i == nslots:
            i = 0
    return -1


@njit(cache=True)
def hash_get(table, seed, a, b):
    i = hash_slot(table, seed, a, b)
    return -1 if i == -1 else table[i, 2]


@njit(cache=True)
def hash_put(table, seed, a, b, value):
    nslots = table.shape[0]
    i = home_slot(a, b, seed, nslots)
    while table[i, 0] != EMPTY:
        if table[i, 0] == a and table[i, 1] == b:
            break
        i += 1
        if i == nslots:
            i = 0
    table[i, 0] = a
    table[i, 1] = b
    table[i, 2] = value


@njit(cache=True)
def hash_delete(table, seed, a, b):
    nslots = table.shape[0]
    i = hash_slot(table, seed, a, b)
    if i == -1:
        return False
    j = i
    while True:
        j += 1
        if j == nslots:
            j = 0
        if table[j, 0] == EMPTY:
            break
        k = home_slot(table[j, 0], table[j, 1], seed, nslots)
        # move j back to the hole at i unless its home lies cyclically in (i, j]
        if i <= j:
            stays = i < k <= j
        else:
            stays = k > i or k <= j
        if not stays:
            table[i, 0] = table[j, 0]
            table[i, 1] = table[j, 1]
            table[i, 2] = table[j, 2]
            i = j
    table[i, 0] = EMPTY
    return True
