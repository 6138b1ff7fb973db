import numpy as np

from sprepair._hash import hash_clear, hash_delete, hash_get, hash_put


def test_against_dict(rng):
    for seed in (0x5EED, 7):
        table = np.zeros((64, 3), dtype=np.int64)
        hash_clear(table)
        ref = {}
        for step in range(5000):
            a, b = (int(x) for x in rng.integers(0, 12, 2))
            if rng.random() < 0.5 and len(ref) < 32:
                hash_put(table, seed, a, b, step)
                ref[(a, b)] = step
            else:
                assert hash_delete(table, seed, a, b) == ((a, b) in ref)
                ref.pop((a, b), None)
            for (x, y), v in ref.items():
                assert hash_get(table, seed, x, y) == v
            assert (table[:, 0] != -1).sum() == len(ref)
        assert hash_get(table, seed, 99, 99) == -1
