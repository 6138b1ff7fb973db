"""Acceptance suite: one pass/fail line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v`` (a few minutes on one
core).  The lines are printed in the terminal summary; ``-s`` also shows them
as each test finishes.
"""
import importlib
import io
import math
import statistics
import sys
import time

import numpy as np
import pytest

import corpus
from sprepair import (
    ArenaAccountant, TextBuffer, compress, decompress, dumps, naive_repair,
    replay_validate, sort_pairs, sort_position_range,
)

VARIANTS = ("fast", "light")
EPSILONS = (0.1, 0.5, 1.0)
FUZZ_CASES = 10_000
REPLAY_CASES = 1_000
SORT_CASES = 1_000
LARGE_N = (10**5, 10**6)


def round_limit(n):
    return 65 * math.log(n) + 16 if n > 1 else 16


def through_file(g):
    out = io.BytesIO()
    decompress(io.BytesIO(dumps(g)), out)
    return out.getvalue()


@pytest.fixture(scope="module")
def fuzz_log():
    """Compress the fuzz corpus once (debug on) and keep what later criteria need."""
    rng = np.random.default_rng(20240901)
    log = {"cases": 0, "runs": 0, "bad_roundtrip": [], "violations": 0,
           "mismatches": 0, "rounds": []}
    for i in range(FUZZ_CASES):
        kind = corpus.KINDS[i % len(corpus.KINDS)]
        n = corpus.fuzz_length(rng)
        data = corpus.make(kind, rng, n)
        log["cases"] += 1
        for v, variant in enumerate(VARIANTS):
            eps = EPSILONS[(i + v) % len(EPSILONS)]
            g = compress(data, variant=variant, epsilon=eps, debug=True)
            log["runs"] += 1
            if through_file(g) != data:
                log["bad_roundtrip"].append((kind, n, variant, eps))
            log["violations"] += g.stats.invariant_violations
            log["mismatches"] += g.stats.count_mismatches
            if variant == "light":
                log["rounds"].append((n, g.stats.lf_rounds, kind))
    return log


@pytest.fixture(scope="module")
def large_runs():
    rng = np.random.default_rng(77)
    runs = []
    for n in LARGE_N:
        for kind in corpus.LARGE_KINDS:
            data = corpus.make(kind, rng, n)
            for eps in (0.25, 1.0):
                runs.append((kind, compress(data, variant="fast", epsilon=eps)))
            runs.append((kind, compress(data, variant="light")))
    return runs


def test_1_round_trip(fuzz_log, verdict):
    bad = fuzz_log["bad_roundtrip"]
    ok = verdict(1, not bad and fuzz_log["cases"] >= 10**4,
                 f"round-trip on {fuzz_log['cases']} inputs x both variants "
                 f"({fuzz_log['runs']} runs), {len(bad)} mismatches")
    assert ok, bad[:5]


def test_2_replay_correctness(verdict):
    rng = np.random.default_rng(512)
    failures = []
    counts = dict.fromkeys(VARIANTS, 0)
    rules = 0
    for i in range(REPLAY_CASES):
        n = int(rng.integers(0, 513))
        sigma = int(rng.integers(1, 9))
        shape = i % 3
        if shape == 0:
            syms = rng.integers(0, sigma, n)
        elif shape == 1:
            syms = np.resize(rng.integers(0, sigma, int(rng.integers(1, 24))), n)
        else:
            syms = rng.integers(0, sigma, n)
            syms[rng.random(n) < 0.5] = 0
        data = bytes((syms + 97).astype(np.uint8))
        for v, variant in enumerate(VARIANTS):
            g = compress(data, variant=variant, epsilon=EPSILONS[(i + v) % 3])
            report = replay_validate(data, g.rules)
            counts[variant] += 1
            rules += len(g.rules)
            if not report.ok:
                failures.append((variant, data, report.failures[:2]))
    ok = verdict(2, not failures and min(counts.values()) >= 10**3,
                 f"{sum(counts.values())} runs, {rules} rules replayed, {len(failures)} failing runs")
    assert ok, failures[:3]


def test_3_fast_space(large_runs, verdict):
    worst = 0.0
    over = []
    checked = 0
    for kind, g in large_runs:
        st = g.stats
        if st.variant != "fast":
            continue
        bound = math.floor((1 + st.epsilon) * st.n) + math.isqrt(st.n - 1) + 1 + 4096
        checked += 1
        worst = max(worst, st.peak_words / bound)
        if st.peak_words > bound:
            over.append((kind, st.n, st.epsilon, st.peak_words, bound))
    ok = verdict(3, not over, f"{checked} runs, n in {LARGE_N}, eps in (0.25, 1.0), "
                              f"max peak/bound {worst:.5f}")
    assert ok, over


def test_4_light_space(large_runs, verdict):
    worst = 0.0
    over = []
    checked = 0
    for kind, g in large_runs:
        st = g.stats
        if st.variant != "light":
            continue
        bound = st.n + math.isqrt(st.n - 1) + 1 + 4096
        checked += 1
        worst = max(worst, st.peak_words / bound)
        if st.peak_words > bound:
            over.append((kind, st.n, st.peak_words, bound))
    ok = verdict(4, not over, f"{checked} runs, max peak/bound {worst:.5f}")
    assert ok, over


def test_5_light_rounds(fuzz_log, large_runs, verdict):
    rounds = list(fuzz_log["rounds"])
    rounds += [(g.stats.n, g.stats.lf_rounds, kind) for kind, g in large_runs if g.stats.variant == "light"]
    over = [r for r in rounds if r[1] > round_limit(r[0])]
    worst = max(rounds, key=lambda r: r[1] / round_limit(r[0]))
    ok = verdict(5, not over, f"{len(rounds)} light runs, worst {worst[1]} rounds at n={worst[0]} "
                              f"({worst[2]}), limit {round_limit(worst[0]):.0f}")
    assert ok, over[:5]


def test_6_amortization_invariant(fuzz_log, verdict):
    ok = verdict(6, fuzz_log["violations"] == 0 and fuzz_log["mismatches"] == 0,
                 f"{fuzz_log['runs']} debug runs, {fuzz_log['violations']} invariant violations, "
                 f"{fuzz_log['mismatches']} count mismatches")
    assert ok


def _reference_pairs(cells, m):
    return np.lexsort((np.arange(m - 1), cells[1:m], cells[: m - 1]))


def _random_blanks(t, rng, rate):
    i = 0
    j = t.next_nonblank(i)
    fresh = t.code_limit - 3
    while j is not None:
        if rng.random() < rate:
            t.replace_pair(i, fresh)
            j = t.next_nonblank(i)
            if j is None:
                break
        i = j
        j = t.next_nonblank(i)


def _check_range(t, tp, rng):
    m = tp.used
    lo = int(rng.integers(0, m))
    hi = int(rng.integers(lo, m + 1))
    before = tp.words[lo:hi].copy()
    v = sort_position_range(t, tp, lo, hi)
    after = tp.words[lo:hi]
    if sorted(before.tolist()) != sorted(after.tolist()):
        return False
    live = t.decode_plain()
    pos = np.array([p for p, _ in live], dtype=np.int64)
    sym = np.array([s for _, s in live], dtype=np.int64)
    succ = dict(zip(pos[:-1].tolist(), range(len(pos) - 1)))
    valid = np.array([p for p in before.tolist() if p in succ], dtype=np.int64)
    if v != len(valid):
        return False
    if v == 0:
        return True
    k = np.array([succ[p] for p in valid.tolist()])
    order = np.lexsort((valid, sym[k + 1], sym[k]))
    return np.array_equal(after[:v], valid[order])


def test_7_sort_oracle(verdict):
    rng = np.random.default_rng(7)
    bad_pairs = bad_range = 0
    worst_extra = 0
    over = []
    for i in range(SORT_CASES):
        n = int(np.exp(rng.uniform(np.log(2), np.log(10**5 + 1))))
        if i == 0:
            n = 10**5
        sigma = int(rng.choice([1, 2, 4, 20, 256]))
        syms = rng.integers(0, sigma, n)
        t = TextBuffer.from_symbols(syms, code_limit=n + sigma + 2)
        acc = ArenaAccountant()
        tp = sort_pairs(t, acc)
        worst_extra = max(worst_extra, acc.peak_words - n)
        if acc.peak_words > n + 64:
            over.append((n, acc.peak_words))
        if not np.array_equal(tp.words[: tp.used], _reference_pairs(t.cells, n)):
            bad_pairs += 1
        if n >= 3:
            _random_blanks(t, rng, float(rng.uniform(0, 0.6)))
            if not _check_range(t, tp, rng):
                bad_range += 1
    ok = verdict(7, not (bad_pairs or bad_range or over),
                 f"{SORT_CASES} instances up to n=1e5, {bad_pairs} sort_pairs and {bad_range} "
                 f"range mismatches, peak extra words n{worst_extra:+d} (limit n+64)")
    assert ok, over[:3]


def _median_time(data, variant, runs=5):
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        compress(data, variant=variant, epsilon=1.0)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def test_8_near_linear_time(verdict):
    rng = np.random.default_rng(88)
    big = corpus.dna(rng, 1 << 21)
    small = big[: 1 << 20]
    compress(small[:5000], variant="fast")
    compress(small[:5000], variant="light")
    limits = {"fast": 2.6, "light": 3.0}
    ratios = {}
    for variant in VARIANTS:
        t1 = _median_time(small, variant)
        t2 = _median_time(big, variant)
        ratios[variant] = (t2 / t1, t1, t2)
    ok = all(ratios[v][0] <= limits[v] for v in VARIANTS)
    detail = ", ".join(f"{v} t(2^21)/t(2^20) = {r:.2f} ({a:.2f}s -> {b:.2f}s, limit {limits[v]})"
                       for v, (r, a, b) in ratios.items())
    verdict(8, ok, detail)
    assert ok


def _prose():
    names = ("argparse", "collections", "json", "typing", "unittest", "logging", "email",
             "asyncio", "decimal", "http.client", "csv", "pathlib", "subprocess", "threading",
             "socket", "re", "os", "random", "statistics", "datetime")
    return b"".join((importlib.import_module(m).__doc__ or "").encode() for m in names)


def test_9_grammar_quality(verdict):
    rng = np.random.default_rng(9)
    prose = _prose()
    samples = [("prose", prose[:4096]), ("prose", prose[4096:8192]), ("prose", prose[8192:10240])]
    samples += [("wiki", corpus.wiki(rng, n)) for n in (1024, 4096, 4096)]
    samples += [("dna", corpus.dna(rng, n)) for n in (1024, 2048, 4096, 4096)]
    worst = (0.0, None)
    bad = []
    for name, data in samples:
        want = len(naive_repair(data).rules)
        for variant in VARIANTS:
            got = len(compress(data, variant=variant).rules)
            dev = abs(got - want) / want
            if dev > worst[0]:
                worst = (dev, f"{name} n={len(data)} {variant}: {got} vs {want}")
            if dev > 0.10:
                bad.append((name, len(data), variant, got, want))
    ok = verdict(9, not bad, f"{len(samples)} samples x 2 variants, worst deviation "
                             f"{worst[0]:.1%} ({worst[1]})")
    assert ok, bad


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
