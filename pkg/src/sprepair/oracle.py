"""Plain-list reference Re-Pair and a validator for rule streams.

Both work on an explicit Python list and recount every pair from scratch
each step, so they are slow but easy to trust.  Frequencies count
overlapping occurrences (``aaa`` has two ``aa``); replacement is greedy
left to right.
"""
from collections import Counter
from dataclasses import dataclass, field

from .core import Grammar, Rule, remap_input


def pair_counts(seq):
    return Counter(zip(seq, seq[1:]))


def replace_all(seq, pair, symbol):
    a, b = pair
    out = []
    i = 0
    n = len(seq)
    while i < n:
        if i + 1 < n and seq[i] == a and seq[i + 1] == b:
            out.append(symbol)
            i += 2
        else:
            out.append(seq[i])
            i += 1
    return out


def naive_repair(data, variant="fast") -> Grammar:
    """Re-Pair with ties broken towards the numerically smallest pair."""
    codes, alphabet = remap_input(data)
    seq = codes.tolist()
    rules = []
    X = alphabet.sigma
    while True:
        counts = pair_counts(seq)
        if not counts:
            break
        top = max(counts.values())
        if top < 2:
            break
        pair = min(p for p, k in counts.items() if k == top)
        rules.append(Rule(X, pair[0], pair[1]))
        seq = replace_all(seq, pair, X)
        X += 1
    return Grammar(alphabet, rules, seq, len(codes), variant)


@dataclass
class ReplayReport:
    rule_ok: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    residual_max: int = 0

    @property
    def ok(self):
        return not self.failures

    def __bool__(self):
        return self.ok


def replay_validate(data, rules) -> ReplayReport:
    """Replay ``rules`` on ``data`` checking each replaced pair was a most frequent one."""
    codes, alphabet = remap_input(data)
    seq = codes.tolist()
    report = ReplayReport()
    X = alphabet.sigma
    for i, rule in enumerate(rules):
        lhs, a, b = rule
        counts = pair_counts(seq)
        k = counts.get((a, b), 0)
        top = max(counts.values(), default=0)
        problems = []
        if lhs != X:
            problems.append(f"lhs {lhs}, expected {X}")
        if k < 2:
            problems.append(f"pair {(a, b)} occurs {k} time(s)")
        elif k != top:
            problems.append(f"pair {(a, b)} occurs {k} times but the maximum is {top}")
        report.rule_ok.append(not problems)
        if problems:
            report.failures.append((i, "; ".join(problems)))
        seq = replace_all(seq, (a, b), lhs)
        X += 1
    report.residual = seq
    report.residual_max = max(pair_counts(seq).values(), default=0)
    if report.residual_max >= 2:
        report.failures.append((len(rules), f"residual still has a pair occurring {report.residual_max} times"))
    return report
