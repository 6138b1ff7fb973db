"""Command line front end.

Exit codes: 0 success, 1 usage, 2 I/O error, 3 verification failure,
4 working space over budget.
"""
import argparse
import json
import sys

from ._hash import DEFAULT_SEED
from .core import GrammarError, SpaceBoundError, expand
from .engine import VARIANTS, compress
from .grammar_io import decompress, dumps, file_size, read_grammar
from .oracle import replay_validate

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY, EXIT_SPACE = range(5)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _epsilon(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1], got {text}")
    return value


def _seed(text):
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")


def build_parser():
    p = _Parser(prog="sprepair", description="Re-Pair grammar compression in small working space.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compress", help="compress a file into a grammar file")
    c.add_argument("input")
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--variant", choices=VARIANTS, default="fast")
    c.add_argument("--epsilon", type=_epsilon, default=1.0)
    c.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    c.add_argument("--stats", choices=("json", "text"))

    d = sub.add_parser("decompress", help="expand a grammar file")
    d.add_argument("input")
    d.add_argument("-o", "--output", required=True)

    v = sub.add_parser("verify", help="compress, replay-check and round-trip a file")
    v.add_argument("input")
    v.add_argument("--max-n", type=int, default=4096,
                   help="replay-check only inputs up to this length (the check is quadratic)")
    v.add_argument("--variant", choices=VARIANTS, default="fast")
    v.add_argument("--epsilon", type=_epsilon, default=1.0)
    v.add_argument("--seed", type=_seed, default=DEFAULT_SEED)

    s = sub.add_parser("stats", help="summarize a grammar file without expanding it")
    s.add_argument("input")
    s.add_argument("--format", choices=("json", "text"), default="text")
    return p


def stats_record(grammar):
    st = grammar.stats
    return {
        "n": st.n,
        "sigma": st.sigma,
        "rules": len(grammar.rules),
        "final_len": len(grammar.final_sequence),
        "hf_rounds": st.hf_rounds,
        "lf_rounds": st.lf_rounds,
        "peak_words": st.peak_words,
        "bound_words": st.bound_words,
        "elapsed_ms": round(st.elapsed_ms, 3),
    }


def _print_record(record, fmt, out):
    if fmt == "json":
        out.write(json.dumps(record) + "\n")
    else:
        width = max(len(k) for k in record)
        for k, v in record.items():
            out.write(f"{k:<{width}}  {v}\n")


def _read(path):
    with open(path, "rb") as f:
        return f.read()


def cmd_compress(args, out):
    data = _read(args.input)
    g = compress(data, variant=args.variant, epsilon=args.epsilon, seed=args.seed)
    blob = dumps(g)
    with open(args.output, "wb") as f:
        f.write(blob)
    if g.stats.peak_words > g.stats.bound_words:
        sys.stderr.write(f"peak {g.stats.peak_words} words exceeds bound {g.stats.bound_words}\n")
        return EXIT_SPACE
    if args.stats:
        _print_record(stats_record(g), args.stats, out)
    return EXIT_OK


def cmd_decompress(args, out):
    with open(args.input, "rb") as src, open(args.output, "wb") as dst:
        decompress(src, dst)
    return EXIT_OK


def cmd_verify(args, out):
    data = _read(args.input)
    g = compress(data, variant=args.variant, epsilon=args.epsilon, seed=args.seed)
    ok = True
    if expand(g) != data:
        out.write("round-trip: FAIL\n")
        ok = False
    else:
        out.write("round-trip: ok\n")
    if len(data) <= args.max_n:
        report = replay_validate(data, g.rules)
        if report.ok:
            out.write(f"replay: ok ({len(g.rules)} rules)\n")
        else:
            ok = False
            for i, why in report.failures[:10]:
                out.write(f"replay: rule {i}: {why}\n")
    else:
        out.write(f"replay: skipped (n = {len(data)} > {args.max_n})\n")
    if g.stats.peak_words > g.stats.bound_words:
        out.write(f"space: FAIL ({g.stats.peak_words} > {g.stats.bound_words} words)\n")
        return EXIT_SPACE
    out.write(f"space: ok ({g.stats.peak_words} <= {g.stats.bound_words} words)\n")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_stats(args, out):
    with open(args.input, "rb") as f:
        g = read_grammar(f)
    record = {
        "n": g.original_length,
        "sigma": g.sigma,
        "rules": len(g.rules),
        "final_len": len(g.final_sequence),
        "variant": g.variant,
        "file_bytes": file_size(g),
    }
    _print_record(record, args.format, out)
    return EXIT_OK


COMMANDS = {
    "compress": cmd_compress,
    "decompress": cmd_decompress,
    "verify": cmd_verify,
    "stats": cmd_stats,
}


def main(argv=None, out=None):
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except SpaceBoundError as e:
        sys.stderr.write(f"space bound violated: {e}\n")
        return EXIT_SPACE
    except (OSError, GrammarError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
