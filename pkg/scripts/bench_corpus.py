"""Compare the baseline's oracle use with a schedule over the corpus and report n0 per class.

    python scripts/bench_corpus.py --schedule log:2,3 --n-max 12 --out-csv bench.csv
"""

import argparse
import csv
import sys
from collections import Counter

from kgcode.cli import CSV_HEADER, bench_rows, crossover
from kgcode.core import parse_schedule
from kgcode.corpus import CorpusSpec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--schedule", default="log:2,3")
    ap.add_argument("--size", type=int, default=200)
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--out-csv")
    args = ap.parse_args(argv)

    schedule = parse_schedule(args.schedule)
    spec = CorpusSpec(size=args.size)
    out = open(args.out_csv, "w", newline="", encoding="utf-8") if args.out_csv else sys.stdout
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["class_seed", *CSV_HEADER])
    n0s = Counter()
    for seed, cls in spec.classes():
        rows = bench_rows(schedule, cls, args.n_max)
        for row in rows:
            writer.writerow([seed, *row])
        n0 = crossover(rows)
        n0s[n0] += 1
        print(f"seed={seed} n0={n0} kucera_redundancy_max={max(r[4] for r in rows)}", file=sys.stderr)
    if out is not sys.stdout:
        out.close()
    print("n0 histogram: " + ", ".join(f"{k}:{v}" for k, v in sorted(n0s.items(), key=lambda kv: (kv[0] is None, kv[0] or 0))), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
